//! Core data model and span algebra for cross-lingual named-entity
//! recognition with machine-translation in the loop.
//!
//! The crate covers the pure, IO-free half of a translation-and-fusion
//! pipeline:
//!
//! * [`label`] — entity type inventories ([`LabelSet`]).
//! * [`sentence`] — tokenized sentences with typed, token-indexed entity
//!   spans ([`Sentence`], [`EntitySpan`], [`Document`]).
//! * [`tags`] — the BIO/IOB2 tag codec ([`tags_to_spans`], [`spans_to_tags`]).
//! * [`marker`] — the inline-marker codec that carries spans through a
//!   translation system (`<PER> John </PER>` style).
//! * [`projection`] — label projection across parallel sentences, either
//!   via surviving markers or via word-alignment links.
//! * [`fusion`] — assembly of concatenated `[marked source, <X>, target]`
//!   model inputs with per-token loss masks, and the label-correction
//!   step used by the translate-correct baseline.
//! * [`prompt`] — prompt templates for tagging a translation with an
//!   instruction-following text generator.
//! * [`eval`] — entity-level precision/recall/F1 with exact span-and-type
//!   matching.
//!
//! Everything here is `no_std` (with `alloc`); all types are immutable
//! after construction and all operations are pure, so values can be
//! shared freely across threads. Networked clients, file formats and the
//! CLI live in the companion `transfusion` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod eval;
pub mod fusion;
pub mod label;
pub mod marker;
pub mod projection;
pub mod prompt;
pub mod sentence;
pub mod tags;

pub use eval::{score, LabelMetrics, ScoreReport};
pub use fusion::{FusionExample, SEPARATOR_TOKEN};
pub use label::LabelSet;
pub use marker::{insert_markers, parse_markers, MarkedText, MarkerStyle, ParseMode};
pub use projection::{project_by_alignment, project_by_markers, AlignmentLink, ProjectionOutcome};
pub use sentence::{Document, EntitySpan, Sentence};
pub use tags::{spans_to_tags, tags_to_spans, BioTag, DecodeMode, TagSequence};
