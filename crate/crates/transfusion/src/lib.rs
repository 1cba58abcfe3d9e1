//! IO, file formats, model-service clients and pipeline orchestration
//! around [`transfusion_core`].

pub mod alignment;
pub mod backend;
pub mod cli;
pub mod commands;
pub mod config;
pub mod conll;
pub mod det;
pub mod jsonl;
pub mod pipeline;
pub mod report;
pub mod services;
