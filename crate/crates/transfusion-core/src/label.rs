//! Entity type inventories.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Name used by the segment separator token `<X>`; no entity type may
/// claim it, otherwise a `<X>` marker would be indistinguishable from a
/// separator in fused inputs.
const SEPARATOR_NAME: &str = "X";

/// An ordered set of entity type names, e.g. `PER`, `LOC`, `ORG`.
///
/// Names are uppercase ASCII identifiers (`A-Z`, `0-9`, `_`), which keeps
/// them clear of whitespace and of the marker syntax characters
/// `< > / |`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSet {
    names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelError {
    /// Name is empty or contains a character outside `A-Z0-9_`.
    InvalidName(String),
    /// Name appears more than once.
    Duplicate(String),
    /// Name is reserved for the segment separator.
    Reserved(String),
}

impl fmt::Display for LabelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelError::InvalidName(name) => write!(
                f,
                "invalid label name {name:?}: expected a non-empty uppercase ASCII identifier"
            ),
            LabelError::Duplicate(name) => write!(f, "duplicate label name {name:?}"),
            LabelError::Reserved(name) => {
                write!(f, "label name {name:?} is reserved for the segment separator")
            }
        }
    }
}

impl core::error::Error for LabelError {}

impl LabelSet {
    /// Builds a label set, validating and preserving the given order.
    pub fn new<I, S>(names: I) -> Result<Self, LabelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out: Vec<String> = Vec::new();
        for name in names {
            let name = name.into();
            if name.is_empty()
                || !name
                    .chars()
                    .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
            {
                return Err(LabelError::InvalidName(name));
            }
            if name == SEPARATOR_NAME {
                return Err(LabelError::Reserved(name));
            }
            if out.iter().any(|n| n == &name) {
                return Err(LabelError::Duplicate(name));
            }
            out.push(name);
        }
        Ok(LabelSet { names: out })
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(|n| n.as_str())
    }
}

impl fmt::Display for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.names.join(","))
    }
}
