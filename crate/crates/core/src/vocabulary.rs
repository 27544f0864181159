use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Default bound on |Ω|; truth tables hold 2^|Ω| bits.
pub const DEFAULT_VOCABULARY_CAP: usize = 24;

/// Hard upper limit on any configured cap.
const MAX_VOCABULARY_CAP: usize = 30;

/// An ordered set of proposition names.
///
/// The position of a proposition fixes its bit in assignment indices: under
/// assignment `j`, proposition `i` is true iff bit `i` of `j` is set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    props: Vec<String>,
    index: HashMap<String, usize>,
    cap: usize,
}

impl Vocabulary {
    pub fn new<I, S>(props: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::with_cap(props, DEFAULT_VOCABULARY_CAP)
    }

    pub fn with_cap<I, S>(props: I, cap: usize) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        if cap == 0 || cap > MAX_VOCABULARY_CAP {
            return Err(Error::InvalidVocabulary(format!(
                "cap must be between 1 and {MAX_VOCABULARY_CAP}, got {cap}"
            )));
        }
        let props: Vec<String> = props.into_iter().map(Into::into).collect();
        if props.is_empty() {
            return Err(Error::InvalidVocabulary(
                "at least one proposition is required".into(),
            ));
        }
        if props.len() > cap {
            return Err(Error::VocabularyCap {
                size: props.len(),
                cap,
            });
        }
        let mut index = HashMap::with_capacity(props.len());
        for (i, name) in props.iter().enumerate() {
            let mut chars = name.chars();
            let well_formed = chars.next().is_some_and(|c| c.is_ascii_lowercase())
                && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
                && name != "true"
                && name != "false";
            if !well_formed {
                return Err(Error::InvalidVocabulary(format!(
                    "`{name}` is not a proposition name (a lowercase letter, then letters, digits or `_`)"
                )));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::InvalidVocabulary(format!(
                    "duplicate proposition `{name}`"
                )));
            }
        }
        Ok(Vocabulary { props, index, cap })
    }

    /// Parses a whitespace-separated list such as `"p q r"`.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(text.split_whitespace())
    }

    pub fn len(&self) -> usize {
        self.props.len()
    }

    pub fn is_empty(&self) -> bool {
        self.props.is_empty()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Number of truth assignments, 2^|Ω|.
    pub fn assignments(&self) -> usize {
        1usize << self.props.len()
    }

    pub fn names(&self) -> &[String] {
        &self.props
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    /// Returns a vocabulary with `extra` fresh propositions appended. Existing
    /// positions are unchanged, so assignment indices below 2^|Ω| keep their
    /// meaning on the original propositions.
    pub fn extended(&self, extra: usize) -> Result<Self> {
        let mut props = self.props.clone();
        let mut k = 0usize;
        while props.len() < self.props.len() + extra {
            k += 1;
            let name = format!("x{k}");
            if !self.index.contains_key(&name) {
                props.push(name);
            }
        }
        Self::with_cap(props, self.cap)
    }

    /// Returns a copy that accepts up to `cap` propositions.
    pub fn recapped(&self, cap: usize) -> Result<Self> {
        Self::with_cap(self.props.clone(), cap)
    }
}

impl fmt::Display for Vocabulary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.props.join(" "))
    }
}
