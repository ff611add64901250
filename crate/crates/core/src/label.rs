//! Relation and attribute label registries.
//!
//! Semantic relations (`icl`, `agt`, `qua`, ...) and node attributes (`@entry`,
//! `@pl`, ...) come from closed inventories, but real annotation files stray
//! from them. Parsers therefore run in one of two modes: `Strict` rejects
//! unregistered labels, `Permissive` accepts them and records a [`Warning`].

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

/// Relation labels used by the shipped data.
pub const DEFAULT_RELATIONS: &[&str] = &[
    "agt", "aoj", "ben", "equ", "icl", "iof", "met", "mod", "obj", "qua",
];

/// Attribute labels used by the shipped data, without the leading `@`.
pub const DEFAULT_ATTRIBUTES: &[&str] = &["def", "eld", "entry", "imperative", "past", "pl"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelError {
    #[error("invalid relation label {0:?}: expected letters and digits")]
    InvalidRelation(String),
    #[error("invalid attribute label {0:?}: expected '@' followed by letters and digits")]
    InvalidAttribute(String),
}

fn is_label_word(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

/// A relation label such as `icl` or `agt`. Guaranteed non-empty and free of
/// structural characters, nothing more; registry membership is checked
/// separately so permissive parsing can keep unknown labels.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationLabel(String);

impl RelationLabel {
    pub fn new(name: &str) -> Result<Self, LabelError> {
        if is_label_word(name) {
            Ok(RelationLabel(name.to_owned()))
        } else {
            Err(LabelError::InvalidRelation(name.to_owned()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl PartialEq<str> for RelationLabel {
    fn eq(&self, other: &str) -> bool {
        self.0 == other
    }
}

impl PartialEq<&str> for RelationLabel {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

/// An attribute label, stored without the `@`; `Display` puts it back.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AttributeLabel(String);

impl AttributeLabel {
    /// Accepts either `@entry` or `entry`.
    pub fn new(name: &str) -> Result<Self, LabelError> {
        let bare = name.strip_prefix('@').unwrap_or(name);
        if is_label_word(bare) {
            Ok(AttributeLabel(bare.to_owned()))
        } else {
            Err(LabelError::InvalidAttribute(name.to_owned()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AttributeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}", self.0)
    }
}

impl PartialEq<str> for AttributeLabel {
    fn eq(&self, other: &str) -> bool {
        self.0 == other.strip_prefix('@').unwrap_or(other)
    }
}

impl PartialEq<&str> for AttributeLabel {
    fn eq(&self, other: &&str) -> bool {
        self == *other
    }
}

/// A set of registered labels, loadable from a one-label-per-line file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSet {
    labels: BTreeSet<String>,
}

impl LabelSet {
    pub fn new() -> Self {
        LabelSet { labels: BTreeSet::new() }
    }

    pub fn default_relations() -> Self {
        DEFAULT_RELATIONS.iter().copied().collect()
    }

    pub fn default_attributes() -> Self {
        DEFAULT_ATTRIBUTES.iter().copied().collect()
    }

    /// Loads one label per line; blank lines and `#` comments are skipped.
    /// A leading `@` on attribute files is stripped.
    pub fn from_file(path: &Path) -> io::Result<Self> {
        Ok(Self::from_text(&fs::read_to_string(path)?))
    }

    pub fn from_text(text: &str) -> Self {
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect()
    }

    pub fn insert(&mut self, label: &str) {
        self.labels.insert(label.strip_prefix('@').unwrap_or(label).to_owned());
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels.contains(label.strip_prefix('@').unwrap_or(label))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }
}

impl Default for LabelSet {
    fn default() -> Self {
        Self::new()
    }
}

impl<'a> FromIterator<&'a str> for LabelSet {
    fn from_iter<T: IntoIterator<Item = &'a str>>(iter: T) -> Self {
        let mut set = LabelSet::new();
        for label in iter {
            set.insert(label);
        }
        set
    }
}

/// How parsers treat labels that are missing from the registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelMode {
    Strict,
    #[default]
    Permissive,
}

/// Registry configuration shared by the UW and annotation parsers.
#[derive(Debug, Clone)]
pub struct ParseOptions {
    pub mode: LabelMode,
    pub relations: LabelSet,
    pub attributes: LabelSet,
}

impl ParseOptions {
    pub fn strict() -> Self {
        ParseOptions { mode: LabelMode::Strict, ..ParseOptions::default() }
    }

    pub fn permissive() -> Self {
        ParseOptions::default()
    }
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            mode: LabelMode::Permissive,
            relations: LabelSet::default_relations(),
            attributes: LabelSet::default_attributes(),
        }
    }
}

/// A non-fatal note recorded while parsing in permissive mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub code: WarningCode,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WarningCode {
    UnknownRelation,
    UnknownAttribute,
    ScopeIdNormalized,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.code, self.message)
    }
}
