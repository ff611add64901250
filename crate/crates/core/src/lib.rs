//! Lexicon machinery for numeral classifiers and quantifiers.
//!
//! The crate is organized around one pipeline: parse Universal Word (UW)
//! expressions and UNL-style annotation graphs, look senses up in a
//! classifier/quantifier dictionary, pick the right classifier or
//! existential verb for a noun, rewrite Japanese floating-quantifier
//! sentences into a canonical shape, and mine French corpora for quantifying
//! phrasemes worth adding to the dictionary.
//!
//! Module map:
//! - [`label`]: relation/attribute registries, strict vs permissive parsing
//! - [`uw`]: UW expressions — parse, canonical print, subsumption
//! - [`unl`]: annotation graphs — arcs, scopes, validation
//! - [`dict`]: the dictionary file format and consistency checks
//! - [`select`]: classifier disambiguation, dummy classifiers, iru/aru
//! - [`quant`]: numeric-phrase patterns and canonical rewriting
//! - [`extract`]: KWIC concordances and phraseme candidate mining

pub mod dict;
pub mod extract;
pub mod label;
pub mod quant;
pub mod select;
pub mod unl;
pub mod uw;

pub use dict::{CqSense, CqType, DictEntry, DictError, Dictionary, FlLabel, Lexeme, MeasureUnit};
pub use extract::{
    build_kwic, extract_candidates, filter_by_dictionary, tokenize_fr, ConfirmedCandidate, Corpus,
    CorpusDoc, ExtractError, FrLexicon, KwicLine, PhrasemeCandidate,
};
pub use label::{AttributeLabel, LabelMode, LabelSet, ParseOptions, RelationLabel, Warning};
pub use quant::{normalize, Pattern, QuantError, QuantTriple, Tag, TaggedToken};
pub use select::{disambiguate, select_existential, Animacy, NounContext, SelectError, Selection, VerbChoice};
pub use unl::{Arc, NodeRef, ScopeId, UnlDocument, UnlError, UwNode, Violation};
pub use uw::{format_uw, parse_uw, Constraint, ConstraintTarget, Uw, UwClass, UwError};
