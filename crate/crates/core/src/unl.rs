//! Sentence annotation graphs.
//!
//! An annotation is a list of labeled arcs, one per line:
//!
//! ```text
//! agt(buy(icl>do).@entry.@past, I)
//! qua(book(icl>thing).@pl, :01)
//! mod:01(CQ-satsu-books-notebooks-albums(icl>CQ).@entry.@eld, 2)
//! ```
//!
//! `relation:NN(...)` places an arc inside sub-scope `:NN`; a `:NN` argument
//! references that scope as a node. Nodes are UWs with dotted attributes,
//! bare plain words (pronouns and numerals), or scope references. The graph
//! itself is untyped — [`UnlDocument::validate`] reports structural
//! violations instead of refusing to parse.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::label::{
    AttributeLabel, LabelMode, ParseOptions, RelationLabel, Warning, WarningCode,
};
use crate::uw::{self, ConstraintTarget, Uw, UwError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UnlError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: bad UW: {source}")]
    BadUw { line: usize, source: UwError },
    #[error("line {line}: unknown relation label {label:?}")]
    UnknownRelation { line: usize, label: String },
    #[error("line {line}: unknown attribute label {label:?}")]
    UnknownAttribute { line: usize, label: String },
    #[error("line {line}: invalid scope id {id:?}: expected ':' and two characters")]
    BadScopeId { line: usize, id: String },
    #[error("line {line}: duplicate arc")]
    DuplicateArc { line: usize },
}

/// A two-character sub-scope id, printed as `:01`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScopeId(String);

impl ScopeId {
    /// Accepts `:01` or `01`. The common `o`-for-`0` slip is *not* repaired
    /// here — only the parser does that, with a warning.
    pub fn new(id: &str) -> Option<Self> {
        let bare = id.strip_prefix(':').unwrap_or(id);
        let ok = bare.chars().count() == 2 && bare.chars().all(|c| c.is_ascii_alphanumeric());
        ok.then(|| ScopeId(bare.to_owned()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ScopeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, ":{}", self.0)
    }
}

/// A UW with its attached attributes, in source order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UwNode {
    pub uw: Uw,
    pub attributes: Vec<AttributeLabel>,
}

impl UwNode {
    pub fn new(uw: Uw) -> Self {
        UwNode { uw, attributes: Vec::new() }
    }

    pub fn with_attributes<I: IntoIterator<Item = AttributeLabel>>(uw: Uw, attrs: I) -> Self {
        UwNode { uw, attributes: attrs.into_iter().collect() }
    }

    pub fn has_attribute(&self, name: &str) -> bool {
        self.attributes.iter().any(|a| a == name)
    }

    /// Two mentions are the same node when UW and attribute *set* agree;
    /// attribute order is presentation only.
    pub fn same_node(&self, other: &UwNode) -> bool {
        self.uw == other.uw && self.attribute_set() == other.attribute_set()
    }

    fn attribute_set(&self) -> BTreeSet<&str> {
        self.attributes.iter().map(AttributeLabel::as_str).collect()
    }
}

impl fmt::Display for UwNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.uw.fmt(f)?;
        for a in &self.attributes {
            write!(f, ".{a}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeRef {
    Uw(UwNode),
    /// A bare pronoun or numeral with no UW structure and no attributes.
    Plain(String),
    Scope(ScopeId),
}

impl NodeRef {
    pub fn as_uw_node(&self) -> Option<&UwNode> {
        match self {
            NodeRef::Uw(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_scope(&self) -> Option<&ScopeId> {
        match self {
            NodeRef::Scope(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeRef::Uw(n) => n.fmt(f),
            NodeRef::Plain(w) => f.write_str(w),
            NodeRef::Scope(s) => s.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arc {
    pub relation: RelationLabel,
    /// `None` for top-level arcs, `Some` when written `relation:NN(...)`.
    pub scope: Option<ScopeId>,
    pub source: NodeRef,
    pub target: NodeRef,
    /// 1-based source line, 0 for arcs built programmatically.
    pub line: usize,
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.relation.fmt(f)?;
        if let Some(s) = &self.scope {
            s.fmt(f)?;
        }
        write!(f, "({}, {})", self.source, self.target)
    }
}

/// Structural problems found by [`UnlDocument::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    /// Line of the offending arc, 0 when the problem has no single line.
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationCode {
    MissingEntry,
    DuplicateEntry,
    DanglingScope,
    UnknownRelation,
    UnknownAttribute,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}:{}:{}", self.code, self.line, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UnlDocument {
    pub arcs: Vec<Arc>,
}

impl UnlDocument {
    pub fn new() -> Self {
        UnlDocument::default()
    }

    pub fn parse(text: &str) -> Result<Self, UnlError> {
        Self::parse_with(text, &ParseOptions::default()).map(|(doc, _)| doc)
    }

    pub fn parse_with(text: &str, opts: &ParseOptions) -> Result<(Self, Vec<Warning>), UnlError> {
        let mut warnings = Vec::new();
        let mut arcs: Vec<Arc> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let arc = parse_arc_line(line, line_no, opts, &mut warnings)?;
            if arcs.iter().any(|a| same_arc(a, &arc)) {
                return Err(UnlError::DuplicateArc { line: line_no });
            }
            arcs.push(arc);
        }
        Ok((UnlDocument { arcs }, warnings))
    }

    /// Parses a single arc with default options, for building graphs in code.
    pub fn parse_arc(line: &str) -> Result<Arc, UnlError> {
        let mut warnings = Vec::new();
        parse_arc_line(line.trim(), 0, &ParseOptions::default(), &mut warnings)
    }

    /// Canonical text: top-level arcs first in insertion order, then each
    /// sub-scope's arcs grouped together, scopes in ascending order.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for arc in self.arcs.iter().filter(|a| a.scope.is_none()) {
            out.push_str(&arc.to_string());
            out.push('\n');
        }
        for scope in self.scopes() {
            for arc in self.arcs.iter().filter(|a| a.scope.as_ref() == Some(&scope)) {
                out.push_str(&arc.to_string());
                out.push('\n');
            }
        }
        out
    }

    /// Scope ids that own at least one arc, ascending.
    pub fn scopes(&self) -> Vec<ScopeId> {
        let set: BTreeSet<ScopeId> = self.arcs.iter().filter_map(|a| a.scope.clone()).collect();
        set.into_iter().collect()
    }

    pub fn scope_arcs(&self, scope: Option<&ScopeId>) -> Vec<&Arc> {
        self.arcs.iter().filter(|a| a.scope.as_ref() == scope).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Distinct UW nodes carrying the attribute, with the scope they sit in.
    /// A node mentioned twice (same UW, same attribute set) is reported once.
    pub fn nodes_with_attribute(&self, name: &str) -> Vec<(Option<ScopeId>, &UwNode)> {
        let mut found: Vec<(Option<ScopeId>, &UwNode)> = Vec::new();
        for arc in &self.arcs {
            for node in [&arc.source, &arc.target] {
                if let NodeRef::Uw(n) = node {
                    if n.has_attribute(name)
                        && !found
                            .iter()
                            .any(|(sc, seen)| *sc == arc.scope && seen.same_node(n))
                    {
                        found.push((arc.scope.clone(), n));
                    }
                }
            }
        }
        found
    }

    /// Structural checks. Every sub-scope must have exactly one `@entry`
    /// node; the top level may have at most one (a bare fragment with none is
    /// fine — see [`UnlDocument::validate_complete`]). Scope references must
    /// point at scopes that own arcs. In strict mode, relation and attribute
    /// labels (including those inside UW constraints) must be registered.
    pub fn validate(&self, opts: &ParseOptions) -> Vec<Violation> {
        self.validate_inner(opts, false)
    }

    /// [`UnlDocument::validate`] plus the whole-sentence rule: a non-empty
    /// top level must itself have an `@entry` node.
    pub fn validate_complete(&self, opts: &ParseOptions) -> Vec<Violation> {
        self.validate_inner(opts, true)
    }

    fn validate_inner(&self, opts: &ParseOptions, complete: bool) -> Vec<Violation> {
        let mut violations = Vec::new();
        let owned: BTreeSet<&ScopeId> = self.arcs.iter().filter_map(|a| a.scope.as_ref()).collect();

        for arc in &self.arcs {
            for node in [&arc.source, &arc.target] {
                if let NodeRef::Scope(id) = node {
                    if !owned.contains(id) {
                        violations.push(Violation {
                            code: ViolationCode::DanglingScope,
                            line: arc.line,
                            message: format!("scope {id} has no arcs"),
                        });
                    }
                }
            }
        }

        // one @entry per region (the top level counts as a region)
        let mut regions: Vec<Option<ScopeId>> = vec![None];
        regions.extend(self.scopes().into_iter().map(Some));
        for region in regions {
            let arcs = self.scope_arcs(region.as_ref());
            if arcs.is_empty() {
                continue;
            }
            let first_line = arcs[0].line;
            let mut entries: Vec<&UwNode> = Vec::new();
            for arc in &arcs {
                for node in [&arc.source, &arc.target] {
                    if let NodeRef::Uw(n) = node {
                        if n.has_attribute("entry") && !entries.iter().any(|e| e.same_node(n)) {
                            entries.push(n);
                        }
                    }
                }
            }
            let where_ = match &region {
                None => "top level".to_owned(),
                Some(s) => format!("scope {s}"),
            };
            if entries.len() > 1 {
                violations.push(Violation {
                    code: ViolationCode::DuplicateEntry,
                    line: first_line,
                    message: format!("{where_} has {} @entry nodes", entries.len()),
                });
            } else if entries.is_empty() && (region.is_some() || complete) {
                violations.push(Violation {
                    code: ViolationCode::MissingEntry,
                    line: first_line,
                    message: format!("{where_} has no @entry node"),
                });
            }
        }

        if opts.mode == LabelMode::Strict {
            for arc in &self.arcs {
                if !opts.relations.contains(arc.relation.as_str()) {
                    violations.push(Violation {
                        code: ViolationCode::UnknownRelation,
                        line: arc.line,
                        message: format!("relation {:?} is not registered", arc.relation.as_str()),
                    });
                }
                for node in [&arc.source, &arc.target] {
                    if let NodeRef::Uw(n) = node {
                        for a in &n.attributes {
                            if !opts.attributes.contains(a.as_str()) {
                                violations.push(Violation {
                                    code: ViolationCode::UnknownAttribute,
                                    line: arc.line,
                                    message: format!("attribute {a} is not registered"),
                                });
                            }
                        }
                        check_uw_relations(&n.uw, opts, arc.line, &mut violations);
                    }
                }
            }
        }

        violations
    }
}

fn check_uw_relations(uw: &Uw, opts: &ParseOptions, line: usize, out: &mut Vec<Violation>) {
    for c in &uw.constraints {
        if !opts.relations.contains(c.relation.as_str()) {
            out.push(Violation {
                code: ViolationCode::UnknownRelation,
                line,
                message: format!("relation {:?} is not registered", c.relation.as_str()),
            });
        }
        if let ConstraintTarget::Uw(nested) = &c.target {
            check_uw_relations(nested, opts, line, out);
        }
    }
}

/// Arcs are duplicates when relation, scope, and both nodes agree (attribute
/// order ignored); the line number is bookkeeping and does not count.
fn same_arc(a: &Arc, b: &Arc) -> bool {
    a.relation == b.relation && a.scope == b.scope && same_node_ref(&a.source, &b.source)
        && same_node_ref(&a.target, &b.target)
}

fn same_node_ref(a: &NodeRef, b: &NodeRef) -> bool {
    match (a, b) {
        (NodeRef::Uw(x), NodeRef::Uw(y)) => x.same_node(y),
        _ => a == b,
    }
}

const PRONOUNS: &[&str] = &["I", "you", "he", "she", "it", "we", "they"];

fn is_plain_word(text: &str) -> bool {
    PRONOUNS.contains(&text) || (!text.is_empty() && text.chars().all(|c| c.is_ascii_digit()))
}

fn parse_arc_line(
    line: &str,
    line_no: usize,
    opts: &ParseOptions,
    warnings: &mut Vec<Warning>,
) -> Result<Arc, UnlError> {
    let malformed = |msg: &str| UnlError::Malformed { line: line_no, msg: msg.to_owned() };

    let open = line.find('(').ok_or_else(|| malformed("expected '(' after the relation"))?;
    let head = line[..open].trim();
    let (rel_text, scope) = match head.split_once(':') {
        Some((r, s)) => (r.trim(), Some(parse_scope_id(s.trim(), line_no, warnings)?)),
        None => (head, None),
    };
    let relation = RelationLabel::new(rel_text)
        .map_err(|_| malformed(&format!("invalid relation label {rel_text:?}")))?;
    if !opts.relations.contains(relation.as_str()) {
        match opts.mode {
            LabelMode::Strict => {
                return Err(UnlError::UnknownRelation { line: line_no, label: rel_text.to_owned() })
            }
            LabelMode::Permissive => warnings.push(Warning {
                code: WarningCode::UnknownRelation,
                message: format!("line {line_no}: relation {rel_text:?} is not registered"),
            }),
        }
    }

    let close = matching_paren(line, open).ok_or(UnlError::Malformed {
        line: line_no,
        msg: "unbalanced parentheses".to_owned(),
    })?;
    if !line[close + 1..].trim().is_empty() {
        return Err(malformed("trailing input after the closing ')'"));
    }
    let inner = &line[open + 1..close];
    let comma = top_level_comma(inner).ok_or_else(|| malformed("expected two arguments"))?;
    let (arg1, arg2) = (inner[..comma].trim(), inner[comma + 1..].trim());
    if top_level_comma(arg2).is_some() {
        return Err(malformed("expected exactly two arguments"));
    }

    let source = parse_node(arg1, line_no, opts, warnings)?;
    let target = parse_node(arg2, line_no, opts, warnings)?;
    Ok(Arc { relation, scope, source, target, line: line_no })
}

fn parse_scope_id(
    text: &str,
    line_no: usize,
    warnings: &mut Vec<Warning>,
) -> Result<ScopeId, UnlError> {
    // `o` for `0` is endemic in hand-written annotations; repair it loudly
    let repaired: String = text
        .chars()
        .map(|c| if matches!(c, 'o' | 'O') { '0' } else { c })
        .collect();
    if repaired != text {
        warnings.push(Warning {
            code: WarningCode::ScopeIdNormalized,
            message: format!("line {line_no}: scope id {text:?} normalized to {repaired:?}"),
        });
    }
    ScopeId::new(&repaired)
        .ok_or_else(|| UnlError::BadScopeId { line: line_no, id: text.to_owned() })
}

/// Index of the ')' matching the '(' at `open`.
fn matching_paren(text: &str, open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in text.char_indices().skip_while(|&(i, _)| i < open) {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

/// Byte index of the first comma outside any parentheses.
fn top_level_comma(text: &str) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

fn parse_node(
    text: &str,
    line_no: usize,
    opts: &ParseOptions,
    warnings: &mut Vec<Warning>,
) -> Result<NodeRef, UnlError> {
    if text.is_empty() {
        return Err(UnlError::Malformed { line: line_no, msg: "empty argument".to_owned() });
    }
    if let Some(rest) = text.strip_prefix(':') {
        if rest.contains('.') {
            return Err(UnlError::Malformed {
                line: line_no,
                msg: format!("scope reference {text:?} cannot carry attributes"),
            });
        }
        return Ok(NodeRef::Scope(parse_scope_id(rest, line_no, warnings)?));
    }

    // Split off the dotted attribute tail. With constraints, attributes
    // follow the matching ')'; without, they follow the first `.@`.
    let (uw_text, attr_text) = match text.find('(') {
        Some(open) => {
            let close = matching_paren(text, open).ok_or(UnlError::Malformed {
                line: line_no,
                msg: "unbalanced parentheses".to_owned(),
            })?;
            (&text[..close + 1], &text[close + 1..])
        }
        None => match text.find(".@") {
            Some(dot) => (&text[..dot], &text[dot..]),
            None => (text, ""),
        },
    };

    let mut attributes = Vec::new();
    if !attr_text.is_empty() {
        for piece in attr_text.split('.') {
            if piece.is_empty() {
                continue; // the leading '.'
            }
            if !piece.starts_with('@') {
                return Err(UnlError::Malformed {
                    line: line_no,
                    msg: format!("expected attribute after '.', found {piece:?}"),
                });
            }
            let attr = AttributeLabel::new(piece).map_err(|_| UnlError::Malformed {
                line: line_no,
                msg: format!("invalid attribute label {piece:?}"),
            })?;
            if !opts.attributes.contains(attr.as_str()) {
                match opts.mode {
                    LabelMode::Strict => {
                        return Err(UnlError::UnknownAttribute {
                            line: line_no,
                            label: piece.to_owned(),
                        })
                    }
                    LabelMode::Permissive => warnings.push(Warning {
                        code: WarningCode::UnknownAttribute,
                        message: format!("line {line_no}: attribute {piece:?} is not registered"),
                    }),
                }
            }
            attributes.push(attr);
        }
    }

    let uw_text = uw_text.trim();
    if attributes.is_empty() && is_plain_word(uw_text) {
        return Ok(NodeRef::Plain(uw_text.to_owned()));
    }
    let (uw, uw_warnings) = uw::parse_uw_with(uw_text, opts)
        .map_err(|source| UnlError::BadUw { line: line_no, source })?;
    warnings.extend(uw_warnings);
    Ok(NodeRef::Uw(UwNode { uw, attributes }))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BOUGHT_TWO_BOOKS: &str = "\
agt(buy(icl>do).@entry.@past, I)
obj(buy(icl>do).@entry.@past, book(icl>thing).@pl)
qua(book(icl>thing).@pl, :01)
mod:01(CQ-satsu-books-notebooks-albums(icl>CQ).@entry.@eld, 2)
";

    #[test]
    fn parses_arcs_scopes_and_plain_words() {
        let doc = UnlDocument::parse(BOUGHT_TWO_BOOKS).unwrap();
        assert_eq!(doc.arcs.len(), 4);
        assert_eq!(doc.arcs[0].relation, "agt");
        assert_eq!(doc.arcs[0].target, NodeRef::Plain("I".into()));
        assert_eq!(doc.arcs[2].target, NodeRef::Scope(ScopeId::new("01").unwrap()));
        assert_eq!(doc.arcs[3].scope, Some(ScopeId::new("01").unwrap()));
        assert_eq!(doc.arcs[3].target, NodeRef::Plain("2".into()));
        assert_eq!(doc.scopes().len(), 1);
    }

    #[test]
    fn serialization_roundtrips() {
        let doc = UnlDocument::parse(BOUGHT_TWO_BOOKS).unwrap();
        assert_eq!(doc.serialize(), BOUGHT_TWO_BOOKS);
        assert_eq!(UnlDocument::parse(&doc.serialize()).unwrap(), doc);
    }

    #[test]
    fn attributes_preserve_order_but_compare_as_sets() {
        let a = UnlDocument::parse_arc("agt(go.@entry.@past, I)").unwrap();
        let b = UnlDocument::parse_arc("agt(go.@past.@entry, I)").unwrap();
        let (NodeRef::Uw(na), NodeRef::Uw(nb)) = (&a.source, &b.source) else {
            panic!("expected UW nodes")
        };
        assert_eq!(na.attributes[0].as_str(), "entry");
        assert_eq!(nb.attributes[0].as_str(), "past");
        assert!(na.same_node(nb));
        assert_ne!(na, nb);
    }

    #[test]
    fn scope_ids_with_letter_o_are_repaired() {
        let (doc, warnings) =
            UnlDocument::parse_with("mod:o1(x.@entry, 2)\nqua(y(icl>thing), :o1)", &ParseOptions::default())
                .unwrap();
        assert_eq!(doc.arcs[0].scope, Some(ScopeId::new("01").unwrap()));
        assert_eq!(doc.arcs[1].target, NodeRef::Scope(ScopeId::new("01").unwrap()));
        assert_eq!(
            warnings.iter().filter(|w| w.code == WarningCode::ScopeIdNormalized).count(),
            2
        );
    }

    #[test]
    fn pronouns_and_numerals_are_plain_words() {
        let arc = UnlDocument::parse_arc("agt(go.@entry, I)").unwrap();
        assert_eq!(arc.target, NodeRef::Plain("I".into()));
        // a pronoun with attributes is a UW node again
        let arc = UnlDocument::parse_arc("agt(go.@entry, you.@pl)").unwrap();
        assert!(matches!(arc.target, NodeRef::Uw(_)));
        // and so is any other bare word
        let arc = UnlDocument::parse_arc("agt(go.@entry, dog)").unwrap();
        assert!(matches!(arc.target, NodeRef::Uw(ref n) if n.uw.headword == "dog"));
    }

    #[test]
    fn malformed_lines_are_rejected() {
        assert!(matches!(
            UnlDocument::parse("agt(a.@entry)"),
            Err(UnlError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            UnlDocument::parse("agt(a, b, c)"),
            Err(UnlError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            UnlDocument::parse("agt a, b"),
            Err(UnlError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            UnlDocument::parse("agt(a, b) x"),
            Err(UnlError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            UnlDocument::parse("agt(a(icl>x, b)"),
            Err(UnlError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            UnlDocument::parse("mod:1(a, b)"),
            Err(UnlError::BadScopeId { line: 1, .. })
        ));
        assert!(matches!(
            UnlDocument::parse("agt(:01.@pl, b)"),
            Err(UnlError::Malformed { line: 1, .. })
        ));
    }

    #[test]
    fn duplicate_arcs_are_rejected() {
        let text = "agt(go.@entry, I)\nagt(go.@entry, I)";
        assert!(matches!(
            UnlDocument::parse(text),
            Err(UnlError::DuplicateArc { line: 2 })
        ));
        // attribute order does not make an arc distinct
        let text = "agt(go.@entry.@past, I)\nagt(go.@past.@entry, I)";
        assert!(matches!(
            UnlDocument::parse(text),
            Err(UnlError::DuplicateArc { line: 2 })
        ));
    }

    #[test]
    fn validate_accepts_a_well_formed_sentence() {
        let doc = UnlDocument::parse(BOUGHT_TWO_BOOKS).unwrap();
        let opts = ParseOptions::strict();
        assert!(doc.validate(&opts).is_empty());
        assert!(doc.validate_complete(&opts).is_empty());
    }

    #[test]
    fn validate_flags_dangling_scope_references() {
        let doc = UnlDocument::parse("qua(book(icl>thing).@entry, :07)").unwrap();
        let violations = doc.validate(&ParseOptions::default());
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].code, ViolationCode::DanglingScope);
        assert_eq!(violations[0].line, 1);
        assert!(violations[0].to_string().starts_with("DanglingScope:1:"));
    }

    #[test]
    fn validate_requires_one_entry_per_scope() {
        let text = "qua(book(icl>thing).@entry, :01)\nmod:01(x(icl>CQ), 2)";
        let doc = UnlDocument::parse(text).unwrap();
        let violations = doc.validate(&ParseOptions::default());
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].code, ViolationCode::MissingEntry);

        let text = "qua(book(icl>thing).@entry, :01)\nmod:01(x(icl>CQ).@entry, 2)\nagt:01(y.@entry, 3)";
        let doc = UnlDocument::parse(text).unwrap();
        let violations = doc.validate(&ParseOptions::default());
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].code, ViolationCode::DuplicateEntry);
    }

    #[test]
    fn fragments_pass_validate_but_not_validate_complete() {
        // a quantity fragment with no top-level @entry
        let text = "qua(book(icl>thing).@pl, :01)\nmod:01(CQ-satsu-books-notebooks-albums(icl>CQ).@entry.@eld, 2)";
        let doc = UnlDocument::parse(text).unwrap();
        assert!(doc.validate(&ParseOptions::default()).is_empty());
        let complete = doc.validate_complete(&ParseOptions::default());
        assert_eq!(complete.len(), 1);
        assert_eq!(complete[0].code, ViolationCode::MissingEntry);
    }

    #[test]
    fn strict_validate_flags_unregistered_labels() {
        let (doc, _) = UnlDocument::parse_with(
            "foo(a(bar>c).@entry.@baz, 2)",
            &ParseOptions::default(),
        )
        .unwrap();
        let violations = doc.validate(&ParseOptions::strict());
        let codes: Vec<ViolationCode> = violations.iter().map(|v| v.code).collect();
        assert!(codes.contains(&ViolationCode::UnknownRelation)); // foo and bar
        assert!(codes.contains(&ViolationCode::UnknownAttribute)); // @baz
        assert_eq!(
            violations.iter().filter(|v| v.code == ViolationCode::UnknownRelation).count(),
            2
        );
    }

    #[test]
    fn nodes_with_attribute_deduplicates_mentions() {
        let doc = UnlDocument::parse(BOUGHT_TWO_BOOKS).unwrap();
        let entries = doc.nodes_with_attribute("entry");
        // buy appears on two arcs but is one node; the scoped CQ entry is another
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].0, None);
        assert_eq!(entries[0].1.uw.headword, "buy");
        assert_eq!(entries[1].0, Some(ScopeId::new("01").unwrap()));
        let eld = doc.nodes_with_attribute("eld");
        assert_eq!(eld.len(), 1);
        assert!(eld[0].1.uw.headword.starts_with("CQ-"));
    }
}
