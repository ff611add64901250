//! Universal Word expressions.
//!
//! A UW is a headword optionally narrowed by a parenthesized constraint list:
//! `cask(icl>wine, equ>220 litres)`. Each constraint is `relation>target`
//! where the target is either an atom or a nested UW. Atoms may contain
//! spaces (`220 litres`) and their own `>` chains (`action>thing`), so the
//! grammar cannot be tokenized on whitespace; this module parses it with a
//! small recursive-descent cursor and can print any parsed value back in a
//! canonical spelling that reparses to the same structure.

use std::fmt;

use thiserror::Error;

use crate::label::{LabelError, LabelMode, ParseOptions, RelationLabel, Warning, WarningCode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UwError {
    #[error("empty input")]
    Empty,
    #[error("empty headword")]
    EmptyHeadword,
    #[error("unbalanced parentheses")]
    UnbalancedParens,
    #[error("empty constraint")]
    EmptyConstraint,
    #[error("constraint {0:?} has no '>' between relation and target")]
    MissingSeparator(String),
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error("unknown relation label {0:?}")]
    UnknownRelation(String),
    #[error("unexpected trailing input {0:?}")]
    TrailingInput(String),
}

/// The three spelling families: a bare headword, a headword narrowed by
/// constraints, and the synthetic `CQ-` entries this crate mints itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UwClass {
    Basic,
    Restricted,
    Extra,
}

/// A constraint target: an opaque atom (possibly a `>` chain) or a nested UW.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConstraintTarget {
    Atom(String),
    Uw(Uw),
}

impl ConstraintTarget {
    pub fn as_atom(&self) -> Option<&str> {
        match self {
            ConstraintTarget::Atom(a) => Some(a),
            ConstraintTarget::Uw(_) => None,
        }
    }

    pub fn as_uw(&self) -> Option<&Uw> {
        match self {
            ConstraintTarget::Atom(_) => None,
            ConstraintTarget::Uw(uw) => Some(uw),
        }
    }

    /// The headword of a nested UW, or the first segment of an atom chain.
    pub fn head(&self) -> &str {
        match self {
            ConstraintTarget::Atom(a) => a.split('>').next().unwrap_or(a),
            ConstraintTarget::Uw(uw) => &uw.headword,
        }
    }
}

impl fmt::Display for ConstraintTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintTarget::Atom(a) => f.write_str(a),
            ConstraintTarget::Uw(uw) => uw.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub relation: RelationLabel,
    pub target: ConstraintTarget,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}>{}", self.relation, self.target)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Uw {
    pub headword: String,
    pub constraints: Vec<Constraint>,
}

impl Uw {
    pub fn basic(headword: &str) -> Self {
        Uw { headword: headword.to_owned(), constraints: Vec::new() }
    }

    pub fn class(&self) -> UwClass {
        if self.headword.starts_with("CQ-") {
            UwClass::Extra
        } else if self.constraints.is_empty() {
            UwClass::Basic
        } else {
            UwClass::Restricted
        }
    }

    /// Targets of every constraint carrying the given relation, in order.
    pub fn targets(&self, relation: &str) -> Vec<&ConstraintTarget> {
        self.constraints
            .iter()
            .filter(|c| c.relation == relation)
            .map(|c| &c.target)
            .collect()
    }

    /// Whether this UW denotes at least everything `other` does: same
    /// headword, and every constraint here is matched by one of `other`'s,
    /// recursively. An atom chain matches any chain it is a prefix of, so
    /// `icl>action` subsumes `icl>action>thing`. A bare headword subsumes
    /// every restriction of itself.
    pub fn subsumes(&self, other: &Uw) -> bool {
        self.headword == other.headword
            && self.constraints.iter().all(|general| {
                other.constraints.iter().any(|specific| {
                    general.relation == specific.relation
                        && target_subsumes(&general.target, &specific.target)
                })
            })
    }

    /// Equality up to constraint order, at every nesting level.
    pub fn equivalent(&self, other: &Uw) -> bool {
        sorted_rendering(self) == sorted_rendering(other)
    }

    pub fn parse(text: &str) -> Result<Uw, UwError> {
        parse_uw(text)
    }
}

impl fmt::Display for Uw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.headword)?;
        if self.constraints.is_empty() {
            return Ok(());
        }
        f.write_str("(")?;
        for (i, c) in self.constraints.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            c.fmt(f)?;
        }
        f.write_str(")")
    }
}

fn target_subsumes(general: &ConstraintTarget, specific: &ConstraintTarget) -> bool {
    match (general, specific) {
        (ConstraintTarget::Atom(g), ConstraintTarget::Atom(s)) => atom_chain_prefix(g, s),
        // An atom of a single segment subsumes any nested UW with that
        // headword, mirroring the bare-headword rule for whole UWs.
        (ConstraintTarget::Atom(g), ConstraintTarget::Uw(s)) => {
            !g.contains('>') && g.trim() == s.headword
        }
        (ConstraintTarget::Uw(g), ConstraintTarget::Uw(s)) => g.subsumes(s),
        (ConstraintTarget::Uw(_), ConstraintTarget::Atom(_)) => false,
    }
}

fn atom_chain_prefix(general: &str, specific: &str) -> bool {
    let mut s = specific.split('>').map(str::trim);
    general.split('>').map(str::trim).all(|g| s.next() == Some(g))
}

/// Order-insensitive rendering used by [`Uw::equivalent`].
fn sorted_rendering(uw: &Uw) -> String {
    let mut parts: Vec<String> = uw
        .constraints
        .iter()
        .map(|c| {
            let target = match &c.target {
                ConstraintTarget::Atom(a) => a.clone(),
                ConstraintTarget::Uw(n) => sorted_rendering(n),
            };
            format!("{}>{}", c.relation, target)
        })
        .collect();
    parts.sort();
    format!("{}({})", uw.headword, parts.join(", "))
}

/// Parses with the default permissive registry, discarding warnings.
pub fn parse_uw(text: &str) -> Result<Uw, UwError> {
    parse_uw_with(text, &ParseOptions::default()).map(|(uw, _)| uw)
}

/// The canonical spelling: `parse_uw(&format_uw(uw))` reproduces `uw` exactly.
pub fn format_uw(uw: &Uw) -> String {
    uw.to_string()
}

pub fn parse_uw_with(text: &str, opts: &ParseOptions) -> Result<(Uw, Vec<Warning>), UwError> {
    let mut warnings = Vec::new();
    let mut cur = Cursor::new(text);
    cur.skip_ws();
    if cur.at_end() {
        return Err(UwError::Empty);
    }
    let uw = parse_inner(&mut cur, opts, &mut warnings)?;
    cur.skip_ws();
    if !cur.at_end() {
        return Err(UwError::TrailingInput(cur.rest()));
    }
    Ok((uw, warnings))
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    fn new(text: &str) -> Self {
        Cursor { chars: text.chars().collect(), pos: 0 }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn rest(&self) -> String {
        self.chars[self.pos..].iter().collect()
    }

    /// Consumes up to (not including) the first structural character,
    /// returning the text with outer whitespace trimmed.
    fn scan_segment(&mut self) -> String {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if matches!(c, '(' | ')' | ',') {
                break;
            }
            self.pos += 1;
        }
        let seg: String = self.chars[start..self.pos].iter().collect();
        seg.trim().to_owned()
    }

    /// Like `scan_segment` but also stops at `>`, for relation names.
    fn scan_relation(&mut self) -> String {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if matches!(c, '(' | ')' | ',' | '>') {
                break;
            }
            self.pos += 1;
        }
        let seg: String = self.chars[start..self.pos].iter().collect();
        seg.trim().to_owned()
    }
}

fn parse_inner(cur: &mut Cursor, opts: &ParseOptions, warnings: &mut Vec<Warning>) -> Result<Uw, UwError> {
    let headword = cur.scan_segment();
    if headword.is_empty() {
        return Err(UwError::EmptyHeadword);
    }
    let mut constraints = Vec::new();
    if cur.peek() == Some('(') {
        cur.bump();
        constraints = parse_constraint_list(cur, opts, warnings)?;
        // parse_constraint_list stops at the matching ')'
        if cur.bump() != Some(')') {
            return Err(UwError::UnbalancedParens);
        }
    }
    Ok(Uw { headword, constraints })
}

fn parse_constraint_list(
    cur: &mut Cursor,
    opts: &ParseOptions,
    warnings: &mut Vec<Warning>,
) -> Result<Vec<Constraint>, UwError> {
    let mut constraints = Vec::new();
    loop {
        cur.skip_ws();
        let rel_text = cur.scan_relation();
        match cur.peek() {
            Some('>') => {
                cur.bump();
            }
            Some(')') if rel_text.is_empty() && constraints.is_empty() => {
                // `head()` — an empty list rather than a missing separator
                return Err(UwError::EmptyConstraint);
            }
            // scan_relation stops only at structural characters
            Some(_) => return Err(UwError::MissingSeparator(rel_text)),
            None => return Err(UwError::UnbalancedParens),
        }
        let relation = RelationLabel::new(&rel_text)?;
        if !opts.relations.contains(relation.as_str()) {
            match opts.mode {
                LabelMode::Strict => return Err(UwError::UnknownRelation(rel_text)),
                LabelMode::Permissive => warnings.push(Warning {
                    code: WarningCode::UnknownRelation,
                    message: format!("relation {rel_text:?} is not registered"),
                }),
            }
        }
        cur.skip_ws();
        let target = parse_target(cur, opts, warnings)?;
        constraints.push(Constraint { relation, target });
        match cur.peek() {
            Some(',') => {
                cur.bump();
            }
            Some(')') => return Ok(constraints),
            None => return Err(UwError::UnbalancedParens),
            Some(c) => return Err(UwError::TrailingInput(c.to_string())),
        }
    }
}

fn parse_target(
    cur: &mut Cursor,
    opts: &ParseOptions,
    warnings: &mut Vec<Warning>,
) -> Result<ConstraintTarget, UwError> {
    let seg = cur.scan_segment();
    if cur.peek() == Some('(') {
        // nested UW: `seg` is its headword
        if seg.is_empty() {
            return Err(UwError::EmptyHeadword);
        }
        cur.bump();
        let constraints = parse_constraint_list(cur, opts, warnings)?;
        if cur.bump() != Some(')') {
            return Err(UwError::UnbalancedParens);
        }
        cur.skip_ws();
        Ok(ConstraintTarget::Uw(Uw { headword: seg, constraints }))
    } else if seg.is_empty() {
        Err(UwError::EmptyConstraint)
    } else {
        Ok(ConstraintTarget::Atom(seg))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn roundtrip(text: &str) -> Uw {
        let uw = parse_uw(text).unwrap_or_else(|e| panic!("parse {text:?}: {e}"));
        assert_eq!(format_uw(&uw), text, "not in canonical spelling");
        assert_eq!(parse_uw(&format_uw(&uw)).unwrap(), uw);
        uw
    }

    #[test]
    fn basic_uw_is_just_a_headword() {
        let uw = roundtrip("cask");
        assert!(uw.constraints.is_empty());
        assert_eq!(uw.class(), UwClass::Basic);
    }

    #[test]
    fn atoms_keep_internal_spaces() {
        let uw = roundtrip("cask(icl>wine, equ>220 litres)");
        assert_eq!(uw.class(), UwClass::Restricted);
        assert_eq!(uw.constraints.len(), 2);
        assert_eq!(uw.constraints[1].target, ConstraintTarget::Atom("220 litres".into()));
    }

    #[test]
    fn multiword_headwords_parse() {
        let uw = roundtrip("a hint of(icl>quantity)");
        assert_eq!(uw.headword, "a hint of");
        let uw = roundtrip("there-be(obj>animal)");
        assert_eq!(uw.headword, "there-be");
    }

    #[test]
    fn nested_uw_targets_parse() {
        let uw = roundtrip("look(agt>thing, equ>search, icl>examine(icl>do, obj>thing))");
        assert_eq!(uw.constraints.len(), 3);
        let nested = uw.constraints[2].target.as_uw().expect("nested UW");
        assert_eq!(nested.headword, "examine");
        assert_eq!(nested.constraints.len(), 2);
    }

    #[test]
    fn atom_chains_are_single_targets() {
        let uw = roundtrip("season(agt>person, obj>dish, icl>action>thing)");
        assert_eq!(uw.constraints[2].target, ConstraintTarget::Atom("action>thing".into()));
        assert_eq!(uw.constraints[2].target.head(), "action");
    }

    #[test]
    fn extra_uws_carry_the_cq_prefix() {
        let uw = roundtrip("CQ-satsu-books-notebooks-albums(icl>CQ)");
        assert_eq!(uw.class(), UwClass::Extra);
        assert_eq!(Uw::basic("CQ-dai-cars").class(), UwClass::Extra);
    }

    #[test]
    fn whitespace_is_normalized_away() {
        let uw = parse_uw("  cask( icl>wine ,equ>220 litres )").unwrap();
        assert_eq!(format_uw(&uw), "cask(icl>wine, equ>220 litres)");
    }

    #[test]
    fn error_cases() {
        assert_eq!(parse_uw(""), Err(UwError::Empty));
        assert_eq!(parse_uw("   "), Err(UwError::Empty));
        assert_eq!(parse_uw("(icl>x)"), Err(UwError::EmptyHeadword));
        assert_eq!(parse_uw("cask(icl>wine"), Err(UwError::UnbalancedParens));
        assert_eq!(parse_uw("cask()"), Err(UwError::EmptyConstraint));
        assert_eq!(parse_uw("cask(icl>)"), Err(UwError::EmptyConstraint));
        assert_eq!(parse_uw("cask(wine)"), Err(UwError::MissingSeparator("wine".into())));
        assert_eq!(parse_uw("cask(icl>wine, )"), Err(UwError::MissingSeparator("".into())));
        assert!(matches!(parse_uw("cask(icl>wine))"), Err(UwError::TrailingInput(_))));
        assert!(matches!(parse_uw("cask(icl>wine) x"), Err(UwError::TrailingInput(_))));
    }

    #[test]
    fn strict_mode_rejects_unregistered_relations() {
        let strict = ParseOptions::strict();
        assert_eq!(
            parse_uw_with("cask(xyz>wine)", &strict),
            Err(UwError::UnknownRelation("xyz".into()))
        );
        let (uw, warnings) = parse_uw_with("cask(xyz>wine)", &ParseOptions::default()).unwrap();
        assert_eq!(uw.constraints.len(), 1);
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].code, WarningCode::UnknownRelation);
        // nested relations are checked too
        assert!(parse_uw_with("a(icl>b(zzz>c))", &strict).is_err());
    }

    #[test]
    fn targets_filters_by_relation() {
        let uw = parse_uw("there-be(obj>animal, obj>person)").unwrap();
        let targets = uw.targets("obj");
        assert_eq!(targets.len(), 2);
        assert_eq!(targets[0].as_atom(), Some("animal"));
        assert!(uw.targets("agt").is_empty());
    }

    #[test]
    fn bare_headword_subsumes_restrictions() {
        let general = parse_uw("piece").unwrap();
        let specific = parse_uw("piece(icl>cloth)").unwrap();
        assert!(general.subsumes(&specific));
        assert!(!specific.subsumes(&general));
        assert!(general.subsumes(&general));
    }

    #[test]
    fn subsumption_needs_matching_headwords() {
        let a = parse_uw("cask(icl>wine)").unwrap();
        let b = parse_uw("piece(icl>wine)").unwrap();
        assert!(!a.subsumes(&b) && !b.subsumes(&a));
    }

    #[test]
    fn fewer_constraints_subsume_more() {
        let general = parse_uw("cask(icl>wine)").unwrap();
        let specific = parse_uw("cask(icl>wine, equ>220 litres)").unwrap();
        assert!(general.subsumes(&specific));
        assert!(!specific.subsumes(&general));
    }

    #[test]
    fn atom_chain_prefixes_subsume_longer_chains() {
        let general = parse_uw("season(icl>action)").unwrap();
        let specific = parse_uw("season(icl>action>thing)").unwrap();
        assert!(general.subsumes(&specific));
        assert!(!specific.subsumes(&general));
        // prefix must align on whole segments, not substrings
        let trap = parse_uw("season(icl>act)").unwrap();
        assert!(!trap.subsumes(&specific));
    }

    #[test]
    fn single_segment_atom_subsumes_nested_uw() {
        let general = parse_uw("look(icl>examine)").unwrap();
        let specific = parse_uw("look(icl>examine(icl>do))").unwrap();
        assert!(general.subsumes(&specific));
        assert!(!specific.subsumes(&general));
    }

    #[test]
    fn constraint_order_does_not_affect_equivalence() {
        let a = parse_uw("look(agt>thing, icl>examine(icl>do, obj>thing))").unwrap();
        let b = parse_uw("look(icl>examine(obj>thing, icl>do), agt>thing)").unwrap();
        assert!(a.equivalent(&b));
        assert!(a.subsumes(&b) && b.subsumes(&a));
        assert_ne!(a, b); // plain equality is order-sensitive
    }
}
