//! Floating numeric phrases and their canonical shape.
//!
//! Japanese spells "I bought two books" four ways: the numeral+classifier
//! pair may float after the case particle (本を二冊買いました), attach to the
//! noun with の (二冊の本を買いました), follow the bare noun (本二冊買いました),
//! or trail the whole clause after a comma (本を買いました、二冊). This module
//! detects which shape a tagged sentence uses, finds the noun the phrase
//! quantifies, and rewrites everything to the attached shape — the one
//! rendering that is never ambiguous — returning the (number, classifier,
//! host) triple the rewrite is built from.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Rational64;
use thiserror::Error;

use crate::dict::Dictionary;
use crate::select::{
    check_cooccurrence, classifier_fits, Attachment, Cooccurrence, NounContext, Quantifier,
    VerbChoice,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuantError {
    #[error("token line {line}: {msg}")]
    BadTokenLine { line: usize, msg: String },
    #[error("no numeric phrase found")]
    NoNumericPhrase,
    #[error("overlapping numeric-phrase readings: {0}")]
    AmbiguousPattern(String),
    #[error("numeral {0:?} has no readable value")]
    MissingNumberValue(String),
    #[error("{0:?} is neither a recorded classifier nor a measure unit")]
    UnknownQuantifier(String),
    #[error("no compatible host noun: {}", .0.join("; "))]
    NoCompatibleHost(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag {
    Noun,
    Num,
    Cq,
    Particle,
    Verb,
    Punct,
    Other,
}

impl Tag {
    pub fn as_str(self) -> &'static str {
        match self {
            Tag::Noun => "NOUN",
            Tag::Num => "NUM",
            Tag::Cq => "CQ",
            Tag::Particle => "PARTICLE",
            Tag::Verb => "VERB",
            Tag::Punct => "PUNCT",
            Tag::Other => "OTHER",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "NOUN" => Some(Tag::Noun),
            "NUM" => Some(Tag::Num),
            "CQ" => Some(Tag::Cq),
            "PARTICLE" => Some(Tag::Particle),
            "VERB" => Some(Tag::Verb),
            "PUNCT" => Some(Tag::Punct),
            "OTHER" => Some(Tag::Other),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedToken {
    pub surface: String,
    pub romaji: String,
    pub tag: Tag,
    /// Parsed value of a `NUM` token; `None` elsewhere or when unreadable.
    pub value: Option<Rational64>,
}

impl TaggedToken {
    pub fn new(surface: &str, romaji: &str, tag: Tag) -> Self {
        let value = (tag == Tag::Num).then(|| parse_number(surface)).flatten();
        TaggedToken { surface: surface.to_owned(), romaji: romaji.to_owned(), tag, value }
    }
}

impl fmt::Display for TaggedToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.surface, self.tag.as_str())
    }
}

/// The sentence as written, surfaces only.
pub fn format_tokens(tokens: &[TaggedToken]) -> String {
    tokens.iter().map(|t| t.surface.as_str()).collect()
}

/// Reads `surface<TAB>romaji<TAB>TAG` lines; blank lines separate sentences,
/// `#` lines are comments.
pub fn parse_token_file(text: &str) -> Result<Vec<Vec<TaggedToken>>, QuantError> {
    let mut sentences = Vec::new();
    let mut current: Vec<TaggedToken> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.trim().is_empty() {
            if !current.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let mut parts = line.split('\t');
        let (surface, romaji, tag_text) = match (parts.next(), parts.next(), parts.next()) {
            (Some(s), Some(r), Some(t)) if parts.next().is_none() => (s, r, t),
            _ => {
                return Err(QuantError::BadTokenLine {
                    line: line_no,
                    msg: "expected surface<TAB>romaji<TAB>TAG".to_owned(),
                })
            }
        };
        let tag = Tag::parse(tag_text.trim()).ok_or_else(|| QuantError::BadTokenLine {
            line: line_no,
            msg: format!("unknown tag {tag_text:?}"),
        })?;
        current.push(TaggedToken::new(surface, romaji, tag));
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    Ok(sentences)
}

/// Reads a numeral: ASCII or fullwidth digits (with an optional decimal
/// point), or kanji numerals up to the 万 range.
pub fn parse_number(text: &str) -> Option<Rational64> {
    let ascii: String = text
        .chars()
        .map(|c| match c {
            '０'..='９' => char::from(b'0' + (c as u32 - '０' as u32) as u8),
            '．' => '.',
            other => other,
        })
        .collect();
    if ascii.chars().any(|c| c.is_ascii_digit())
        && ascii.chars().all(|c| c.is_ascii_digit() || c == '.')
    {
        return match ascii.split_once('.') {
            None => ascii.parse::<i64>().ok().map(Rational64::from_integer),
            Some((int, frac)) if !frac.is_empty() && frac.len() <= 9 => {
                let scale = 10i64.pow(frac.len() as u32);
                let int: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
                let frac: i64 = frac.parse().ok()?;
                Some(Rational64::new(int * scale + frac, scale))
            }
            Some(_) => None,
        };
    }
    kanji_number(text).map(Rational64::from_integer)
}

fn kanji_number(text: &str) -> Option<i64> {
    let digit = |c: char| "〇一二三四五六七八九".chars().position(|d| d == c).map(|p| p as i64);
    let (mut total, mut section, mut current) = (0i64, 0i64, 0i64);
    let mut any = false;
    for c in text.chars() {
        any = true;
        if let Some(d) = digit(c) {
            current = current * 10 + d;
            continue;
        }
        match c {
            '十' => {
                section += if current == 0 { 10 } else { current * 10 };
                current = 0;
            }
            '百' => {
                section += if current == 0 { 100 } else { current * 100 };
                current = 0;
            }
            '千' => {
                section += if current == 0 { 1000 } else { current * 1000 };
                current = 0;
            }
            '万' => {
                let myriads = if current == 0 && section == 0 { 1 } else { current };
                total = (total + section + myriads) * 10000;
                section = 0;
                current = 0;
            }
            _ => return None,
        }
    }
    any.then_some(total + section + current)
}

/// The four surface shapes a numeric phrase takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    /// noun + case particle + numeral + classifier + verb
    FloatedAfterCase,
    /// numeral + classifier + の + noun — the canonical shape
    Attached,
    /// noun + numeral + classifier, no particle between
    FloatedBare,
    /// clause, then comma + numeral + classifier as an afterthought
    Postposed,
}

impl Pattern {
    pub fn number(self) -> u8 {
        match self {
            Pattern::FloatedAfterCase => 1,
            Pattern::Attached => 2,
            Pattern::FloatedBare => 3,
            Pattern::Postposed => 4,
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Pattern::FloatedAfterCase => "floated after case particle",
            Pattern::Attached => "attached",
            Pattern::FloatedBare => "floated after bare noun",
            Pattern::Postposed => "postposed",
        };
        write!(f, "pattern {} ({name})", self.number())
    }
}

/// A detected numeric phrase: the token span it occupies plus where its
/// numeral and classifier sit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatternMatch {
    pub pattern: Pattern,
    pub start: usize,
    pub end: usize,
    pub num: usize,
    pub cq: usize,
}

fn is_comma(tok: &TaggedToken) -> bool {
    tok.tag == Tag::Punct && matches!(tok.surface.as_str(), "、" | ",")
}

fn is_no(tok: &TaggedToken) -> bool {
    tok.tag == Tag::Particle && tok.surface == "の"
}

/// All numeric-phrase matches in the sentence, in start order.
pub fn detect_patterns(tokens: &[TaggedToken]) -> Vec<PatternMatch> {
    let tag = |i: usize| tokens.get(i).map(|t| t.tag);
    let mut matches = Vec::new();
    for i in 0..tokens.len() {
        // numeral + classifier + の + noun
        if tag(i) == Some(Tag::Num)
            && tag(i + 1) == Some(Tag::Cq)
            && tokens.get(i + 2).is_some_and(is_no)
            && tag(i + 3) == Some(Tag::Noun)
        {
            matches.push(PatternMatch {
                pattern: Pattern::Attached,
                start: i,
                end: i + 4,
                num: i,
                cq: i + 1,
            });
        }
        // noun + case particle + numeral + classifier + verb
        if tag(i) == Some(Tag::Noun)
            && tag(i + 1) == Some(Tag::Particle)
            && tag(i + 2) == Some(Tag::Num)
            && tag(i + 3) == Some(Tag::Cq)
            && tag(i + 4) == Some(Tag::Verb)
        {
            matches.push(PatternMatch {
                pattern: Pattern::FloatedAfterCase,
                start: i,
                end: i + 4,
                num: i + 2,
                cq: i + 3,
            });
        }
        // noun + numeral + classifier
        if tag(i) == Some(Tag::Noun)
            && tag(i + 1) == Some(Tag::Num)
            && tag(i + 2) == Some(Tag::Cq)
        {
            matches.push(PatternMatch {
                pattern: Pattern::FloatedBare,
                start: i,
                end: i + 3,
                num: i + 1,
                cq: i + 2,
            });
        }
        // comma + numeral + classifier, then nothing but punctuation
        if tokens.get(i).is_some_and(is_comma)
            && tag(i + 1) == Some(Tag::Num)
            && tag(i + 2) == Some(Tag::Cq)
            && tokens[i + 3..].iter().all(|t| t.tag == Tag::Punct)
        {
            matches.push(PatternMatch {
                pattern: Pattern::Postposed,
                start: i,
                end: i + 3,
                num: i + 1,
                cq: i + 2,
            });
        }
    }
    matches.sort_by_key(|m| (m.start, m.end));
    matches
}

/// The one numeric phrase to normalize: the leftmost match. Overlapping
/// matches are a genuine ambiguity (the same numeral claimed by two
/// readings) and are refused.
pub fn detect_pattern(tokens: &[TaggedToken]) -> Result<PatternMatch, QuantError> {
    let matches = detect_patterns(tokens);
    let first = *matches.first().ok_or(QuantError::NoNumericPhrase)?;
    for other in &matches[1..] {
        if other.start < first.end {
            return Err(QuantError::AmbiguousPattern(format!(
                "{} at {}..{} vs {} at {}..{}",
                first.pattern, first.start, first.end, other.pattern, other.start, other.end
            )));
        }
    }
    Ok(first)
}

/// What a numeric phrase resolved to: the value, the classifier's two
/// spellings, and the host noun (surface plus token index).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantTriple {
    pub number: Rational64,
    pub cq_surface: String,
    pub cq_romaji: String,
    pub host_surface: String,
    pub host_index: usize,
}

/// Retags tokens that spell a measure unit and follow a numeral, so `3`+`kg`
/// reads as a numeric phrase without the tagger having to know the unit
/// table.
pub fn promote_units(dict: &Dictionary, tokens: &[TaggedToken]) -> Vec<TaggedToken> {
    let mut out: Vec<TaggedToken> = tokens.to_vec();
    for i in 1..out.len() {
        if out[i - 1].tag == Tag::Num
            && out[i].tag != Tag::Cq
            && dict.unit(&out[i].surface).is_some()
        {
            out[i].tag = Tag::Cq;
        }
    }
    out
}

fn clause_verb_choice(dict: &Dictionary, tokens: &[TaggedToken]) -> Option<VerbChoice> {
    let verb = tokens.iter().find(|t| t.tag == Tag::Verb)?;
    let mut animate = false;
    let mut inanimate = false;
    for lex in dict.lexemes_for(&verb.surface) {
        if lex.uw.headword == "there-be" {
            for t in lex.uw.targets("obj") {
                match t.as_atom() {
                    Some("animal" | "person") => animate = true,
                    Some("thing") => inanimate = true,
                    _ => {}
                }
            }
        }
    }
    match (animate, inanimate) {
        (true, _) => Some(VerbChoice::Iru),
        (false, true) => Some(VerbChoice::Aru),
        (false, false) => None,
    }
}

pub fn associate_host(
    dict: &Dictionary,
    tokens: &[TaggedToken],
    m: &PatternMatch,
) -> Result<QuantTriple, QuantError> {
    associate_host_traced(dict, tokens, m).map(|(triple, _)| triple)
}

/// Finds the noun a numeric phrase quantifies. The attached shape names its
/// host directly; the floated shapes search leftward from the phrase,
/// skipping nouns the quantifier cannot count (each skip is recorded in the
/// trace). A measure unit is additionally held to the attachment rules: it
/// may not float when the clause verb is the animate existential.
pub fn associate_host_traced(
    dict: &Dictionary,
    tokens: &[TaggedToken],
    m: &PatternMatch,
) -> Result<(QuantTriple, Vec<String>), QuantError> {
    let num_tok = &tokens[m.num];
    let number = num_tok.value.ok_or_else(|| {
        QuantError::MissingNumberValue(num_tok.surface.clone())
    })?;
    let cq_tok = &tokens[m.cq];
    let quantifier = crate::select::resolve_quantifier(dict, &cq_tok.surface)
        .or_else(|| crate::select::resolve_quantifier(dict, &cq_tok.romaji))
        .ok_or_else(|| QuantError::UnknownQuantifier(cq_tok.surface.clone()))?;
    let attachment = if m.pattern == Pattern::Attached {
        Attachment::Attached
    } else {
        Attachment::Floated
    };
    let verb = clause_verb_choice(dict, tokens);

    let mut trace = Vec::new();
    let candidates: Vec<usize> = match m.pattern {
        Pattern::Attached => vec![m.end - 1],
        // floated shapes: nearest noun to the left of the numeral first
        _ => (0..m.num).rev().filter(|&i| tokens[i].tag == Tag::Noun).collect(),
    };
    for i in candidates {
        let surface = &tokens[i].surface;
        let Some(lex) = dict.lexeme(surface) else {
            trace.push(format!("{surface:?} is not in the lexicon"));
            continue;
        };
        let host = NounContext::with_number(lex.uw.clone(), number);
        let fits = match &quantifier {
            Quantifier::Classifier(sense) => {
                if classifier_fits(dict, sense, &host.uw) {
                    Cooccurrence::Valid
                } else {
                    Cooccurrence::Invalid(format!(
                        "classifier {} does not count {}",
                        cq_tok.surface, host.uw
                    ))
                }
            }
            Quantifier::Measure(_) => {
                check_cooccurrence(dict, &quantifier, attachment, &host, verb)
            }
        };
        match fits {
            Cooccurrence::Valid => {
                return Ok((
                    QuantTriple {
                        number,
                        cq_surface: cq_tok.surface.clone(),
                        cq_romaji: cq_tok.romaji.clone(),
                        host_surface: surface.clone(),
                        host_index: i,
                    },
                    trace,
                ))
            }
            Cooccurrence::Invalid(why) => trace.push(why),
        }
    }
    Err(QuantError::NoCompatibleHost(trace))
}

/// Rewrites the sentence into the attached shape: numeral + classifier + の
/// directly before the host noun, everything else untouched. A bare-noun or
/// postposed source that loses its case particle gets one restored — が when
/// the clause verb is existential, を otherwise. Already-attached input comes
/// back unchanged, so the rewrite is idempotent. Returns the canonical
/// tokens and the triple, with `host_index` pointing into the canonical
/// sequence.
pub fn normalize(
    dict: &Dictionary,
    tokens: &[TaggedToken],
) -> Result<(Vec<TaggedToken>, QuantTriple), QuantError> {
    let work = promote_units(dict, tokens);
    let m = detect_pattern(&work)?;
    let (mut triple, _trace) = associate_host_traced(dict, &work, &m)?;
    if m.pattern == Pattern::Attached {
        return Ok((work, triple));
    }

    let host = triple.host_index;
    let mut removed: BTreeSet<usize> = BTreeSet::from([m.num, m.cq]);
    if m.pattern == Pattern::Postposed {
        removed.insert(m.start); // the comma
    }
    let mut out: Vec<TaggedToken> = Vec::with_capacity(work.len() + 2);
    for (i, tok) in work.iter().enumerate() {
        if i == host {
            out.push(work[m.num].clone());
            out.push(work[m.cq].clone());
            out.push(TaggedToken::new("の", "no", Tag::Particle));
            triple.host_index = out.len();
            out.push(tok.clone());
            let has_particle = work.get(i + 1).is_some_and(|t| t.tag == Tag::Particle);
            if !has_particle {
                let (s, r) = match clause_verb_choice(dict, &work) {
                    Some(_) => ("が", "ga"),
                    None => ("を", "o"),
                };
                out.push(TaggedToken::new(s, r, Tag::Particle));
            }
            continue;
        }
        if !removed.contains(&i) {
            out.push(tok.clone());
        }
    }
    Ok((out, triple))
}
