//! The classifier/quantifier dictionary.
//!
//! One file holds four kinds of blank-line-separated records, each a block of
//! tab-separated `field<TAB>value` lines introduced by its kind:
//!
//! ```text
//! entry   e-satsu
//! keyword 冊
//! class   classifier
//! en      I bought two books.
//! fr      J'ai acheté deux livres.
//! ja      本を二冊買いました。
//! source  seed
//! unl
//!         agt(buy(icl>do).@entry.@past, I)
//!         ...
//!
//! sense   冊
//! uw      CQ-satsu-books-notebooks-albums(icl>CQ)
//! classifier      冊
//! romaji  satsu
//! type    a
//! referents       books, notebooks, albums
//! referent-uw     book(icl>thing)
//!
//! lex     cat
//! uw      cat(icl>animal)
//! size    Anti-Magn
//!
//! unit    kg
//! name    kilogram
//! ```
//!
//! `entry` records are full dictionary articles (trilingual example sentences
//! plus an annotation graph, continued on tab-indented lines under `unl`).
//! `sense` records map a lemma to one classifier or quantifier reading.
//! `lex` records are the seed lexicon the selectors use to resolve nouns and
//! verbs to UWs; `unit` records list measure units. `#` lines are skipped.
//!
//! [`Dictionary::load`] only checks syntax; [`Dictionary::check_consistency`]
//! reports semantic defects, and [`Dictionary::load_strict`] refuses a file
//! that has any. [`Dictionary::save`] writes canonical text: loading what it
//! wrote yields the same value, byte for byte.

use std::collections::VecDeque;
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::label::ParseOptions;
use crate::unl::{NodeRef, UnlDocument, UnlError};
use crate::uw::{ConstraintTarget, Uw, UwError};

#[derive(Debug, Error)]
pub enum DictError {
    #[error("cannot read dictionary: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: bad UW: {source}")]
    BadUw { line: usize, source: UwError },
    #[error("line {line}: bad annotation: {source}")]
    BadAnnotation { line: usize, source: UnlError },
    #[error("duplicate entry id {0:?}")]
    DuplicateId(String),
    #[error("dictionary is inconsistent: {}", summarize(.0))]
    Inconsistent(Vec<Violation>),
    #[error("no classifier covers {0}")]
    NoClassifier(String),
    #[error("a CQ name needs at least one referent class")]
    EmptyCqName,
}

fn summarize(violations: &[Violation]) -> String {
    let mut s = format!("{} violation(s)", violations.len());
    if let Some(first) = violations.first() {
        s.push_str(&format!(", first is {first}"));
    }
    s
}

/// A defect reported by [`Dictionary::check_consistency`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    /// Id of the entry, or lemma of the sense, that the defect sits in.
    pub id: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationCode {
    BadAnnotation,
    KeywordMissing,
    OrphanCqUw,
    CqNameMismatch,
    EmptyReferents,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}:{}:{}", self.code, self.id, self.message)
    }
}

/// A dictionary article: trilingual illustration plus annotation graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DictEntry {
    pub id: String,
    pub keyword: String,
    pub word_class: String,
    pub sentence_en: String,
    pub sentence_fr: String,
    pub sentence_ja: String,
    pub source: String,
    pub annotation: UnlDocument,
}

/// `a`: a numeral classifier (counts individuals). `b`: a quantifying
/// phraseme (measures a mass). `both` words do either.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CqType {
    A,
    B,
    Both,
}

impl CqType {
    pub fn as_str(self) -> &'static str {
        match self {
            CqType::A => "a",
            CqType::B => "b",
            CqType::Both => "both",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "a" => Some(CqType::A),
            "b" => Some(CqType::B),
            "both" => Some(CqType::Both),
            _ => None,
        }
    }
}

/// Lexical-function size/count marks: big, small, collective, singulative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlLabel {
    Magn,
    AntiMagn,
    Mult,
    Sing,
}

impl FlLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            FlLabel::Magn => "Magn",
            FlLabel::AntiMagn => "Anti-Magn",
            FlLabel::Mult => "Mult",
            FlLabel::Sing => "Sing",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "Magn" => Some(FlLabel::Magn),
            "Anti-Magn" => Some(FlLabel::AntiMagn),
            "Mult" => Some(FlLabel::Mult),
            "Sing" => Some(FlLabel::Sing),
            _ => None,
        }
    }
}

/// One classifier/quantifier reading of a lemma.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CqSense {
    pub lemma: String,
    pub uw: Uw,
    /// Surface form of the classifier or quantity word (e.g. `冊`).
    pub classifier: String,
    pub romaji: String,
    pub cq_type: CqType,
    /// Names of the classes this sense counts, as plural English nouns.
    pub referents: Vec<String>,
    /// Optional UW-level refinements of `referents`.
    pub referent_uws: Vec<Uw>,
    pub fl_label: Option<FlLabel>,
}

/// A seed-lexicon row mapping a surface lemma to its UW.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexeme {
    pub lemma: String,
    pub romaji: Option<String>,
    pub uw: Uw,
    /// Size mark consulted when choosing between big/small animal counters.
    pub size: Option<FlLabel>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureUnit {
    pub symbol: String,
    pub name: String,
}

/// The parsed name of a synthetic `CQ-` UW: romaji plus referent classes,
/// spelled `CQ-<romaji>-<ref>-<ref>-...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CqUwName {
    pub romaji: String,
    pub referents: Vec<String>,
}

impl CqUwName {
    pub fn new(romaji: &str, referents: &[&str]) -> Self {
        CqUwName {
            romaji: romaji.to_owned(),
            referents: referents.iter().map(|s| (*s).to_owned()).collect(),
        }
    }

    /// Reads the name back out of a headword like
    /// `CQ-satsu-books-notebooks-albums`.
    pub fn parse(headword: &str) -> Option<Self> {
        let rest = headword.strip_prefix("CQ-")?;
        let mut parts = rest.split('-');
        let romaji = parts.next().filter(|p| !p.is_empty())?.to_owned();
        let referents: Vec<String> = parts.map(str::to_owned).collect();
        if referents.is_empty() || referents.iter().any(String::is_empty) {
            return None;
        }
        Some(CqUwName { romaji, referents })
    }

    pub fn headword(&self) -> String {
        let mut s = format!("CQ-{}", self.romaji);
        for r in &self.referents {
            s.push('-');
            s.push_str(r);
        }
        s
    }
}

/// Mints the UW for a classifier with no lexical equivalent in the target
/// language: `CQ-satsu-books-notebooks-albums(icl>CQ)`.
pub fn make_cq_uw(name: &CqUwName) -> Result<Uw, DictError> {
    if name.referents.is_empty() {
        return Err(DictError::EmptyCqName);
    }
    let text = format!("{}(icl>CQ)", name.headword());
    Uw::parse(&text).map_err(|source| DictError::BadUw { line: 0, source })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DictStats {
    pub entries: usize,
    pub senses: usize,
    pub lexemes: usize,
    pub units: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dictionary {
    pub entries: Vec<DictEntry>,
    pub senses: Vec<CqSense>,
    pub lexemes: Vec<Lexeme>,
    pub units: Vec<MeasureUnit>,
}

impl Dictionary {
    pub fn new() -> Self {
        Dictionary::default()
    }

    pub fn load(path: &Path) -> Result<Self, DictError> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Loads and additionally refuses a file with consistency violations.
    pub fn load_strict(path: &Path) -> Result<Self, DictError> {
        let dict = Self::load(path)?;
        let violations = dict.check_consistency();
        if violations.is_empty() {
            Ok(dict)
        } else {
            Err(DictError::Inconsistent(violations))
        }
    }

    pub fn parse(text: &str) -> Result<Self, DictError> {
        let mut dict = Dictionary::new();
        for record in split_records(text)? {
            record.build(&mut dict)?;
        }
        Ok(dict)
    }

    /// Canonical text form. Loading the result reproduces `self` exactly, so
    /// `save` after `load` of a canonical file is byte-identical.
    pub fn save(&self) -> String {
        let mut out = String::new();
        let mut first = true;
        let mut sep = |out: &mut String| {
            if !first {
                out.push('\n');
            }
            first = false;
        };
        for e in &self.entries {
            sep(&mut out);
            out.push_str(&format!("entry\t{}\n", e.id));
            out.push_str(&format!("keyword\t{}\n", e.keyword));
            out.push_str(&format!("class\t{}\n", e.word_class));
            out.push_str(&format!("en\t{}\n", e.sentence_en));
            out.push_str(&format!("fr\t{}\n", e.sentence_fr));
            out.push_str(&format!("ja\t{}\n", e.sentence_ja));
            out.push_str(&format!("source\t{}\n", e.source));
            out.push_str("unl\n");
            for line in e.annotation.serialize().lines() {
                out.push_str(&format!("\t{line}\n"));
            }
        }
        for s in &self.senses {
            sep(&mut out);
            out.push_str(&format!("sense\t{}\n", s.lemma));
            out.push_str(&format!("uw\t{}\n", s.uw));
            out.push_str(&format!("classifier\t{}\n", s.classifier));
            out.push_str(&format!("romaji\t{}\n", s.romaji));
            out.push_str(&format!("type\t{}\n", s.cq_type.as_str()));
            if !s.referents.is_empty() {
                out.push_str(&format!("referents\t{}\n", s.referents.join(", ")));
            }
            for r in &s.referent_uws {
                out.push_str(&format!("referent-uw\t{r}\n"));
            }
            if let Some(fl) = s.fl_label {
                out.push_str(&format!("fl\t{}\n", fl.as_str()));
            }
        }
        for l in &self.lexemes {
            sep(&mut out);
            out.push_str(&format!("lex\t{}\n", l.lemma));
            if let Some(r) = &l.romaji {
                out.push_str(&format!("romaji\t{r}\n"));
            }
            out.push_str(&format!("uw\t{}\n", l.uw));
            if let Some(size) = l.size {
                out.push_str(&format!("size\t{}\n", size.as_str()));
            }
        }
        for u in &self.units {
            sep(&mut out);
            out.push_str(&format!("unit\t{}\n", u.symbol));
            out.push_str(&format!("name\t{}\n", u.name));
        }
        out
    }

    pub fn save_to(&self, path: &Path) -> Result<(), DictError> {
        fs::write(path, self.save())?;
        Ok(())
    }

    pub fn stats(&self) -> DictStats {
        DictStats {
            entries: self.entries.len(),
            senses: self.senses.len(),
            lexemes: self.lexemes.len(),
            units: self.units.len(),
        }
    }

    pub fn entries_for_keyword(&self, keyword: &str) -> Vec<&DictEntry> {
        self.entries.iter().filter(|e| e.keyword == keyword).collect()
    }

    /// Senses of a lemma, in file order (file order breaks scoring ties).
    pub fn senses_for_lemma(&self, lemma: &str) -> Vec<&CqSense> {
        self.senses.iter().filter(|s| s.lemma == lemma).collect()
    }

    /// Finds a sense by the classifier's surface or romaji spelling.
    pub fn sense_for_classifier(&self, text: &str) -> Option<&CqSense> {
        self.senses
            .iter()
            .find(|s| s.classifier == text || s.romaji == text || s.lemma == text)
    }

    /// First lexeme whose lemma or UW headword matches.
    pub fn lexeme(&self, word: &str) -> Option<&Lexeme> {
        self.lexemes
            .iter()
            .find(|l| l.lemma == word)
            .or_else(|| self.lexemes.iter().find(|l| l.uw.headword == word))
    }

    /// All lexemes for a lemma — verbs legitimately have several readings.
    pub fn lexemes_for(&self, word: &str) -> Vec<&Lexeme> {
        self.lexemes.iter().filter(|l| l.lemma == word).collect()
    }

    pub fn unit(&self, symbol: &str) -> Option<&MeasureUnit> {
        self.units.iter().find(|u| u.symbol == symbol)
    }

    /// The hypernym atoms reachable from `uw` through `icl` constraints,
    /// in breadth-first order. Atoms that name a lexeme are expanded through
    /// that lexeme's own UW, so `piglet(icl>pig)` reaches `animal` when the
    /// lexicon knows `pig(icl>animal)`.
    pub fn icl_chain(&self, uw: &Uw) -> Vec<String> {
        let mut chain: Vec<String> = Vec::new();
        let mut queue: VecDeque<String> = VecDeque::new();
        push_icl_atoms(uw, &mut queue);
        while let Some(atom) = queue.pop_front() {
            if chain.contains(&atom) {
                continue;
            }
            chain.push(atom.clone());
            if matches!(atom.as_str(), "animal" | "person" | "thing") {
                continue;
            }
            if let Some(lex) = self.lexeme(&atom) {
                push_icl_atoms(&lex.uw, &mut queue);
            }
        }
        chain
    }

    /// Whether a sense counts the given noun: by referent-class name (plural
    /// forms are reduced to candidate singulars), by a stored referent UW
    /// that subsumes the noun, or by a referent class appearing in the noun's
    /// hypernym chain.
    pub fn sense_matches_referent(&self, sense: &CqSense, noun: &Uw) -> bool {
        let chain = self.icl_chain(noun);
        for r in &sense.referents {
            for candidate in singular_candidates(r) {
                if candidate == noun.headword || chain.contains(&candidate) {
                    return true;
                }
            }
        }
        sense.referent_uws.iter().any(|r| r.subsumes(noun))
    }

    /// The size mark recorded for a noun, looked up by UW headword.
    pub fn size_of(&self, noun: &Uw) -> Option<FlLabel> {
        self.lexemes
            .iter()
            .find(|l| l.uw.headword == noun.headword && l.size.is_some())
            .and_then(|l| l.size)
    }

    /// For animals with a size mark, the classifier carrying the matching
    /// lexical-function label: big animals and small animals take different
    /// counters even though both are `icl>animal`.
    pub fn magnitude_sense(&self, noun: &Uw) -> Option<&CqSense> {
        let chain = self.icl_chain(noun);
        if !chain.iter().any(|a| a == "animal") {
            return None;
        }
        let size = self.size_of(noun)?;
        self.senses
            .iter()
            .find(|s| s.cq_type == CqType::A && s.fl_label == Some(size))
    }

    /// Picks the classifier for a noun: the size-marked animal counter when
    /// one applies, otherwise the first sense (file order) whose referent
    /// classes cover the noun.
    pub fn classifier_for_referent(&self, noun: &Uw) -> Result<&CqSense, DictError> {
        if let Some(s) = self.magnitude_sense(noun) {
            return Ok(s);
        }
        self.senses
            .iter()
            .find(|s| self.sense_matches_referent(s, noun))
            .ok_or_else(|| DictError::NoClassifier(noun.to_string()))
    }

    /// Semantic checks over a syntactically loaded dictionary.
    pub fn check_consistency(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        let strict = ParseOptions::strict();

        for e in &self.entries {
            if e.annotation.is_empty() {
                violations.push(Violation {
                    code: ViolationCode::BadAnnotation,
                    id: e.id.clone(),
                    message: "annotation is empty".to_owned(),
                });
            } else if let Some(v) = e.annotation.validate_complete(&strict).first() {
                violations.push(Violation {
                    code: ViolationCode::BadAnnotation,
                    id: e.id.clone(),
                    message: v.to_string(),
                });
            }

            let kw = e.keyword.to_lowercase();
            let mentioned = [&e.sentence_en, &e.sentence_fr, &e.sentence_ja]
                .iter()
                .any(|s| s.to_lowercase().contains(&kw));
            if !mentioned {
                violations.push(Violation {
                    code: ViolationCode::KeywordMissing,
                    id: e.id.clone(),
                    message: format!("keyword {:?} appears in no example sentence", e.keyword),
                });
            }

            // every synthetic CQ-UW used in an annotation must be a known sense
            for arc in &e.annotation.arcs {
                for node in [&arc.source, &arc.target] {
                    if let NodeRef::Uw(n) = node {
                        if n.uw.headword.starts_with("CQ-")
                            && !self.senses.iter().any(|s| s.uw == n.uw)
                        {
                            violations.push(Violation {
                                code: ViolationCode::OrphanCqUw,
                                id: e.id.clone(),
                                message: format!("{} has no sense record", n.uw),
                            });
                        }
                    }
                }
            }
        }

        for s in &self.senses {
            if s.cq_type == CqType::A && s.referents.is_empty() {
                violations.push(Violation {
                    code: ViolationCode::EmptyReferents,
                    id: s.lemma.clone(),
                    message: "a classifier sense must name its referent classes".to_owned(),
                });
            }
            if let Some(name) = CqUwName::parse(&s.uw.headword) {
                if name.romaji != s.romaji || name.referents != s.referents {
                    violations.push(Violation {
                        code: ViolationCode::CqNameMismatch,
                        id: s.lemma.clone(),
                        message: format!(
                            "{} disagrees with romaji {:?} and referents {:?}",
                            s.uw.headword, s.romaji, s.referents
                        ),
                    });
                }
            }
        }

        violations
    }
}

fn push_icl_atoms(uw: &Uw, out: &mut VecDeque<String>) {
    for target in uw.targets("icl") {
        match target {
            ConstraintTarget::Atom(a) => {
                out.extend(a.split('>').map(|s| s.trim().to_owned()));
            }
            ConstraintTarget::Uw(nested) => {
                out.push_back(nested.headword.clone());
                push_icl_atoms(nested, out);
            }
        }
    }
}

/// Candidate singulars of an English plural, most likely first. English
/// plural morphology is not invertible without a lexicon (`houses` drops `s`,
/// `boxes` drops `es`), so matching tries every candidate.
pub(crate) fn singular_candidates(word: &str) -> Vec<String> {
    let mut out = vec![word.to_owned()];
    if let Some(stem) = word.strip_suffix("ies") {
        if !stem.is_empty() {
            out.push(format!("{stem}y"));
        }
    }
    if let Some(stem) = word.strip_suffix("es") {
        if !stem.is_empty() {
            out.push(stem.to_owned());
        }
    }
    if let Some(stem) = word.strip_suffix('s') {
        if !stem.is_empty() && !out.contains(&stem.to_owned()) {
            out.push(stem.to_owned());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// file parsing

struct Field {
    name: String,
    value: String,
    line: usize,
    continuations: Vec<(String, usize)>,
}

struct Record {
    fields: Vec<Field>,
}

impl Record {
    fn kind(&self) -> &str {
        &self.fields[0].name
    }

    fn line(&self) -> usize {
        self.fields[0].line
    }

    /// The single value of a required field.
    fn required(&self, name: &str) -> Result<&str, DictError> {
        self.optional(name)?.ok_or_else(|| DictError::Malformed {
            line: self.line(),
            msg: format!("{} record is missing the {name:?} field", self.kind()),
        })
    }

    fn optional(&self, name: &str) -> Result<Option<&str>, DictError> {
        let mut found = None;
        for f in self.fields.iter().filter(|f| f.name == name) {
            if found.is_some() {
                return Err(DictError::Malformed {
                    line: f.line,
                    msg: format!("field {name:?} given twice"),
                });
            }
            found = Some(f.value.as_str());
        }
        Ok(found)
    }

    fn repeated(&self, name: &str) -> Vec<&Field> {
        self.fields.iter().filter(|f| f.name == name).collect()
    }

    fn check_known(&self, known: &[&str]) -> Result<(), DictError> {
        for f in &self.fields[1..] {
            if !known.contains(&f.name.as_str()) {
                return Err(DictError::Malformed {
                    line: f.line,
                    msg: format!("unknown field {:?} in a {} record", f.name, self.kind()),
                });
            }
        }
        Ok(())
    }

    fn build(&self, dict: &mut Dictionary) -> Result<(), DictError> {
        match self.kind() {
            "entry" => self.build_entry(dict),
            "sense" => self.build_sense(dict),
            "lex" => self.build_lexeme(dict),
            "unit" => self.build_unit(dict),
            other => Err(DictError::Malformed {
                line: self.line(),
                msg: format!("unknown record kind {other:?}"),
            }),
        }
    }

    fn build_entry(&self, dict: &mut Dictionary) -> Result<(), DictError> {
        self.check_known(&["keyword", "class", "en", "fr", "ja", "source", "unl"])?;
        let id = self.fields[0].value.clone();
        if id.is_empty() {
            return Err(DictError::Malformed {
                line: self.line(),
                msg: "entry record needs an id".to_owned(),
            });
        }
        if dict.entries.iter().any(|e| e.id == id) {
            return Err(DictError::DuplicateId(id));
        }
        let unl_field = self
            .repeated("unl")
            .into_iter()
            .next()
            .ok_or_else(|| DictError::Malformed {
                line: self.line(),
                msg: "entry record is missing the \"unl\" field".to_owned(),
            })?;
        let mut text = String::new();
        for (line, _) in &unl_field.continuations {
            text.push_str(line);
            text.push('\n');
        }
        let annotation = UnlDocument::parse(&text).map_err(|source| DictError::BadAnnotation {
            line: unl_field.line,
            source,
        })?;
        dict.entries.push(DictEntry {
            id,
            keyword: self.required("keyword")?.to_owned(),
            word_class: self.required("class")?.to_owned(),
            sentence_en: self.required("en")?.to_owned(),
            sentence_fr: self.required("fr")?.to_owned(),
            sentence_ja: self.required("ja")?.to_owned(),
            source: self.required("source")?.to_owned(),
            annotation,
        });
        Ok(())
    }

    fn build_sense(&self, dict: &mut Dictionary) -> Result<(), DictError> {
        self.check_known(&["uw", "classifier", "romaji", "type", "referents", "referent-uw", "fl"])?;
        let uw_text = self.required("uw")?;
        let uw = Uw::parse(uw_text)
            .map_err(|source| DictError::BadUw { line: self.line(), source })?;
        let type_text = self.required("type")?;
        let cq_type = CqType::parse(type_text).ok_or_else(|| DictError::Malformed {
            line: self.line(),
            msg: format!("unknown sense type {type_text:?} (expected a, b, or both)"),
        })?;
        let referents = match self.optional("referents")? {
            Some(list) => list.split(',').map(|s| s.trim().to_owned()).collect(),
            None => Vec::new(),
        };
        let mut referent_uws = Vec::new();
        for f in self.repeated("referent-uw") {
            referent_uws.push(
                Uw::parse(&f.value)
                    .map_err(|source| DictError::BadUw { line: f.line, source })?,
            );
        }
        let fl_label = match self.optional("fl")? {
            Some(text) => Some(FlLabel::parse(text).ok_or_else(|| DictError::Malformed {
                line: self.line(),
                msg: format!("unknown fl label {text:?}"),
            })?),
            None => None,
        };
        dict.senses.push(CqSense {
            lemma: self.fields[0].value.clone(),
            uw,
            classifier: self.required("classifier")?.to_owned(),
            romaji: self.required("romaji")?.to_owned(),
            cq_type,
            referents,
            referent_uws,
            fl_label,
        });
        Ok(())
    }

    fn build_lexeme(&self, dict: &mut Dictionary) -> Result<(), DictError> {
        self.check_known(&["romaji", "uw", "size"])?;
        let uw_text = self.required("uw")?;
        let uw = Uw::parse(uw_text)
            .map_err(|source| DictError::BadUw { line: self.line(), source })?;
        let size = match self.optional("size")? {
            Some(text) => Some(FlLabel::parse(text).ok_or_else(|| DictError::Malformed {
                line: self.line(),
                msg: format!("unknown size label {text:?}"),
            })?),
            None => None,
        };
        dict.lexemes.push(Lexeme {
            lemma: self.fields[0].value.clone(),
            romaji: self.optional("romaji")?.map(str::to_owned),
            uw,
            size,
        });
        Ok(())
    }

    fn build_unit(&self, dict: &mut Dictionary) -> Result<(), DictError> {
        self.check_known(&["name"])?;
        dict.units.push(MeasureUnit {
            symbol: self.fields[0].value.clone(),
            name: self.required("name")?.to_owned(),
        });
        Ok(())
    }
}

fn split_records(text: &str) -> Result<Vec<Record>, DictError> {
    let mut records = Vec::new();
    let mut fields: Vec<Field> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        if raw.trim().is_empty() {
            if !fields.is_empty() {
                records.push(Record { fields: std::mem::take(&mut fields) });
            }
            continue;
        }
        if raw.starts_with('#') {
            continue;
        }
        if let Some(cont) = raw.strip_prefix('\t') {
            match fields.last_mut() {
                Some(f) if f.name == "unl" => f.continuations.push((cont.to_owned(), line_no)),
                _ => {
                    return Err(DictError::Malformed {
                        line: line_no,
                        msg: "indented line outside an \"unl\" block".to_owned(),
                    })
                }
            }
            continue;
        }
        let (name, value) = match raw.split_once('\t') {
            Some((n, v)) => (n.trim().to_owned(), v.trim().to_owned()),
            None => (raw.trim().to_owned(), String::new()),
        };
        fields.push(Field { name, value, line: line_no, continuations: Vec::new() });
    }
    if !fields.is_empty() {
        records.push(Record { fields });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
entry\te-satsu
keyword\t冊
class\tclassifier
en\tI bought two books.
fr\tJ'ai acheté deux livres.
ja\t本を二冊買いました。
source\tseed
unl
\tagt(buy(icl>do).@entry.@past, I)
\tobj(buy(icl>do).@entry.@past, book(icl>thing).@pl)
\tqua(book(icl>thing).@pl, :01)
\tmod:01(CQ-satsu-books-notebooks-albums(icl>CQ).@entry.@eld, 2)

sense\t冊
uw\tCQ-satsu-books-notebooks-albums(icl>CQ)
classifier\t冊
romaji\tsatsu
type\ta
referents\tbooks, notebooks, albums
referent-uw\tbook(icl>thing)

sense\t匹
uw\tCQ-hiki-cats-dogs(icl>CQ)
classifier\t匹
romaji\thiki
type\ta
referents\tcats, dogs
fl\tAnti-Magn

lex\tcat
uw\tcat(icl>animal)
size\tAnti-Magn

lex\tpig
uw\tpig(icl>animal)

lex\tpiglet
uw\tpiglet(icl>pig)
size\tAnti-Magn

lex\tbook
uw\tbook(icl>thing)

unit\tkg
name\tkilogram
";

    fn small() -> Dictionary {
        Dictionary::parse(SMALL).unwrap()
    }

    #[test]
    fn parses_all_record_kinds() {
        let d = small();
        assert_eq!(
            d.stats(),
            DictStats { entries: 1, senses: 2, lexemes: 4, units: 1 }
        );
        let e = &d.entries[0];
        assert_eq!(e.id, "e-satsu");
        assert_eq!(e.keyword, "冊");
        assert_eq!(e.annotation.arcs.len(), 4);
        let s = &d.senses[0];
        assert_eq!(s.romaji, "satsu");
        assert_eq!(s.referents, vec!["books", "notebooks", "albums"]);
        assert_eq!(s.referent_uws.len(), 1);
        assert_eq!(d.senses[1].fl_label, Some(FlLabel::AntiMagn));
        assert_eq!(d.lexemes[0].size, Some(FlLabel::AntiMagn));
        assert_eq!(d.unit("kg").unwrap().name, "kilogram");
    }

    #[test]
    fn save_roundtrips_byte_for_byte() {
        let d = small();
        assert_eq!(d.save(), SMALL);
        assert_eq!(Dictionary::parse(&d.save()).unwrap(), d);
    }

    #[test]
    fn consistency_of_the_small_fixture() {
        assert_eq!(small().check_consistency(), Vec::new());
    }

    #[test]
    fn missing_keyword_in_sentences_is_flagged() {
        let mut d = small();
        d.entries[0].sentence_ja = "本を買いました。".into();
        let v = d.check_consistency();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].code, ViolationCode::KeywordMissing);
        assert!(v[0].to_string().starts_with("KeywordMissing:e-satsu:"));
    }

    #[test]
    fn keyword_matching_folds_case() {
        let mut d = small();
        d.entries[0].keyword = "BOOKS".into();
        assert!(d.check_consistency().is_empty(), "matched inside 'books.'");
    }

    #[test]
    fn bad_annotations_are_flagged() {
        let mut d = small();
        // drop the scoped arc: the qua target now dangles and :01 is empty
        d.entries[0].annotation.arcs.pop();
        let v = d.check_consistency();
        assert!(v.iter().any(|v| v.code == ViolationCode::BadAnnotation));
    }

    #[test]
    fn cq_uws_without_senses_are_orphans() {
        let mut d = small();
        d.senses.remove(0);
        let v = d.check_consistency();
        assert!(v.iter().any(|v| v.code == ViolationCode::OrphanCqUw));
    }

    #[test]
    fn cq_names_must_agree_with_their_sense() {
        let mut d = small();
        d.senses[0].referents = vec!["books".into()];
        let v = d.check_consistency();
        assert!(v.iter().any(|v| v.code == ViolationCode::CqNameMismatch));
    }

    #[test]
    fn classifier_senses_need_referents() {
        let mut d = small();
        d.senses[1].referents.clear();
        d.senses[1].uw = Uw::basic("CQ-hiki-cats"); // keep the name parseable
        let v = d.check_consistency();
        assert!(v.iter().any(|v| v.code == ViolationCode::EmptyReferents));
        assert!(v.iter().any(|v| v.code == ViolationCode::CqNameMismatch));
    }

    #[test]
    fn cq_uw_names_roundtrip() {
        let name = CqUwName::new("satsu", &["books", "notebooks", "albums"]);
        let uw = make_cq_uw(&name).unwrap();
        assert_eq!(uw.to_string(), "CQ-satsu-books-notebooks-albums(icl>CQ)");
        assert_eq!(CqUwName::parse(&uw.headword), Some(name));
        assert_eq!(CqUwName::parse("CQ-"), None);
        assert_eq!(CqUwName::parse("CQ-satsu"), None);
        assert_eq!(CqUwName::parse("satsu-books"), None);
        assert!(make_cq_uw(&CqUwName { romaji: "x".into(), referents: vec![] }).is_err());
    }

    #[test]
    fn icl_chains_expand_through_the_lexicon() {
        let d = small();
        let piglet = Uw::parse("piglet(icl>pig)").unwrap();
        assert_eq!(d.icl_chain(&piglet), vec!["pig", "animal"]);
        let book = Uw::parse("book(icl>thing)").unwrap();
        assert_eq!(d.icl_chain(&book), vec!["thing"]);
        // chains inside a single atom expand without the lexicon
        let deep = Uw::parse("x(icl>action>thing)").unwrap();
        assert_eq!(d.icl_chain(&deep), vec!["action", "thing"]);
    }

    #[test]
    fn referent_matching_covers_name_chain_and_uw_routes() {
        let d = small();
        let satsu = &d.senses[0];
        let book = Uw::parse("book(icl>thing)").unwrap();
        assert!(d.sense_matches_referent(satsu, &book), "books ~ book");
        let notebook = Uw::parse("notebook(icl>thing)").unwrap();
        assert!(d.sense_matches_referent(satsu, &notebook));
        let cat = Uw::parse("cat(icl>animal)").unwrap();
        assert!(!d.sense_matches_referent(satsu, &cat));
        assert!(d.sense_matches_referent(&d.senses[1], &cat));
    }

    #[test]
    fn magnitude_routes_small_animals_to_their_counter() {
        let d = small();
        let piglet = Uw::parse("piglet(icl>pig)").unwrap();
        let sense = d.magnitude_sense(&piglet).expect("piglet is a marked animal");
        assert_eq!(sense.romaji, "hiki");
        // an unmarked animal has no magnitude route
        let pig = Uw::parse("pig(icl>animal)").unwrap();
        assert!(d.magnitude_sense(&pig).is_none());
        // things never do
        let book = Uw::parse("book(icl>thing)").unwrap();
        assert!(d.magnitude_sense(&book).is_none());
    }

    #[test]
    fn classifier_for_referent_falls_back_to_file_order() {
        let d = small();
        let book = Uw::parse("book(icl>thing)").unwrap();
        assert_eq!(d.classifier_for_referent(&book).unwrap().romaji, "satsu");
        let piglet = Uw::parse("piglet(icl>pig)").unwrap();
        assert_eq!(d.classifier_for_referent(&piglet).unwrap().romaji, "hiki");
        let rock = Uw::parse("rock(icl>thing)").unwrap();
        assert!(matches!(
            d.classifier_for_referent(&rock),
            Err(DictError::NoClassifier(_))
        ));
    }

    #[test]
    fn singular_candidates_cover_irregular_spellings() {
        assert!(singular_candidates("books").contains(&"book".to_owned()));
        assert!(singular_candidates("boxes").contains(&"box".to_owned()));
        assert!(singular_candidates("houses").contains(&"house".to_owned()));
        assert!(singular_candidates("bodies").contains(&"body".to_owned()));
        assert!(singular_candidates("meat").contains(&"meat".to_owned()));
    }

    #[test]
    fn malformed_records_are_rejected() {
        assert!(matches!(
            Dictionary::parse("bogus\tx\nname\ty\n"),
            Err(DictError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            Dictionary::parse("unit\tkg\n"),
            Err(DictError::Malformed { .. })
        ));
        assert!(matches!(
            Dictionary::parse("unit\tkg\nname\tkilogram\nname\tkilo\n"),
            Err(DictError::Malformed { line: 3, .. })
        ));
        assert!(matches!(
            Dictionary::parse("lex\tcat\nuw\tcat((\n"),
            Err(DictError::BadUw { line: 1, .. })
        ));
        assert!(matches!(
            Dictionary::parse("\tindented\n"),
            Err(DictError::Malformed { line: 1, .. })
        ));
        let dup = "unit\tkg\nname\tk\n\nunit\tkg\nname\tk\n";
        assert!(Dictionary::parse(dup).is_ok(), "duplicate units are tolerated");
        let dup_entries = SMALL.to_owned() + "\n" + &SMALL[..SMALL.find("\nsense").unwrap()] + "\n";
        assert!(matches!(
            Dictionary::parse(&dup_entries),
            Err(DictError::DuplicateId(_))
        ));
    }

    #[test]
    fn comments_are_skipped_but_not_kept() {
        let text = format!("# header\n{SMALL}");
        let d = Dictionary::parse(&text).unwrap();
        assert_eq!(d, small());
        assert_eq!(d.save(), SMALL);
    }
}
