//! Choosing the right classifier, dummy classifier, or existential verb.
//!
//! Everything here works over a loaded [`Dictionary`]: score a lemma's senses
//! against the UW of the noun being counted, build the two-arc quantity
//! fragment for classifiers with no source-language equivalent, pick between
//! the animate and inanimate existential verbs, and reject measure phrases
//! that float where only true classifiers may.

use std::fmt;

use num_rational::Rational64;
use thiserror::Error;

use crate::dict::{CqSense, CqType, DictError, Dictionary, MeasureUnit};
use crate::label::AttributeLabel;
use crate::unl::{Arc, NodeRef, ScopeId, UnlDocument, UwNode};
use crate::uw::{ConstraintTarget, Uw};

#[derive(Debug, Error)]
pub enum SelectError {
    #[error("unknown word {0:?}")]
    UnknownWord(String),
    #[error("no sense recorded for {0:?}")]
    NoSense(String),
    #[error("no sense of {lemma:?} covers {uw}")]
    NoMatch { lemma: String, uw: String },
    #[error("cannot tell whether {0} is animate")]
    UnknownAnimacy(String),
    #[error("{0} is not an animal")]
    NotAnimal(String),
    #[error("no size mark recorded for {0}")]
    UnknownSize(String),
    #[error("no existential verb covers {0} referents")]
    MissingExistential(String),
    #[error(transparent)]
    Dict(#[from] DictError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Animacy {
    Animal,
    Person,
    Thing,
}

impl Animacy {
    pub fn atom(self) -> &'static str {
        match self {
            Animacy::Animal => "animal",
            Animacy::Person => "person",
            Animacy::Thing => "thing",
        }
    }
}

/// Walks the noun's hypernym chain and reports the first of the three
/// animacy terminals it reaches.
pub fn animacy(dict: &Dictionary, uw: &Uw) -> Option<Animacy> {
    let terminal = |atom: &str| match atom {
        "animal" => Some(Animacy::Animal),
        "person" => Some(Animacy::Person),
        "thing" => Some(Animacy::Thing),
        _ => None,
    };
    if let Some(a) = terminal(&uw.headword) {
        return Some(a);
    }
    dict.icl_chain(uw).iter().find_map(|a| terminal(a))
}

/// The noun being counted: its UW plus, when known, how many there are.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NounContext {
    pub uw: Uw,
    pub number: Option<Rational64>,
}

impl NounContext {
    pub fn new(uw: Uw) -> Self {
        NounContext { uw, number: None }
    }

    pub fn with_number(uw: Uw, number: Rational64) -> Self {
        NounContext { uw, number: Some(number) }
    }

    /// Resolves a surface word through the lexicon; full UW expressions are
    /// accepted directly.
    pub fn resolve(dict: &Dictionary, word: &str) -> Result<Self, SelectError> {
        if let Some(lex) = dict.lexeme(word) {
            return Ok(NounContext::new(lex.uw.clone()));
        }
        if word.contains('(') {
            let uw = Uw::parse(word)
                .map_err(|source| SelectError::Dict(DictError::BadUw { line: 0, source }))?;
            return Ok(NounContext::new(uw));
        }
        Err(SelectError::UnknownWord(word.to_owned()))
    }
}

/// A disambiguation result: the winning sense, how many of its constraints
/// the context satisfied, and a human-readable account of why.
#[derive(Debug, Clone)]
pub struct Selection<'d> {
    pub sense: &'d CqSense,
    pub score: u32,
    pub rationale: Vec<String>,
}

/// How well a sense's UW fits the context noun: one point per constraint the
/// noun satisfies, either through its hypernym chain (`icl`) or by carrying a
/// matching constraint itself.
fn sense_score(dict: &Dictionary, sense_uw: &Uw, ctx: &NounContext) -> (u32, Vec<String>) {
    let chain = dict.icl_chain(&ctx.uw);
    let mut score = 0;
    let mut why = Vec::new();
    let covers = |atom: &str| atom == ctx.uw.headword || chain.iter().any(|a| a == atom);
    for c in &sense_uw.constraints {
        let satisfied = if c.relation == "icl" {
            match &c.target {
                ConstraintTarget::Atom(a) => a.split('>').map(str::trim).any(covers),
                ConstraintTarget::Uw(nested) => covers(&nested.headword),
            }
        } else {
            ctx.uw
                .constraints
                .iter()
                .any(|own| own.relation == c.relation && own.target.head() == c.target.head())
        };
        if satisfied {
            score += 1;
            why.push(format!("{c} fits {}", ctx.uw));
        }
    }
    (score, why)
}

/// Picks the sense of `lemma` that best fits the noun: highest-scoring sense
/// wins, file order breaks ties. When no sense scores at all (or the lemma
/// has none), the choice falls through to the dictionary-wide referent-class
/// route, so a lemma like a generic "piece" still resolves against nouns its
/// own senses never mention.
pub fn disambiguate<'d>(
    dict: &'d Dictionary,
    lemma: &str,
    ctx: &NounContext,
) -> Result<Selection<'d>, SelectError> {
    let senses = dict.senses_for_lemma(lemma);
    let mut best: Option<Selection<'d>> = None;
    for sense in &senses {
        let (score, rationale) = sense_score(dict, &sense.uw, ctx);
        if best.as_ref().is_none_or(|b| score > b.score) {
            best = Some(Selection { sense, score, rationale });
        }
    }
    if let Some(b) = best {
        if b.score > 0 {
            return Ok(b);
        }
    }
    match dict.classifier_for_referent(&ctx.uw) {
        Ok(sense) => Ok(Selection {
            sense,
            score: 0,
            rationale: vec![format!(
                "no sense of {lemma:?} mentions {}; chosen by referent class",
                ctx.uw
            )],
        }),
        Err(DictError::NoClassifier(_)) if senses.is_empty() => {
            Err(SelectError::NoSense(lemma.to_owned()))
        }
        Err(DictError::NoClassifier(_)) => {
            Err(SelectError::NoMatch { lemma: lemma.to_owned(), uw: ctx.uw.to_string() })
        }
        Err(e) => Err(e.into()),
    }
}

/// For animals carrying a size mark, the classifier with the matching
/// lexical-function label.
pub fn magnitude_classifier<'d>(
    dict: &'d Dictionary,
    ctx: &NounContext,
) -> Result<&'d CqSense, SelectError> {
    match animacy(dict, &ctx.uw) {
        Some(Animacy::Animal) => {}
        _ => return Err(SelectError::NotAnimal(ctx.uw.to_string())),
    }
    let size = dict
        .size_of(&ctx.uw)
        .ok_or_else(|| SelectError::UnknownSize(ctx.uw.to_string()))?;
    dict.senses
        .iter()
        .find(|s| s.cq_type == CqType::A && s.fl_label == Some(size))
        .ok_or_else(|| SelectError::NoMatch {
            lemma: size.as_str().to_owned(),
            uw: ctx.uw.to_string(),
        })
}

fn render_number(n: Rational64) -> String {
    if n.is_integer() {
        return n.numer().to_string();
    }
    // decimal when the denominator is 2^a * 5^b, fraction syntax otherwise
    let (mut d, mut twos, mut fives) = (*n.denom(), 0u32, 0u32);
    while d % 2 == 0 {
        d /= 2;
        twos += 1;
    }
    while d % 5 == 0 {
        d /= 5;
        fives += 1;
    }
    if d != 1 {
        return format!("{}/{}", n.numer(), n.denom());
    }
    let k = twos.max(fives);
    let scaled = n.numer() * 10i64.pow(k) / n.denom();
    let (sign, scaled) = if scaled < 0 { ("-", -scaled) } else { ("", scaled) };
    let digits = format!("{scaled:0>width$}", width = k as usize + 1);
    let split = digits.len() - k as usize;
    format!("{sign}{}.{}", &digits[..split], &digits[split..])
}

fn number_node(n: Rational64) -> NodeRef {
    let text = render_number(n);
    if text.chars().all(|c| c.is_ascii_digit()) {
        NodeRef::Plain(text)
    } else {
        NodeRef::Uw(UwNode::new(Uw::basic(&text)))
    }
}

fn attr(name: &str) -> AttributeLabel {
    AttributeLabel::new(name).expect("valid attribute name")
}

fn quantity_arcs(noun: &Uw, sense: &CqSense, n: Rational64, scope: ScopeId) -> [Arc; 2] {
    let noun_attrs = if n > Rational64::from_integer(1) { vec![attr("pl")] } else { Vec::new() };
    [
        Arc {
            relation: crate::label::RelationLabel::new("qua").unwrap(),
            scope: None,
            source: NodeRef::Uw(UwNode::with_attributes(noun.clone(), noun_attrs)),
            target: NodeRef::Scope(scope.clone()),
            line: 0,
        },
        Arc {
            relation: crate::label::RelationLabel::new("mod").unwrap(),
            scope: Some(scope),
            source: NodeRef::Uw(UwNode::with_attributes(
                sense.uw.clone(),
                [attr("entry"), attr("eld")],
            )),
            target: number_node(n),
            line: 0,
        },
    ]
}

/// The standalone quantity fragment for "n of this noun": a `qua` arc from
/// the noun into a sub-scope holding the classifier (marked `@entry` and
/// `@eld` — it is the scope's head yet surfaces as no word of its own) moded
/// by the numeral. The noun takes `@pl` exactly when n exceeds one.
pub fn dummy_classifier_fragment(
    dict: &Dictionary,
    ctx: &NounContext,
    n: Rational64,
) -> Result<UnlDocument, SelectError> {
    let sense = dict.classifier_for_referent(&ctx.uw)?;
    let [a, b] = quantity_arcs(&ctx.uw, sense, n, ScopeId::new("01").expect("static id"));
    Ok(UnlDocument { arcs: vec![a, b] })
}

/// Appends the quantity fragment to an existing sentence graph, picking the
/// first sub-scope id the graph does not use yet. The noun node is spelled
/// exactly as [`dummy_classifier_fragment`] spells it, so a graph that
/// already mentions the noun (with `@pl` when plural) gains arcs onto the
/// same node rather than a parallel one.
pub fn insert_dummy_classifier(
    dict: &Dictionary,
    base: &UnlDocument,
    ctx: &NounContext,
    n: Rational64,
) -> Result<UnlDocument, SelectError> {
    let sense = dict.classifier_for_referent(&ctx.uw)?;
    let used = base.scopes();
    let scope = (1..100)
        .map(|i| ScopeId::new(&format!("{i:02}")).expect("two digits"))
        .find(|s| !used.contains(s))
        .expect("fewer than 99 scopes in use");
    let mut doc = base.clone();
    let [a, b] = quantity_arcs(&ctx.uw, sense, n, scope);
    doc.arcs.push(a);
    doc.arcs.push(b);
    Ok(doc)
}

/// Japanese existence verbs: いる for animates, ある for inanimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerbChoice {
    Iru,
    Aru,
}

impl VerbChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            VerbChoice::Iru => "iru",
            VerbChoice::Aru => "aru",
        }
    }

    pub fn surface(self) -> &'static str {
        match self {
            VerbChoice::Iru => "いる",
            VerbChoice::Aru => "ある",
        }
    }
}

impl fmt::Display for VerbChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.surface(), self.as_str())
    }
}

/// Chooses the existential verb for a noun by matching its animacy against
/// the `obj` restrictions of the recorded `there-be` verb senses. The
/// lexicon really decides: without a `there-be` sense covering the noun's
/// animacy class this is an error, not a default.
pub fn select_existential(dict: &Dictionary, ctx: &NounContext) -> Result<VerbChoice, SelectError> {
    let a = animacy(dict, &ctx.uw)
        .ok_or_else(|| SelectError::UnknownAnimacy(ctx.uw.to_string()))?;
    let covered = dict.lexemes.iter().any(|l| {
        l.uw.headword == "there-be"
            && l.uw.targets("obj").iter().any(|t| t.as_atom() == Some(a.atom()))
    });
    if !covered {
        return Err(SelectError::MissingExistential(a.atom().to_owned()));
    }
    Ok(match a {
        Animacy::Animal | Animacy::Person => VerbChoice::Iru,
        Animacy::Thing => VerbChoice::Aru,
    })
}

/// Whether a numeric phrase sits next to its noun or floats elsewhere in the
/// clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attachment {
    Floated,
    Attached,
}

/// What follows the numeral: a true classifier sense or a measure unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quantifier<'d> {
    Classifier(&'d CqSense),
    Measure(&'d MeasureUnit),
}

/// Looks a surface or romaji spelling up as a classifier sense first, then
/// as a measure unit.
pub fn resolve_quantifier<'d>(dict: &'d Dictionary, text: &str) -> Option<Quantifier<'d>> {
    if let Some(s) = dict.sense_for_classifier(text) {
        return Some(Quantifier::Classifier(s));
    }
    dict.unit(text).map(Quantifier::Measure)
}

/// Whether this classifier can count this noun, through referent classes or
/// as the noun's size-marked counter.
pub fn classifier_fits(dict: &Dictionary, sense: &CqSense, noun: &Uw) -> bool {
    dict.sense_matches_referent(sense, noun)
        || dict.magnitude_sense(noun).is_some_and(|m| m.uw == sense.uw)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cooccurrence {
    Valid,
    Invalid(String),
}

impl Cooccurrence {
    pub fn is_valid(&self) -> bool {
        matches!(self, Cooccurrence::Valid)
    }
}

impl fmt::Display for Cooccurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cooccurrence::Valid => f.write_str("Valid"),
            Cooccurrence::Invalid(why) => write!(f, "Invalid: {why}"),
        }
    }
}

/// Checks a quantifier against its host noun and clause. True classifiers
/// may float; a measure phrase may not float when the verb is the animate
/// existential — `3kgの子豚がいました` is fine, `子豚が3kgいました` reads as
/// three kilograms of piglet existing. Classifiers must also actually count
/// the host noun.
pub fn check_cooccurrence(
    dict: &Dictionary,
    quantifier: &Quantifier<'_>,
    attachment: Attachment,
    host: &NounContext,
    verb: Option<VerbChoice>,
) -> Cooccurrence {
    match quantifier {
        Quantifier::Measure(unit) => {
            if attachment == Attachment::Floated && verb == Some(VerbChoice::Iru) {
                Cooccurrence::Invalid(format!(
                    "measure {} floats off animate {}; attach it to the noun instead",
                    unit.symbol, host.uw
                ))
            } else {
                Cooccurrence::Valid
            }
        }
        Quantifier::Classifier(sense) => {
            if classifier_fits(dict, sense, &host.uw) {
                Cooccurrence::Valid
            } else {
                Cooccurrence::Invalid(format!(
                    "classifier {} ({}) does not count {}",
                    sense.classifier, sense.romaji, host.uw
                ))
            }
        }
    }
}
