//! Mining French corpora for quantifying phrasemes.
//!
//! Words like *pincée* or *pointe* quantify through the frame
//! `une pincée de sel`: determiner or numeral, the candidate noun, `de` (or
//! elided `d'`), and a bare noun — no article after the preposition, which is
//! what separates `une pointe d'ironie` from `la porte de la cuisine`. This
//! module tokenizes sentences, collects every occurrence of that frame,
//! merges and ranks the candidates, and checks them against the dictionary's
//! quantifier senses. A KWIC concordance view supports eyeballing the hits.
//!
//! Corpus scans are embarrassingly parallel over documents; with the
//! `parallel` feature (on by default) they fan out through rayon, and the
//! `*_seq` variants remain available for comparison.

use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use thiserror::Error;

use crate::dict::{CqSense, CqType, Dictionary};

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("lexicon line {line}: {msg}")]
    BadLexicon { line: usize, msg: String },
}

/// One document: an id and its sentences, one per line in the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusDoc {
    pub doc_id: String,
    pub sentences: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    pub docs: Vec<CorpusDoc>,
}

impl Corpus {
    /// Loads a bundle file, or every `*.txt` file of a directory (sorted by
    /// name, one document per file).
    pub fn load(path: &Path) -> Result<Self, ExtractError> {
        let io_err = |source| ExtractError::Io { path: path.display().to_string(), source };
        if path.is_dir() {
            let mut files: Vec<_> = fs::read_dir(path)
                .map_err(io_err)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|e| e == "txt"))
                .collect();
            files.sort();
            let mut corpus = Corpus::default();
            for file in files {
                let text = fs::read_to_string(&file).map_err(|source| ExtractError::Io {
                    path: file.display().to_string(),
                    source,
                })?;
                let stem = file.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                corpus.docs.extend(Self::parse_bundle(&text, &stem).docs);
            }
            Ok(corpus)
        } else {
            let text = fs::read_to_string(path).map_err(io_err)?;
            let stem = path.file_stem().unwrap_or_default().to_string_lossy();
            Ok(Self::parse_bundle(&text, &stem))
        }
    }

    /// Splits bundle text into documents at `## doc_id` lines. Sentences
    /// before the first marker belong to a document named `default_id`.
    pub fn parse_bundle(text: &str, default_id: &str) -> Self {
        let mut docs: Vec<CorpusDoc> = Vec::new();
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(id) = line.strip_prefix("##") {
                docs.push(CorpusDoc { doc_id: id.trim().to_owned(), sentences: Vec::new() });
                continue;
            }
            if docs.is_empty() {
                docs.push(CorpusDoc { doc_id: default_id.to_owned(), sentences: Vec::new() });
            }
            docs.last_mut().expect("pushed above").sentences.push(line.to_owned());
        }
        Corpus { docs }
    }

    pub fn sentence_count(&self) -> usize {
        self.docs.iter().map(|d| d.sentences.len()).sum()
    }
}

/// The closed-class French word lists the miner needs: what may open a
/// candidate (articles, number words, demonstratives) and how plural heads
/// map back to their lemma.
#[derive(Debug, Clone, Default)]
pub struct FrLexicon {
    pub articles: Vec<String>,
    pub numbers: Vec<String>,
    pub determiners: Vec<String>,
    pub inflections: Vec<(String, String)>,
}

impl FrLexicon {
    pub fn load(path: &Path) -> Result<Self, ExtractError> {
        let text = fs::read_to_string(path).map_err(|source| ExtractError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Section-based format: `[ARTICLES]`, `[NUMBERS]`, `[DETERMINERS]` hold
    /// one word per line, `[INFLECTIONS]` holds `inflected = lemma` pairs.
    pub fn parse(text: &str) -> Result<Self, ExtractError> {
        let mut lex = FrLexicon::default();
        let mut section: Option<&str> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = match name {
                    "ARTICLES" => Some("a"),
                    "NUMBERS" => Some("n"),
                    "DETERMINERS" => Some("d"),
                    "INFLECTIONS" => Some("i"),
                    other => {
                        return Err(ExtractError::BadLexicon {
                            line: line_no,
                            msg: format!("unknown section {other:?}"),
                        })
                    }
                };
                continue;
            }
            match section {
                Some("i") => match line.split_once('=') {
                    Some((from, to)) => lex
                        .inflections
                        .push((from.trim().to_lowercase(), to.trim().to_lowercase())),
                    None => {
                        return Err(ExtractError::BadLexicon {
                            line: line_no,
                            msg: "expected `inflected = lemma`".to_owned(),
                        })
                    }
                },
                Some("a") => lex.articles.push(line.to_lowercase()),
                Some("n") => lex.numbers.push(line.to_lowercase()),
                Some("d") => lex.determiners.push(line.to_lowercase()),
                _ => {
                    return Err(ExtractError::BadLexicon {
                        line: line_no,
                        msg: "word before any [SECTION] header".to_owned(),
                    })
                }
            }
        }
        Ok(lex)
    }

    /// May this word open a candidate? Articles, number words,
    /// demonstratives, and digit strings qualify.
    pub fn is_leading(&self, word: &str) -> bool {
        self.articles.iter().any(|w| w == word)
            || self.numbers.iter().any(|w| w == word)
            || self.determiners.iter().any(|w| w == word)
            || (!word.is_empty() && word.chars().all(|c| c.is_ascii_digit()))
    }

    /// Closed-class words can be neither head nor complement.
    pub fn is_function_word(&self, word: &str) -> bool {
        self.articles.iter().any(|w| w == word)
            || self.numbers.iter().any(|w| w == word)
            || self.determiners.iter().any(|w| w == word)
    }

    /// The lemma of a possibly inflected head.
    pub fn lemma(&self, word: &str) -> String {
        self.inflections
            .iter()
            .find(|(from, _)| from == word)
            .map(|(_, to)| to.clone())
            .unwrap_or_else(|| word.to_owned())
    }
}

/// Splits a French sentence into word and punctuation tokens. Elided forms
/// keep their apostrophe (`d'`, `l'`), with the typographic `’` normalized
/// to `'` so corpus and lexicon spellings agree.
pub fn tokenize_fr(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() || c == '-' {
            current.push(c);
        } else if matches!(c, '\'' | '’') && !current.is_empty() {
            current.push('\'');
            tokens.push(std::mem::take(&mut current));
        } else {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            if !c.is_whitespace() {
                tokens.push(c.to_string());
            }
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

fn is_content_word(lex: &FrLexicon, word: &str) -> bool {
    !word.is_empty()
        && word.chars().all(|c| c.is_alphabetic() || c == '-')
        && !lex.is_function_word(word)
        && word != "de"
        && word != "des"
        && word != "du"
}

/// One keyword-in-context concordance line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KwicLine {
    pub doc_id: String,
    pub left: String,
    pub keyword: String,
    pub right: String,
}

impl fmt::Display for KwicLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} [{}] {}", self.doc_id, self.left, self.keyword, self.right)
    }
}

fn kwic_in_doc(doc: &CorpusDoc, keyword_lower: &str, window: usize) -> Vec<KwicLine> {
    let mut lines = Vec::new();
    for sentence in &doc.sentences {
        let tokens = tokenize_fr(sentence);
        for (i, tok) in tokens.iter().enumerate() {
            if tok.to_lowercase() == keyword_lower {
                let left_from = i.saturating_sub(window);
                lines.push(KwicLine {
                    doc_id: doc.doc_id.clone(),
                    left: tokens[left_from..i].join(" "),
                    keyword: tok.clone(),
                    right: tokens[i + 1..(i + 1 + window).min(tokens.len())].join(" "),
                });
            }
        }
    }
    lines
}

/// Concordance of a keyword with `window` tokens of context either side,
/// truncated at sentence boundaries. Lines come back in corpus order.
pub fn build_kwic(corpus: &Corpus, keyword: &str, window: usize) -> Vec<KwicLine> {
    #[cfg(feature = "parallel")]
    {
        build_kwic_par(corpus, keyword, window)
    }
    #[cfg(not(feature = "parallel"))]
    {
        build_kwic_seq(corpus, keyword, window)
    }
}

pub fn build_kwic_seq(corpus: &Corpus, keyword: &str, window: usize) -> Vec<KwicLine> {
    let keyword = keyword.to_lowercase();
    corpus.docs.iter().flat_map(|d| kwic_in_doc(d, &keyword, window)).collect()
}

#[cfg(feature = "parallel")]
pub fn build_kwic_par(corpus: &Corpus, keyword: &str, window: usize) -> Vec<KwicLine> {
    let keyword = keyword.to_lowercase();
    corpus.docs.par_iter().flat_map_iter(|d| kwic_in_doc(d, &keyword, window)).collect()
}

/// A mined candidate: the determiner/head/complement triple (lowercased)
/// and how often it occurred.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhrasemeCandidate {
    pub determiner: String,
    pub head: String,
    pub complement: String,
    pub frequency: usize,
}

impl PhrasemeCandidate {
    /// The phrase as it reads, eliding before a vowel the way the corpus did.
    pub fn surface(&self) -> String {
        if self.complement_elides() {
            format!("{} {} d'{}", self.determiner, self.head, self.complement)
        } else {
            format!("{} {} de {}", self.determiner, self.head, self.complement)
        }
    }

    fn complement_elides(&self) -> bool {
        self.complement
            .chars()
            .next()
            .is_some_and(|c| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'é' | 'è' | 'ê' | 'h'))
    }
}

impl fmt::Display for PhrasemeCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}×)", self.surface(), self.frequency)
    }
}

/// Raw frame occurrences in one document, lowercased, in reading order.
fn occurrences_in_doc(doc: &CorpusDoc, lex: &FrLexicon) -> Vec<(String, String, String)> {
    let mut found = Vec::new();
    for sentence in &doc.sentences {
        let tokens: Vec<String> =
            tokenize_fr(sentence).iter().map(|t| t.to_lowercase()).collect();
        for i in 0..tokens.len().saturating_sub(3) {
            let (det, head, prep, comp) =
                (&tokens[i], &tokens[i + 1], &tokens[i + 2], &tokens[i + 3]);
            if lex.is_leading(det)
                && is_content_word(lex, head)
                && (prep == "de" || prep == "d'")
                && is_content_word(lex, comp)
            {
                found.push((det.clone(), head.clone(), comp.clone()));
            }
        }
    }
    found
}

fn merge_occurrences(per_doc: Vec<Vec<(String, String, String)>>) -> Vec<PhrasemeCandidate> {
    use std::collections::BTreeMap;
    let mut counts: BTreeMap<(String, String, String), usize> = BTreeMap::new();
    for occurrences in per_doc {
        for key in occurrences {
            *counts.entry(key).or_insert(0) += 1;
        }
    }
    let mut out: Vec<PhrasemeCandidate> = counts
        .into_iter()
        .map(|((determiner, head, complement), frequency)| PhrasemeCandidate {
            determiner,
            head,
            complement,
            frequency,
        })
        .collect();
    out.sort_by(|a, b| {
        b.frequency
            .cmp(&a.frequency)
            .then_with(|| a.head.cmp(&b.head))
            .then_with(|| a.complement.cmp(&b.complement))
            .then_with(|| a.determiner.cmp(&b.determiner))
    });
    out
}

/// Mines every `determiner + noun + de + bare noun` frame in the corpus,
/// merged across documents and ranked by frequency (alphabetical within a
/// rank, so the result is deterministic regardless of scan order).
pub fn extract_candidates(corpus: &Corpus, lex: &FrLexicon) -> Vec<PhrasemeCandidate> {
    #[cfg(feature = "parallel")]
    {
        extract_candidates_par(corpus, lex)
    }
    #[cfg(not(feature = "parallel"))]
    {
        extract_candidates_seq(corpus, lex)
    }
}

pub fn extract_candidates_seq(corpus: &Corpus, lex: &FrLexicon) -> Vec<PhrasemeCandidate> {
    merge_occurrences(corpus.docs.iter().map(|d| occurrences_in_doc(d, lex)).collect())
}

#[cfg(feature = "parallel")]
pub fn extract_candidates_par(corpus: &Corpus, lex: &FrLexicon) -> Vec<PhrasemeCandidate> {
    merge_occurrences(corpus.docs.par_iter().map(|d| occurrences_in_doc(d, lex)).collect())
}

/// A candidate whose head has a quantifier sense in the dictionary.
#[derive(Debug, Clone)]
pub struct ConfirmedCandidate<'d> {
    pub candidate: PhrasemeCandidate,
    pub lemma: String,
    pub sense: &'d CqSense,
}

/// Keeps the candidates the dictionary recognizes as quantifying: the head,
/// reduced to its lemma through the inflection table, must own a sense of
/// type `b` or `both`. Everything else — however frequent — is left for a
/// lexicographer.
pub fn filter_by_dictionary<'d>(
    dict: &'d Dictionary,
    lex: &FrLexicon,
    candidates: &[PhrasemeCandidate],
) -> Vec<ConfirmedCandidate<'d>> {
    let mut confirmed = Vec::new();
    for c in candidates {
        let lemma = lex.lemma(&c.head);
        let sense = dict
            .senses
            .iter()
            .filter(|s| s.lemma.to_lowercase() == lemma)
            .find(|s| matches!(s.cq_type, CqType::B | CqType::Both));
        if let Some(sense) = sense {
            confirmed.push(ConfirmedCandidate { candidate: c.clone(), lemma: lemma.clone(), sense });
        }
    }
    confirmed
}
