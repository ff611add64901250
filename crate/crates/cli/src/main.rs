//! Command-line front end for the classifier/quantifier toolkit.
//!
//! Exit codes: 0 on success, 1 when the input is well-formed but the domain
//! says no (parse errors, failed validation, no classifier found), 2 on
//! usage errors (clap's own), 3 when a file cannot be read.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context as _};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use serde_json::json;

use cqkit::quant::{self, TaggedToken};
use cqkit::select::{dummy_classifier_fragment, magnitude_classifier};
use cqkit::uw::parse_uw_with;
use cqkit::{
    build_kwic, disambiguate, extract_candidates, filter_by_dictionary, normalize, select_existential,
    Corpus, Dictionary, FrLexicon, LabelSet, NounContext, ParseOptions, UnlDocument, UwClass,
};

#[derive(Parser)]
#[command(name = "cqkit", version, about = "Classifier and quantifier lexicon toolkit")]
struct Cli {
    /// Reject unknown relations and attributes instead of warning
    #[arg(long, global = true)]
    strict: bool,

    /// Relation registry file (one name per line); replaces the built-in list
    #[arg(long, global = true, value_name = "FILE")]
    relations: Option<PathBuf>,

    /// Attribute registry file (one name per line); replaces the built-in list
    #[arg(long, global = true, value_name = "FILE")]
    attributes: Option<PathBuf>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Human-readable lines
    Text,
    /// One JSON object per line
    JsonLines,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, print, and compare Universal Word expressions
    Uw {
        #[command(subcommand)]
        cmd: UwCmd,
    },
    /// Parse and validate annotation graphs
    Unl {
        #[command(subcommand)]
        cmd: UnlCmd,
    },
    /// Query and check a dictionary file
    Dict {
        #[command(subcommand)]
        cmd: DictCmd,
    },
    /// Choose classifiers and existential verbs for nouns
    Select {
        #[command(subcommand)]
        cmd: SelectCmd,
    },
    /// Rewrite tokenized numeric phrases into the attached form
    Normalize(NormalizeArgs),
    /// Mine a corpus for quantifying-phraseme candidates
    Extract(ExtractArgs),
    /// Keyword-in-context concordance over a corpus
    Kwic(KwicArgs),
}

#[derive(Subcommand)]
enum UwCmd {
    /// Parse an expression and report headword, class, and canonical form
    Parse { expression: String },
    /// Print only the canonical spelling
    Format { expression: String },
    /// Test whether the first expression subsumes the second
    Subsumes { general: String, specific: String },
}

#[derive(Subcommand)]
enum UnlCmd {
    /// Parse a graph file and print its canonical serialization
    Parse { file: PathBuf },
    /// Report rule violations in a graph file
    Validate {
        file: PathBuf,
        /// Also require a top-level @entry (complete sentences, not fragments)
        #[arg(long)]
        complete: bool,
    },
}

#[derive(Args)]
struct DictOpt {
    /// Dictionary file
    #[arg(long, value_name = "FILE", default_value = "data/seed.dic")]
    dict: PathBuf,
}

#[derive(Subcommand)]
enum DictCmd {
    /// Show entries, senses, and lexemes for a word
    Query {
        word: String,
        #[command(flatten)]
        dict: DictOpt,
    },
    /// Run the consistency checks
    Check {
        #[command(flatten)]
        dict: DictOpt,
    },
    /// Count records
    Stats {
        #[command(flatten)]
        dict: DictOpt,
    },
}

#[derive(Subcommand)]
enum SelectCmd {
    /// Build the dummy-classifier fragment counting a noun
    Classifier {
        noun: String,
        /// How many are being counted
        #[arg(long, short = 'n', default_value = "1")]
        count: String,
        #[command(flatten)]
        dict: DictOpt,
    },
    /// Pick the sense of a lemma that fits a noun
    Disambiguate {
        lemma: String,
        noun: String,
        #[command(flatten)]
        dict: DictOpt,
    },
    /// Choose いる or ある for a noun
    Existential {
        noun: String,
        #[command(flatten)]
        dict: DictOpt,
    },
    /// Show the size-marked counter for an animal
    Magnitude {
        noun: String,
        #[command(flatten)]
        dict: DictOpt,
    },
}

#[derive(Args)]
struct NormalizeArgs {
    /// Tokenized sentences, tab-separated surface/romaji/TAG lines
    file: PathBuf,
    #[command(flatten)]
    dict: DictOpt,
}

#[derive(Args)]
struct ExtractArgs {
    /// Corpus bundle file or directory of .txt documents
    #[arg(long, value_name = "PATH", default_value = "data/corpus.txt")]
    corpus: PathBuf,
    /// Closed-class word lists
    #[arg(long, value_name = "FILE", default_value = "data/lexicon_fr.txt")]
    lexicon: PathBuf,
    /// Keep candidates seen at least this often
    #[arg(long, default_value_t = 1)]
    min_freq: usize,
    /// Show raw candidates too, not only dictionary-confirmed ones
    #[arg(long)]
    all: bool,
    #[command(flatten)]
    dict: DictOpt,
}

#[derive(Args)]
struct KwicArgs {
    keyword: String,
    /// Corpus bundle file or directory of .txt documents
    #[arg(long, value_name = "PATH", default_value = "data/corpus.txt")]
    corpus: PathBuf,
    /// Context tokens on each side
    #[arg(long, default_value_t = 4)]
    window: usize,
}

/// Failures that should reach the user, split by exit code.
enum Failure {
    /// Well-formed request the data says no to — exit 1.
    Domain(anyhow::Error),
    /// The filesystem got in the way — exit 3.
    Io(anyhow::Error),
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    // die quietly on a closed pipe, like any other text tool
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::Io)
}

fn domain<T, E: std::error::Error + Send + Sync + 'static>(r: Result<T, E>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Domain(anyhow!(e)))
}

fn load_dict(path: &Path) -> Result<Dictionary, Failure> {
    let text = read(path)?;
    domain(Dictionary::parse(&text))
}

fn parse_options(cli: &Cli) -> Result<ParseOptions, Failure> {
    let mut opts = if cli.strict { ParseOptions::strict() } else { ParseOptions::permissive() };
    if let Some(path) = &cli.relations {
        opts.relations = LabelSet::from_file(path)
            .with_context(|| format!("cannot read {}", path.display()))
            .map_err(Failure::Io)?;
    }
    if let Some(path) = &cli.attributes {
        opts.attributes = LabelSet::from_file(path)
            .with_context(|| format!("cannot read {}", path.display()))
            .map_err(Failure::Io)?;
    }
    Ok(opts)
}

fn run(cli: &Cli) -> CmdResult {
    let fmt = cli.format;
    match &cli.command {
        Command::Uw { cmd } => run_uw(cli, cmd, fmt),
        Command::Unl { cmd } => run_unl(cli, cmd, fmt),
        Command::Dict { cmd } => run_dict(cmd, fmt),
        Command::Select { cmd } => run_select(cmd, fmt),
        Command::Normalize(args) => run_normalize(args, fmt),
        Command::Extract(args) => run_extract(args, fmt),
        Command::Kwic(args) => run_kwic(args, fmt),
    }
}

fn class_name(class: UwClass) -> &'static str {
    match class {
        UwClass::Basic => "basic",
        UwClass::Restricted => "restricted",
        UwClass::Extra => "extra",
    }
}

fn run_uw(cli: &Cli, cmd: &UwCmd, fmt: Format) -> CmdResult {
    let opts = parse_options(cli)?;
    let parse = |text: &str| -> Result<cqkit::Uw, Failure> {
        let (uw, warnings) = domain(parse_uw_with(text, &opts))?;
        for w in warnings {
            eprintln!("warning: {w}");
        }
        Ok(uw)
    };
    match cmd {
        UwCmd::Parse { expression } => {
            let uw = parse(expression)?;
            match fmt {
                Format::Text => {
                    println!("headword    {}", uw.headword);
                    println!("class       {}", class_name(uw.class()));
                    println!("constraints {}", uw.constraints.len());
                    println!("canonical   {uw}");
                }
                Format::JsonLines => println!(
                    "{}",
                    json!({
                        "headword": uw.headword,
                        "class": class_name(uw.class()),
                        "constraints": uw.constraints.len(),
                        "canonical": uw.to_string(),
                    })
                ),
            }
        }
        UwCmd::Format { expression } => {
            let uw = parse(expression)?;
            match fmt {
                Format::Text => println!("{uw}"),
                Format::JsonLines => println!("{}", json!({ "canonical": uw.to_string() })),
            }
        }
        UwCmd::Subsumes { general, specific } => {
            let g = parse(general)?;
            let s = parse(specific)?;
            let yes = g.subsumes(&s);
            match fmt {
                Format::Text => println!("{}", if yes { "yes" } else { "no" }),
                Format::JsonLines => println!(
                    "{}",
                    json!({ "general": g.to_string(), "specific": s.to_string(), "subsumes": yes })
                ),
            }
        }
    }
    Ok(())
}

fn run_unl(cli: &Cli, cmd: &UnlCmd, fmt: Format) -> CmdResult {
    let opts = parse_options(cli)?;
    match cmd {
        UnlCmd::Parse { file } => {
            let text = read(file)?;
            let (doc, warnings) = domain(UnlDocument::parse_with(&text, &opts))?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            match fmt {
                Format::Text => print!("{}", doc.serialize()),
                Format::JsonLines => println!(
                    "{}",
                    json!({
                        "arcs": doc.arcs.len(),
                        "scopes": doc.scopes().iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                        "canonical": doc.serialize(),
                    })
                ),
            }
        }
        UnlCmd::Validate { file, complete } => {
            let text = read(file)?;
            let (doc, warnings) = domain(UnlDocument::parse_with(&text, &opts))?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            let violations =
                if *complete { doc.validate_complete(&opts) } else { doc.validate(&opts) };
            for v in &violations {
                match fmt {
                    Format::Text => println!("{v}"),
                    Format::JsonLines => println!("{}", json!({ "violation": v.to_string() })),
                }
            }
            if violations.is_empty() {
                if fmt == Format::Text {
                    println!("ok");
                }
            } else {
                return Err(Failure::Domain(anyhow!("{} violations", violations.len())));
            }
        }
    }
    Ok(())
}

fn run_dict(cmd: &DictCmd, fmt: Format) -> CmdResult {
    match cmd {
        DictCmd::Query { word, dict } => {
            let d = load_dict(&dict.dict)?;
            let mut hits = 0usize;
            for e in d.entries_for_keyword(word) {
                hits += 1;
                match fmt {
                    Format::Text => {
                        println!("entry {} [{}]", e.id, e.word_class);
                        println!("  en  {}", e.sentence_en);
                        println!("  fr  {}", e.sentence_fr);
                        println!("  ja  {}", e.sentence_ja);
                    }
                    Format::JsonLines => println!(
                        "{}",
                        json!({
                            "kind": "entry", "id": e.id, "class": e.word_class,
                            "en": e.sentence_en, "fr": e.sentence_fr, "ja": e.sentence_ja,
                        })
                    ),
                }
            }
            for s in d.senses_for_lemma(word) {
                hits += 1;
                match fmt {
                    Format::Text => {
                        println!("sense {} → {} {} [{}]", s.uw, s.classifier, s.romaji, s.cq_type.as_str());
                        if !s.referents.is_empty() {
                            println!("  counts {}", s.referents.join(", "));
                        }
                    }
                    Format::JsonLines => println!(
                        "{}",
                        json!({
                            "kind": "sense", "uw": s.uw.to_string(), "classifier": s.classifier,
                            "romaji": s.romaji, "type": s.cq_type.as_str(), "referents": s.referents,
                        })
                    ),
                }
            }
            for l in d.lexemes_for(word) {
                hits += 1;
                match fmt {
                    Format::Text => println!("lex {} → {}", l.lemma, l.uw),
                    Format::JsonLines => println!(
                        "{}",
                        json!({ "kind": "lex", "lemma": l.lemma, "uw": l.uw.to_string() })
                    ),
                }
            }
            if hits == 0 {
                return Err(Failure::Domain(anyhow!("nothing recorded for {word:?}")));
            }
        }
        DictCmd::Check { dict } => {
            let d = load_dict(&dict.dict)?;
            let violations = d.check_consistency();
            for v in &violations {
                match fmt {
                    Format::Text => println!("{v}"),
                    Format::JsonLines => println!("{}", json!({ "violation": v.to_string() })),
                }
            }
            if violations.is_empty() {
                if fmt == Format::Text {
                    println!("ok");
                }
            } else {
                return Err(Failure::Domain(anyhow!("{} violations", violations.len())));
            }
        }
        DictCmd::Stats { dict } => {
            let d = load_dict(&dict.dict)?;
            let s = d.stats();
            match fmt {
                Format::Text => {
                    println!("entries {}", s.entries);
                    println!("senses  {}", s.senses);
                    println!("lexemes {}", s.lexemes);
                    println!("units   {}", s.units);
                }
                Format::JsonLines => println!(
                    "{}",
                    json!({
                        "entries": s.entries, "senses": s.senses,
                        "lexemes": s.lexemes, "units": s.units,
                    })
                ),
            }
        }
    }
    Ok(())
}

fn parse_count(text: &str) -> Result<Rational64, Failure> {
    quant::parse_number(text)
        .ok_or_else(|| Failure::Domain(anyhow!("{text:?} is not a number")))
}

fn run_select(cmd: &SelectCmd, fmt: Format) -> CmdResult {
    match cmd {
        SelectCmd::Classifier { noun, count, dict } => {
            let d = load_dict(&dict.dict)?;
            let n = parse_count(count)?;
            let ctx = domain(NounContext::resolve(&d, noun))?;
            let frag = domain(dummy_classifier_fragment(&d, &ctx, n))?;
            match fmt {
                Format::Text => print!("{}", frag.serialize()),
                Format::JsonLines => println!(
                    "{}",
                    json!({ "noun": ctx.uw.to_string(), "count": n.to_string(), "fragment": frag.serialize() })
                ),
            }
        }
        SelectCmd::Disambiguate { lemma, noun, dict } => {
            let d = load_dict(&dict.dict)?;
            let ctx = domain(NounContext::resolve(&d, noun))?;
            let sel = domain(disambiguate(&d, lemma, &ctx))?;
            match fmt {
                Format::Text => {
                    println!("{} → {} {}", sel.sense.uw, sel.sense.classifier, sel.sense.romaji);
                    for why in &sel.rationale {
                        println!("  {why}");
                    }
                }
                Format::JsonLines => println!(
                    "{}",
                    json!({
                        "uw": sel.sense.uw.to_string(),
                        "classifier": sel.sense.classifier,
                        "romaji": sel.sense.romaji,
                        "score": sel.score,
                        "rationale": sel.rationale,
                    })
                ),
            }
        }
        SelectCmd::Existential { noun, dict } => {
            let d = load_dict(&dict.dict)?;
            let ctx = domain(NounContext::resolve(&d, noun))?;
            let verb = domain(select_existential(&d, &ctx))?;
            match fmt {
                Format::Text => println!("{verb}"),
                Format::JsonLines => println!(
                    "{}",
                    json!({ "noun": ctx.uw.to_string(), "surface": verb.surface(), "romaji": verb.as_str() })
                ),
            }
        }
        SelectCmd::Magnitude { noun, dict } => {
            let d = load_dict(&dict.dict)?;
            let ctx = domain(NounContext::resolve(&d, noun))?;
            let sense = domain(magnitude_classifier(&d, &ctx))?;
            match fmt {
                Format::Text => println!("{} → {} {}", ctx.uw, sense.classifier, sense.romaji),
                Format::JsonLines => println!(
                    "{}",
                    json!({
                        "noun": ctx.uw.to_string(),
                        "classifier": sense.classifier,
                        "romaji": sense.romaji,
                    })
                ),
            }
        }
    }
    Ok(())
}

fn run_normalize(args: &NormalizeArgs, fmt: Format) -> CmdResult {
    let d = load_dict(&args.dict.dict)?;
    let text = read(&args.file)?;
    let sentences: Vec<Vec<TaggedToken>> = domain(quant::parse_token_file(&text))?;
    for (i, tokens) in sentences.iter().enumerate() {
        let (out, triple) = normalize(&d, tokens)
            .map_err(|e| Failure::Domain(anyhow!("sentence {}: {e}", i + 1)))?;
        match fmt {
            Format::Text => println!(
                "{}\t{} {} → {}",
                quant::format_tokens(&out),
                triple.number,
                triple.cq_surface,
                triple.host_surface
            ),
            Format::JsonLines => println!(
                "{}",
                json!({
                    "surface": quant::format_tokens(&out),
                    "number": triple.number.to_string(),
                    "cq": triple.cq_surface,
                    "romaji": triple.cq_romaji,
                    "host": triple.host_surface,
                    "host_index": triple.host_index,
                })
            ),
        }
    }
    Ok(())
}

fn run_extract(args: &ExtractArgs, fmt: Format) -> CmdResult {
    let corpus = domain(Corpus::load(&args.corpus))?;
    let lex = domain(FrLexicon::load(&args.lexicon))?;
    let candidates: Vec<_> = extract_candidates(&corpus, &lex)
        .into_iter()
        .filter(|c| c.frequency >= args.min_freq)
        .collect();
    if args.all {
        for c in &candidates {
            match fmt {
                Format::Text => println!("{}\t{}", c.surface(), c.frequency),
                Format::JsonLines => println!(
                    "{}",
                    json!({
                        "surface": c.surface(), "determiner": c.determiner, "head": c.head,
                        "complement": c.complement, "frequency": c.frequency,
                    })
                ),
            }
        }
        return Ok(());
    }
    let d = load_dict(&args.dict.dict)?;
    for c in filter_by_dictionary(&d, &lex, &candidates) {
        match fmt {
            Format::Text => println!(
                "{}\t{}\t{} → {}",
                c.candidate.surface(),
                c.candidate.frequency,
                c.lemma,
                c.sense.uw
            ),
            Format::JsonLines => println!(
                "{}",
                json!({
                    "surface": c.candidate.surface(),
                    "determiner": c.candidate.determiner,
                    "head": c.candidate.head,
                    "complement": c.candidate.complement,
                    "frequency": c.candidate.frequency,
                    "lemma": c.lemma,
                    "uw": c.sense.uw.to_string(),
                })
            ),
        }
    }
    Ok(())
}

fn run_kwic(args: &KwicArgs, fmt: Format) -> CmdResult {
    let corpus = domain(Corpus::load(&args.corpus))?;
    for line in build_kwic(&corpus, &args.keyword, args.window) {
        match fmt {
            Format::Text => println!("{line}"),
            Format::JsonLines => println!(
                "{}",
                json!({
                    "doc": line.doc_id, "left": line.left,
                    "keyword": line.keyword, "right": line.right,
                })
            ),
        }
    }
    Ok(())
}
