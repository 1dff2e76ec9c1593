use std::fs;
use std::io::{self, BufRead, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use chainplex::categorial::{
    count_derivations, derive, parse_lexicon, render_derivation, DeriveBounds,
};
use chainplex::containers::{load_pipeline, run_pipeline};
use chainplex::crosscheck::{crosscheck, Verdict};
use chainplex::engine::{SearchMode, DEFAULT_MAX_COPIES, DEFAULT_MAX_INSTANCES};
use chainplex::geometry::{
    embed, export_dot, export_json, export_xyz, StyleMap, DEFAULT_ITERATIONS,
};
use chainplex::{
    consolidate, format_chain, load_store, parse_token, recognize, tokenize_sentence, Chain,
    ChainStore, RecognitionResult, SearchConfig, Token, Witness,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Sentence recognition with chain complexes, categorial derivations and
/// container pipelines.
///
/// Exit status: 0 accepted, 1 rejected, 2 error.
#[derive(Parser)]
#[command(name = "chainplex", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recognize a sentence against a chain store.
    Recognize(RecognizeArgs),
    /// Derive a sentence from a typed lexicon.
    Derive(DeriveArgs),
    /// Run a sentence through a container pipeline.
    Pipeline(PipelineArgs),
    /// Compare complex recognition with the context-free reading of a pure store.
    Crosscheck(CrosscheckArgs),
}

#[derive(Args, Clone)]
struct Bounds {
    /// Largest complex, counting the sentence's own chain. The default covers
    /// every bundled example; the largest of them needs 9.
    #[arg(long, default_value_t = DEFAULT_MAX_INSTANCES)]
    max_instances: usize,
    /// Most copies of one stored chain in a complex.
    #[arg(long, default_value_t = DEFAULT_MAX_COPIES)]
    max_copies: usize,
    /// Drop the rule that a conclusion spans the whole of its chain.
    #[arg(long)]
    no_span: bool,
    /// Drop the rule that a conclusion lies within its chain's interval.
    #[arg(long)]
    no_conclusion_interval: bool,
}

impl Bounds {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            enforce_span: !self.no_span,
            enforce_conclusion_interval: !self.no_conclusion_interval,
            ..SearchConfig::default().with_bounds(self.max_instances, self.max_copies)
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Json,
    Dot,
    Xyz,
}

#[derive(Args)]
struct RecognizeArgs {
    #[arg(long)]
    store: PathBuf,
    #[arg(long, required_unless_present = "stdin", conflicts_with = "stdin")]
    sentence: Option<String>,
    /// Read one sentence per line and print one verdict per line.
    #[arg(long, conflicts_with_all = ["learn", "emit", "all"])]
    stdin: bool,
    /// List every complex within the bounds instead of the smallest per conclusion.
    #[arg(long)]
    all: bool,
    /// The conclusion that counts as recognized.
    #[arg(long, default_value = "S", conflicts_with = "any_conclusion")]
    target: String,
    /// Accept a complex whatever its dangling conclusion. Nearly every
    /// sentence then also closes with a word category left over, so this is
    /// mostly useful together with --all or for inspecting non-sentences.
    #[arg(long)]
    any_conclusion: bool,
    #[command(flatten)]
    bounds: Bounds,
    /// Append the sentence to the store under its conclusion.
    #[arg(long)]
    learn: bool,
    /// Write the first witness in this format.
    #[arg(long, value_enum)]
    emit: Option<Emit>,
    /// Destination for --emit; standard output when absent.
    #[arg(long, requires = "emit")]
    out: Option<PathBuf>,
    /// Extra `TOKEN = ELEMENT` lines for XYZ symbols.
    #[arg(long, requires = "emit")]
    style: Option<PathBuf>,
    /// Draw the two sides of a bond as separate atoms.
    #[arg(long, requires = "emit")]
    split_bonds: bool,
    /// Seed for the 3D layout.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct DeriveArgs {
    #[arg(long)]
    types: PathBuf,
    #[arg(long)]
    sentence: String,
    #[arg(long, default_value = "S")]
    target: String,
    #[arg(long, default_value_t = DeriveBounds::default().max_type_atoms)]
    max_type_atoms: usize,
    #[arg(long, default_value_t = DeriveBounds::default().max_unary_chain)]
    max_unary: usize,
    /// Print every derivation, not just the first.
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    sentence: String,
    /// Print each replacement step.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct CrosscheckArgs {
    #[arg(long)]
    store: PathBuf,
    #[arg(long, default_value_t = 4)]
    max_len: usize,
    /// Where to write the per-sentence report; standard output when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value = "S")]
    target: String,
    #[command(flatten)]
    bounds: Bounds,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Recognize(a) => cmd_recognize(a),
        Command::Derive(a) => cmd_derive(a),
        Command::Pipeline(a) => cmd_pipeline(a),
        Command::Crosscheck(a) => cmd_crosscheck(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if broken_pipe(&e) => ExitCode::from(141),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// A reader that closed our standard output early, as `head` does.
fn broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<io::Error>()
            .is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
    })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn category(text: &str) -> Result<Token> {
    let t = parse_token(text)?;
    if !t.is_category() {
        bail!("{text} is not a category");
    }
    Ok(t)
}

fn print_witness(out: &mut impl io::Write, n: usize, w: &Witness) -> io::Result<()> {
    let x = &w.complex;
    let dangling = w.dangling().map_or("?".to_string(), Token::to_string);
    writeln!(
        out,
        "witness {n}: {} instances, {} bonds, dangling {dangling}",
        x.instances.len(),
        x.bonds.len()
    )?;
    for inst in &x.instances {
        let mut line = inst
            .body
            .iter()
            .map(Token::to_string)
            .collect::<Vec<_>>()
            .join(" - ");
        if let Some(c) = &inst.conclusion {
            line.push_str(&format!(" -> {c}"));
        }
        writeln!(out, "  i{} {}: {line}", inst.id, inst.source)?;
    }
    let bonds: Vec<String> = x.bonds.iter().map(|b| format!("{}={}", b.a, b.b)).collect();
    writeln!(out, "  bonds: {}", bonds.join(" "))
}

fn cmd_recognize(a: RecognizeArgs) -> Result<bool> {
    let store =
        load_store(&read(&a.store)?).with_context(|| format!("loading {}", a.store.display()))?;
    let mut cfg = a.bounds.config();
    if a.all {
        cfg.mode = SearchMode::All;
    }
    if !a.any_conclusion {
        cfg = cfg.with_target(category(&a.target)?);
    }
    if a.stdin {
        return recognize_lines(&store, &cfg);
    }
    let sentence = a.sentence.as_deref().expect("required unless --stdin");
    let fresh = tokenize_sentence(sentence)?;
    let result = recognize(&fresh, &store, &cfg);
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if !result.accepted {
        writeln!(out, "reject")?;
        return Ok(false);
    }
    // an export to standard output replaces the summary
    if a.emit.is_none() || a.out.is_some() {
        for c in &result.conclusions {
            writeln!(out, "{c}")?;
        }
        for (k, w) in result.witnesses.iter().enumerate() {
            print_witness(&mut out, k + 1, w)?;
        }
    }
    if let Some(format) = a.emit {
        emit(&a, format, &result)?;
    }
    if a.learn {
        learn(&a.store, &store, &fresh, &result)?;
    }
    Ok(true)
}

fn recognize_lines(store: &ChainStore, cfg: &SearchConfig) -> Result<bool> {
    let mut all = true;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for line in io::stdin().lock().lines() {
        let line = line?;
        let sentence = line.trim();
        if sentence.is_empty() {
            continue;
        }
        let r = recognize(&tokenize_sentence(sentence)?, store, cfg);
        all &= r.accepted;
        let verdict = if r.accepted {
            r.conclusions
                .iter()
                .map(Token::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        } else {
            "reject".to_string()
        };
        writeln!(out, "{sentence}\t{verdict}")?;
    }
    Ok(all)
}

fn emit(a: &RecognizeArgs, format: Emit, result: &RecognitionResult) -> Result<()> {
    let w = &result.witnesses[0];
    let layout = || {
        let l = embed(&w.complex, &w.positions, a.seed, DEFAULT_ITERATIONS);
        if a.split_bonds {
            l.split_bonds()
        } else {
            l
        }
    };
    let text = match format {
        Emit::Dot => export_dot(&w.complex),
        Emit::Json => export_json(&w.complex, Some(&layout()), &w.positions),
        Emit::Xyz => {
            let mut style = StyleMap::default();
            if let Some(path) = &a.style {
                style = style
                    .with_overrides(&read(path)?)
                    .with_context(|| format!("reading {}", path.display()))?;
            }
            export_xyz(&layout(), &w.complex, &style)
        }
    };
    match &a.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn learn(path: &Path, store: &ChainStore, fresh: &Chain, result: &RecognitionResult) -> Result<()> {
    let label = match result.conclusions.len() {
        1 => result.conclusions.first().expect("one conclusion"),
        _ => {
            let labels: Vec<String> = result.conclusions.iter().map(Token::to_string).collect();
            return Err(anyhow!(
                "cannot learn: the sentence has several conclusions ({}); drop --any-conclusion or give --target",
                labels.join(", ")
            ));
        }
    };
    let updated = consolidate(store, fresh, label)?;
    if updated.len() == store.len() {
        eprintln!(
            "already known: {}",
            format_chain(updated.chains().last().expect("non-empty"))
        );
        return Ok(());
    }
    let chain = updated.chains().last().expect("just added");
    let mut text = read(path)?;
    if !text.is_empty() && !text.ends_with('\n') {
        text.push('\n');
    }
    if chain.id != format!("c{}", updated.len()) {
        text.push_str(&format!("# @id {}\n", chain.id));
    }
    text.push_str(&format_chain(chain));
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("learned: {}", format_chain(chain));
    Ok(())
}

fn cmd_derive(a: DeriveArgs) -> Result<bool> {
    let lexicon = parse_lexicon(&read(&a.types)?)
        .with_context(|| format!("loading {}", a.types.display()))?;
    let target = lexicon.parse_type(&a.target)?;
    let words: Vec<&str> = a.sentence.split_whitespace().collect();
    let bounds = DeriveBounds {
        max_type_atoms: a.max_type_atoms,
        max_unary_chain: a.max_unary,
        ..DeriveBounds::default()
    };
    let count = count_derivations(&lexicon, &words, &target, &bounds)?;
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "{count} derivation{}",
        if count == 1 { "" } else { "s" }
    )?;
    if count == 0 {
        return Ok(false);
    }
    let shown = DeriveBounds {
        max_derivations: if a.all { bounds.max_derivations } else { 1 },
        ..bounds
    };
    let derivations = derive(&lexicon, &words, &target, &shown)?;
    for (k, d) in derivations.iter().enumerate() {
        if a.all {
            writeln!(out, "derivation {}:", k + 1)?;
        }
        write!(out, "{}", render_derivation(d))?;
    }
    Ok(true)
}

fn cmd_pipeline(a: PipelineArgs) -> Result<bool> {
    let pipeline = load_pipeline(&a.config)?;
    let r = run_pipeline(&pipeline, &a.sentence)?;
    let mut out = io::stdout().lock();
    if a.trace {
        for s in &r.trace {
            writeln!(
                out,
                "{} [{},{}] {}",
                s.container, s.span.0, s.span.1, s.token
            )?;
        }
    }
    writeln!(
        out,
        "{}",
        r.stream
            .iter()
            .map(Token::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    )?;
    Ok(r.accepted)
}

fn cmd_crosscheck(a: CrosscheckArgs) -> Result<bool> {
    let store =
        load_store(&read(&a.store)?).with_context(|| format!("loading {}", a.store.display()))?;
    let target = category(&a.target)?;
    let report = crosscheck(&store, a.max_len, &target, &a.bounds.config())?;
    let text = report.to_text();
    match &a.report {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    for v in report.violations() {
        eprintln!("violation: {}", v.words.join(" "));
    }
    eprintln!(
        "{} sentences, {} violations, {} beyond bounds, {} by analogy",
        report.sentences.len(),
        report.count(Verdict::Violation),
        report.count(Verdict::BoundLimited),
        report.count(Verdict::Analogy)
    );
    Ok(report.count(Verdict::Violation) == 0)
}
