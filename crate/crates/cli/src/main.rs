use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use scfgmt::grammar::{parse_grammar_text, serialize_grammar, SyncGrammar};
use scfgmt::harness::{
    aggregate_report, read_log, run_experiment, Client, EchoMock, ExperimentConfig, GroupBy, HttpClient, OracleMock,
    RunOptions,
};
use scfgmt::lexicon::ScriptId;
use scfgmt::metagrammar::{generate_with_manifest, GrammarSpec, Skeleton, WordOrder};
use scfgmt::metrics::score;
use scfgmt::oracle::{Crediting, Sampler, Transducer, DEFAULT_CAP};
use scfgmt::taxonomy::Classifier;

#[derive(Parser)]
#[command(
    name = "scfgmt",
    version,
    about = "Synthetic-language translation benchmark built on SCFGs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a grammar and write it with its manifest.
    Gen(GenArgs),
    /// Sample sentence pairs of a given length.
    Sample {
        #[arg(short, long)]
        grammar: PathBuf,
        #[arg(short, long)]
        len: usize,
        #[arg(short, long, default_value_t = 0)]
        seed: u64,
        /// Number of pairs; pair i uses seed + i.
        #[arg(short, long, default_value_t = 1)]
        n: u64,
    },
    /// Print every translation of a source sentence.
    Translate {
        #[arg(short, long)]
        grammar: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        /// Only accept the target forms the grammar pairs with the source.
        #[arg(long)]
        strict: bool,
        sentence: String,
    },
    /// Score a candidate against one or more golds.
    Score {
        #[arg(short = 'r', long = "gold", required = true)]
        golds: Vec<String>,
        candidate: String,
    },
    /// Label the errors in a candidate.
    Classify {
        #[arg(short, long)]
        grammar: PathBuf,
        #[arg(long, default_value = "latin")]
        script: ScriptId,
        #[arg(short = 'r', long = "gold", required = true)]
        golds: Vec<String>,
        candidate: String,
    },
    /// Run (or resume) an experiment.
    Run {
        #[arg(short, long)]
        config: PathBuf,
        /// Log file; defaults to `<output_dir>/<model>.jsonl`.
        #[arg(long)]
        log: Option<PathBuf>,
        /// Answer with a local mock instead of the endpoint.
        #[arg(long, value_enum)]
        dry_run: Option<Mock>,
        /// Stop after this many new trials.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Aggregate logs into a table with bootstrap intervals.
    Report {
        #[arg(required = true)]
        logs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = By::Size)]
        by: By,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long, default_value_t = 57)]
    size: usize,
    #[arg(long, default_value = "SVO")]
    src: WordOrder,
    #[arg(long, default_value = "SVO")]
    tgt: WordOrder,
    #[arg(long)]
    agr_src: bool,
    #[arg(long)]
    agr_tgt: bool,
    #[arg(long, default_value = "latin")]
    script_src: ScriptId,
    #[arg(long, default_value = "latin")]
    script_tgt: ScriptId,
    /// Use the compact skeleton, which drops unused rules (smallest size 46).
    #[arg(long)]
    compact: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Grammar output path; the manifest goes next to it as `.json`.
    /// Prints the grammar when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mock {
    Oracle,
    Echo,
}

#[derive(Clone, Copy, ValueEnum)]
enum By {
    Size,
    Length,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

fn load_grammar(path: &Path) -> Result<SyncGrammar> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_grammar_text(&text).with_context(|| format!("parsing {}", path.display()))
}

fn words(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}

fn gen(args: GenArgs) -> Result<()> {
    let mut spec = GrammarSpec::new(args.size, args.src, args.tgt, args.seed)
        .with_agreement(args.agr_src, args.agr_tgt)
        .with_scripts(args.script_src, args.script_tgt);
    if args.compact {
        spec = spec.with_skeleton(Skeleton::Compact);
    }
    let gen = generate_with_manifest(&spec)?;
    let text = serialize_grammar(&gen.grammar);
    match args.out {
        Some(path) => {
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            let manifest = path.with_extension("json");
            fs::write(&manifest, serde_json::to_string_pretty(&gen.manifest)?)?;
            eprintln!(
                "wrote {} rules to {} (manifest {})",
                gen.grammar.size(),
                path.display(),
                manifest.display()
            );
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn run(config: &Path, log: Option<PathBuf>, dry_run: Option<Mock>, limit: Option<usize>) -> Result<()> {
    let text = fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let cfg = ExperimentConfig::from_json(&text)?;
    let client: Box<dyn Client> = match dry_run {
        Some(Mock::Oracle) => Box::new(OracleMock::new()),
        Some(Mock::Echo) => Box::new(EchoMock),
        None => Box::new(HttpClient::new(cfg.endpoint.clone())?),
    };
    let log = log.unwrap_or_else(|| {
        let model = client.meta().model.replace(['/', ' '], "_");
        cfg.output_dir.join(format!("{model}.jsonl"))
    });
    let opts = RunOptions {
        limit,
        sleep_on_retry: true,
    };
    let s = run_experiment(&cfg, client.as_ref(), &log, &opts)?;
    eprintln!(
        "{}: {} planned, {} already done, {} written, {} failed",
        log.display(),
        s.planned,
        s.skipped,
        s.written,
        s.failed
    );
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen(args) => gen(args)?,
        Command::Sample { grammar, len, seed, n } => {
            let g = load_grammar(&grammar)?;
            let sampler = Sampler::new(&g, len)?;
            for i in 0..n {
                let pair = sampler.sample(len, seed + i)?;
                println!(
                    "{}",
                    serde_json::json!({ "source": pair.source.join(" "), "target": pair.target.join(" ") })
                );
            }
        }
        Command::Translate {
            grammar,
            cap,
            strict,
            sentence,
        } => {
            let g = load_grammar(&grammar)?;
            let crediting = if strict {
                Crediting::Strict
            } else {
                Crediting::default()
            };
            let out = Transducer::with_crediting(&g, crediting)?.translate(&words(&sentence), cap)?;
            for s in out.sentences() {
                println!("{s}");
            }
            if out.overflow {
                eprintln!("more than {cap} translations; output truncated");
            }
        }
        Command::Score { golds, candidate } => {
            let golds: Vec<Vec<&str>> = golds.iter().map(|g| words(g)).collect();
            println!("{}", serde_json::to_string(&score(&words(&candidate), &golds))?);
        }
        Command::Classify {
            grammar,
            script,
            golds,
            candidate,
        } => {
            let g = load_grammar(&grammar)?;
            let golds: Vec<Vec<&str>> = golds.iter().map(|g| words(g)).collect();
            let labels = Classifier::for_grammar(&g, script).classify(&words(&candidate), &golds);
            println!("{}", serde_json::to_string(&labels)?);
        }
        Command::Run {
            config,
            log,
            dry_run,
            limit,
        } => run(&config, log, dry_run, limit)?,
        Command::Report { logs, by, format, seed } => {
            let mut records = Vec::new();
            for path in &logs {
                records.extend(read_log(path, false)?);
            }
            if records.is_empty() {
                bail!("no records in {} log(s)", logs.len());
            }
            let by = match by {
                By::Size => GroupBy::Size,
                By::Length => GroupBy::length_buckets(),
            };
            let table = aggregate_report(&records, &by, seed);
            match format {
                Format::Text => print!("{}", table.to_text()),
                Format::Csv => print!("{}", table.to_csv()),
            }
        }
    }
    Ok(())
}
