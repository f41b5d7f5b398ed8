use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use tablefol::checker::{benchmark, CheckerOptions};
use tablefol::dataset::{generate_problem_set, read_bases, read_cases, write_cases};
use tablefol::engine::{Engine, EngineConfig, Resources};
use tablefol::fixtures::{compiled_cases, load_table_dir, FixtureSet};
use tablefol::grammar::{compile, preprocess, Lexicon};
use tablefol::knowledge::{InjectionConfig, RelatednessKB};
use tablefol::table::{load_table, FileEmbeddings, OovPolicy};

type Result<T> = std::result::Result<T, Box<dyn std::error::Error>>;

/// Numerical-comparative inference between key/value tables and sentences.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Label one hypothesis against one table.
    Infer {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        hypothesis: String,
        /// Print the full trace as JSON.
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        opts: EngineArgs,
    },
    /// Run a dataset of test cases and write a report.
    Eval {
        #[arg(long)]
        dataset: PathBuf,
        /// Directory of `<table_id>.json` files.
        #[arg(long)]
        tables: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[command(flatten)]
        opts: EngineArgs,
    },
    /// Expand base hypotheses into problem sets.
    GenDataset {
        #[arg(long)]
        bases: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the formula for a hypothesis.
    Compile {
        #[arg(long)]
        hypothesis: String,
        /// Title to recognize as a proper noun; repeatable.
        #[arg(long)]
        title: Vec<String>,
    },
    /// Time both checkers on every generated case of a fixture directory.
    Bench {
        #[arg(long)]
        fixtures: PathBuf,
        #[arg(long, env = "TABLEFOL_TIMEOUT_MS", default_value_t = 10_000)]
        timeout_ms: u64,
    },
}

#[derive(Args)]
struct EngineArgs {
    /// Skip knowledge injection.
    #[arg(long)]
    no_ki: bool,
    /// Use the reference evaluator.
    #[arg(long)]
    naive: bool,
    #[arg(long, env = "TABLEFOL_TIMEOUT_MS", default_value_t = 10_000)]
    timeout_ms: u64,
    /// Rows kept by the filter.
    #[arg(long, default_value_t = tablefol::table::DEFAULT_ROWS)]
    rows: usize,
    /// Relatedness scores, `a<TAB>b<TAB>score` lines.
    #[arg(long)]
    kb: Option<PathBuf>,
    /// Word vectors, `word v1 ... vd` lines.
    #[arg(long)]
    embeddings: Option<PathBuf>,
}

impl EngineArgs {
    fn engine(&self) -> Result<Engine> {
        let mut r = Resources::default();
        if let Some(p) = &self.kb {
            r.kb = RelatednessKB::load(p)?;
        }
        if let Some(p) = &self.embeddings {
            r.embeddings = Arc::new(FileEmbeddings::load(p, OovPolicy::Hash)?);
        }
        if self.rows == 0 {
            return Err("--rows must be at least 1".into());
        }
        let config = EngineConfig {
            rows: self.rows,
            injection: InjectionConfig { enabled: !self.no_ki, ..Default::default() },
            checker: CheckerOptions::default().with_timeout(Duration::from_millis(self.timeout_ms)),
            naive: self.naive,
        };
        Ok(Engine::new(r, config))
    }
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Infer { table, hypothesis, trace, opts } => {
            let engine = opts.engine()?;
            let v = engine.infer(&load_table(&table)?, &hypothesis);
            if trace {
                println!("{}", serde_json::to_string_pretty(&v)?);
            } else {
                println!("{}", v.label);
                if let Some(reason) = &v.trace.reason {
                    eprintln!("{reason}");
                }
            }
        }
        Command::Eval { dataset, tables, report, opts } => {
            let engine = opts.engine()?;
            let cases = read_cases(BufReader::new(File::open(&dataset)?))?;
            let tables = load_table_dir(&tables)?;
            let r = engine.evaluate(&cases, &tables);
            write_json(&report, &r)?;
            println!(
                "{} cases, accuracy {:.4}, all-correct sets {:.4}, timed out {}, errored {}",
                r.case_count, r.accuracy, r.per_set_all_correct, r.timed_out, r.errored
            );
        }
        Command::GenDataset { bases, out } => {
            let bases = read_bases(BufReader::new(File::open(&bases)?))?;
            let mut cases = Vec::new();
            for b in &bases {
                cases.extend(generate_problem_set(b)?);
            }
            let mut w = BufWriter::new(File::create(&out)?);
            write_cases(&cases, &mut w)?;
            w.flush()?;
            println!("{} sets, {} cases", bases.len(), cases.len());
        }
        Command::Compile { hypothesis, title } => {
            let titles: Vec<&str> = title.iter().map(String::as_str).collect();
            let tokens = preprocess(&hypothesis, &titles);
            println!("{}", compile(&tokens, &Lexicon::default())?);
        }
        Command::Bench { fixtures, timeout_ms } => {
            let set = FixtureSet::load(&fixtures)?;
            let opts = CheckerOptions::default().with_timeout(Duration::from_millis(timeout_ms));
            let engine = Engine::new(set.resources(), EngineConfig { checker: opts, ..Default::default() });
            let pairs: Vec<_> = compiled_cases(&set, &engine)?.into_iter().map(|(_, f, m)| (f, m)).collect();
            if pairs.is_empty() {
                return Err(format!("{}: no base hypotheses to benchmark", fixtures.display()).into());
            }
            println!("{}", serde_json::to_string_pretty(&benchmark(&pairs, &opts)?)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
