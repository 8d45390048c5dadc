use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use idfawe_cli::commands::{cmd_build_index, cmd_evaluate, cmd_run_experiment, cmd_search, with_stdout};
use idfawe_cli::config::{EngineConfig, UsageError, CONFIG_ENV};
use idfawe_cli::{exit_code, EXIT_USAGE};

/// Pseudo-relevance-feedback query expansion with IDF-weighted word embeddings.
#[derive(Parser, Debug)]
#[command(name = "idfawe", version)]
struct Cli {
    /// Configuration file of `key = value` lines.
    #[arg(long, short, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,

    /// Override any configuration key; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,

    #[command(flatten)]
    fields: Fields,

    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

/// One flag per configuration key.
#[derive(Args, Debug)]
struct Fields {
    #[arg(long, global = true)]
    corpus: Option<String>,
    #[arg(long, global = true)]
    stoplist: Option<String>,
    #[arg(long, global = true)]
    embeddings: Option<String>,
    #[arg(long, global = true)]
    contextual: Option<String>,
    #[arg(long, global = true)]
    index: Option<String>,
    #[arg(long, global = true)]
    topics: Option<String>,
    #[arg(long, global = true)]
    qrels: Option<String>,
    #[arg(long, global = true)]
    output: Option<String>,
    /// Variant name, or a comma-separated list for run-experiment.
    #[arg(long, global = true)]
    variant: Option<String>,
    /// Number of expansion terms.
    #[arg(long, global = true)]
    terms: Option<String>,
    /// Size of the local corpus.
    #[arg(long, global = true)]
    local_k: Option<String>,
    #[arg(long, global = true)]
    depth: Option<String>,
    /// Interpolation weight, or a comma-separated sweep.
    #[arg(long, global = true)]
    alpha: Option<String>,
    /// IDF formula: bm25 or paper-literal.
    #[arg(long, global = true)]
    idf: Option<String>,
    #[arg(long, global = true)]
    k1: Option<String>,
    #[arg(long, global = true)]
    b: Option<String>,
    #[arg(long, global = true)]
    normalize: Option<String>,
    /// suffix or identity.
    #[arg(long, global = true)]
    stemmer: Option<String>,
    #[arg(long, global = true)]
    workers: Option<String>,
    #[arg(long, global = true)]
    tag: Option<String>,
    #[arg(long, global = true)]
    cutoff: Option<String>,
}

impl Fields {
    fn pairs(&self) -> Vec<(&'static str, &str)> {
        [
            ("corpus", &self.corpus),
            ("stoplist", &self.stoplist),
            ("embeddings", &self.embeddings),
            ("contextual", &self.contextual),
            ("index", &self.index),
            ("topics", &self.topics),
            ("qrels", &self.qrels),
            ("output", &self.output),
            ("variant", &self.variant),
            ("terms", &self.terms),
            ("local_k", &self.local_k),
            ("depth", &self.depth),
            ("alpha", &self.alpha),
            ("idf", &self.idf),
            ("k1", &self.k1),
            ("b", &self.b),
            ("normalize", &self.normalize),
            ("stemmer", &self.stemmer),
            ("workers", &self.workers),
            ("tag", &self.tag),
            ("cutoff", &self.cutoff),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse the corpus and write the index file.
    BuildIndex,
    /// Run one query and print its ranking in run format.
    Search {
        /// Free-text query.
        query: String,
        /// Number of results to print.
        #[arg(long, default_value_t = 10)]
        limit: usize,
        /// Query id used in the printed run lines.
        #[arg(long, default_value = "q")]
        qid: String,
    },
    /// Run every configured variant over the topics and evaluate each run.
    RunExperiment,
    /// Evaluate a run file against qrels.
    Evaluate {
        run: PathBuf,
        /// Qrels file; defaults to the configured `qrels`.
        qrels_file: Option<PathBuf>,
        /// Print comma-separated values instead of a table.
        #[arg(long)]
        csv: bool,
    },
}

fn config(cli: &Cli) -> anyhow::Result<EngineConfig> {
    let mut config = match &cli.config {
        Some(path) => EngineConfig::load(path)?,
        None => EngineConfig::default(),
    };
    config.apply_overrides(cli.fields.pairs())?;
    let sets = cli
        .set
        .iter()
        .map(|s| {
            s.split_once('=')
                .ok_or_else(|| anyhow::Error::from(UsageError(format!("--set expects KEY=VALUE, got `{s}`"))))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    config.apply_overrides(sets)?;
    Ok(config)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let config = config(&cli)?;
    with_stdout(|out| match cli.command {
        Command::BuildIndex => cmd_build_index(&config, out),
        Command::Search { query, limit, qid } => cmd_search(&config, &query, &qid, limit, out),
        Command::RunExperiment => cmd_run_experiment(&config, out),
        Command::Evaluate { run, qrels_file, csv } => {
            let qrels = match qrels_file.or_else(|| config.qrels.clone()) {
                Some(q) => q,
                None => return Err(UsageError("no qrels file given".into()).into()),
            };
            cmd_evaluate(&run, &qrels, config.cutoff, csv, out)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
