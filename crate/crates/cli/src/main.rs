use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use irr_core::corpus::{synthesize_collection, write_corpus_dir};
use irr_core::experiment::{
    plotdata, run_experiment, run_verification, write_report, ExperimentConfig, PlotOptions, VerifyConfig,
};
use irr_core::theory::topic_stats;
use irr_core::{Error, SynthSpec};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "irr", version, about = "Subspace document representation experiments")]
struct Cli {
    /// Log level filter (overridden by RUST_LOG).
    #[arg(long, global = true, default_value = "warn")]
    log: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic corpus directory with topics.tsv and manifest.json.
    Synth(SynthArgs),
    /// Run VSM/LSI/IRR over datasets and write one CSV row per run.
    Run(Box<RunArgs>),
    /// Numerically check the perturbation bounds; JSON lines plus a summary.
    Verify(VerifyArgs),
    /// Aggregate a run report into mean/std per (x, series).
    Plotdata(PlotArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Documents per topic, e.g. 25,25.
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    vocab_per_topic: Option<usize>,
    #[arg(long)]
    shared_vocab: Option<usize>,
    #[arg(long)]
    doc_length: Option<usize>,
    #[arg(long)]
    noise_rate: Option<f64>,
    /// key=value generator settings; flags override.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Synthetic distribution, repeatable: --dist 25,25 --dist 46,4.
    #[arg(long)]
    dist: Vec<String>,
    /// Corpus directory, repeatable.
    #[arg(long)]
    corpus: Vec<PathBuf>,
    /// Stored term-document matrix, repeatable.
    #[arg(long)]
    matrix: Vec<PathBuf>,
    /// topics.tsv for the last --matrix.
    #[arg(long, requires = "matrix")]
    matrix_topics: Option<PathBuf>,
    /// Seeds: 1,2,3 or 1..10.
    #[arg(long, visible_alias = "seed")]
    seeds: Option<String>,
    /// Comma list of vsm, lsi, irr, irr:auto, irr:<q>.
    #[arg(long)]
    methods: Option<String>,
    /// Scaling factor for plain irr: auto or a number.
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Dimensionality: k, an integer, or ratio:<theta>.
    #[arg(long)]
    ell: Option<String>,
    #[arg(long)]
    topics: Option<usize>,
    #[arg(long)]
    clusters: Option<usize>,
    /// Comma list of kappa, cluster.
    #[arg(long)]
    metrics: Option<String>,
    #[arg(long)]
    vocab_per_topic: Option<usize>,
    #[arg(long)]
    shared_vocab: Option<usize>,
    #[arg(long)]
    doc_length: Option<usize>,
    #[arg(long)]
    noise_rate: Option<f64>,
    /// key=value experiment settings; flags override.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV output path (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Noisy instances to generate.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Fixed noise level for every noisy instance.
    #[arg(long)]
    noise: Option<f64>,
    /// Invert every checked inequality (harness self-test).
    #[arg(long)]
    inject_fault: bool,
    /// JSON-lines output path (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Report CSV from `irr run`.
    report: PathBuf,
    #[arg(long, default_value = "nonuniformity")]
    x: String,
    #[arg(long, default_value = "method")]
    series: String,
    /// Comma list of columns to aggregate.
    #[arg(long, default_value = "kappa")]
    y: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Data(Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_data_error() {
            Failure::Data(e)
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.into())
    }
}

type CmdResult = Result<(), Failure>;

fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_config(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("config {}: {e}", path.display())))
}

#[derive(Serialize)]
struct Manifest<'a> {
    spec: &'a SynthSpec,
    documents: usize,
    topics: usize,
    dominances: Vec<f64>,
    nonuniformity: f64,
}

fn cmd_synth(args: SynthArgs) -> CmdResult {
    let mut spec = match &args.config {
        Some(p) => SynthSpec::from_kv(&read_config(p)?)?,
        None => SynthSpec::default(),
    };
    let flags = [
        ("dist", args.dist),
        ("seed", args.seed.map(|v| v.to_string())),
        ("vocab_per_topic", args.vocab_per_topic.map(|v| v.to_string())),
        ("shared_vocab", args.shared_vocab.map(|v| v.to_string())),
        ("doc_length", args.doc_length.map(|v| v.to_string())),
        ("noise_rate", args.noise_rate.map(|v| v.to_string())),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            spec.apply_kv(k, &v)?;
        }
    }
    let (docs, tm) = synthesize_collection(&spec)?;
    write_corpus_dir(&args.out, &docs, &tm)?;
    let stats = topic_stats(&tm);
    let manifest = Manifest {
        spec: &spec,
        documents: tm.n_docs(),
        topics: tm.n_topics(),
        dominances: stats.dominances.clone(),
        nonuniformity: stats.nonuniformity_true,
    };
    let mut json = serde_json::to_string_pretty(&manifest).map_err(Error::from)?;
    json.push('\n');
    fs::write(args.out.join("manifest.json"), json)?;
    log::info!("wrote {} documents to {}", docs.len(), args.out.display());
    Ok(())
}

fn run_config(args: &RunArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::from_kv(&read_config(p)?).map_err(|e| Failure::Usage(e.to_string()))?,
        None => ExperimentConfig::default(),
    };
    // Datasets on the command line replace those from the config file.
    if !(args.dist.is_empty() && args.corpus.is_empty() && args.matrix.is_empty()) {
        cfg.datasets.clear();
    }
    let mut kv: Vec<(&str, String)> = Vec::new();
    kv.extend(args.dist.iter().map(|d| ("dist", d.clone())));
    kv.extend(args.corpus.iter().map(|p| ("corpus", p.display().to_string())));
    kv.extend(args.matrix.iter().map(|p| ("matrix", p.display().to_string())));
    let opt = |k: &'static str, v: Option<String>| v.map(|v| (k, v));
    kv.extend(
        [
            opt("matrix_topics", args.matrix_topics.as_ref().map(|p| p.display().to_string())),
            opt("seeds", args.seeds.clone()),
            opt("methods", args.methods.clone()),
            opt("q", args.q.clone()),
            opt("alpha", args.alpha.map(|v| v.to_string())),
            opt("beta", args.beta.map(|v| v.to_string())),
            opt("ell", args.ell.clone()),
            opt("topics", args.topics.map(|v| v.to_string())),
            opt("clusters", args.clusters.map(|v| v.to_string())),
            opt("metrics", args.metrics.clone()),
            opt("vocab_per_topic", args.vocab_per_topic.map(|v| v.to_string())),
            opt("shared_vocab", args.shared_vocab.map(|v| v.to_string())),
            opt("doc_length", args.doc_length.map(|v| v.to_string())),
            opt("noise_rate", args.noise_rate.map(|v| v.to_string())),
        ]
        .into_iter()
        .flatten(),
    );
    for (k, v) in kv {
        cfg.apply_kv(k, &v)
            .map_err(|e| Failure::Usage(format!("--{}: {e}", k.replace('_', "-"))))?;
    }
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(cfg)
}

fn cmd_run(args: RunArgs) -> CmdResult {
    let cfg = run_config(&args)?;
    let rows = run_experiment(&cfg)?;
    let mut out = output(args.out.as_deref())?;
    write_report(&rows, &mut out)?;
    out.flush()?;
    log::info!("{} rows", rows.len());
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> CmdResult {
    if let Some(n) = args.noise {
        if !(n.is_finite() && n >= 0.0) {
            return Err(Failure::Usage(format!("--noise {n} must be finite and nonnegative")));
        }
    }
    let cfg = VerifyConfig {
        trials: args.trials,
        seed: args.seed,
        noise: args.noise,
        inject_fault: args.inject_fault,
    };
    let (records, summary) = run_verification(&cfg)?;
    let mut out = output(args.out.as_deref())?;
    for r in &records {
        serde_json::to_writer(&mut out, r).map_err(Error::from)?;
        writeln!(out)?;
    }
    serde_json::to_writer(&mut out, &serde_json::json!({ "summary": summary })).map_err(Error::from)?;
    writeln!(out)?;
    out.flush()?;
    for (name, c) in &summary.checks {
        eprintln!("{name}: {}/{} hold", c.total - c.failed, c.total);
    }
    if summary.passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn cmd_plotdata(args: PlotArgs) -> CmdResult {
    let opts = PlotOptions {
        x: args.x,
        series: args.series,
        y: args.y.split(',').map(|s| s.trim().to_owned()).filter(|s| !s.is_empty()).collect(),
    };
    let report = File::open(&args.report)?;
    let mut out = output(args.out.as_deref())?;
    plotdata(report, &opts, &mut out)?;
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(&cli.log)).init();

    let result = match cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Run(a) => cmd_run(*a),
        Command::Verify(a) => cmd_verify(a),
        Command::Plotdata(a) => cmd_plotdata(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_DATA)
        }
        Err(Failure::Verification) => {
            eprintln!("verification failed");
            ExitCode::from(EXIT_VERIFY)
        }
    }
}
