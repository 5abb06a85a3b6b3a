//! Experiment driver: builds datasets, derives VSM/LSI/IRR representations,
//! scores them and reports one row per dataset, seed and method.

mod plot;
mod report;
mod verify;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

pub use plot::{plotdata, PlotOptions};
pub use report::{write_report, ReportRow, REPORT_COLUMNS, TIMING_COLUMNS};
pub use verify::{run_verification, CheckCount, VerifyConfig, VerifySummary};

use crate::corpus::{
    build_matrix, default_doc_ids, default_stopwords, intra_topic_pairs, load_corpus_dir, parse_distribution,
    parse_topics_tsv, synthesize_collection, SynthSpec, TermDocumentMatrix, TopicModel,
};
use crate::error::{Error, Result};
use crate::evalmetrics::{floor_ceiling, kappa_average_precision, rank_pairs};
use crate::linalg::io;
use crate::subspace::{
    auto_scale, dimensionality_by_residual_ratio, irr, lsi, nonuniformity_estimate, represent, vsm, EllMode,
    IrrConfig, QMode, SubspaceBasis, DEFAULT_ALPHA, DEFAULT_BETA,
};
use crate::theory::topic_stats;

/// A representation method as named on the command line: `vsm`, `lsi`,
/// `irr` (scaling factor from the config), `irr:auto` or `irr:<q>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodSpec {
    Vsm,
    Lsi,
    Irr(Option<QMode>),
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodSpec::Vsm => f.write_str("vsm"),
            MethodSpec::Lsi => f.write_str("lsi"),
            MethodSpec::Irr(None) => f.write_str("irr"),
            MethodSpec::Irr(Some(QMode::Auto)) => f.write_str("irr:auto"),
            MethodSpec::Irr(Some(QMode::Fixed(q))) => write!(f, "irr:{q}"),
        }
    }
}

impl FromStr for MethodSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "vsm" => Ok(MethodSpec::Vsm),
            "lsi" => Ok(MethodSpec::Lsi),
            "irr" => Ok(MethodSpec::Irr(None)),
            other => match other.strip_prefix("irr:") {
                Some(q) => Ok(MethodSpec::Irr(Some(parse_q(q)?))),
                None => Err(Error::Parameter(format!("unknown method {other:?}"))),
            },
        }
    }
}

/// `auto` or a nonnegative number.
pub fn parse_q(s: &str) -> Result<QMode> {
    if s.trim() == "auto" {
        return Ok(QMode::Auto);
    }
    let q: f64 = s
        .trim()
        .parse()
        .map_err(|e| Error::Parameter(format!("scaling factor {s:?}: {e}")))?;
    if !(q.is_finite() && q >= 0.0) {
        return Err(Error::Parameter(format!("scaling factor {q} must be >= 0")));
    }
    Ok(QMode::Fixed(q))
}

/// How the dimensionality of LSI and IRR subspaces is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EllRule {
    /// The number of topics.
    Topics,
    Fixed(usize),
    /// Residual-ratio threshold θ.
    Ratio(f64),
}

impl FromStr for EllRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "k" || s == "topics" {
            return Ok(EllRule::Topics);
        }
        if let Some(t) = s.strip_prefix("ratio:") {
            let theta: f64 = t.parse().map_err(|e| Error::Parameter(format!("ell {s:?}: {e}")))?;
            if !(theta > 0.0 && theta < 1.0) {
                return Err(Error::Parameter(format!("residual-ratio threshold {theta} outside (0, 1)")));
            }
            return Ok(EllRule::Ratio(theta));
        }
        match s.parse::<usize>() {
            Ok(0) => Err(Error::Parameter("ell must be at least 1".into())),
            Ok(l) => Ok(EllRule::Fixed(l)),
            Err(e) => Err(Error::Parameter(format!("ell {s:?}: {e}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Kappa,
    Cluster,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "kappa" => Ok(Metric::Kappa),
            "cluster" => Ok(Metric::Cluster),
            other => Err(Error::Parameter(format!("unknown metric {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    /// Synthetic collection with these documents per topic; the remaining
    /// generator settings come from [`ExperimentConfig::synth`].
    Synth(Vec<usize>),
    /// A corpus directory (see [`crate::corpus`]).
    Corpus(PathBuf),
    /// A stored term-document matrix with an optional `topics.tsv` whose
    /// doc ids are `d0000`, `d0001`, … in column order.
    Matrix { path: PathBuf, topics: Option<PathBuf> },
}

impl Dataset {
    pub fn label(&self) -> String {
        let stem = |p: &PathBuf| {
            p.file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string())
        };
        match self {
            Dataset::Synth(d) => d.iter().map(usize::to_string).collect::<Vec<_>>().join("-"),
            Dataset::Corpus(p) | Dataset::Matrix { path: p, .. } => stem(p),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub datasets: Vec<Dataset>,
    /// Generator seeds; only synthetic datasets are run once per seed.
    pub seeds: Vec<u64>,
    pub methods: Vec<MethodSpec>,
    /// Scaling factor for plain `irr`.
    pub q: QMode,
    pub alpha: f64,
    pub beta: f64,
    pub ell: EllRule,
    /// Known topic count; defaults to the topic model's when labels exist.
    pub topics: Option<usize>,
    pub clusters: Option<usize>,
    pub metrics: Vec<Metric>,
    pub synth: SynthSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            datasets: Vec::new(),
            seeds: vec![1],
            methods: vec![MethodSpec::Vsm, MethodSpec::Lsi, MethodSpec::Irr(Some(QMode::Auto))],
            q: QMode::Auto,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            ell: EllRule::Topics,
            topics: None,
            clusters: None,
            metrics: vec![Metric::Kappa],
            synth: SynthSpec::default(),
        }
    }
}

fn parse_list<T: FromStr<Err = Error>>(value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse())
        .collect()
}

/// `1,2,5` or an inclusive range `1..10`.
pub fn parse_seeds(value: &str) -> Result<Vec<u64>> {
    let bad = |e: std::num::ParseIntError| Error::Parameter(format!("seeds {value:?}: {e}"));
    if let Some((a, b)) = value.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse().map_err(bad)?, b.trim().parse().map_err(bad)?);
        if a > b {
            return Err(Error::Parameter(format!("empty seed range {value:?}")));
        }
        return Ok((a..=b).collect());
    }
    value
        .split(',')
        .map(|s| s.trim().parse().map_err(bad))
        .collect()
}

impl ExperimentConfig {
    /// Applies one `key=value` setting. `dist`, `corpus` and `matrix` add a
    /// dataset; everything else replaces the current value.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        let num = |e: &dyn fmt::Display| Error::Parameter(format!("{key}={value}: {e}"));
        match key {
            "dist" => self.datasets.push(Dataset::Synth(parse_distribution(value)?)),
            "corpus" => self.datasets.push(Dataset::Corpus(PathBuf::from(value))),
            "matrix" => self.datasets.push(Dataset::Matrix {
                path: PathBuf::from(value),
                topics: None,
            }),
            "matrix_topics" => match self.datasets.last_mut() {
                Some(Dataset::Matrix { topics, .. }) => *topics = Some(PathBuf::from(value)),
                _ => return Err(Error::Parameter("matrix_topics must follow a matrix entry".into())),
            },
            "seeds" | "seed" => self.seeds = parse_seeds(value)?,
            "methods" => self.methods = parse_list(value)?,
            "q" => self.q = parse_q(value)?,
            "alpha" => self.alpha = value.parse().map_err(|e| num(&e))?,
            "beta" => self.beta = value.parse().map_err(|e| num(&e))?,
            "ell" => self.ell = value.parse()?,
            "topics" => self.topics = Some(value.parse().map_err(|e| num(&e))?),
            "clusters" => self.clusters = Some(value.parse().map_err(|e| num(&e))?),
            "metrics" => self.metrics = parse_list(value)?,
            _ => self.synth.apply_kv(key, value)?,
        }
        Ok(())
    }

    /// Parses a `key=value` config file; errors name the offending line.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parameter(format!("line {}: expected key=value", lineno + 1)))?;
            cfg.apply_kv(k.trim(), v.trim())
                .map_err(|e| Error::Parameter(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() {
            return Err(Error::Parameter("no dataset given".into()));
        }
        if self.methods.is_empty() || self.metrics.is_empty() {
            return Err(Error::Parameter("need at least one method and one metric".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Parameter("need at least one seed".into()));
        }
        if self.topics == Some(0) || self.clusters == Some(0) {
            return Err(Error::Parameter("topic and cluster counts must be positive".into()));
        }
        if !(self.alpha.is_finite() && self.beta.is_finite()) {
            return Err(Error::Parameter("alpha and beta must be finite".into()));
        }
        let mut probe = self.synth.clone();
        for d in &self.datasets {
            if let Dataset::Synth(dist) = d {
                probe.distribution = dist.clone();
                probe.validate()?;
            }
        }
        Ok(())
    }
}

struct Prepared {
    label: String,
    seed: Option<u64>,
    a: TermDocumentMatrix,
    topics: Option<TopicModel>,
}

fn prepare(ds: &Dataset, seed: Option<u64>, cfg: &ExperimentConfig) -> Result<Prepared> {
    let (a, topics) = match ds {
        Dataset::Synth(dist) => {
            let spec = SynthSpec {
                distribution: dist.clone(),
                rng_seed: seed.unwrap_or(cfg.synth.rng_seed),
                ..cfg.synth.clone()
            };
            let (docs, tm) = synthesize_collection(&spec)?;
            (build_matrix(&docs, &default_stopwords())?, Some(tm))
        }
        Dataset::Corpus(dir) => {
            let corpus = load_corpus_dir(dir)?;
            (build_matrix(&corpus.documents, &default_stopwords())?, corpus.topics)
        }
        Dataset::Matrix { path, topics } => {
            let m = io::load(path)?;
            let ids = default_doc_ids(m.cols());
            let terms = (0..m.rows()).map(|i| format!("term{i}")).collect();
            let a = TermDocumentMatrix::from_weights(m, terms, ids.clone())?;
            let tm = match topics {
                Some(p) => Some(TopicModel::from_judgments(&ids, &parse_topics_tsv(&std::fs::read_to_string(p)?)?)?),
                None => None,
            };
            (a, tm)
        }
    };
    if let Some(tm) = &topics {
        if tm.doc_ids() != a.doc_ids() {
            return Err(Error::Format("topic labels and documents disagree".into()));
        }
    }
    Ok(Prepared {
        label: ds.label(),
        seed,
        a,
        topics,
    })
}

fn resolve_q(mode: QMode, a: &TermDocumentMatrix, cfg: &ExperimentConfig) -> f64 {
    match mode {
        QMode::Fixed(q) => q,
        QMode::Auto => auto_scale(a, cfg.alpha, cfg.beta),
    }
}

fn build_basis(p: &Prepared, method: MethodSpec, k: Option<usize>, cfg: &ExperimentConfig) -> Result<SubspaceBasis> {
    let fixed_ell = |rule: EllRule| match rule {
        EllRule::Topics => k
            .map(EllMode::Fixed)
            .ok_or_else(|| Error::Precondition("ell = k needs a topic count (--topics or labels)".into())),
        EllRule::Fixed(l) => Ok(EllMode::Fixed(l)),
        EllRule::Ratio(t) => Ok(EllMode::ResidualRatio(t)),
    };
    match method {
        MethodSpec::Vsm => vsm(&p.a),
        MethodSpec::Lsi => {
            let ell = match fixed_ell(cfg.ell)? {
                EllMode::Fixed(l) => l,
                EllMode::ResidualRatio(t) => dimensionality_by_residual_ratio(&p.a, 0.0, t)?,
            };
            lsi(&p.a, ell)
        }
        MethodSpec::Irr(mode) => {
            let q = resolve_q(mode.unwrap_or(cfg.q), &p.a, cfg);
            let config = IrrConfig {
                q: QMode::Fixed(q),
                ell: fixed_ell(cfg.ell)?,
                alpha: cfg.alpha,
                beta: cfg.beta,
            };
            irr(&p.a, &config)
        }
    }
}

fn run_one(p: &Prepared, method: MethodSpec, run_id: String, cfg: &ExperimentConfig) -> Result<ReportRow> {
    let start = Instant::now();
    let k = cfg.topics.or_else(|| p.topics.as_ref().map(TopicModel::n_topics));
    let basis = build_basis(p, method, k, cfg)?;
    let rep = represent(&p.a, &basis)?;
    let needs_topics = || {
        p.topics
            .as_ref()
            .ok_or_else(|| Error::Precondition(format!("{}: metrics need topic labels", p.label)))
    };

    let mut row = ReportRow {
        run_id,
        dataset: p.label.clone(),
        seed: p.seed,
        method: method.to_string(),
        q: basis.q,
        ell: basis.ell(),
        clusters: None,
        kappa: None,
        clustering: None,
        nonuniformity: p.topics.as_ref().map(|tm| topic_stats(tm).nonuniformity_true),
        f_estimate: nonuniformity_estimate(&p.a),
        elapsed_ms: 0.0,
    };
    for metric in &cfg.metrics {
        match metric {
            Metric::Kappa => {
                let tm = needs_topics()?;
                let ranked = rank_pairs(&rep, p.a.doc_ids())?;
                row.kappa = Some(kappa_average_precision(&ranked, &intra_topic_pairs(tm))?);
            }
            Metric::Cluster => {
                let tm = needs_topics()?;
                let c = match (cfg.clusters, k, method) {
                    (Some(c), _, _) => c,
                    (None, Some(k), _) => k,
                    (None, None, MethodSpec::Vsm) => {
                        return Err(Error::Precondition(
                            "VSM cluster count needs --clusters when the topic count is unknown".into(),
                        ))
                    }
                    (None, None, _) => basis.ell(),
                };
                row.clusters = Some(c);
                row.clustering = Some(floor_ceiling(&rep, tm, c)?);
            }
        }
    }
    row.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(row)
}

/// Runs every dataset × seed × method cell. Cells run in parallel; rows
/// come back sorted by run id, which follows the config order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ReportRow>> {
    cfg.validate()?;
    let mut cells = Vec::new();
    for (di, ds) in cfg.datasets.iter().enumerate() {
        match ds {
            Dataset::Synth(_) => cells.extend(cfg.seeds.iter().enumerate().map(|(si, &s)| (di, si, Some(s)))),
            _ => cells.push((di, 0, None)),
        }
    }
    let per_cell: Vec<Vec<ReportRow>> = cells
        .par_iter()
        .map(|&(di, si, seed)| {
            let p = prepare(&cfg.datasets[di], seed, cfg)?;
            log::info!("{} seed {:?}: {} terms x {} docs", p.label, seed, p.a.n_terms(), p.a.n_docs());
            cfg.methods
                .iter()
                .enumerate()
                .map(|(mi, &m)| run_one(&p, m, format!("{di:03}.{si:03}.{mi:02}"), cfg))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<ReportRow> = per_cell.into_iter().flatten().collect();
    rows.sort_by(|a, b| a.run_id.cmp(&b.run_id));
    Ok(rows)
}
