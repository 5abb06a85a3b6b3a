//! Synthetic single-topic collections with controlled topic distributions.
//!
//! Topic `t` owns `vocab_per_topic` primary terms, disjoint from every other
//! topic; a shared pool is common to all. Each token is a shared term with
//! probability `noise_rate`, otherwise a primary term of the document's
//! topic, both uniform.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::topics::{default_doc_ids, TopicModel};
use super::Document;
use crate::error::{Error, Result};

/// The two-topic distribution types, ordered from uniform to skewed.
pub const TWO_TOPIC_TYPES: [[usize; 2]; 7] = [
    [25, 25],
    [30, 20],
    [35, 15],
    [40, 10],
    [43, 7],
    [45, 5],
    [46, 4],
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    /// Documents per topic.
    pub distribution: Vec<usize>,
    pub vocab_per_topic: usize,
    pub shared_vocab: usize,
    pub doc_length: usize,
    pub noise_rate: f64,
    pub rng_seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            distribution: vec![25, 25],
            vocab_per_topic: 15,
            shared_vocab: 30,
            doc_length: 20,
            noise_rate: 0.3,
            rng_seed: 1,
        }
    }
}

impl SynthSpec {
    pub fn n_docs(&self) -> usize {
        self.distribution.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.distribution.is_empty() || self.distribution.contains(&0) {
            return Err(Error::Parameter("distribution counts must be positive".into()));
        }
        if self.vocab_per_topic == 0 || self.doc_length == 0 {
            return Err(Error::Parameter(
                "vocab_per_topic and doc_length must be positive".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.noise_rate) {
            return Err(Error::Parameter(format!(
                "noise_rate {} outside [0, 1)",
                self.noise_rate
            )));
        }
        if self.noise_rate > 0.0 && self.shared_vocab == 0 {
            return Err(Error::Parameter("noise_rate > 0 needs a shared vocabulary".into()));
        }
        Ok(())
    }

    /// Applies `key=value` settings on top of `self`. Unknown keys are errors.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |e: &dyn std::fmt::Display| Error::Parameter(format!("{key}={value}: {e}"));
        match key {
            "dist" | "distribution" => self.distribution = parse_distribution(value)?,
            "vocab_per_topic" => self.vocab_per_topic = value.parse().map_err(|e| bad(&e))?,
            "shared_vocab" => self.shared_vocab = value.parse().map_err(|e| bad(&e))?,
            "doc_length" => self.doc_length = value.parse().map_err(|e| bad(&e))?,
            "noise_rate" => self.noise_rate = value.parse().map_err(|e| bad(&e))?,
            "seed" | "rng_seed" => self.rng_seed = value.parse().map_err(|e| bad(&e))?,
            _ => return Err(Error::Parameter(format!("unknown synth key {key:?}"))),
        }
        Ok(())
    }

    /// Parses a `key=value` file (one per line, `#` comments).
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut spec = Self::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Parameter(format!("line {}: expected key=value", lineno + 1))
            })?;
            spec.apply_kv(k.trim(), v.trim())
                .map_err(|e| Error::Parameter(format!("line {}: {e}", lineno + 1)))?;
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_kv(&self) -> String {
        let dist: Vec<String> = self.distribution.iter().map(usize::to_string).collect();
        let mut s = String::new();
        let _ = writeln!(s, "dist={}", dist.join(","));
        let _ = writeln!(s, "vocab_per_topic={}", self.vocab_per_topic);
        let _ = writeln!(s, "shared_vocab={}", self.shared_vocab);
        let _ = writeln!(s, "doc_length={}", self.doc_length);
        let _ = writeln!(s, "noise_rate={}", self.noise_rate);
        let _ = writeln!(s, "seed={}", self.rng_seed);
        s
    }
}

/// Parses `25,25` (also accepts `25-25`).
pub fn parse_distribution(s: &str) -> Result<Vec<usize>> {
    let counts = s
        .split([',', '-'])
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|e| Error::Parameter(format!("distribution {s:?}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if counts.is_empty() || counts.contains(&0) {
        return Err(Error::Parameter(format!("distribution {s:?} needs positive counts")));
    }
    Ok(counts)
}

pub fn primary_term(topic: usize, i: usize) -> String {
    format!("t{topic}w{i:04}")
}

pub fn shared_term(i: usize) -> String {
    format!("s{i:04}")
}

/// Generates the documents and their single-topic relevance model.
pub fn synthesize_collection(spec: &SynthSpec) -> Result<(Vec<Document>, TopicModel)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let tm = TopicModel::single_topic(&spec.distribution)?;
    let ids = default_doc_ids(spec.n_docs());
    let mut docs = Vec::with_capacity(ids.len());
    let mut d = 0;
    for (topic, &count) in spec.distribution.iter().enumerate() {
        for _ in 0..count {
            let mut text = String::with_capacity(spec.doc_length * 8);
            for k in 0..spec.doc_length {
                if k > 0 {
                    text.push(if k % 16 == 0 { '\n' } else { ' ' });
                }
                let shared = spec.noise_rate > 0.0 && rng.gen_bool(spec.noise_rate);
                let tok = if shared {
                    shared_term(rng.gen_range(0..spec.shared_vocab))
                } else {
                    primary_term(topic, rng.gen_range(0..spec.vocab_per_topic))
                };
                text.push_str(&tok);
            }
            text.push('\n');
            let mut labels = BTreeMap::new();
            labels.insert(tm.topic_ids()[topic].clone(), 1.0);
            docs.push(Document {
                id: ids[d].clone(),
                text,
                topic_labels: Some(labels),
            });
            d += 1;
        }
    }
    Ok((docs, tm))
}
