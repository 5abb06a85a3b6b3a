use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{TopicModel, TWO_TOPIC_TYPES};
use crate::error::Result;
use crate::theory::{
    construct_ideal_instance, noisy_instance, verify_cosine_bound, verify_sv_perturbation, verify_theorem1,
    verify_theorem2, Checker, TheoremRecord, TheoryInstance,
};

/// Terms in the noise-free instances built for each two-topic type.
const EXACT_TERMS: usize = 100;
/// Random matrix pairs per noisy instance in the perturbation check.
const PAIRS_PER_TRIAL: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    /// Number of noisy instances.
    pub trials: usize,
    pub seed: u64,
    /// Fixed noise level for every instance instead of the cycled levels.
    pub noise: Option<f64>,
    pub inject_fault: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            seed: 1,
            noise: None,
            inject_fault: false,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CheckCount {
    pub total: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerifySummary {
    pub checks: BTreeMap<String, CheckCount>,
    /// Tangent-bound records whose condition `Δ̂_min > √ε̃₀` held.
    pub tangent_conditioned: usize,
    pub passed: bool,
}

fn instance_records(inst: &TheoryInstance, checker: Checker) -> Result<Vec<TheoremRecord>> {
    Ok(vec![
        TheoremRecord::Theorem1(verify_theorem1(inst, checker)?),
        TheoremRecord::Theorem2(verify_theorem2(inst, checker)?),
        TheoremRecord::CosineBound(verify_cosine_bound(inst, &inst.optimum.basis, checker)?),
    ])
}

/// Runs the full suite: noise-free instances of the seven two-topic types,
/// `trials` noisy instances, and `10 × trials` random perturbation pairs.
pub fn run_verification(cfg: &VerifyConfig) -> Result<(Vec<TheoremRecord>, VerifySummary)> {
    let checker = Checker {
        inject_fault: cfg.inject_fault,
    };
    let exact: Vec<Vec<TheoremRecord>> = TWO_TOPIC_TYPES
        .par_iter()
        .enumerate()
        .map(|(i, counts)| {
            let tm = TopicModel::single_topic(counts)?;
            instance_records(&construct_ideal_instance(&tm, EXACT_TERMS, 0.0, cfg.seed + i as u64)?, checker)
        })
        .collect::<Result<_>>()?;
    let noisy: Vec<Vec<TheoremRecord>> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| instance_records(&noisy_instance(i, cfg.seed, cfg.noise)?, checker))
        .collect::<Result<_>>()?;

    let mut records: Vec<TheoremRecord> = exact.into_iter().chain(noisy).flatten().collect();
    let pairs = (cfg.trials * PAIRS_PER_TRIAL).max(1);
    records.push(TheoremRecord::SvPerturbation(verify_sv_perturbation(pairs, cfg.seed, checker)?));

    let mut summary = VerifySummary::default();
    for r in &records {
        let name = match r {
            TheoremRecord::Theorem1(_) => "theorem1",
            TheoremRecord::Theorem2(t) => {
                summary.tangent_conditioned += usize::from(t.condition);
                "theorem2"
            }
            TheoremRecord::SvPerturbation(_) => "sv_perturbation",
            TheoremRecord::CosineBound(_) => "cosine_bound",
        };
        let c = summary.checks.entry(name.to_owned()).or_default();
        c.total += 1;
        c.failed += usize::from(!r.holds());
    }
    summary.passed = summary.checks.values().all(|c| c.failed == 0);
    Ok((records, summary))
}
