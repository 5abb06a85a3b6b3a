//! Numerical checks of the dominance interval, the LSI tangent bound and
//! its intermediate claims, singular-value perturbation, and the cosine
//! bound implied by a small deviation matrix.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::instance::TheoryInstance;
use super::optimum::{deviation_error, deviation_matrix};
use super::stats::topic_stats;
use crate::error::Result;
use crate::evalmetrics::cosine;
use crate::linalg::{canonical_angles, project, svd, symmetric_spectral_norm, truncate_svd, Basis, Matrix};
use crate::subspace::vsm;

/// Slack for the dominance interval.
pub const THEOREM1_SLACK: f64 = 1e-8;
/// Slack for the tangent bound and its intermediate claims.
pub const THEOREM2_SLACK: f64 = 1e-6;
pub const PERTURBATION_SLACK: f64 = 1e-10;
pub const COSINE_SLACK: f64 = 1e-9;

/// Evaluates `lhs ≤ rhs + slack`. With `inject_fault` every comparison is
/// inverted, so a correct implementation reports failures; used to test
/// that the harness can fail at all.
#[derive(Debug, Clone, Copy, Default)]
pub struct Checker {
    pub inject_fault: bool,
}

impl Checker {
    pub fn le(&self, lhs: f64, rhs: f64, slack: f64) -> bool {
        let ok = lhs <= rhs + slack;
        ok != self.inject_fault
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Record {
    pub instance: String,
    pub is_exact: bool,
    pub h: usize,
    /// Singular values of the optimally projected matrix, `max(k, h)` of them.
    pub sigma_hat: Vec<f64>,
    pub dominances: Vec<f64>,
    pub eps_opt: f64,
    pub mingling: f64,
    /// `max_i |σ̂_i² − Δ_i²|`.
    pub max_gap: f64,
    /// `ε_opt + μ`.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem2Record {
    pub instance: String,
    pub is_exact: bool,
    pub h: usize,
    pub delta_hat_max: f64,
    pub delta_hat_min: f64,
    pub eps0: f64,
    pub eps0_tilde: f64,
    pub eps_opt: f64,
    /// `Δ̂_min > √ε̃₀`.
    pub condition: bool,
    /// `|tan Θ(X_LSI, X_opt)|₂`; serialized as null when infinite.
    pub tan_measured: f64,
    /// Right-hand side of the tangent bound, when the condition holds.
    pub tan_bound: Option<f64>,
    pub sigma_h1: f64,
    /// `|ε̃₀ − ε₀| ≤ ε_opt`.
    pub eps0_tilde_in_range: bool,
    /// `σ_{h+1}(Â) ≤ √ε̃₀`.
    pub sigma_h1_bounded: bool,
    /// `None` when the condition fails or the measured tangent is infinite.
    pub tan_holds: Option<bool>,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationSummary {
    pub trials: usize,
    pub violations: usize,
    /// Largest `|σ_i(X1) − σ_i(X2)| − |E|₂` seen; nonpositive when all hold.
    pub max_excess: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CosineBoundRecord {
    pub instance: String,
    /// Largest absolute deviation-matrix entry.
    pub epsilon: f64,
    pub applicable: bool,
    pub pairs: usize,
    pub violations: usize,
    /// Worst `(lower − cos)` or `(cos − upper)` over all pairs.
    pub max_excess: f64,
    pub holds: bool,
}

/// One JSON-lines record of the verification suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum TheoremRecord {
    Theorem1(Theorem1Record),
    Theorem2(Theorem2Record),
    SvPerturbation(PerturbationSummary),
    CosineBound(CosineBoundRecord),
}

impl TheoremRecord {
    pub fn holds(&self) -> bool {
        match self {
            TheoremRecord::Theorem1(r) => r.holds,
            TheoremRecord::Theorem2(r) => r.holds,
            TheoremRecord::SvPerturbation(r) => r.holds,
            TheoremRecord::CosineBound(r) => r.holds,
        }
    }
}

/// Checks `σ̂_i² ∈ Δ_i² ± (ε_opt + μ)` for `i ≤ max(k, h)`; both sides are
/// zero beyond that.
pub fn verify_theorem1(inst: &TheoryInstance, checker: Checker) -> Result<Theorem1Record> {
    let stats = topic_stats(&inst.topics);
    let opt = &inst.optimum;
    let p = project(&opt.basis, inst.a.matrix())?;
    let count = stats.dominances.len().max(opt.h);
    let sigma_hat = svd(&p)?.padded_values(count);
    let bound = opt.eps_opt + stats.mingling;
    let mut max_gap: f64 = 0.0;
    let mut holds = true;
    for (i, s) in sigma_hat.iter().enumerate() {
        let gap = (s * s - stats.dominance(i).powi(2)).abs();
        max_gap = max_gap.max(gap);
        holds &= checker.le(gap, bound, THEOREM1_SLACK);
    }
    Ok(Theorem1Record {
        instance: inst.label.clone(),
        is_exact: opt.is_exact,
        h: opt.h,
        sigma_hat,
        dominances: stats.dominances,
        eps_opt: opt.eps_opt,
        mingling: stats.mingling,
        max_gap,
        bound,
        holds,
    })
}

/// Compares the `h`-dimensional LSI subspace with the optimum subspace.
///
/// `ε̃₀ = |D̄ᵀD̄|₂` with `D̄ = Â − P_opt(Â)`. The intermediate claims are
/// checked unconditionally; the tangent bound only when `Δ̂_min > √ε̃₀`.
pub fn verify_theorem2(inst: &TheoryInstance, checker: Checker) -> Result<Theorem2Record> {
    let a = inst.a.matrix();
    let opt = &inst.optimum;
    let h = opt.h;
    let d_hat = project(&opt.basis, a)?;
    let d_bar = a.sub(&d_hat)?;
    let eps0_tilde = symmetric_spectral_norm(&d_bar.gram())?;
    let eps0 = deviation_error(&inst.s, a, &vsm(a)?.basis)?;

    let sv_hat = svd(&d_hat)?;
    let delta_hat_max = sv_hat.sigma(0);
    let delta_hat_min = sv_hat.sigma(h.saturating_sub(1));
    let sv_a = svd(a)?;
    let sigma_h1 = sv_a.sigma(h);
    let root = eps0_tilde.sqrt();

    let eps0_tilde_in_range = checker.le((eps0_tilde - eps0).abs(), opt.eps_opt, THEOREM2_SLACK);
    let sigma_h1_bounded = checker.le(sigma_h1, root, THEOREM2_SLACK);

    let lsi = truncate_svd(&sv_a, h.min(sv_a.rank()))?;
    let tan_measured = canonical_angles(&lsi, &opt.basis)?.tan_norm;
    let condition = delta_hat_min > root;
    let tan_bound = condition.then(|| {
        let x = root / delta_hat_min;
        (delta_hat_max / delta_hat_min) * x / (1.0 - x * x)
    });
    let tan_holds = match tan_bound {
        Some(b) if tan_measured.is_finite() => Some(checker.le(tan_measured, b, THEOREM2_SLACK)),
        Some(_) => {
            log::warn!("{}: infinite tangent with the bound condition satisfied", inst.label);
            None
        }
        None => None,
    };
    Ok(Theorem2Record {
        instance: inst.label.clone(),
        is_exact: opt.is_exact,
        h,
        delta_hat_max,
        delta_hat_min,
        eps0,
        eps0_tilde,
        eps_opt: opt.eps_opt,
        condition,
        tan_measured,
        tan_bound,
        sigma_h1,
        eps0_tilde_in_range,
        sigma_h1_bounded,
        tan_holds,
        holds: eps0_tilde_in_range && sigma_h1_bounded && tan_holds != Some(false),
    })
}

fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    Matrix::new(rows, cols, data).expect("finite samples")
}

/// Checks `|σ_i(X1) − σ_i(X2)| ≤ |E|₂ ≤ |E|_F` on random pairs of shape
/// up to 20×15 with perturbations spanning several orders of magnitude.
pub fn verify_sv_perturbation(trials: usize, seed: u64, checker: Checker) -> Result<PerturbationSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut max_excess = f64::NEG_INFINITY;
    for _ in 0..trials {
        let s = rng.gen_range(1..=15);
        let r = rng.gen_range(s..=20);
        let x1 = random_matrix(r, s, &mut rng);
        let scale = 10f64.powf(rng.gen_range(-4.0..1.0));
        let e = random_matrix(r, s, &mut rng).scale(scale);
        let x2 = x1.add(&e)?;
        let (s1, s2) = (svd(&x1)?.padded_values(s), svd(&x2)?.padded_values(s));
        let e2 = svd(&e)?.sigma(0);
        let mut ok = checker.le(e2, e.frobenius_norm(), PERTURBATION_SLACK);
        for (a, b) in s1.iter().zip(&s2) {
            let d = (a - b).abs();
            max_excess = max_excess.max(d - e2);
            ok &= checker.le(d, e2, PERTURBATION_SLACK);
        }
        if !ok {
            violations += 1;
        }
    }
    Ok(PerturbationSummary {
        trials,
        violations,
        max_excess,
        holds: violations == 0,
    })
}

/// Checks `(S_ij − ε)/(1 + ε) ≤ cos(P a_i, P a_j) ≤ (S_ij + ε)/(1 − ε)` for
/// every pair, where `ε` is the largest entry of the deviation matrix for
/// `basis`. Not applicable when `ε ≥ 1` or a projected column vanishes.
pub fn verify_cosine_bound(inst: &TheoryInstance, basis: &Basis, checker: Checker) -> Result<CosineBoundRecord> {
    let a = inst.a.matrix();
    let eps = deviation_matrix(&inst.s, a, basis)?.max_abs();
    let p = project(basis, a)?;
    let cols = p.columns();
    let n = cols.len();
    let applicable = eps < 1.0 && cols.iter().all(|c| c.iter().any(|&v| v != 0.0));
    let mut record = CosineBoundRecord {
        instance: inst.label.clone(),
        epsilon: eps,
        applicable,
        pairs: 0,
        violations: 0,
        max_excess: f64::NEG_INFINITY,
        holds: true,
    };
    if !applicable {
        return Ok(record);
    }
    let s = inst.s.matrix();
    for i in 0..n {
        for j in (i + 1)..n {
            let c = cosine(&cols[i], &cols[j]);
            let lower = (s[(i, j)] - eps) / (1.0 + eps);
            let upper = (s[(i, j)] + eps) / (1.0 - eps);
            record.pairs += 1;
            record.max_excess = record.max_excess.max(lower - c).max(c - upper);
            if !(checker.le(lower, c, COSINE_SLACK) && checker.le(c, upper, COSINE_SLACK)) {
                record.violations += 1;
            }
        }
    }
    record.holds = record.violations == 0;
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::TopicModel;
    use crate::theory::construct_ideal_instance;

    fn exact(counts: &[usize]) -> TheoryInstance {
        construct_ideal_instance(&TopicModel::single_topic(counts).unwrap(), 60, 0.0, 11).unwrap()
    }

    #[test]
    fn exact_instance_equalities() {
        let inst = exact(&[40, 10]);
        let t1 = verify_theorem1(&inst, Checker::default()).unwrap();
        assert!(t1.holds && t1.max_gap < 1e-8, "{t1:?}");
        let t2 = verify_theorem2(&inst, Checker::default()).unwrap();
        assert!(t2.holds && t2.condition);
        assert!(t2.eps0_tilde < 1e-12 && t2.tan_measured < 1e-6, "{t2:?}");
    }

    #[test]
    fn injected_fault_fails() {
        let inst = exact(&[30, 20]);
        let bad = Checker { inject_fault: true };
        assert!(!verify_theorem1(&inst, bad).unwrap().holds);
        assert!(!verify_sv_perturbation(3, 1, bad).unwrap().holds);
    }

    #[test]
    fn identical_pair_has_zero_excess() {
        let c = Checker::default();
        assert!(c.le(0.0, 0.0, 0.0));
        let sum = verify_sv_perturbation(20, 5, c).unwrap();
        assert_eq!(sum.violations, 0);
    }

    #[test]
    fn cosine_bound_exact_case() {
        let inst = exact(&[3, 2]);
        let r = verify_cosine_bound(&inst, &inst.optimum.basis, Checker::default()).unwrap();
        assert!(r.applicable && r.holds);
        assert!(r.epsilon < 1e-12);
        assert_eq!(r.pairs, 10);
    }

    #[test]
    fn bound_formula_instance() {
        // sim = 1, ε = 0.1: lower bound 0.9 / 1.1.
        let lower: f64 = (1.0 - 0.1) / (1.0 + 0.1);
        assert!((lower - 0.818_181_818_181_818_2).abs() < 1e-15);
    }
}
