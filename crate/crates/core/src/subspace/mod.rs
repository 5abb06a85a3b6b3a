//! Representation subspaces: the raw vector space, LSI, and iterative
//! residual rescaling (IRR).
//!
//! IRR builds its basis one vector at a time. At step `j` every residual
//! `r_i` is rescaled to `|r_i|^q r_i`, the new basis vector is the first
//! left singular vector of the rescaled residual matrix, and each
//! *unrescaled* residual then loses its component along that vector. With
//! `q = 0` this is exactly the successive-maximization view of the SVD, so
//! the span matches LSI; larger `q` lets documents that are still poorly
//! represented (long residuals) pull harder on the next direction.

mod sidecar;

use serde::{Deserialize, Serialize};

pub use sidecar::{load_basis, save_basis, BasisSidecar};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, project, svd, Basis, Matrix};

/// Default AUTO-SCALE slope.
pub const DEFAULT_ALPHA: f64 = 3.5;
/// Default AUTO-SCALE intercept.
pub const DEFAULT_BETA: f64 = 0.0;

/// Relative size at which residuals count as exhausted.
const EXHAUSTED_TOL: f64 = 1e-10;
const POWER_MAX_ITER: usize = 100_000;
const POWER_VECTOR_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Vsm,
    Lsi,
    Irr,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Vsm => "vsm",
            Method::Lsi => "lsi",
            Method::Irr => "irr",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QMode {
    Fixed(f64),
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EllMode {
    Fixed(usize),
    /// Stop once the residual ratio `|R|_F² / n` drops to this threshold.
    ResidualRatio(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrrConfig {
    pub q: QMode,
    pub ell: EllMode,
    pub alpha: f64,
    pub beta: f64,
}

impl IrrConfig {
    pub fn fixed(q: f64, ell: usize) -> Self {
        Self {
            q: QMode::Fixed(q),
            ell: EllMode::Fixed(ell),
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
        }
    }

    pub fn auto(ell: EllMode) -> Self {
        Self {
            q: QMode::Auto,
            ell,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.beta.is_finite()) {
            return Err(Error::Parameter("alpha and beta must be finite".into()));
        }
        if let QMode::Fixed(q) = self.q {
            if !(q.is_finite() && q >= 0.0) {
                return Err(Error::Parameter(format!("scaling factor q = {q} must be >= 0")));
            }
        }
        match self.ell {
            EllMode::Fixed(0) => Err(Error::Parameter("dimensionality must be at least 1".into())),
            EllMode::ResidualRatio(t) if !(t > 0.0 && t < 1.0) => Err(Error::Parameter(format!(
                "residual-ratio threshold {t} outside (0, 1)"
            ))),
            _ => Ok(()),
        }
    }
}

/// An orthonormal representation basis and how it was produced.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    pub basis: Basis,
    pub method: Method,
    /// Scaling factor actually used (IRR only).
    pub q: Option<f64>,
    /// `|R^(j)|_F² / n` before each step and after the last; length `ell + 1`.
    pub residual_ratios: Vec<f64>,
    /// Set when residuals vanished before the requested dimensionality.
    pub exhausted: bool,
}

impl SubspaceBasis {
    pub fn ell(&self) -> usize {
        self.basis.dim()
    }
}

/// `|r|^q r`; the zero vector stays zero for every `q`.
pub fn rescale(r: &[f64], q: f64) -> Vec<f64> {
    let n = norm(r);
    if n == 0.0 {
        return vec![0.0; r.len()];
    }
    let s = n.powf(q);
    r.iter().map(|v| v * s).collect()
}

/// Flips `v` so its largest-magnitude coordinate (first on ties) is positive.
pub fn canonical_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn residual_ratio(residuals: &[Vec<f64>]) -> f64 {
    let n = residuals.len().max(1) as f64;
    residuals.iter().map(|r| dot(r, r)).sum::<f64>() / n
}

/// Rank-`ell` LSI: the first `ell` left singular vectors of `a`.
pub fn lsi(a: impl AsRef<Matrix>, ell: usize) -> Result<SubspaceBasis> {
    let a = a.as_ref();
    let s = svd(a)?;
    if ell == 0 || ell > s.rank() {
        return Err(Error::Parameter(format!(
            "LSI dimensionality {ell} outside 1..={}",
            s.rank()
        )));
    }
    let mut b = Matrix::zeros(a.rows(), ell);
    for j in 0..ell {
        let mut u = s.left_vectors.column(j);
        canonical_sign(&mut u);
        b.set_column(j, &u);
    }
    let n = a.cols() as f64;
    let total = a.frobenius_norm().powi(2);
    let mut ratios = vec![total / n];
    let mut left = total;
    for sigma in &s.singular_values[..ell] {
        left = (left - sigma * sigma).max(0.0);
        ratios.push(left / n);
    }
    Ok(SubspaceBasis {
        basis: Basis::new(b)?,
        method: Method::Lsi,
        q: None,
        residual_ratios: ratios,
        exhausted: false,
    })
}

/// The raw vector space: the full range of `a`.
pub fn vsm(a: impl AsRef<Matrix>) -> Result<SubspaceBasis> {
    let a = a.as_ref();
    let rank = svd(a)?.rank();
    let mut b = lsi(a, rank)?;
    b.method = Method::Vsm;
    Ok(b)
}

/// `f(A) = (|AᵀA|_F / n)²`, the non-uniformity estimate behind AUTO-SCALE.
pub fn nonuniformity_estimate(a: impl AsRef<Matrix>) -> f64 {
    let a = a.as_ref();
    let n = a.cols() as f64;
    (a.gram().frobenius_norm() / n).powi(2)
}

/// `q = alpha · f(A) + beta`, floored at zero.
pub fn auto_scale(a: impl AsRef<Matrix>, alpha: f64, beta: f64) -> f64 {
    (alpha * nonuniformity_estimate(a) + beta).max(0.0)
}

/// Runs IRR with the scaling factor and dimensionality chosen by `config`.
pub fn irr(a: impl AsRef<Matrix>, config: &IrrConfig) -> Result<SubspaceBasis> {
    config.validate()?;
    let a = a.as_ref();
    if a.is_empty() {
        return Err(Error::InvalidInput("empty term-document matrix".into()));
    }
    let q = match config.q {
        QMode::Fixed(q) => q,
        QMode::Auto => auto_scale(a, config.alpha, config.beta),
    };
    match config.ell {
        EllMode::Fixed(ell) => irr_steps(a, q, Stop::After(ell)),
        EllMode::ResidualRatio(theta) => {
            let cap = svd(a)?.rank();
            irr_steps(a, q, Stop::Ratio { theta, cap })
        }
    }
}

/// Smallest `ell >= 1` whose post-step residual ratio is at most `theta`,
/// capped at the rank of `a`.
pub fn dimensionality_by_residual_ratio(a: impl AsRef<Matrix>, q: f64, theta: f64) -> Result<usize> {
    let a = a.as_ref();
    if !(q.is_finite() && q >= 0.0) {
        return Err(Error::Parameter(format!("scaling factor q = {q} must be >= 0")));
    }
    let cap = svd(a)?.rank();
    Ok(irr_steps(a, q, Stop::Ratio { theta, cap })?.ell())
}

/// Projects the documents onto the basis: `BBᵀA`.
pub fn represent(a: impl AsRef<Matrix>, basis: &SubspaceBasis) -> Result<Matrix> {
    project(&basis.basis, a.as_ref())
}

#[derive(Debug, Clone, Copy)]
enum Stop {
    After(usize),
    Ratio { theta: f64, cap: usize },
}

fn irr_steps(a: &Matrix, q: f64, stop: Stop) -> Result<SubspaceBasis> {
    let m = a.rows();
    let mut residuals = a.columns();
    let scale0 = residuals.iter().map(|r| norm(r)).fold(0.0, f64::max);
    if scale0 == 0.0 {
        return Err(Error::InvalidInput("term-document matrix is all zeros".into()));
    }
    let mut ratios = vec![residual_ratio(&residuals)];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut exhausted = false;

    loop {
        let done = match stop {
            Stop::After(ell) => basis.len() >= ell,
            Stop::Ratio { theta, cap } => {
                basis.len() >= cap || (!basis.is_empty() && *ratios.last().unwrap() <= theta)
            }
        };
        if done {
            break;
        }
        let longest = residuals.iter().map(|r| norm(r)).fold(0.0, f64::max);
        if longest <= EXHAUSTED_TOL * scale0 {
            exhausted = matches!(stop, Stop::After(_));
            break;
        }

        // Rescale, normalizing by the longest residual so that the largest
        // rescaled column has unit length whatever q is.
        let rescaled: Vec<Vec<f64>> = residuals
            .iter()
            .map(|r| {
                let w = (norm(r) / longest).powf(q) / longest;
                r.iter().map(|v| v * w).collect()
            })
            .collect();
        let Some(mut b) = top_left_singular_vector(&rescaled, m) else {
            exhausted = matches!(stop, Stop::After(_));
            break;
        };
        // Re-orthogonalize against earlier vectors to suppress rounding drift.
        for prev in &basis {
            let c = dot(prev, &b);
            b.iter_mut().zip(prev).for_each(|(x, p)| *x -= c * p);
        }
        let bn = norm(&b);
        b.iter_mut().for_each(|x| *x /= bn);
        canonical_sign(&mut b);

        for r in &mut residuals {
            let c = dot(&b, r);
            r.iter_mut().zip(&b).for_each(|(x, bi)| *x -= c * bi);
        }
        ratios.push(residual_ratio(&residuals));
        basis.push(b);
    }

    if basis.is_empty() {
        return Err(Error::InvalidInput("no basis vector could be extracted".into()));
    }
    let bm = Matrix::from_columns(m, &basis)?;
    Ok(SubspaceBasis {
        basis: Basis::new(bm)?,
        method: Method::Irr,
        q: Some(q),
        residual_ratios: ratios,
        exhausted,
    })
}

/// First left singular vector of the matrix whose columns are `cols`.
///
/// Power iteration runs on the n×n Gram matrix; the result is mapped back
/// through the columns, which is the same iteration as on `R Rᵀ` without
/// forming the m×m product.
pub fn top_left_singular_vector(cols: &[Vec<f64>], m: usize) -> Option<Vec<f64>> {
    let n = cols.len();
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = dot(&cols[i], &cols[j]);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    let trace: f64 = (0..n).map(|i| g[(i, i)]).sum();
    if trace == 0.0 {
        return None;
    }
    let collapse = 1e-30 * trace;
    let starts = std::iter::once(vec![1.0 / (n as f64).sqrt(); n]).chain((0..n).map(|j| {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        e
    }));
    for start in starts {
        if let Some(v) = gram_power(&g, start, collapse) {
            let mut u = vec![0.0; m];
            for (c, &w) in cols.iter().zip(&v) {
                u.iter_mut().zip(c).for_each(|(x, ci)| *x += w * ci);
            }
            let un = norm(&u);
            if un > 0.0 {
                u.iter_mut().for_each(|x| *x /= un);
                return Some(u);
            }
        }
    }
    None
}

fn gram_power(g: &Matrix, mut v: Vec<f64>, collapse: f64) -> Option<Vec<f64>> {
    for _ in 0..POWER_MAX_ITER {
        let w = g.mul_vec(&v);
        let lambda = dot(&v, &w);
        if lambda <= collapse {
            return None;
        }
        let wn = norm(&w);
        let delta = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (a / wn - b).powi(2))
            .sum::<f64>()
            .sqrt();
        v = w.into_iter().map(|x| x / wn).collect();
        if delta <= POWER_VECTOR_TOL {
            break;
        }
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Basis;

    #[test]
    fn rescale_examples() {
        assert_eq!(rescale(&[3.0, 4.0], 0.0), vec![3.0, 4.0]);
        assert_eq!(rescale(&[3.0, 4.0], 1.0), vec![15.0, 20.0]);
        assert_eq!(rescale(&[0.6, 0.8], 7.0), vec![0.6, 0.8]);
        assert_eq!(rescale(&[0.0, 0.0], 3.0), vec![0.0, 0.0]);
    }

    #[test]
    fn single_nonzero_column() {
        let a = Matrix::from_rows(&[[0.0, 0.6, 0.0], [0.0, 0.8, 0.0]]).unwrap();
        let b = irr(&a, &IrrConfig::fixed(2.0, 1)).unwrap();
        let v = b.basis.matrix().column(0);
        assert!((v[0] - 0.6).abs() < 1e-14 && (v[1] - 0.8).abs() < 1e-14);
        assert!(b.residual_ratios[1] < 1e-30);
        // A second step has nothing left to explain.
        let b2 = irr(&a, &IrrConfig::fixed(2.0, 2)).unwrap();
        assert_eq!(b2.ell(), 1);
        assert!(b2.exhausted);
    }

    #[test]
    fn ratios_start_at_one_for_unit_columns() {
        let a = Matrix::identity(4);
        let b = irr(&a, &IrrConfig::fixed(1.0, 2)).unwrap();
        assert_eq!(b.residual_ratios.len(), 3);
        assert!((b.residual_ratios[0] - 1.0).abs() < 1e-15);
        assert!((b.residual_ratios[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn auto_scale_trivia() {
        // Orthonormal columns: f = 1/n.
        let q = auto_scale(Matrix::identity(4), 3.5, 0.0);
        assert!((q - 0.875).abs() < 1e-15);
        // Identical unit columns: f = 1.
        let same = Matrix::from_rows(&[[1.0, 1.0, 1.0], [0.0, 0.0, 0.0]]).unwrap();
        assert!((auto_scale(&same, 3.5, 0.0) - 3.5).abs() < 1e-15);
        assert_eq!(auto_scale(&same, 1.0, -5.0), 0.0);
    }

    #[test]
    fn config_validation() {
        assert!(IrrConfig::fixed(-1.0, 2).validate().is_err());
        assert!(IrrConfig::fixed(1.0, 0).validate().is_err());
        assert!(IrrConfig::auto(EllMode::ResidualRatio(1.5)).validate().is_err());
        let mut c = IrrConfig::fixed(1.0, 1);
        c.alpha = f64::NAN;
        assert!(c.validate().is_err());
    }

    #[test]
    fn residual_ratio_edges() {
        let a = Matrix::identity(3);
        assert_eq!(dimensionality_by_residual_ratio(&a, 0.0, 1.5).unwrap(), 1);
        let rank1 = Matrix::from_rows(&[[1.0, 1.0], [0.0, 0.0]]).unwrap();
        assert_eq!(dimensionality_by_residual_ratio(&rank1, 2.0, 0.01).unwrap(), 1);
        // Capped at the rank even for a tiny threshold.
        assert_eq!(dimensionality_by_residual_ratio(&a, 0.0, 1e-30).unwrap(), 3);
    }

    #[test]
    fn lsi_of_orthonormal_columns_keeps_them() {
        let a = Matrix::identity(3);
        let b = lsi(&a, 3).unwrap();
        let p = represent(&a, &b).unwrap();
        assert!(p.sub(&a).unwrap().frobenius_norm() < 1e-14);
        assert!(lsi(&a, 4).is_err());
        assert!(lsi(&a, 0).is_err());
    }

    #[test]
    fn sign_rule() {
        let mut v = vec![0.1, -0.9, 0.2];
        canonical_sign(&mut v);
        assert_eq!(v, vec![-0.1, 0.9, -0.2]);
        let e = Basis::axes(2, &[1]).unwrap();
        assert_eq!(e.matrix().column(0), vec![0.0, 1.0]);
    }
}
