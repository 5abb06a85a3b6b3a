//! The deviation matrix `E(X) = S − P_X(A)ᵀ P_X(A)` and an approximate
//! search for the subspace of `range(A)` minimizing its spectral norm.
//!
//! The search works in the coordinates of `A`'s left singular vectors:
//! with `A = U Σ Vᵀ` and `Y = Σ Vᵀ`, a subspace `X = span(U W)` for
//! orthonormal `W` gives `P_X(A)ᵀ P_X(A) = Yᵀ W Wᵀ Y`.

use crate::corpus::SimilarityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{project, svd, symmetric_spectral_norm, Basis, Matrix};

/// Upper limit on enumerated singular-vector subsets.
pub const MAX_SUBSETS: usize = 5_000_000;

const INITIAL_STEP: f64 = 0.2;
const MIN_STEP: f64 = 1e-5;
const SWEEP_IMPROVEMENT: f64 = 1e-8;
const MAX_SWEEPS: usize = 2_000;
/// A larger subspace must beat a smaller one by more than this.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimumSubspaceResult {
    pub basis: Basis,
    /// `|E(X)|₂` at the returned subspace; an upper bound on the optimum
    /// unless `is_exact`.
    pub eps_opt: f64,
    /// Set only for analytically constructed optima.
    pub is_exact: bool,
    pub h: usize,
}

pub fn deviation_matrix(s: &SimilarityMatrix, a: &Matrix, basis: &Basis) -> Result<Matrix> {
    if s.n() != a.cols() {
        return Err(Error::dims(
            format!("{} documents", a.cols()),
            format!("{}x{} similarity matrix", s.n(), s.n()),
        ));
    }
    let p = project(basis, a)?;
    s.matrix().sub(&p.gram())
}

/// `|S − P_X(A)ᵀ P_X(A)|₂`.
pub fn deviation_error(s: &SimilarityMatrix, a: impl AsRef<Matrix>, basis: &Basis) -> Result<f64> {
    symmetric_spectral_norm(&deviation_matrix(s, a.as_ref(), basis)?)
}

struct Search<'a> {
    s: &'a Matrix,
    /// r×n coordinates of the documents in the left singular basis.
    y: Matrix,
}

impl Search<'_> {
    /// Error for the subspace whose coordinate rows (`W ᵀ Y`) are `z`.
    fn error(&self, z: &[Vec<f64>]) -> f64 {
        let n = self.s.rows();
        let mut e = self.s.clone();
        for row in z {
            for i in 0..n {
                if row[i] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    e[(i, j)] -= row[i] * row[j];
                }
            }
        }
        symmetric_spectral_norm(&e).expect("deviation matrix is symmetric")
    }

    fn coords(&self, w: &[Vec<f64>]) -> Vec<Vec<f64>> {
        w.iter().map(|wi| self.y.tr_mul_vec(wi)).collect()
    }

    /// Best subset of exactly `h` coordinate axes (lexicographically first
    /// on ties).
    fn best_subset(&self, h: usize) -> (Vec<usize>, f64) {
        let r = self.y.rows();
        let rows: Vec<Vec<f64>> = (0..r).map(|i| self.y.row(i).to_vec()).collect();
        let mut idx: Vec<usize> = (0..h).collect();
        let mut best = (idx.clone(), f64::INFINITY);
        loop {
            let z: Vec<Vec<f64>> = idx.iter().map(|&i| rows[i].clone()).collect();
            let e = self.error(&z);
            if e < best.1 {
                best = (idx.clone(), e);
            }
            // next combination
            let mut pos = h;
            while pos > 0 && idx[pos - 1] == r - h + pos - 1 {
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
            idx[pos - 1] += 1;
            for q in pos..h {
                idx[q] = idx[q - 1] + 1;
            }
        }
        best
    }

    /// Givens sweeps rotating each basis vector toward each complement
    /// vector; returns the refined `W` (as rows of length r) and its error.
    fn refine(&self, subset: &[usize], start_err: f64) -> (Vec<Vec<f64>>, f64) {
        let r = self.y.rows();
        let unit = |i: usize| {
            let mut e = vec![0.0; r];
            e[i] = 1.0;
            e
        };
        let mut w: Vec<Vec<f64>> = subset.iter().map(|&i| unit(i)).collect();
        let mut wc: Vec<Vec<f64>> = (0..r).filter(|i| !subset.contains(i)).map(unit).collect();
        let mut err = start_err;
        if wc.is_empty() {
            return (w, err);
        }
        let mut z = self.coords(&w);
        let mut zc = self.coords(&wc);
        let mut step = INITIAL_STEP;
        for _ in 0..MAX_SWEEPS {
            let before = err;
            for i in 0..w.len() {
                for j in 0..wc.len() {
                    for angle in [step, -step] {
                        let (c, s) = (angle.cos(), angle.sin());
                        let zi: Vec<f64> = z[i].iter().zip(&zc[j]).map(|(a, b)| c * a + s * b).collect();
                        let mut trial = z.clone();
                        trial[i] = zi;
                        let e = self.error(&trial);
                        if e < err - 1e-15 {
                            err = e;
                            let wi: Vec<f64> = w[i].iter().zip(&wc[j]).map(|(a, b)| c * a + s * b).collect();
                            let wj: Vec<f64> = w[i].iter().zip(&wc[j]).map(|(a, b)| -s * a + c * b).collect();
                            let zj: Vec<f64> = z[i].iter().zip(&zc[j]).map(|(a, b)| -s * a + c * b).collect();
                            w[i] = wi;
                            wc[j] = wj;
                            z = trial;
                            zc[j] = zj;
                            break;
                        }
                    }
                }
            }
            if before - err < SWEEP_IMPROVEMENT {
                step /= 2.0;
                if step < MIN_STEP {
                    break;
                }
            }
        }
        (w, err)
    }
}

fn binomial_sum(r: usize, h_max: usize) -> usize {
    let mut total = 0usize;
    let mut c = 1usize;
    for h in 1..=h_max.min(r) {
        c = c.saturating_mul(r - h + 1) / h;
        total = total.saturating_add(c);
    }
    total
}

/// Approximate minimizer of `|E(X)|₂` over subspaces of `range(A)` with
/// dimension at most `h_max`.
///
/// For every `h`, all `h`-subsets of the left singular vectors are scored
/// and the best one is refined by Givens rotations against the rest of the
/// range. The overall winner is the smallest `h` not beaten by a larger one.
pub fn optimum_subspace(s: &SimilarityMatrix, a: impl AsRef<Matrix>, h_max: usize) -> Result<OptimumSubspaceResult> {
    let a = a.as_ref();
    if s.n() != a.cols() {
        return Err(Error::dims(format!("{} documents", a.cols()), format!("{}", s.n())));
    }
    let dec = svd(a)?;
    let r = dec.rank();
    if h_max == 0 || h_max > r {
        return Err(Error::Parameter(format!("h_max {h_max} outside 1..={r}")));
    }
    if binomial_sum(r, h_max) > MAX_SUBSETS {
        return Err(Error::Parameter(format!(
            "subset search over rank {r} up to size {h_max} exceeds {MAX_SUBSETS} candidates"
        )));
    }
    let mut y = dec.right_vectors.transpose();
    for i in 0..r {
        for j in 0..y.cols() {
            y[(i, j)] *= dec.singular_values[i];
        }
    }
    let search = Search { s: s.matrix(), y };

    let mut best: Option<(Vec<Vec<f64>>, f64)> = None;
    for h in 1..=h_max {
        let (subset, e0) = search.best_subset(h);
        let (w, e) = search.refine(&subset, e0);
        if best.as_ref().map_or(true, |(_, be)| e < be - TIE_TOL) {
            best = Some((w, e));
        }
    }
    let (w, _) = best.expect("h_max >= 1");
    let h = w.len();
    let mut b = Matrix::zeros(a.rows(), h);
    for (k, wk) in w.iter().enumerate() {
        let col = dec.left_vectors.mul_vec(wk);
        b.set_column(k, &col);
    }
    let basis = orthonormalize(b)?;
    let eps_opt = deviation_error(s, a, &basis)?;
    Ok(OptimumSubspaceResult {
        basis,
        eps_opt,
        is_exact: false,
        h,
    })
}

/// Modified Gram-Schmidt, to clean rounding drift from accumulated rotations.
pub(crate) fn orthonormalize(mut b: Matrix) -> Result<Basis> {
    let (m, h) = b.shape();
    for j in 0..h {
        let mut v = b.column(j);
        for k in 0..j {
            let prev = b.column(k);
            let c = crate::linalg::dot(&prev, &v);
            v.iter_mut().zip(&prev).for_each(|(x, p)| *x -= c * p);
        }
        let n = crate::linalg::norm(&v);
        if n == 0.0 {
            return Err(Error::InvalidBasis("linearly dependent columns".into()));
        }
        v.iter_mut().for_each(|x| *x /= n);
        debug_assert_eq!(v.len(), m);
        b.set_column(j, &v);
    }
    Basis::new(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{similarity_matrix, TopicModel};

    #[test]
    fn exact_gram_matches_full_range() {
        // S = AᵀA exactly: the full range gives zero deviation.
        let a = Matrix::from_rows(&[[1.0, 0.0, 0.6], [0.0, 1.0, 0.8]]).unwrap();
        let g = a.gram();
        let tm_like = SimilarityMatrix::new(g).unwrap();
        let out = optimum_subspace(&tm_like, &a, 2).unwrap();
        assert!(out.eps_opt < 1e-12);
        assert_eq!(out.h, 2);
    }

    #[test]
    fn zero_dimensional_projection_gives_norm_of_s() {
        let tm = TopicModel::single_topic(&[2, 1]).unwrap();
        let s = similarity_matrix(&tm);
        let a = Matrix::identity(3);
        let e = deviation_error(&s, &a, &Basis::empty(3)).unwrap();
        assert!((e - 2.0).abs() < 1e-12);
    }

    #[test]
    fn combination_count() {
        assert_eq!(binomial_sum(5, 2), 15);
        assert_eq!(binomial_sum(12, 5), 1585);
    }
}
