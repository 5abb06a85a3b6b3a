//! Singular value decomposition by one-sided Jacobi rotations, plus the
//! norm and eigenvalue kernels built around it.

use super::matrix::{dot, norm, Matrix};
use super::Basis;
use crate::error::{Error, Result};

/// Singular values below this fraction of the largest are treated as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

const MAX_SWEEPS: usize = 80;
const POWER_MAX_ITER: usize = 10_000;

/// Thin SVD `Z = U Σ Vᵀ` restricted to the numerical rank `h`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// r×h, orthonormal columns.
    pub left_vectors: Matrix,
    /// Nonincreasing, strictly positive, length h.
    pub singular_values: Vec<f64>,
    /// s×h, orthonormal columns.
    pub right_vectors: Matrix,
}

impl SvdResult {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    /// i-th singular value (0-based) with the zero-padded convention.
    pub fn sigma(&self, i: usize) -> f64 {
        self.singular_values.get(i).copied().unwrap_or(0.0)
    }

    /// First `len` singular values, zero-padded.
    pub fn padded_values(&self, len: usize) -> Vec<f64> {
        (0..len).map(|i| self.sigma(i)).collect()
    }

    pub fn reconstruct(&self) -> Matrix {
        let mut us = self.left_vectors.clone();
        for i in 0..us.rows() {
            for (j, s) in self.singular_values.iter().enumerate() {
                us[(i, j)] *= s;
            }
        }
        us.matmul(&self.right_vectors.transpose())
            .expect("svd factors have matching shapes")
    }
}

/// Thin SVD of `z`.
///
/// Columns are orthogonalized pairwise on the Gram side; wide inputs are
/// transposed first so the rotated dimension is always the smaller one.
pub fn svd(z: &Matrix) -> Result<SvdResult> {
    if z.is_empty() {
        return Err(Error::InvalidInput("svd of an empty matrix".into()));
    }
    if z.rows() < z.cols() {
        let t = svd_tall(&z.transpose());
        return Ok(SvdResult {
            left_vectors: t.right_vectors,
            singular_values: t.singular_values,
            right_vectors: t.left_vectors,
        });
    }
    Ok(svd_tall(z))
}

fn svd_tall(z: &Matrix) -> SvdResult {
    let (r, s) = z.shape();
    let mut cols = z.columns();
    let mut v: Vec<Vec<f64>> = (0..s)
        .map(|j| {
            let mut e = vec![0.0; s];
            e[j] = 1.0;
            e
        })
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..s {
            for q in (p + 1)..s {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = c * t;
                rotate(&mut cols, p, q, c, sn);
                rotate(&mut v, p, q, c, sn);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));
    let top = norms[order[0]];
    let keep: Vec<usize> = order
        .into_iter()
        .filter(|&j| norms[j] > 0.0 && norms[j] > RANK_TOLERANCE * top)
        .collect();

    let h = keep.len();
    let mut u = Matrix::zeros(r, h);
    let mut vm = Matrix::zeros(s, h);
    let mut sigma = Vec::with_capacity(h);
    for (k, &j) in keep.iter().enumerate() {
        let sj = norms[j];
        sigma.push(sj);
        for i in 0..r {
            u[(i, k)] = cols[j][i] / sj;
        }
        for i in 0..s {
            vm[(i, k)] = v[j][i];
        }
    }
    SvdResult {
        left_vectors: u,
        singular_values: sigma,
        right_vectors: vm,
    }
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    let (a, b) = (&mut lo[p], &mut hi[0]);
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

/// The first `ell` left singular vectors as an orthonormal basis.
pub fn truncate_svd(s: &SvdResult, ell: usize) -> Result<Basis> {
    if ell == 0 || ell > s.rank() {
        return Err(Error::Parameter(format!(
            "truncation rank {ell} outside 1..={}",
            s.rank()
        )));
    }
    let idx: Vec<usize> = (0..ell).collect();
    Ok(Basis::new_unchecked(s.left_vectors.select_columns(&idx)))
}

pub fn frobenius_norm(z: &Matrix) -> f64 {
    z.frobenius_norm()
}

/// Largest singular value by power iteration on `ZᵀZ`.
///
/// Starts from the normalized all-ones vector. When the iterate collapses
/// (the start vector lies in the null space of `ZᵀZ`), restarts from the
/// coordinate vectors in order.
pub fn spectral_norm(z: &Matrix) -> f64 {
    let n = z.cols();
    if z.is_empty() {
        return 0.0;
    }
    let fro2 = z.as_slice().iter().map(|v| v * v).sum::<f64>();
    if fro2 == 0.0 {
        return 0.0;
    }
    let collapse = 1e-28 * fro2;

    let starts = std::iter::once(vec![1.0 / (n as f64).sqrt(); n]).chain((0..n).map(|j| {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        e
    }));
    for start in starts {
        if let Some(sigma) = power_from(z, start, collapse) {
            return sigma;
        }
    }
    0.0
}

fn power_from(z: &Matrix, mut v: Vec<f64>, collapse: f64) -> Option<f64> {
    let mut prev = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let zv = z.mul_vec(&v);
        let lambda = dot(&zv, &zv);
        if lambda <= collapse {
            return None;
        }
        let w = z.tr_mul_vec(&zv);
        let wn = norm(&w);
        if wn == 0.0 {
            return None;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / wn;
        }
        if (lambda - prev).abs() <= 1e-15 * lambda {
            prev = lambda;
            break;
        }
        prev = lambda;
    }
    // One more Rayleigh evaluation with the final normalized iterate.
    let zv = z.mul_vec(&v);
    Some(dot(&zv, &zv).max(prev).sqrt())
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in nonincreasing order and the matching orthonormal
/// eigenvectors as columns.
pub fn symmetric_eigen(a: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::dims("square matrix", format!("{}x{}", n, a.cols())));
    }
    let scale = a.max_abs();
    if a.asymmetry() > 1e-9 * scale.max(1.0) {
        return Err(Error::InvalidInput("matrix is not symmetric".into()));
    }
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        if off <= (f64::EPSILON * scale).powi(2) * 1e-2 || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| m[(b, b)].total_cmp(&m[(a, a)]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    Ok((values, v.select_columns(&order)))
}

/// Spectral norm of a symmetric matrix: the largest eigenvalue magnitude.
pub fn symmetric_spectral_norm(a: &Matrix) -> Result<f64> {
    if a.is_empty() {
        return Ok(0.0);
    }
    let (values, _) = symmetric_eigen(a)?;
    Ok(values.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_with_zero() {
        let z = Matrix::from_diag(&[3.0, 0.0, 2.0]);
        let s = svd(&z).unwrap();
        assert_eq!(s.rank(), 2);
        assert!((s.singular_values[0] - 3.0).abs() < 1e-15);
        assert!((s.singular_values[1] - 2.0).abs() < 1e-15);
        assert!((s.left_vectors[(0, 0)].abs() - 1.0).abs() < 1e-15);
        assert!((s.left_vectors[(2, 1)].abs() - 1.0).abs() < 1e-15);
        assert_eq!(s.sigma(2), 0.0);
    }

    #[test]
    fn orthonormal_columns_have_unit_values() {
        let c = (0.3f64).cos();
        let sn = (0.3f64).sin();
        let z = Matrix::from_rows(&[[c, -sn], [sn, c], [0.0, 0.0]]).unwrap();
        let s = svd(&z).unwrap();
        for v in &s.singular_values {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn wide_matrix_swaps_factors() {
        let z = Matrix::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]).unwrap();
        let s = svd(&z).unwrap();
        assert_eq!(s.left_vectors.shape(), (2, 2));
        assert_eq!(s.right_vectors.shape(), (3, 2));
        assert!(s.reconstruct().sub(&z).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn rejects_empty() {
        assert!(svd(&Matrix::zeros(0, 3)).is_err());
    }

    #[test]
    fn truncation_range() {
        let s = svd(&Matrix::from_diag(&[3.0, 2.0, 1.0])).unwrap();
        assert!(truncate_svd(&s, 0).is_err());
        assert!(truncate_svd(&s, 4).is_err());
        let b = truncate_svd(&s, 2).unwrap();
        assert_eq!(b.dim(), 2);
        // span of the first two axes
        let m = b.matrix();
        assert!(m[(2, 0)].abs() < 1e-15 && m[(2, 1)].abs() < 1e-15);
    }

    #[test]
    fn spectral_norm_trivia() {
        assert_eq!(spectral_norm(&Matrix::zeros(3, 2)), 0.0);
        assert!((spectral_norm(&Matrix::from_diag(&[5.0, 1.0])) - 5.0).abs() < 1e-12);
        // all-ones start lies in the null space here
        let z = Matrix::from_rows(&[[1.0, -1.0], [1.0, -1.0]]).unwrap();
        assert!((spectral_norm(&z) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn frobenius_trivia() {
        assert!((frobenius_norm(&Matrix::identity(3)) - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(frobenius_norm(&Matrix::zeros(2, 2)), 0.0);
        let z = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert!((frobenius_norm(&z) - 30f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn symmetric_eigen_small() {
        let a = Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let (vals, vecs) = symmetric_eigen(&a).unwrap();
        assert!((vals[0] - 3.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        let av = a.matmul(&vecs).unwrap();
        for j in 0..2 {
            for i in 0..2 {
                assert!((av[(i, j)] - vals[j] * vecs[(i, j)]).abs() < 1e-14);
            }
        }
        let b = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!((symmetric_spectral_norm(&b).unwrap() - 1.0).abs() < 1e-15);
        assert!(symmetric_eigen(&Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap()).is_err());
    }
}
