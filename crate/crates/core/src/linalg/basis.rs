use std::f64::consts::FRAC_PI_2;

use super::matrix::Matrix;
use super::svd::svd;
use crate::error::{Error, Result};

/// Orthonormality tolerance on `BᵀB − I` (max-abs entry).
pub const ORTHONORMAL_TOL: f64 = 1e-8;

/// Cosines at or below this are treated as exactly orthogonal.
const ORTHOGONAL_COS: f64 = 1e-14;

/// An m×ℓ matrix with orthonormal columns spanning a subspace of ℝᵐ.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis(Matrix);

impl Basis {
    /// Validates orthonormality of the columns.
    pub fn new(m: Matrix) -> Result<Self> {
        let err = orthonormality_error(&m);
        if err > ORTHONORMAL_TOL {
            return Err(Error::InvalidBasis(format!(
                "columns deviate from orthonormal by {err:.3e}"
            )));
        }
        Ok(Basis(m))
    }

    pub(crate) fn new_unchecked(m: Matrix) -> Self {
        debug_assert!(orthonormality_error(&m) <= ORTHONORMAL_TOL);
        Basis(m)
    }

    /// The zero-dimensional subspace of ℝᵐ.
    pub fn empty(ambient: usize) -> Self {
        Basis(Matrix::zeros(ambient, 0))
    }

    /// Coordinate axes `e_i` for the listed indices.
    pub fn axes(ambient: usize, idx: &[usize]) -> Result<Self> {
        let mut m = Matrix::zeros(ambient, idx.len());
        for (k, &i) in idx.iter().enumerate() {
            if i >= ambient {
                return Err(Error::Parameter(format!("axis {i} outside ℝ^{ambient}")));
            }
            m[(i, k)] = 1.0;
        }
        Basis::new(m)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    /// Number of basis vectors.
    pub fn dim(&self) -> usize {
        self.0.cols()
    }

    pub fn ambient(&self) -> usize {
        self.0.rows()
    }

    /// Basis made of the first `k` columns.
    pub fn prefix(&self, k: usize) -> Basis {
        let idx: Vec<usize> = (0..k.min(self.dim())).collect();
        Basis(self.0.select_columns(&idx))
    }

    /// The projector `BBᵀ`.
    pub fn projector(&self) -> Matrix {
        self.0
            .matmul(&self.0.transpose())
            .expect("basis times its transpose")
    }
}

/// Max-abs entry of `BᵀB − I`.
pub fn orthonormality_error(b: &Matrix) -> f64 {
    let g = b.gram();
    let mut worst: f64 = 0.0;
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

/// Orthogonal projection `BBᵀX` of every column of `x`.
pub fn project(basis: &Basis, x: &Matrix) -> Result<Matrix> {
    if basis.ambient() != x.rows() {
        return Err(Error::dims(
            format!("{} rows", basis.ambient()),
            format!("{} rows", x.rows()),
        ));
    }
    let coords = basis.0.tr_matmul(x)?;
    basis.0.matmul(&coords)
}

/// Principal angles between two subspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalAngles {
    /// Nonincreasing, each in `[0, π/2]`.
    pub angles: Vec<f64>,
    /// `tan` of the largest angle; `+∞` when that angle is `π/2`.
    pub tan_norm: f64,
}

impl CanonicalAngles {
    pub fn max_angle(&self) -> f64 {
        self.angles.first().copied().unwrap_or(0.0)
    }
}

/// Canonical angles between `span(b1)` and `span(b2)`.
///
/// Cosines come from the singular values of `B1ᵀB2` and sines from those of
/// the residual `(I − B1B1ᵀ)B2`; combining both keeps small angles accurate.
pub fn canonical_angles(b1: &Basis, b2: &Basis) -> Result<CanonicalAngles> {
    if b1.ambient() != b2.ambient() {
        return Err(Error::dims(
            format!("ambient dimension {}", b1.ambient()),
            format!("{}", b2.ambient()),
        ));
    }
    for b in [b1, b2] {
        let err = orthonormality_error(b.matrix());
        if err > ORTHONORMAL_TOL {
            return Err(Error::InvalidBasis(format!(
                "columns deviate from orthonormal by {err:.3e}"
            )));
        }
    }
    // Angles are measured from the lower-dimensional subspace.
    let (big, small) = if b1.dim() >= b2.dim() { (b1, b2) } else { (b2, b1) };
    let p = small.dim();
    if p == 0 {
        return Ok(CanonicalAngles {
            angles: Vec::new(),
            tan_norm: 0.0,
        });
    }
    let cross = big.matrix().tr_matmul(small.matrix())?;
    let cosines = padded_singular_values(&cross, p);
    let resid = small.matrix().sub(&project(big, small.matrix())?)?;
    let mut sines = padded_singular_values(&resid, p);
    sines.reverse();

    let mut angles: Vec<f64> = cosines
        .iter()
        .zip(&sines)
        .map(|(&c, &s)| {
            let c = c.clamp(0.0, 1.0);
            if c <= ORTHOGONAL_COS {
                FRAC_PI_2
            } else {
                s.clamp(0.0, 1.0).atan2(c).clamp(0.0, FRAC_PI_2)
            }
        })
        .collect();
    angles.sort_by(|a, b| b.total_cmp(a));

    let cos_min = cosines[p - 1].clamp(0.0, 1.0);
    let tan_norm = if cos_min <= ORTHOGONAL_COS {
        f64::INFINITY
    } else {
        sines[p - 1].clamp(0.0, 1.0) / cos_min
    };
    Ok(CanonicalAngles { angles, tan_norm })
}

fn padded_singular_values(m: &Matrix, len: usize) -> Vec<f64> {
    if m.is_empty() || m.max_abs() == 0.0 {
        return vec![0.0; len];
    }
    let s = svd(m).expect("finite nonempty matrix");
    s.padded_values(len)
}
