//! Dense real matrix kernels.

mod basis;
pub mod io;
mod matrix;
mod svd;

pub use basis::{canonical_angles, orthonormality_error, project, Basis, CanonicalAngles, ORTHONORMAL_TOL};
pub use matrix::{dot, norm, Matrix};
pub use svd::{
    frobenius_norm, spectral_norm, svd, symmetric_eigen, symmetric_spectral_norm, truncate_svd,
    SvdResult, RANK_TOLERANCE,
};
