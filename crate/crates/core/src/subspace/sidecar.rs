//! A basis on disk: the matrix in `SSM1` binary plus a JSON sidecar.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Method, SubspaceBasis};
use crate::error::Result;
use crate::linalg::{io, Basis};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisSidecar {
    pub method: Method,
    pub q: Option<f64>,
    pub ell: usize,
    pub residual_ratios: Vec<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

fn sidecar_path(matrix_path: &Path) -> PathBuf {
    matrix_path.with_extension("json")
}

/// Writes `path` (binary matrix) and `path` with a `.json` extension.
pub fn save_basis(b: &SubspaceBasis, auto: Option<(f64, f64)>, path: &Path) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    io::write_binary(b.basis.matrix(), file)?;
    let meta = BasisSidecar {
        method: b.method,
        q: b.q,
        ell: b.ell(),
        residual_ratios: b.residual_ratios.clone(),
        alpha: auto.map(|a| a.0),
        beta: auto.map(|a| a.1),
    };
    std::fs::write(sidecar_path(path), serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

pub fn load_basis(path: &Path) -> Result<(SubspaceBasis, BasisSidecar)> {
    let m = io::read_binary(std::io::BufReader::new(std::fs::File::open(path)?))?;
    let meta: BasisSidecar = serde_json::from_str(&std::fs::read_to_string(sidecar_path(path))?)?;
    let b = SubspaceBasis {
        basis: Basis::new(m)?,
        method: meta.method,
        q: meta.q,
        residual_ratios: meta.residual_ratios.clone(),
        exhausted: false,
    };
    Ok((b, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::subspace::{irr, IrrConfig};

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("basis.ssm");
        let a = Matrix::identity(3);
        let b = irr(&a, &IrrConfig::fixed(2.0, 2)).unwrap();
        save_basis(&b, Some((3.5, 0.0)), &path).unwrap();
        let (back, meta) = load_basis(&path).unwrap();
        assert_eq!(back.basis, b.basis);
        assert_eq!(meta.ell, 2);
        assert_eq!(meta.q, Some(2.0));
        assert_eq!(meta.alpha, Some(3.5));
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("basis.json")).unwrap()).unwrap();
        assert_eq!(json["method"], "irr");
    }
}
