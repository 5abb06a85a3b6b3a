use serde::{Deserialize, Serialize};

use crate::corpus::TopicModel;
use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicStats {
    /// Topic dominances `Δ_t = sqrt(Σ_d ρ(t,d)²)`, nonincreasing.
    pub dominances: Vec<f64>,
    /// Topic mingling `μ`: Frobenius norm of the off-diagonal part of `ρρᵀ`.
    pub mingling: f64,
    /// `Δ_max / Δ_min` (infinite if some topic has no relevant document).
    pub nonuniformity_true: f64,
    /// `Σ_t Δ_t⁴ / n²`.
    pub f_estimate: f64,
}

impl TopicStats {
    pub fn dominance(&self, i: usize) -> f64 {
        self.dominances.get(i).copied().unwrap_or(0.0)
    }
}

pub fn topic_stats(tm: &TopicModel) -> TopicStats {
    let s_prime = topic_gram(tm);
    let k = tm.n_topics();
    let mut dominances: Vec<f64> = (0..k).map(|t| s_prime[(t, t)].max(0.0).sqrt()).collect();
    dominances.sort_by(|a, b| b.total_cmp(a));
    let mut off = 0.0;
    for t in 0..k {
        for u in 0..k {
            if t != u {
                off += s_prime[(t, u)].powi(2);
            }
        }
    }
    let n = tm.n_docs() as f64;
    let max = dominances.first().copied().unwrap_or(0.0);
    let min = dominances.last().copied().unwrap_or(0.0);
    TopicStats {
        nonuniformity_true: if min > 0.0 { max / min } else { f64::INFINITY },
        f_estimate: dominances.iter().map(|d| d.powi(4)).sum::<f64>() / (n * n),
        dominances,
        mingling: off.sqrt(),
    }
}

/// `ρρᵀ`: topic-by-topic co-relevance summed over documents.
fn topic_gram(tm: &TopicModel) -> Matrix {
    tm.relevance().transpose().gram()
}

/// `S′[t1, t2] = Σ_d ρ(t1,d) ρ(t2,d)`, zero-padded to n×n. It shares its
/// singular values with `S = ρᵀρ`.
pub fn s_prime_matrix(tm: &TopicModel) -> Matrix {
    let n = tm.n_docs();
    let g = topic_gram(tm);
    let k = g.rows();
    let mut out = Matrix::zeros(n.max(k), n.max(k));
    for i in 0..k {
        for j in 0..k {
            out[(i, j)] = g[(i, j)];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{default_doc_ids, default_topic_ids};

    #[test]
    fn single_topic_46_4() {
        let tm = TopicModel::single_topic(&[46, 4]).unwrap();
        let s = topic_stats(&tm);
        assert!((s.dominances[0] - 46f64.sqrt()).abs() < 1e-14);
        assert!((s.dominances[1] - 2.0).abs() < 1e-14);
        assert_eq!(s.mingling, 0.0);
        assert!((s.nonuniformity_true - (46f64 / 4.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn uniform_ratio_is_one() {
        let s = topic_stats(&TopicModel::single_topic(&[25, 25]).unwrap());
        assert_eq!(s.nonuniformity_true, 1.0);
        assert!((s.f_estimate - 0.5).abs() < 1e-15);
    }

    #[test]
    fn two_half_half_docs() {
        let h = 0.5f64.sqrt();
        let rel = Matrix::from_rows(&[[h, h], [h, h]]).unwrap();
        let tm = TopicModel::new(rel, default_topic_ids(2), default_doc_ids(2)).unwrap();
        let s = topic_stats(&tm);
        assert!((s.dominances[0] - 1.0).abs() < 1e-15 && (s.dominances[1] - 1.0).abs() < 1e-15);
        assert!((s.mingling - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn s_prime_single_topic_is_diagonal() {
        let tm = TopicModel::single_topic(&[3, 1]).unwrap();
        let sp = s_prime_matrix(&tm);
        assert_eq!(sp.shape(), (4, 4));
        assert_eq!(sp[(0, 0)], 3.0);
        assert_eq!(sp[(1, 1)], 1.0);
        assert_eq!(sp.max_abs(), 3.0);
        assert_eq!(sp[(0, 1)], 0.0);
    }
}
