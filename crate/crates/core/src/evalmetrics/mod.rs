//! Representation quality: kappa average precision over ranked document
//! pairs, and floor/ceiling clustering scores.

mod clustering;
mod ranking;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use clustering::{cluster, ClusteringAlgorithm};
pub use ranking::{
    chance, column_cosines, cosine, kappa_average_precision, pairwise_average_precision, rank_pairs,
    RankedPair, RankedPairs,
};

use crate::corpus::TopicModel;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Cluster × topic document counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<usize>>,
}

impl ContingencyTable {
    pub fn new(counts: Vec<Vec<usize>>) -> Result<Self> {
        let width = counts.first().map_or(0, Vec::len);
        if counts.iter().any(|r| r.len() != width) {
            return Err(Error::InvalidInput("ragged contingency table".into()));
        }
        Ok(Self { counts })
    }

    pub fn from_assignments(clusters: &[usize], topics: &[usize], n_clusters: usize, n_topics: usize) -> Result<Self> {
        if clusters.len() != topics.len() {
            return Err(Error::dims(
                format!("{} topic labels", clusters.len()),
                format!("{}", topics.len()),
            ));
        }
        let mut counts = vec![vec![0; n_topics]; n_clusters];
        for (&c, &t) in clusters.iter().zip(topics) {
            if c >= n_clusters || t >= n_topics {
                return Err(Error::InvalidInput(format!("label ({c}, {t}) out of range")));
            }
            counts[c][t] += 1;
        }
        Ok(Self { counts })
    }

    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    /// True when `counts[i][j]` strictly exceeds every other entry of its
    /// row and of its column.
    pub fn is_unique_max(&self, i: usize, j: usize) -> bool {
        let v = self.counts[i][j];
        let row_ok = self.counts[i]
            .iter()
            .enumerate()
            .all(|(jj, &x)| jj == j || x < v);
        let col_ok = self
            .counts
            .iter()
            .enumerate()
            .all(|(ii, r)| ii == i || r[j] < v);
        row_ok && col_ok
    }
}

/// Sum of the cells that are the unique maximum of both their row and
/// column, over the total count.
pub fn contingency_score(table: &ContingencyTable) -> f64 {
    let n = table.total();
    if n == 0 {
        return 0.0;
    }
    let mut kept = 0;
    for (i, row) in table.counts.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v > 0 && table.is_unique_max(i, j) {
                kept += v;
            }
        }
    }
    kept as f64 / n as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringOutcome {
    pub scores: BTreeMap<ClusteringAlgorithm, f64>,
    pub floor: f64,
    pub ceiling: f64,
}

/// Runs all six clustering algorithms with `k` clusters and scores each
/// against the true (single) topics.
pub fn floor_ceiling(rep: &Matrix, tm: &TopicModel, k: usize) -> Result<ClusteringOutcome> {
    let topics = tm.single_labels().ok_or_else(|| {
        Error::Precondition("clustering scores need single-topic documents".into())
    })?;
    if topics.len() != rep.cols() {
        return Err(Error::dims(
            format!("{} documents", rep.cols()),
            format!("{} in the topic model", topics.len()),
        ));
    }
    let scores: BTreeMap<ClusteringAlgorithm, f64> = ClusteringAlgorithm::ALL
        .par_iter()
        .map(|&alg| {
            let labels = cluster(rep, k, alg)?;
            let table = ContingencyTable::from_assignments(&labels, &topics, k, tm.n_topics())?;
            Ok((alg, contingency_score(&table)))
        })
        .collect::<Result<_>>()?;
    let floor = scores.values().copied().fold(f64::INFINITY, f64::min);
    let ceiling = scores.values().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(ClusteringOutcome { scores, floor, ceiling })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_table() -> ContingencyTable {
        ContingencyTable::new(vec![
            vec![5, 10, 20, 0],
            vec![5, 10, 5, 0],
            vec![0, 0, 0, 21],
            vec![15, 5, 0, 0],
            vec![0, 0, 0, 4],
        ])
        .unwrap()
    }

    #[test]
    fn sample_table_scores_56_percent() {
        let t = sample_table();
        assert_eq!(t.total(), 100);
        assert_eq!(contingency_score(&t), 0.56);
    }

    #[test]
    fn diagonal_is_perfect() {
        let t = ContingencyTable::new(vec![vec![3, 0], vec![0, 4]]).unwrap();
        assert_eq!(contingency_score(&t), 1.0);
    }

    #[test]
    fn column_tie_drops_cell() {
        // The 20 in column 2 is tied with another 20.
        let t = ContingencyTable::new(vec![vec![5, 10, 20], vec![5, 0, 20], vec![15, 1, 0]]).unwrap();
        assert!(!t.is_unique_max(0, 2));
        assert_eq!(contingency_score(&t), 15.0 / 76.0);
    }

    #[test]
    fn floor_ceiling_on_separable_data() {
        let tm = TopicModel::single_topic(&[3, 2]).unwrap();
        let rep = Matrix::from_rows(&[
            [1.0, 0.9, 0.8, 0.0, 0.0],
            [0.0, 0.1, 0.2, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0, 0.7],
        ])
        .unwrap();
        let out = floor_ceiling(&rep, &tm, 2).unwrap();
        assert_eq!(out.scores.len(), 6);
        assert_eq!((out.floor, out.ceiling), (1.0, 1.0));
    }

    #[test]
    fn identical_columns_bounded_by_largest_topic() {
        let tm = TopicModel::single_topic(&[4, 2]).unwrap();
        let rep = Matrix::from_rows(&[[1.0; 6]]).unwrap();
        let out = floor_ceiling(&rep, &tm, 2).unwrap();
        assert!(out.ceiling <= 4.0 / 6.0 + 1e-15);
    }

    #[test]
    fn multi_topic_rejected() {
        let h = 0.5f64.sqrt();
        let rel = Matrix::from_rows(&[[1.0, h], [0.0, h]]).unwrap();
        let tm = TopicModel::new(
            rel,
            crate::corpus::default_topic_ids(2),
            crate::corpus::default_doc_ids(2),
        )
        .unwrap();
        let r = floor_ceiling(&Matrix::identity(2), &tm, 2);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
