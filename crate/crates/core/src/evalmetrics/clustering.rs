//! Agglomerative (single, complete, group-average link) and spherical
//! k-means clustering on cosine distance.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ranking::column_cosines;
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

const KMEANS_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusteringAlgorithm {
    SingleLink,
    CompleteLink,
    GroupAverage,
    KMeansSingleLink,
    KMeansCompleteLink,
    KMeansGroupAverage,
}

impl ClusteringAlgorithm {
    pub const ALL: [ClusteringAlgorithm; 6] = [
        ClusteringAlgorithm::SingleLink,
        ClusteringAlgorithm::CompleteLink,
        ClusteringAlgorithm::GroupAverage,
        ClusteringAlgorithm::KMeansSingleLink,
        ClusteringAlgorithm::KMeansCompleteLink,
        ClusteringAlgorithm::KMeansGroupAverage,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClusteringAlgorithm::SingleLink => "single_link",
            ClusteringAlgorithm::CompleteLink => "complete_link",
            ClusteringAlgorithm::GroupAverage => "group_average",
            ClusteringAlgorithm::KMeansSingleLink => "kmeans_single_link",
            ClusteringAlgorithm::KMeansCompleteLink => "kmeans_complete_link",
            ClusteringAlgorithm::KMeansGroupAverage => "kmeans_group_average",
        }
    }

    fn linkage(self) -> Linkage {
        match self {
            ClusteringAlgorithm::SingleLink | ClusteringAlgorithm::KMeansSingleLink => Linkage::Single,
            ClusteringAlgorithm::CompleteLink | ClusteringAlgorithm::KMeansCompleteLink => Linkage::Complete,
            ClusteringAlgorithm::GroupAverage | ClusteringAlgorithm::KMeansGroupAverage => Linkage::Average,
        }
    }

    fn refines(self) -> bool {
        matches!(
            self,
            ClusteringAlgorithm::KMeansSingleLink
                | ClusteringAlgorithm::KMeansCompleteLink
                | ClusteringAlgorithm::KMeansGroupAverage
        )
    }
}

impl fmt::Display for ClusteringAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClusteringAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown clustering algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, Copy)]
enum Linkage {
    Single,
    Complete,
    Average,
}

/// Assigns each column of `rep` to one of `k` clusters, labelled `0..k` in
/// order of each cluster's first member.
pub fn cluster(rep: &Matrix, k: usize, algorithm: ClusteringAlgorithm) -> Result<Vec<usize>> {
    let n = rep.cols();
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("cluster count {k} outside 1..={n}")));
    }
    let cos = column_cosines(rep);
    let mut labels = agglomerate(&cos, k, algorithm.linkage());
    if algorithm.refines() {
        labels = spherical_kmeans(rep, labels, k);
    }
    Ok(relabel(&labels))
}

/// Cuts the dendrogram at `k` clusters. The closest pair merges first; on
/// equal distance the pair with the smallest cluster indices wins.
fn agglomerate(cos: &Matrix, k: usize, linkage: Linkage) -> Vec<usize> {
    let n = cos.rows();
    let mut dist = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            dist[(i, j)] = 1.0 - cos[(i, j)];
        }
    }
    let mut size = vec![1usize; n];
    let mut active: Vec<bool> = vec![true; n];
    let mut label: Vec<usize> = (0..n).collect();
    let mut remaining = n;

    while remaining > k {
        let mut best: Option<(usize, usize, f64)> = None;
        for a in (0..n).filter(|&a| active[a]) {
            for b in ((a + 1)..n).filter(|&b| active[b]) {
                let d = dist[(a, b)];
                if best.map_or(true, |(_, _, bd)| d < bd) {
                    best = Some((a, b, d));
                }
            }
        }
        let (a, b, _) = best.expect("more than k active clusters");
        for c in (0..n).filter(|&c| active[c] && c != a && c != b) {
            let (da, db) = (dist[(a, c)], dist[(b, c)]);
            let merged = match linkage {
                Linkage::Single => da.min(db),
                Linkage::Complete => da.max(db),
                Linkage::Average => {
                    (size[a] as f64 * da + size[b] as f64 * db) / (size[a] + size[b]) as f64
                }
            };
            dist[(a, c)] = merged;
            dist[(c, a)] = merged;
        }
        size[a] += size[b];
        active[b] = false;
        for l in label.iter_mut() {
            if *l == b {
                *l = a;
            }
        }
        remaining -= 1;
    }
    label
}

fn relabel(labels: &[usize]) -> Vec<usize> {
    let mut map: Vec<(usize, usize)> = Vec::new();
    labels
        .iter()
        .map(|&l| match map.iter().find(|(from, _)| *from == l) {
            Some(&(_, to)) => to,
            None => {
                let to = map.len();
                map.push((l, to));
                to
            }
        })
        .collect()
}

fn unit_columns(rep: &Matrix) -> Vec<Option<Vec<f64>>> {
    rep.columns()
        .into_iter()
        .map(|c| {
            let n = dot(&c, &c).sqrt();
            (n > 0.0).then(|| c.into_iter().map(|v| v / n).collect())
        })
        .collect()
}

fn centroids(points: &[Option<Vec<f64>>], labels: &[usize], k: usize, dim: usize) -> Vec<Vec<f64>> {
    let mut sums = vec![vec![0.0; dim]; k];
    for (p, &l) in points.iter().zip(labels) {
        if let Some(p) = p {
            sums[l].iter_mut().zip(p).for_each(|(s, v)| *s += v);
        }
    }
    for s in &mut sums {
        let n = dot(s, s).sqrt();
        if n > 0.0 {
            s.iter_mut().for_each(|v| *v /= n);
        }
    }
    sums
}

/// Lloyd iterations on the unit sphere starting from `labels`' centroids.
fn spherical_kmeans(rep: &Matrix, initial: Vec<usize>, k: usize) -> Vec<usize> {
    let dim = rep.rows();
    let points = unit_columns(rep);
    let mut labels = relabel(&initial);
    let mut cents = centroids(&points, &labels, k, dim);

    for _ in 0..KMEANS_MAX_ITER {
        let mut next = labels.clone();
        for (i, p) in points.iter().enumerate() {
            let Some(p) = p else { continue };
            let mut best = (labels[i], dot(p, &cents[labels[i]]));
            for (c, cent) in cents.iter().enumerate() {
                let s = dot(p, cent);
                if s > best.1 || (s == best.1 && c < best.0) {
                    best = (c, s);
                }
            }
            next[i] = best.0;
        }
        reseed_empty(&points, &mut next, &cents, k);
        if next == labels {
            break;
        }
        labels = next;
        cents = centroids(&points, &labels, k, dim);
    }
    labels
}

/// Moves the point farthest from its own centroid into each empty cluster.
fn reseed_empty(points: &[Option<Vec<f64>>], labels: &mut [usize], cents: &[Vec<f64>], k: usize) {
    loop {
        let mut counts = vec![0usize; k];
        labels.iter().for_each(|&l| counts[l] += 1);
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return;
        };
        let far = (0..labels.len())
            .filter(|&i| counts[labels[i]] > 1)
            .map(|i| {
                let s = points[i].as_ref().map_or(0.0, |p| dot(p, &cents[labels[i]]));
                (i, s)
            })
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        match far {
            Some((i, _)) => labels[i] = empty,
            None => return,
        }
    }
}
