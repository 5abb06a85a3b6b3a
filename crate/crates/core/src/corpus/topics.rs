use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};

const UNIT_TOL: f64 = 1e-9;

/// Relevance scores ρ(t, d): topics are rows, documents columns, and every
/// column has unit L2 norm.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicModel {
    relevance: Matrix,
    topic_ids: Vec<String>,
    doc_ids: Vec<String>,
}

impl TopicModel {
    pub fn new(relevance: Matrix, topic_ids: Vec<String>, doc_ids: Vec<String>) -> Result<Self> {
        if topic_ids.len() != relevance.rows() || doc_ids.len() != relevance.cols() {
            return Err(Error::dims(
                format!("{}x{} labels", relevance.rows(), relevance.cols()),
                format!("{}x{}", topic_ids.len(), doc_ids.len()),
            ));
        }
        if relevance.as_slice().iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::InvalidInput("relevance scores must lie in [0, 1]".into()));
        }
        for (j, n) in relevance.column_norms().into_iter().enumerate() {
            if (n - 1.0).abs() > UNIT_TOL {
                return Err(Error::InvalidInput(format!(
                    "relevance column for {:?} has norm {n}",
                    doc_ids[j]
                )));
            }
        }
        super::text::check_unique(&doc_ids)?;
        Ok(Self {
            relevance,
            topic_ids,
            doc_ids,
        })
    }

    /// Each document relevant to exactly one topic: `counts[t]` documents
    /// for topic `t`, in topic order.
    pub fn single_topic(counts: &[usize]) -> Result<Self> {
        if counts.is_empty() || counts.contains(&0) {
            return Err(Error::Parameter("topic counts must be positive".into()));
        }
        let n: usize = counts.iter().sum();
        let mut rel = Matrix::zeros(counts.len(), n);
        let mut d = 0;
        for (t, &c) in counts.iter().enumerate() {
            for _ in 0..c {
                rel[(t, d)] = 1.0;
                d += 1;
            }
        }
        Self::new(rel, default_topic_ids(counts.len()), default_doc_ids(n))
    }

    /// Builds ρ from per-document `(topic, weight)` judgments, normalizing
    /// each document's weights to unit length. Topic order is first
    /// appearance.
    pub fn from_judgments(doc_ids: &[String], judgments: &BTreeMap<String, Vec<(String, f64)>>) -> Result<Self> {
        let mut topics: Vec<String> = Vec::new();
        for id in doc_ids {
            for (t, _) in judgments.get(id).map(Vec::as_slice).unwrap_or_default() {
                if !topics.contains(t) {
                    topics.push(t.clone());
                }
            }
        }
        let mut rel = Matrix::zeros(topics.len(), doc_ids.len());
        for (j, id) in doc_ids.iter().enumerate() {
            let Some(js) = judgments.get(id).filter(|v| !v.is_empty()) else {
                return Err(Error::Format(format!("document {id:?} has no topic label")));
            };
            for (t, w) in js {
                if !(w.is_finite() && *w >= 0.0) {
                    return Err(Error::Format(format!("bad relevance {w} for {id:?}")));
                }
                let ti = topics.iter().position(|x| x == t).expect("collected above");
                rel[(ti, j)] += w;
            }
            let n = rel.column(j).iter().map(|v| v * v).sum::<f64>().sqrt();
            if n == 0.0 {
                return Err(Error::Format(format!("document {id:?} has zero total relevance")));
            }
            for ti in 0..topics.len() {
                rel[(ti, j)] /= n;
            }
        }
        Self::new(rel, topics, doc_ids.to_vec())
    }

    pub fn relevance(&self) -> &Matrix {
        &self.relevance
    }

    pub fn topic_ids(&self) -> &[String] {
        &self.topic_ids
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn n_topics(&self) -> usize {
        self.relevance.rows()
    }

    pub fn n_docs(&self) -> usize {
        self.relevance.cols()
    }

    /// The single topic of each document, or `None` if some document is
    /// relevant to several topics.
    pub fn single_labels(&self) -> Option<Vec<usize>> {
        (0..self.n_docs())
            .map(|d| {
                let mut nz = (0..self.n_topics()).filter(|&t| self.relevance[(t, d)] > 0.0);
                let first = nz.next()?;
                nz.next().is_none().then_some(first)
            })
            .collect()
    }

    /// Number of documents per topic, for single-topic models.
    pub fn topic_counts(&self) -> Option<Vec<usize>> {
        let labels = self.single_labels()?;
        let mut c = vec![0; self.n_topics()];
        for l in labels {
            c[l] += 1;
        }
        Some(c)
    }
}

pub fn default_topic_ids(k: usize) -> Vec<String> {
    (0..k).map(|t| format!("t{t}")).collect()
}

/// Zero-padded ids so that lexicographic and numeric order agree.
pub fn default_doc_ids(n: usize) -> Vec<String> {
    let width = n.saturating_sub(1).to_string().len().max(4);
    (0..n).map(|d| format!("d{d:0width$}")).collect()
}

/// True topic-based similarities `S = ρᵀρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix(Matrix);

impl SimilarityMatrix {
    /// Validates symmetry, a unit diagonal and entries in `[0, 1]`.
    pub fn new(m: Matrix) -> Result<Self> {
        if m.rows() != m.cols() || m.asymmetry() > UNIT_TOL {
            return Err(Error::InvalidInput("similarity matrix must be square and symmetric".into()));
        }
        for i in 0..m.rows() {
            if (m[(i, i)] - 1.0).abs() > UNIT_TOL {
                return Err(Error::InvalidInput(format!("S[{i},{i}] = {} is not 1", m[(i, i)])));
            }
        }
        if m.as_slice().iter().any(|&v| !(-UNIT_TOL..=1.0 + UNIT_TOL).contains(&v)) {
            return Err(Error::InvalidInput("similarities must lie in [0, 1]".into()));
        }
        Ok(SimilarityMatrix(m))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    /// Smallest eigenvalue; nonnegative up to rounding for valid models.
    pub fn min_eigenvalue(&self) -> f64 {
        let (vals, _) = symmetric_eigen(&self.0).expect("similarity matrix is symmetric");
        vals.last().copied().unwrap_or(0.0)
    }
}

impl AsRef<Matrix> for SimilarityMatrix {
    fn as_ref(&self) -> &Matrix {
        &self.0
    }
}

pub fn similarity_matrix(tm: &TopicModel) -> SimilarityMatrix {
    let mut s = tm.relevance.gram();
    // Unit columns; pin the diagonal and clamp rounding spill.
    for i in 0..s.rows() {
        for j in 0..s.cols() {
            s[(i, j)] = if i == j { 1.0 } else { s[(i, j)].clamp(0.0, 1.0) };
        }
    }
    SimilarityMatrix(s)
}

/// Unordered document-index pairs `(i, j)`, `i < j`, sharing a topic.
pub type PairSet = BTreeSet<(usize, usize)>;

pub fn intra_topic_pairs(tm: &TopicModel) -> PairSet {
    let n = tm.n_docs();
    let k = tm.n_topics();
    let mut out = PairSet::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if (0..k).any(|t| tm.relevance[(t, i)] > 0.0 && tm.relevance[(t, j)] > 0.0) {
                out.insert((i, j));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_similarity_for_single_topic() {
        let tm = TopicModel::single_topic(&[2, 1]).unwrap();
        let s = similarity_matrix(&tm);
        assert_eq!(s.matrix().row(0), &[1.0, 1.0, 0.0]);
        assert_eq!(s.matrix().row(2), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn mixed_document_similarity() {
        let h = 0.5f64.sqrt();
        let rel = Matrix::from_rows(&[[1.0, h], [0.0, h]]).unwrap();
        let tm = TopicModel::new(rel, default_topic_ids(2), default_doc_ids(2)).unwrap();
        let s = similarity_matrix(&tm);
        assert!((s.matrix()[(0, 1)] - h).abs() < 1e-15);
        assert_eq!(s.matrix()[(1, 1)], 1.0);
    }

    #[test]
    fn pair_counts() {
        let tm = TopicModel::single_topic(&[3, 2]).unwrap();
        assert_eq!(intra_topic_pairs(&tm).len(), 4);
        let one = TopicModel::single_topic(&[5]).unwrap();
        assert_eq!(intra_topic_pairs(&one).len(), 10);
    }

    #[test]
    fn overlap_on_second_topic_counts() {
        let h = 0.5f64.sqrt();
        let rel = Matrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, h, 1.0], [0.0, h, 0.0]]).unwrap();
        let tm = TopicModel::new(rel, default_topic_ids(3), default_doc_ids(3)).unwrap();
        let pairs = intra_topic_pairs(&tm);
        assert!(pairs.contains(&(1, 2)));
        assert!(!pairs.contains(&(0, 1)));
        assert_eq!(tm.single_labels(), None);
    }

    #[test]
    fn judgments_are_normalized_uniformly() {
        let ids = default_doc_ids(2);
        let mut j = BTreeMap::new();
        j.insert(ids[0].clone(), vec![("x".to_string(), 1.0), ("y".to_string(), 1.0)]);
        j.insert(ids[1].clone(), vec![("y".to_string(), 1.0)]);
        let tm = TopicModel::from_judgments(&ids, &j).unwrap();
        assert_eq!(tm.topic_ids(), &["x", "y"]);
        assert!((tm.relevance()[(0, 0)] - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(tm.relevance()[(1, 1)], 1.0);
        j.remove(&ids[1]);
        assert!(TopicModel::from_judgments(&ids, &j).is_err());
    }

    #[test]
    fn rejects_non_unit_columns() {
        let rel = Matrix::from_rows(&[[0.5]]).unwrap();
        assert!(TopicModel::new(rel, default_topic_ids(1), default_doc_ids(1)).is_err());
    }
}
