//! Tokenization, stemming and the frequency-weighted term-document matrix.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use log::warn;

use super::Document;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

const DEFAULT_STOPWORDS: &str = include_str!("stopwords_en.txt");

/// Column norms must be 0 or 1 within this tolerance.
pub const NORM_TOL: f64 = 1e-9;

pub type Stopwords = HashSet<String>;

/// The bundled English stopword list.
pub fn default_stopwords() -> Stopwords {
    parse_stopwords(DEFAULT_STOPWORDS)
}

/// One token per line; blank lines and `#` comments are skipped.
pub fn parse_stopwords(text: &str) -> Stopwords {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

pub fn load_stopwords(path: &Path) -> Result<Stopwords> {
    Ok(parse_stopwords(&std::fs::read_to_string(path)?))
}

/// Lowercased alphanumeric runs.
pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

/// Tokens after stopword removal and Porter stemming.
pub fn terms_of<'a>(text: &'a str, stopwords: &'a Stopwords) -> impl Iterator<Item = String> + 'a {
    tokenize(text)
        .filter(move |t| !stopwords.contains(t))
        .map(|t| porter_stemmer::stem(&t))
}

/// Length-normalized term-document matrix: terms are rows, documents columns.
#[derive(Debug, Clone, PartialEq)]
pub struct TermDocumentMatrix {
    matrix: Matrix,
    terms: Vec<String>,
    doc_ids: Vec<String>,
}

impl TermDocumentMatrix {
    /// Wraps an already-built matrix, checking nonnegativity and that each
    /// column has norm 0 or 1.
    pub fn new(matrix: Matrix, terms: Vec<String>, doc_ids: Vec<String>) -> Result<Self> {
        if terms.len() != matrix.rows() || doc_ids.len() != matrix.cols() {
            return Err(Error::dims(
                format!("{}x{} labels", matrix.rows(), matrix.cols()),
                format!("{}x{}", terms.len(), doc_ids.len()),
            ));
        }
        if matrix.as_slice().iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidInput("negative term weight".into()));
        }
        for (j, n) in matrix.column_norms().into_iter().enumerate() {
            if n > NORM_TOL && (n - 1.0).abs() > NORM_TOL {
                return Err(Error::InvalidInput(format!(
                    "column {j} has norm {n}, expected 0 or 1"
                )));
            }
        }
        check_unique(&doc_ids)?;
        Ok(Self {
            matrix,
            terms,
            doc_ids,
        })
    }

    /// Normalizes every nonzero column of a nonnegative weight matrix.
    pub fn from_weights(mut weights: Matrix, terms: Vec<String>, doc_ids: Vec<String>) -> Result<Self> {
        let norms = weights.column_norms();
        for i in 0..weights.rows() {
            for (j, &n) in norms.iter().enumerate() {
                if n > 0.0 {
                    weights[(i, j)] /= n;
                }
            }
        }
        Self::new(weights, terms, doc_ids)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn n_terms(&self) -> usize {
        self.matrix.rows()
    }

    pub fn n_docs(&self) -> usize {
        self.matrix.cols()
    }
}

impl AsRef<Matrix> for TermDocumentMatrix {
    fn as_ref(&self) -> &Matrix {
        &self.matrix
    }
}

pub(crate) fn check_unique(ids: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(ids.len());
    for id in ids {
        if !seen.insert(id.as_str()) {
            return Err(Error::InvalidInput(format!("duplicate document id {id:?}")));
        }
    }
    Ok(())
}

/// Raw term frequencies, then unit-length columns. The vocabulary is
/// sorted; documents that end up empty stay as zero columns.
pub fn build_matrix(docs: &[Document], stopwords: &Stopwords) -> Result<TermDocumentMatrix> {
    if docs.is_empty() {
        return Err(Error::InvalidInput("no documents".into()));
    }
    let ids: Vec<String> = docs.iter().map(|d| d.id.clone()).collect();
    check_unique(&ids)?;

    let counts: Vec<BTreeMap<String, u32>> = docs
        .iter()
        .map(|d| {
            let mut c = BTreeMap::new();
            for t in terms_of(&d.text, stopwords) {
                *c.entry(t).or_insert(0) += 1;
            }
            c
        })
        .collect();
    let vocab: BTreeSet<&String> = counts.iter().flat_map(|c| c.keys()).collect();
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let index: BTreeMap<&String, usize> = vocab.iter().enumerate().map(|(i, t)| (*t, i)).collect();

    let mut weights = Matrix::zeros(vocab.len(), docs.len());
    for (j, c) in counts.iter().enumerate() {
        if c.is_empty() {
            warn!("document {:?} is empty after filtering; kept as a zero column", docs[j].id);
        }
        for (t, &n) in c {
            weights[(index[t], j)] = f64::from(n);
        }
    }
    let terms = vocab.into_iter().cloned().collect();
    TermDocumentMatrix::from_weights(weights, terms, ids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;

    fn doc(id: &str, text: &str) -> Document {
        Document::new(id, text)
    }

    #[test]
    fn tokenizer_splits_and_lowercases() {
        let toks: Vec<String> = tokenize("The Cat's-toy, 42x!").collect();
        assert_eq!(toks, vec!["the", "cat", "s", "toy", "42x"]);
    }

    #[test]
    fn stems_and_drops_stopwords() {
        let sw = default_stopwords();
        let t: Vec<String> = terms_of("The cats were running", &sw).collect();
        assert_eq!(t, vec!["cat", "run"]);
    }

    #[test]
    fn frequency_then_unit_length() {
        let m = build_matrix(&[doc("a", "cat cat dog")], &Stopwords::new()).unwrap();
        assert_eq!(m.terms(), &["cat", "dog"]);
        let s5 = 5f64.sqrt();
        assert!((m.matrix()[(0, 0)] - 2.0 / s5).abs() < 1e-15);
        assert!((m.matrix()[(1, 0)] - 1.0 / s5).abs() < 1e-15);
    }

    #[test]
    fn identical_docs_have_cosine_one() {
        let m = build_matrix(&[doc("a", "apple pie"), doc("b", "apple pie")], &Stopwords::new()).unwrap();
        let c = m.matrix().columns();
        assert!((dot(&c[0], &c[1]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn disjoint_vocabularies_are_orthogonal() {
        let m = build_matrix(&[doc("a", "apple pie"), doc("b", "engine oil")], &Stopwords::new()).unwrap();
        let c = m.matrix().columns();
        assert_eq!(dot(&c[0], &c[1]), 0.0);
    }

    #[test]
    fn empty_document_is_zero_column() {
        let sw = default_stopwords();
        let m = build_matrix(&[doc("a", "the and of"), doc("b", "engine")], &sw).unwrap();
        assert_eq!(m.matrix().column_norms()[0], 0.0);
        assert!((m.matrix().column_norms()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn all_empty_is_an_error() {
        let sw = default_stopwords();
        let r = build_matrix(&[doc("a", "the"), doc("b", "")], &sw);
        assert!(matches!(r, Err(Error::EmptyVocabulary)));
        assert!(build_matrix(&[], &sw).is_err());
        assert!(build_matrix(&[doc("a", "x"), doc("a", "y")], &sw).is_err());
    }

    #[test]
    fn validates_wrapped_matrices() {
        let bad = Matrix::from_rows(&[[2.0]]).unwrap();
        assert!(TermDocumentMatrix::new(bad, vec!["t".into()], vec!["d".into()]).is_err());
        let neg = Matrix::from_rows(&[[-1.0]]).unwrap();
        assert!(TermDocumentMatrix::new(neg, vec!["t".into()], vec!["d".into()]).is_err());
    }
}
