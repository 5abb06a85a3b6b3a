use crate::corpus::PairSet;
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

/// Cosines are compared at this resolution so that rounding noise does not
/// override the id tie rule.
const COSINE_QUANTUM: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedPair {
    /// Document indices, `i < j`.
    pub i: usize,
    pub j: usize,
    pub cosine: f64,
}

/// Every unordered document pair, by nonincreasing cosine.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedPairs {
    pairs: Vec<RankedPair>,
    n_docs: usize,
}

impl RankedPairs {
    pub fn pairs(&self) -> &[RankedPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    /// Builds a ranking from an explicit pair order (used for testing metric
    /// arithmetic against hand-made rankings).
    pub fn from_order(n_docs: usize, order: Vec<(usize, usize)>) -> Result<Self> {
        let expected = n_docs * n_docs.saturating_sub(1) / 2;
        let mut seen = PairSet::new();
        for &(i, j) in &order {
            let p = (i.min(j), i.max(j));
            if i == j || p.1 >= n_docs || !seen.insert(p) {
                return Err(Error::InvalidInput(format!("bad or repeated pair ({i}, {j})")));
            }
        }
        if seen.len() != expected {
            return Err(Error::InvalidInput(format!(
                "ranking has {} pairs, expected {expected}",
                seen.len()
            )));
        }
        let len = order.len() as f64;
        let pairs = order
            .into_iter()
            .enumerate()
            .map(|(r, (i, j))| RankedPair {
                i: i.min(j),
                j: i.max(j),
                cosine: 1.0 - r as f64 / len,
            })
            .collect();
        Ok(Self { pairs, n_docs })
    }
}

/// Cosine between columns; zero-length columns give 0.
pub fn column_cosines(rep: &Matrix) -> Matrix {
    let g = rep.gram();
    let n = g.rows();
    let norms: Vec<f64> = (0..n).map(|i| g[(i, i)].max(0.0).sqrt()).collect();
    let mut c = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let d = norms[i] * norms[j];
            c[(i, j)] = if d > 0.0 { g[(i, j)] / d } else { 0.0 };
        }
    }
    c
}

/// Cosine of two vectors; 0 if either is zero.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let d = dot(a, a).sqrt() * dot(b, b).sqrt();
    if d > 0.0 {
        dot(a, b) / d
    } else {
        0.0
    }
}

/// Ranks all column pairs of `rep` by cosine. Ties (at 1e-12 resolution)
/// go to the lexicographically smaller `(id, id)` pair, each pair's ids
/// taken in sorted order.
pub fn rank_pairs(rep: &Matrix, ids: &[String]) -> Result<RankedPairs> {
    let n = rep.cols();
    if n < 2 {
        return Err(Error::InvalidInput("ranking needs at least two documents".into()));
    }
    if ids.len() != n {
        return Err(Error::dims(format!("{n} ids"), format!("{}", ids.len())));
    }
    let cos = column_cosines(rep);
    let mut keyed: Vec<(i64, (&str, &str), RankedPair)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let c = cos[(i, j)];
            let (a, b) = (ids[i].as_str(), ids[j].as_str());
            let key = if a <= b { (a, b) } else { (b, a) };
            keyed.push((
                (c / COSINE_QUANTUM).round() as i64,
                key,
                RankedPair { i, j, cosine: c },
            ));
        }
    }
    keyed.sort_by(|x, y| y.0.cmp(&x.0).then_with(|| x.1.cmp(&y.1)));
    Ok(RankedPairs {
        pairs: keyed.into_iter().map(|k| k.2).collect(),
        n_docs: n,
    })
}

/// `prec(p_j)` for each intra-topic pair, in rank order.
fn intra_precisions(ranked: &RankedPairs, intra: &PairSet) -> Vec<f64> {
    let mut hits = 0usize;
    let mut out = Vec::with_capacity(intra.len());
    for (r, p) in ranked.pairs.iter().enumerate() {
        if intra.contains(&(p.i, p.j)) {
            hits += 1;
            out.push(hits as f64 / (r + 1) as f64);
        }
    }
    out
}

/// Mean precision over the intra-topic pairs.
pub fn pairwise_average_precision(ranked: &RankedPairs, intra: &PairSet) -> Result<f64> {
    let precs = intra_precisions(ranked, intra);
    if precs.is_empty() {
        return Err(Error::UndefinedMetric("no intra-topic pairs".into()));
    }
    Ok(precs.iter().sum::<f64>() / precs.len() as f64)
}

/// Fraction of all pairs that are intra-topic.
pub fn chance(ranked: &RankedPairs, intra: &PairSet) -> f64 {
    let hits = ranked
        .pairs
        .iter()
        .filter(|p| intra.contains(&(p.i, p.j)))
        .count();
    hits as f64 / ranked.len() as f64
}

/// Kappa average precision: the mean over intra-topic pairs of
/// `(prec − chance) / (1 − chance)`.
pub fn kappa_average_precision(ranked: &RankedPairs, intra: &PairSet) -> Result<f64> {
    let precs = intra_precisions(ranked, intra);
    if precs.is_empty() {
        return Err(Error::UndefinedMetric("no intra-topic pairs".into()));
    }
    let ch = precs.len() as f64 / ranked.len() as f64;
    if ch >= 1.0 {
        return Err(Error::UndefinedMetric(
            "every pair is intra-topic, so chance precision is 1".into(),
        ));
    }
    let total: f64 = precs.iter().map(|p| (p - ch) / (1.0 - ch)).sum();
    Ok(total / precs.len() as f64)
}
