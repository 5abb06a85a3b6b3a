//! Controlled test beds: term-document matrices built from known topic
//! vectors so that the optimum subspace and its error are known or nearly so.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::optimum::{deviation_error, optimum_subspace, OptimumSubspaceResult};
use crate::corpus::{similarity_matrix, SimilarityMatrix, TermDocumentMatrix, TopicModel};
use crate::error::{Error, Result};
use crate::linalg::{svd, Basis, Matrix};

#[derive(Debug, Clone)]
pub struct TheoryInstance {
    pub label: String,
    pub topics: TopicModel,
    pub a: TermDocumentMatrix,
    pub s: SimilarityMatrix,
    pub optimum: OptimumSubspaceResult,
    pub noise: f64,
    pub seed: u64,
}

/// Nonnegative orthonormal topic vectors: topic `t` is supported on its own
/// block of `m / k` terms with random positive weights.
fn topic_vectors(k: usize, m: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let block = m / k;
    let mut u = Matrix::zeros(m, k);
    for t in 0..k {
        let w: Vec<f64> = (0..block).map(|_| rng.gen_range(0.1..1.0)).collect();
        let n = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        for (i, v) in w.iter().enumerate() {
            u[(t * block + i, t)] = v / n;
        }
    }
    u
}

/// Builds `Â` with columns `Σ_t ρ(t,d) u_t`, each perturbed by a sparse
/// nonnegative vector of norm `noise` and renormalized.
///
/// With `noise = 0` the optimum is known exactly: `ÂᵀÂ = S`, so
/// `span{u_t}` has zero deviation. Otherwise the optimum comes from the
/// approximate search over subspaces of dimension at most `k`. Larger
/// subspaces can score marginally better on noise directions, but their
/// tiny `Δ̂_min` leaves the tangent bound vacuous.
pub fn construct_ideal_instance(tm: &TopicModel, m: usize, noise: f64, seed: u64) -> Result<TheoryInstance> {
    let k = tm.n_topics();
    let n = tm.n_docs();
    if m < k {
        return Err(Error::Parameter(format!("{m} terms cannot hold {k} orthogonal topics")));
    }
    if !(noise.is_finite() && noise >= 0.0) {
        return Err(Error::Parameter(format!("noise level {noise} must be finite and nonnegative")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = topic_vectors(k, m, &mut rng);
    let mut a = u.matmul(tm.relevance())?;
    if noise > 0.0 {
        let support = (m / 4).max(1);
        for d in 0..n {
            let idx = sample(&mut rng, m, support);
            let vals: Vec<f64> = idx.iter().map(|_| rng.gen_range(0.0..1.0)).collect();
            let len = vals.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            for (i, v) in idx.iter().zip(&vals) {
                a[(i, d)] += noise * v / len;
            }
        }
    }
    let terms = (0..m).map(|i| format!("w{i:03}")).collect();
    let a = TermDocumentMatrix::from_weights(a, terms, tm.doc_ids().to_vec())?;
    let s = similarity_matrix(tm);

    let optimum = if noise == 0.0 {
        let basis = Basis::new(u)?;
        let eps_opt = deviation_error(&s, &a, &basis)?;
        OptimumSubspaceResult {
            basis,
            eps_opt,
            is_exact: true,
            h: k,
        }
    } else {
        let rank = svd(a.matrix())?.rank();
        optimum_subspace(&s, &a, k.min(rank))?
    };
    let counts = tm
        .topic_counts()
        .map(|c| c.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
        .unwrap_or_else(|| format!("{k} mixed topics"));
    Ok(TheoryInstance {
        label: format!("({counts}) noise={noise} seed={seed}"),
        topics: tm.clone(),
        a,
        s,
        optimum,
        noise,
        seed,
    })
}

const NOISE_LEVELS: [f64; 3] = [0.05, 0.1, 0.2];
const TWO_TOPIC_SHAPES: [[usize; 2]; 4] = [[5, 5], [6, 4], [7, 3], [8, 2]];
const FIVE_TOPIC_SHAPES: [[usize; 5]; 3] = [[2, 2, 2, 2, 2], [3, 2, 2, 2, 1], [4, 2, 2, 1, 1]];
/// Vocabulary size for the noisy instances.
pub const NOISY_TERMS: usize = 30;

/// The `i`-th instance of the standard verification suite: noise level,
/// topic count and distribution cycle with `i`. `noise` overrides the
/// cycled level.
pub fn noisy_instance(i: usize, seed: u64, noise: Option<f64>) -> Result<TheoryInstance> {
    let noise = noise.unwrap_or(NOISE_LEVELS[i % NOISE_LEVELS.len()]);
    let tm = if (i / NOISE_LEVELS.len()) % 2 == 0 {
        TopicModel::single_topic(&TWO_TOPIC_SHAPES[i % TWO_TOPIC_SHAPES.len()])?
    } else {
        TopicModel::single_topic(&FIVE_TOPIC_SHAPES[i % FIVE_TOPIC_SHAPES.len()])?
    };
    construct_ideal_instance(&tm, NOISY_TERMS, noise, seed.wrapping_add(i as u64))
}
