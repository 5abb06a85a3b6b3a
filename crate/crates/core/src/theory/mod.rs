//! Topic statistics, the deviation-matrix error of a subspace, and
//! numerical verification of the perturbation bounds relating LSI's
//! subspace to the optimum one.

mod instance;
mod optimum;
mod stats;
mod verify;

pub use instance::{construct_ideal_instance, noisy_instance, TheoryInstance, NOISY_TERMS};
pub use optimum::{deviation_error, deviation_matrix, optimum_subspace, OptimumSubspaceResult, MAX_SUBSETS};
pub use stats::{s_prime_matrix, topic_stats, TopicStats};
pub use verify::{
    verify_cosine_bound, verify_sv_perturbation, verify_theorem1, verify_theorem2, Checker, CosineBoundRecord,
    PerturbationSummary, Theorem1Record, Theorem2Record, TheoremRecord, COSINE_SLACK, PERTURBATION_SLACK,
    THEOREM1_SLACK, THEOREM2_SLACK,
};
