//! Subspace-based document representations.
//!
//! The crate builds term-document matrices, derives representation
//! subspaces (plain vector space, LSI, and iterative residual rescaling with
//! automatic scaling), scores them with pair-ranking and clustering
//! metrics, and numerically checks the perturbation bounds that relate
//! LSI's accuracy to how unevenly documents are spread over topics.

pub mod corpus;
pub mod error;
pub mod evalmetrics;
pub mod experiment;
pub mod linalg;
pub mod subspace;
pub mod theory;

pub use corpus::{Document, SimilarityMatrix, SynthSpec, TermDocumentMatrix, TopicModel};
pub use error::{Error, Result};
pub use evalmetrics::{ClusteringAlgorithm, ClusteringOutcome, ContingencyTable, RankedPairs};
pub use linalg::{Basis, Matrix, SvdResult};
pub use subspace::{EllMode, IrrConfig, Method, QMode, SubspaceBasis};
pub use theory::{OptimumSubspaceResult, TopicStats};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeDoctests;
