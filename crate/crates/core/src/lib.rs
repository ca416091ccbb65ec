//! Ensembles of perturbed bipartite user–item interaction graphs.
//!
//! The sampler keeps three properties of the observed graph close to the
//! original: which item clusters each user cluster interacts with (user
//! preference), which items tend to co-occur (item concurrence), and node
//! degrees. Users are sampled independently; every sampled graph keeps the
//! source node set and each user's degree exactly.
//!
//! The pipeline is:
//!
//! 1. [`graph::load_edge_list`] reads an edge list into an [`InteractionGraph`].
//! 2. [`similarity`] computes sparse Jaccard scores between users and between
//!    items; the item scores form the [`ConcurrenceMatrix`].
//! 3. [`clustering::dbscan`] groups users and items, [`clustering::cluster_scores`]
//!    counts edges between cluster pairs and [`clustering::preference`] turns
//!    the counts into per-cluster item weights.
//! 4. [`sampler`] draws sampled graphs (and the node-copy baseline).
//! 5. [`stats`] and [`metrics`] measure what the ensembles preserve.

pub mod cli;
pub mod clustering;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod rng;
pub mod sampler;
pub mod similarity;
pub mod split;
pub mod stats;
pub mod synthetic;

pub use clustering::{
    ClusterAssignment, ClusterScoreMatrix, DbscanParams, PreferenceDistribution,
};
pub use error::{Error, Result};
pub use graph::{EdgeListFormat, InteractionGraph, Side};
pub use sampler::{PecoModel, Preset, SampledGraph, SamplerConfig};
pub use similarity::{ConcurrenceMatrix, SparseSimilarity};
pub use split::{DatasetSplit, SplitFractions};
