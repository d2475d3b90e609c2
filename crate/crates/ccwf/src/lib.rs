//! Cross-cluster weighted forests.
//!
//! Partition a heterogeneous training set (k-means, random splits, or known
//! cluster labels), train a regression random forest per partition, and combine
//! the forests with non-negative ridge stacking weights. The [`bench`] module
//! replicates the simulation experiments that motivate the method.

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod bench;
pub mod dataset;
pub mod ensemble;
pub mod error;
pub mod exec;
pub mod forest;
pub mod kmeans;
pub mod seed;
pub mod stacking;
pub mod synthgen;

pub use bench::{ScenarioResult, ScenarioSpec, SummaryRow, SweepParameter, VariantSpec};
pub use dataset::{Dataset, PartitionAssignment, TrainTestSplit};
pub use ensemble::{CcwfModel, KChoice, VariantKind};
pub use error::{Error, Result};
pub use forest::{Forest, ForestParams};
pub use kmeans::{KMeansModel, KSelection};
pub use stacking::{StackMatrix, StackingWeights, WeightScheme};
pub use synthgen::{CoefficientSet, GenConfig, Generator, OutcomeKind, OutcomeModel};
