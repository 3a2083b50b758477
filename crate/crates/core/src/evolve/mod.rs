//! Evolutionary search over augmentation policies.

mod archive;
mod config;
pub mod nsga2;
mod search;
mod variation;

use thiserror::Error;

pub use archive::ParetoArchive;
pub use config::{ConfigError, ParentSelection, SearchConfig, MAX_GENOME_LEN};
pub use nsga2::nsga2_select;
pub use search::{run_search, EvalContext, GenerationRecord, SearchOutcome};
pub use variation::{breed, crossover_one_point, mutate, random_policy, spawn_length, splice, VariationStats};

use crate::augment::Policy;
use crate::dataset::DatasetError;
use crate::features::FeatureError;
use crate::metrics::{MetricError, MetricPair};

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("selection needs {needed} genomes, pool has {got}")]
    SelectionUnderflow { needed: usize, got: usize },
    #[error(transparent)]
    Features(#[from] FeatureError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("worker pool: {0}")]
    WorkerPool(String),
}

/// A policy with a run-unique id; `fitness` is set once evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct Genome {
    pub id: u64,
    pub policy: Policy,
    pub fitness: Option<MetricPair>,
}

impl Genome {
    pub fn new(id: u64, policy: Policy) -> Self {
        Self { id, policy, fitness: None }
    }

    /// Panics if the genome has not been evaluated.
    pub fn expect_fitness(&self) -> MetricPair {
        self.fitness.expect("genome evaluated")
    }
}
