use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::augment::Strategy;

/// Hard cap on genome length under add-mutations.
pub const MAX_GENOME_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid search config: {field}: {message}")]
pub struct ConfigError {
    pub field: &'static str,
    pub message: String,
}

/// How parents are drawn for variation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParentSelection {
    #[default]
    Uniform,
    /// Binary tournament on (front rank, crowding distance).
    Tournament,
}

mod strategy_serde {
    use super::Strategy;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: &Strategy, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(s.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Strategy, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    #[serde(with = "strategy_serde")]
    pub strategy: Strategy,
    pub fixed_length: Option<usize>,
    pub population_size: usize,
    pub offspring_size: usize,
    pub generations: usize,
    pub eval_samples: usize,
    /// Real images used for the cached reference features; `eval_samples` when unset.
    pub real_samples: Option<usize>,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub per_element_swap_prob: f64,
    pub add_prob: f64,
    pub remove_prob: f64,
    /// Inclusive bounds of spawned genome lengths.
    pub length_bounds: [usize; 2],
    pub parent_selection: ParentSelection,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            strategy: Strategy::Sequential,
            fixed_length: None,
            population_size: 100,
            offspring_size: 200,
            generations: 5,
            eval_samples: 128,
            real_samples: None,
            crossover_prob: 0.6,
            mutation_prob: 0.3,
            per_element_swap_prob: 0.1,
            add_prob: 0.1,
            remove_prob: 0.1,
            length_bounds: [2, 16],
            parent_selection: ParentSelection::Uniform,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn real_samples(&self) -> usize {
        self.real_samples.unwrap_or(self.eval_samples)
    }

    /// Smallest length a genome may shrink to.
    pub fn min_len(&self) -> usize {
        self.strategy.min_len()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let err = |field, message: &str| Err(ConfigError { field, message: message.to_string() });
        for (field, p) in [
            ("crossover_prob", self.crossover_prob),
            ("mutation_prob", self.mutation_prob),
            ("per_element_swap_prob", self.per_element_swap_prob),
            ("add_prob", self.add_prob),
            ("remove_prob", self.remove_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return err(field, "must be within [0, 1]");
            }
        }
        for (field, n) in [
            ("population_size", self.population_size),
            ("offspring_size", self.offspring_size),
            ("generations", self.generations),
            ("eval_samples", self.eval_samples),
            ("real_samples", self.real_samples()),
        ] {
            if n == 0 {
                return err(field, "must be at least 1");
            }
        }
        if self.eval_samples < 2 {
            return err("eval_samples", "variance needs at least 2 samples");
        }
        if let Some(len) = self.fixed_length {
            if len < self.min_len() || len > MAX_GENOME_LEN {
                return err("fixed_length", &format!("must be within [{}, {MAX_GENOME_LEN}]", self.min_len()));
            }
        }
        let [lo, hi] = self.length_bounds;
        if lo < self.min_len() || lo > hi || hi > MAX_GENOME_LEN {
            return err(
                "length_bounds",
                &format!("need {} <= low <= high <= {MAX_GENOME_LEN}", self.min_len()),
            );
        }
        Ok(())
    }
}
