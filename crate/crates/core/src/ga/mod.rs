//! Genetic algorithm for 24-hour charging plans.
//!
//! Two strategies share the same loop and differ only in how fresh
//! individuals are drawn, both at initialisation and on mutation:
//! [`Strategy::Lru`] biases each hour's charge towards the demand surplus of
//! its type over the other type, [`Strategy::Uniform`] draws blindly.

mod compare;
mod engine;
mod operators;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use compare::{compare, compare_with, ComparisonReport, RunSummary, StrategySummary, Wins};
pub use engine::{run, run_with, RunResult};
pub use operators::{
    generate_individual, lru_delta, midpoint_crossover, mutate, sample_charge, tournament_select,
};

use crate::station::ConfigError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Demand-surplus guided draws.
    #[default]
    Lru,
    /// Uniform draws over the available empties.
    Uniform,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Lru => "lru",
            Strategy::Uniform => "uniform",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lru" => Ok(Strategy::Lru),
            "uniform" => Ok(Strategy::Uniform),
            other => Err(format!(
                "unknown strategy `{other}` (expected lru or uniform)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    pub crossover_prob: f64,
    /// Per-gene trigger probability; any trigger regenerates the individual.
    pub mutation_rate: f64,
    /// Number of generations evaluated, including the initial population.
    pub max_iterations: usize,
    pub tournament_size: usize,
    pub elitism_count: usize,
    pub seed: u64,
    pub strategy: Strategy,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            crossover_prob: 0.8,
            mutation_rate: 0.005,
            max_iterations: 500,
            tournament_size: 3,
            elitism_count: 1,
            seed: 0,
            strategy: Strategy::Lru,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GaError {
    #[error("population size must be at least 1")]
    EmptyPopulation,
    #[error("max_iterations must be at least 1")]
    NoIterations,
    #[error("{name} must lie in [0, 1], got {value}")]
    Probability { name: &'static str, value: f64 },
    #[error("tournament size {size} must lie in 1..={population}")]
    Tournament { size: usize, population: usize },
    #[error("elitism count {count} must be below population size {population}")]
    Elitism { count: usize, population: usize },
    #[error("at least one seed is required")]
    NoSeeds,
    #[error(transparent)]
    Station(#[from] ConfigError),
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), GaError> {
        if self.population_size == 0 {
            return Err(GaError::EmptyPopulation);
        }
        if self.max_iterations == 0 {
            return Err(GaError::NoIterations);
        }
        for (name, value) in [
            ("crossover_prob", self.crossover_prob),
            ("mutation_rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(GaError::Probability { name, value });
            }
        }
        if self.tournament_size == 0 || self.tournament_size > self.population_size {
            return Err(GaError::Tournament {
                size: self.tournament_size,
                population: self.population_size,
            });
        }
        if self.elitism_count >= self.population_size {
            return Err(GaError::Elitism {
                count: self.elitism_count,
                population: self.population_size,
            });
        }
        Ok(())
    }
}

/// Independent random streams derived from one master seed, one per
/// stochastic step of the loop.
pub(crate) mod streams {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub const INIT: u64 = 0;
    pub const SELECTION: u64 = 1;
    pub const CROSSOVER: u64 = 2;
    pub const MUTATION: u64 = 3;

    pub fn stream(seed: u64, id: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(id);
        rng
    }
}
