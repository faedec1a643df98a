use serde::{Deserialize, Serialize};

use super::engine::{run_with, RunResult};
use super::{GaConfig, GaError, Strategy};
use crate::demand::DemandProfile;
use crate::exec::Exec;
use crate::station::StationConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub f_best: f64,
    pub g_best: usize,
    pub mean_best: f64,
    pub curve: Vec<f64>,
    /// Wall time per generation; kept out of serialized reports.
    #[serde(skip)]
    pub per_iteration_seconds: f64,
}

/// Compares outcomes only; wall time is ignored.
impl PartialEq for RunSummary {
    fn eq(&self, other: &Self) -> bool {
        self.seed == other.seed
            && self.f_best == other.f_best
            && self.g_best == other.g_best
            && self.mean_best == other.mean_best
            && self.curve == other.curve
    }
}

impl RunSummary {
    fn new(seed: u64, r: RunResult) -> Self {
        Self {
            seed,
            f_best: r.best_fitness,
            g_best: r.best_generation,
            mean_best: r.mean_best_fitness,
            curve: r.best_fitness_per_generation,
            per_iteration_seconds: r.per_iteration_seconds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySummary {
    pub strategy: Strategy,
    pub runs: Vec<RunSummary>,
    pub mean_f_best: f64,
    pub median_f_best: f64,
    pub mean_g_best: f64,
    pub mean_mean_best: f64,
}

impl StrategySummary {
    fn new(strategy: Strategy, runs: Vec<RunSummary>) -> Self {
        let n = runs.len() as f64;
        let f: Vec<f64> = runs.iter().map(|r| r.f_best).collect();
        Self {
            strategy,
            mean_f_best: f.iter().sum::<f64>() / n,
            median_f_best: median(&f),
            mean_g_best: runs.iter().map(|r| r.g_best as f64).sum::<f64>() / n,
            mean_mean_best: runs.iter().map(|r| r.mean_best).sum::<f64>() / n,
            runs,
        }
    }

    /// Mean wall time per generation over all runs.
    pub fn mean_iteration_seconds(&self) -> f64 {
        self.runs
            .iter()
            .map(|r| r.per_iteration_seconds)
            .sum::<f64>()
            / self.runs.len() as f64
    }
}

pub(crate) fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Per-seed head-to-head counts on best fitness.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wins {
    pub first: usize,
    pub second: usize,
    pub ties: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub seeds: Vec<u64>,
    pub first: StrategySummary,
    pub second: StrategySummary,
    pub wins: Wins,
}

/// Runs GA-LRU against the uniform baseline once per seed.
pub fn compare(
    profile: &DemandProfile,
    station: &StationConfig,
    ga: &GaConfig,
    seeds: &[u64],
) -> Result<ComparisonReport, GaError> {
    compare_with(
        profile,
        station,
        ga,
        seeds,
        [Strategy::Lru, Strategy::Uniform],
        Exec::default(),
    )
}

/// Runs both `strategies` for every seed; the runs are independent and are
/// fanned out with `exec`.
pub fn compare_with(
    profile: &DemandProfile,
    station: &StationConfig,
    ga: &GaConfig,
    seeds: &[u64],
    strategies: [Strategy; 2],
    exec: Exec,
) -> Result<ComparisonReport, GaError> {
    if seeds.is_empty() {
        return Err(GaError::NoSeeds);
    }
    ga.validate()?;
    station.validate()?;
    let jobs: Vec<(usize, u64)> = (0..2)
        .flat_map(|s| seeds.iter().map(move |&seed| (s, seed)))
        .collect();
    let results = exec.map(&jobs, |&(s, seed)| {
        let cfg = GaConfig {
            seed,
            strategy: strategies[s],
            ..*ga
        };
        // population evaluation stays sequential inside a fanned-out run
        run_with(profile, station, &cfg, Exec::Sequential).map(|r| RunSummary::new(seed, r))
    });
    let mut runs = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let second_runs = runs.split_off(seeds.len());

    let mut wins = Wins::default();
    for (a, b) in runs.iter().zip(&second_runs) {
        match a.f_best.total_cmp(&b.f_best) {
            std::cmp::Ordering::Less => wins.first += 1,
            std::cmp::Ordering::Greater => wins.second += 1,
            std::cmp::Ordering::Equal => wins.ties += 1,
        }
    }
    Ok(ComparisonReport {
        seeds: seeds.to_vec(),
        first: StrategySummary::new(strategies[0], runs),
        second: StrategySummary::new(strategies[1], second_runs),
        wins,
    })
}
