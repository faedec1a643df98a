use std::time::Instant;

use super::operators::{generate_individual, midpoint_crossover, mutate, tournament_index};
use super::{streams, GaConfig, GaError};
use crate::demand::DemandProfile;
use crate::exec::Exec;
use crate::station::{fitness, repair, xi_max, Individual, StationConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// Best plan found, with genes clamped to what the station can apply.
    pub best_individual: Individual,
    pub best_fitness: f64,
    /// First generation reaching `best_fitness`.
    pub best_generation: usize,
    pub best_fitness_per_generation: Vec<f64>,
    /// Mean of the convergence curve.
    pub mean_best_fitness: f64,
    /// Objective normaliser (cost of the immediate strategy).
    pub xi_max: f64,
    /// Wall time, not covered by the determinism guarantee.
    pub per_iteration_seconds: f64,
}

impl RunResult {
    /// Equality on everything except wall time.
    pub fn same_outcome(&self, other: &RunResult) -> bool {
        self.best_individual == other.best_individual
            && self.best_fitness.to_bits() == other.best_fitness.to_bits()
            && self.best_generation == other.best_generation
            && self.xi_max.to_bits() == other.xi_max.to_bits()
            && self.best_fitness_per_generation.len() == other.best_fitness_per_generation.len()
            && self
                .best_fitness_per_generation
                .iter()
                .zip(&other.best_fitness_per_generation)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

pub fn run(
    profile: &DemandProfile,
    station: &StationConfig,
    ga: &GaConfig,
) -> Result<RunResult, GaError> {
    run_with(profile, station, ga, Exec::default())
}

/// Runs the GA, evaluating each generation with `exec`. All random draws
/// happen on the calling thread, so the result does not depend on `exec`.
pub fn run_with(
    profile: &DemandProfile,
    station: &StationConfig,
    ga: &GaConfig,
    exec: Exec,
) -> Result<RunResult, GaError> {
    ga.validate()?;
    station.validate()?;
    let started = Instant::now();
    let xi = xi_max(profile, station);
    let evaluate = |pop: &[Individual]| exec.map(pop, |ind| fitness(ind, profile, station, xi));

    let mut init = streams::stream(ga.seed, streams::INIT);
    let mut selection = streams::stream(ga.seed, streams::SELECTION);
    let mut crossover = streams::stream(ga.seed, streams::CROSSOVER);
    let mut mutation = streams::stream(ga.seed, streams::MUTATION);

    let n = ga.population_size;
    let mut population: Vec<Individual> = (0..n)
        .map(|_| generate_individual(profile, station, ga.strategy, &mut init))
        .collect();
    let mut scores = evaluate(&population);

    let mut curve = Vec::with_capacity(ga.max_iterations);
    let mut ranking: Vec<usize> = (0..n).collect();
    rank(&mut ranking, &scores);
    curve.push(scores[ranking[0]]);
    let mut best = (scores[ranking[0]], 0usize, population[ranking[0]].clone());

    for generation in 1..ga.max_iterations {
        let mut next = Vec::with_capacity(n);
        next.extend(
            ranking[..ga.elitism_count]
                .iter()
                .map(|&i| population[i].clone()),
        );
        while next.len() < n {
            let p1 = tournament_index(&scores, ga.tournament_size, &mut selection);
            let p2 = tournament_index(&scores, ga.tournament_size, &mut selection);
            let (c1, c2) = midpoint_crossover(
                &population[p1],
                &population[p2],
                &mut crossover,
                ga.crossover_prob,
            );
            next.push(mutate(c1, profile, station, ga, &mut mutation));
            if next.len() < n {
                next.push(mutate(c2, profile, station, ga, &mut mutation));
            }
        }
        population = next;
        scores = evaluate(&population);
        ranking.clear();
        ranking.extend(0..n);
        rank(&mut ranking, &scores);
        let gen_best = scores[ranking[0]];
        curve.push(gen_best);
        if gen_best < best.0 {
            best = (gen_best, generation, population[ranking[0]].clone());
        }
    }

    let elapsed = started.elapsed().as_secs_f64();
    let mean_best_fitness = curve.iter().sum::<f64>() / curve.len() as f64;
    Ok(RunResult {
        best_individual: repair(&best.2, profile, station),
        best_fitness: best.0,
        best_generation: best.1,
        mean_best_fitness,
        best_fitness_per_generation: curve,
        xi_max: xi,
        per_iteration_seconds: elapsed / ga.max_iterations as f64,
    })
}

/// Sorts indices by fitness, lowest index first among equals.
fn rank(indices: &mut [usize], scores: &[f64]) {
    indices.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
}
