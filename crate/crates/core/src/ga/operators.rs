use rand::seq::index;
use rand::Rng;

use super::{GaConfig, Strategy};
use crate::demand::DemandProfile;
use crate::station::{clamp_supply, BatteryType, Individual, StationConfig};

/// Demand surplus of type `i` over type `j`, capped by the empties on hand.
pub fn lru_delta(d_i: u32, d_j: u32, empty: u32) -> u32 {
    d_i.saturating_sub(d_j).min(empty)
}

/// Draws one hour's charge for a type with `empty` packs waiting.
///
/// Uniform draws are inclusive on both ends. Under [`Strategy::Lru`] a type
/// whose demand exceeds the other's charges at least its surplus.
pub fn sample_charge<R: Rng + ?Sized>(
    d_i: u32,
    d_j: u32,
    empty: u32,
    strategy: Strategy,
    rng: &mut R,
) -> u32 {
    if empty == 0 {
        return 0;
    }
    let low = match strategy {
        Strategy::Lru if d_i > d_j => lru_delta(d_i, d_j, empty),
        _ => 0,
    };
    rng.random_range(low..=empty)
}

/// Builds a feasible individual by simulating the station and drawing each
/// hour's charge from the empties present after that hour's swaps. Type A is
/// drawn for the whole horizon before type B.
pub fn generate_individual<R: Rng + ?Sized>(
    profile: &DemandProfile,
    cfg: &StationConfig,
    strategy: Strategy,
    rng: &mut R,
) -> Individual {
    let h = profile.horizon();
    let mut plans = [Vec::with_capacity(h), Vec::with_capacity(h)];
    for (ty, plan) in BatteryType::ALL.into_iter().zip(plans.iter_mut()) {
        let (own, other) = match ty {
            BatteryType::A => (profile.demand_a(), profile.demand_b()),
            BatteryType::B => (profile.demand_b(), profile.demand_a()),
        };
        let mut full = cfg.capacity(ty);
        let mut empty = 0u32;
        for (&d_i, &d_j) in own.iter().zip(other) {
            let supplied = clamp_supply(d_i, full);
            empty += supplied;
            full -= supplied;
            let charge = sample_charge(d_i, d_j, empty, strategy, rng);
            full += charge;
            empty -= charge;
            plan.push(charge);
        }
    }
    Individual::from_parts(&plans[0], &plans[1])
}

/// Index of the winner among `k` distinct uniformly drawn contestants:
/// lowest fitness, then lowest index.
pub(crate) fn tournament_index<R: Rng + ?Sized>(fitnesses: &[f64], k: usize, rng: &mut R) -> usize {
    let picks = index::sample(rng, fitnesses.len(), k);
    picks
        .iter()
        .min_by(|&a, &b| fitnesses[a].total_cmp(&fitnesses[b]).then(a.cmp(&b)))
        .expect("tournament has at least one contestant")
}

/// # Panics
/// If the population is empty, lengths differ, or `k` exceeds the population.
pub fn tournament_select<R: Rng + ?Sized>(
    population: &[Individual],
    fitnesses: &[f64],
    k: usize,
    rng: &mut R,
) -> Individual {
    assert_eq!(population.len(), fitnesses.len());
    assert!(
        k >= 1 && k <= population.len(),
        "tournament size out of range"
    );
    population[tournament_index(fitnesses, k, rng)].clone()
}

/// With probability `prob`, swaps the type-B halves of the two parents.
pub fn midpoint_crossover<R: Rng + ?Sized>(
    p1: &Individual,
    p2: &Individual,
    rng: &mut R,
    prob: f64,
) -> (Individual, Individual) {
    if rng.random_bool(prob) {
        (
            Individual::from_parts(p1.plan(BatteryType::A), p2.plan(BatteryType::B)),
            Individual::from_parts(p2.plan(BatteryType::A), p1.plan(BatteryType::B)),
        )
    } else {
        (p1.clone(), p2.clone())
    }
}

/// Runs one Bernoulli trial per gene; if any fires the whole individual is
/// replaced by a fresh draw under the run's strategy.
pub fn mutate<R: Rng + ?Sized>(
    ind: Individual,
    profile: &DemandProfile,
    cfg: &StationConfig,
    ga: &GaConfig,
    rng: &mut R,
) -> Individual {
    let mut fired = false;
    for _ in 0..ind.genes().len() {
        fired |= rng.random_bool(ga.mutation_rate);
    }
    if fired {
        generate_individual(profile, cfg, ga.strategy, rng)
    } else {
        ind
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::station::repair;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn delta_examples() {
        assert_eq!(lru_delta(5, 2, 4), 3);
        assert_eq!(lru_delta(2, 5, 4), 0);
        assert_eq!(lru_delta(9, 1, 4), 4);
    }

    #[test]
    fn nothing_to_charge() {
        let mut r = rng();
        assert_eq!(sample_charge(5, 1, 0, Strategy::Lru, &mut r), 0);
        assert_eq!(sample_charge(5, 1, 0, Strategy::Uniform, &mut r), 0);
    }

    #[test]
    fn degenerate_interval_forces_value() {
        let mut r = rng();
        for _ in 0..100 {
            assert_eq!(sample_charge(5, 2, 3, Strategy::Lru, &mut r), 3);
        }
    }

    #[test]
    fn draws_cover_full_range() {
        let mut r = rng();
        let mut seen = [false; 5];
        for _ in 0..1000 {
            let c = sample_charge(2, 5, 4, Strategy::Lru, &mut r);
            seen[c as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    fn profile(a: &[u32], b: &[u32]) -> DemandProfile {
        DemandProfile::with_horizon(a.to_vec(), b.to_vec(), vec![1.0; a.len()]).unwrap()
    }

    #[test]
    fn zero_demand_gives_zero_genes() {
        let p = DemandProfile::zero(24);
        let ind = generate_individual(&p, &StationConfig::default(), Strategy::Lru, &mut rng());
        assert_eq!(ind, Individual::zeros(24));
    }

    #[test]
    fn single_pack_hand_trace() {
        let cfg = StationConfig {
            m_a: 1,
            m_b: 1,
            ..Default::default()
        };
        let mut a = vec![0; 24];
        a[0] = 1;
        let p = profile(&a, &[0; 24]);
        let mut r = rng();
        let mut seen = [false; 2];
        for _ in 0..200 {
            let ind = generate_individual(&p, &cfg, Strategy::Lru, &mut r);
            let plan = ind.plan(BatteryType::A);
            // d_A > d_B in hour 1 with one empty: delta = 1 forces a charge
            assert_eq!(plan[0], 1);
            assert!(plan[1..].iter().all(|&g| g == 0));
            let u = generate_individual(&p, &cfg, Strategy::Uniform, &mut r);
            seen[u.plan(BatteryType::A)[0] as usize] = true;
            assert!(u.plan(BatteryType::A).iter().sum::<u32>() <= 1);
        }
        assert!(seen[0] && seen[1]);
    }

    #[test]
    fn generated_individuals_survive_repair() {
        let cfg = StationConfig::default();
        let p = profile(&[3, 0, 2, 5, 1, 0, 4, 2], &[1, 4, 2, 0, 6, 3, 0, 2]);
        let mut r = rng();
        for strategy in [Strategy::Lru, Strategy::Uniform] {
            for _ in 0..500 {
                let ind = generate_individual(&p, &cfg, strategy, &mut r);
                assert_eq!(repair(&ind, &p, &cfg), ind);
                assert!(ind.within_capacity(&cfg));
            }
        }
    }

    fn pop() -> (Vec<Individual>, Vec<f64>) {
        let pop = (0..5)
            .map(|i| Individual::new(vec![i, i]).unwrap())
            .collect();
        (pop, vec![3.0, 1.0, 2.0, 1.0, 5.0])
    }

    #[test]
    fn exhaustive_tournament_returns_best_lowest_index() {
        let (pop, fit) = pop();
        let mut r = rng();
        for _ in 0..20 {
            let w = tournament_select(&pop, &fit, 5, &mut r);
            assert_eq!(w, pop[1]);
        }
    }

    #[test]
    fn unit_tournament_samples_everyone() {
        let (pop, fit) = pop();
        let mut r = rng();
        let mut seen = [false; 5];
        for _ in 0..500 {
            let w = tournament_select(&pop, &fit, 1, &mut r);
            seen[w.genes()[0] as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn crossover_swaps_halves() {
        let p1 = Individual::new(vec![1; 48]).unwrap();
        let p2 = Individual::new(vec![2; 48]).unwrap();
        let (c1, c2) = midpoint_crossover(&p1, &p2, &mut rng(), 1.0);
        assert_eq!(c1.genes()[..24], [1; 24]);
        assert_eq!(c1.genes()[24..], [2; 24]);
        assert_eq!(c2.genes()[..24], [2; 24]);
        assert_eq!(c2.genes()[24..], [1; 24]);

        let (c1, c2) = midpoint_crossover(&p1, &p2, &mut rng(), 0.0);
        assert_eq!((c1, c2), (p1.clone(), p2));

        let (c1, c2) = midpoint_crossover(&p1, &p1, &mut rng(), 1.0);
        assert_eq!((&c1, &c2), (&p1, &p1));
    }

    #[test]
    fn mutation_extremes() {
        let p = profile(&[3; 24], &[2; 24]);
        let cfg = StationConfig::default();
        let ind = Individual::new(vec![0; 48]).unwrap();
        let off = GaConfig {
            mutation_rate: 0.0,
            ..Default::default()
        };
        let mut r = rng();
        assert_eq!(mutate(ind.clone(), &p, &cfg, &off, &mut r), ind);

        let on = GaConfig {
            mutation_rate: 1.0,
            ..Default::default()
        };
        let mut r1 = rng();
        let m = mutate(ind.clone(), &p, &cfg, &on, &mut r1);
        // same stream, same draws: 48 triggers then a fresh individual
        let mut r2 = rng();
        for _ in 0..48 {
            r2.random_bool(1.0);
        }
        assert_eq!(m, generate_individual(&p, &cfg, Strategy::Lru, &mut r2));
        assert_ne!(m, ind);
    }
}
