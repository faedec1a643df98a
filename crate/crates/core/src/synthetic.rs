//! Seeded synthetic demand profiles for benchmarks and acceptance runs.
//!
//! A region has a two-peak daily demand curve (morning and evening rush)
//! with per-hour Poisson noise, a type mix that drifts between A-heavy and
//! B-heavy through the day, and a three-level time-of-use tariff.
//!
//! Regions are drawn until the station is under pressure: the immediate
//! strategy must satisfy between the satisfaction floor and
//! [`MAX_IMMEDIATE_SATISFACTION`] of demand. Quieter days can be served
//! without planning, and busier ones admit no plan that meets the floor.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::demand::DemandProfile;
use crate::ingest::HOURS_PER_DAY;
use crate::station::{immediate_plan, simulate, StationConfig};

/// Seeds of the ten reference regions.
pub const REGION_SEEDS: [u64; 10] = [1001, 1002, 1003, 1004, 1005, 1006, 1007, 1008, 1009, 1010];

/// A region is demand-intensive when charging every pack straight away
/// still serves at most this share of demand, but no less than the
/// satisfaction floor.
pub const MAX_IMMEDIATE_SATISFACTION: f64 = 0.95;

const MAX_DRAWS: usize = 10_000;
pub const PEAK_PRICE: f64 = 1.2;
pub const SHOULDER_PRICE: f64 = 0.8;
pub const VALLEY_PRICE: f64 = 0.4;

/// Three-level tariff: valley 23:00-07:00, peak 08:00-11:00 and
/// 17:00-21:00, shoulder otherwise.
pub fn time_of_use_price(hour: usize) -> f64 {
    match hour % 24 {
        0..=6 | 23 => VALLEY_PRICE,
        8..=10 | 17..=20 => PEAK_PRICE,
        _ => SHOULDER_PRICE,
    }
}

fn gaussian_bump(hour: f64, centre: f64, width: f64) -> f64 {
    (-(hour - centre).powi(2) / (2.0 * width * width)).exp()
}

/// Knuth's product method; rates here stay small.
fn poisson<R: Rng>(rng: &mut R, rate: f64) -> u32 {
    let limit = (-rate).exp();
    let mut k = 0;
    let mut p: f64 = rng.random();
    while p > limit {
        k += 1;
        p *= rng.random::<f64>();
    }
    k
}

/// Demand-intensive daily profile for `seed` under `station`.
///
/// # Panics
/// If no intensive profile turns up; see [`try_synthetic_region`].
pub fn synthetic_region(seed: u64, station: &StationConfig) -> DemandProfile {
    try_synthetic_region(seed, station).unwrap_or_else(|| {
        panic!("no demand-intensive region found for seed {seed} and {station:?}")
    })
}

/// Like [`synthetic_region`], but `None` when no draw within a bounded
/// budget is intensive enough, which happens for stations far larger than
/// the demand curve supports.
pub fn try_synthetic_region(seed: u64, station: &StationConfig) -> Option<DemandProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let band = station.tau_s..=MAX_IMMEDIATE_SATISFACTION;
    (0..MAX_DRAWS).map(|_| draw_region(&mut rng)).find(|p| {
        let (imm, _) = immediate_plan(p, station);
        band.contains(&simulate(&imm, p, station).gamma)
    })
}

fn draw_region<R: Rng>(rng: &mut R) -> DemandProfile {
    let base: f64 = rng.random_range(1.0..3.0);
    let peak: f64 = rng.random_range(4.0..8.0);
    let morning: f64 = rng.random_range(7.0..9.5);
    let evening: f64 = rng.random_range(17.0..19.5);
    // share of type A swings between A-heavy and B-heavy over the day
    let mix_centre: f64 = rng.random_range(0.35..0.65);
    let mix_swing: f64 = rng.random_range(0.2..0.35);
    let mix_phase: f64 = rng.random_range(0.0..24.0);

    let mut demand_a = Vec::with_capacity(HOURS_PER_DAY);
    let mut demand_b = Vec::with_capacity(HOURS_PER_DAY);
    for h in 0..HOURS_PER_DAY {
        let t = h as f64;
        let rate = base + peak * (gaussian_bump(t, morning, 1.5) + gaussian_bump(t, evening, 2.0));
        let total = poisson(rng, rate);
        let share = (mix_centre
            + mix_swing * (2.0 * std::f64::consts::PI * (t - mix_phase) / 24.0).sin())
        .clamp(0.0, 1.0);
        let a = (0..total).filter(|_| rng.random_bool(share)).count() as u32;
        demand_a.push(a);
        demand_b.push(total - a);
    }
    let price = (0..HOURS_PER_DAY).map(time_of_use_price).collect();
    DemandProfile::daily(demand_a, demand_b, price).expect("synthetic profile is well formed")
}

/// Moderate, steady demand under a tariff with a deep overnight valley and a
/// long expensive day, so deferring charges pays off.
pub fn valley_profile() -> DemandProfile {
    let demand_a: Vec<u32> = (0..HOURS_PER_DAY)
        .map(|h| if (6..22).contains(&h) { 1 } else { 0 })
        .collect();
    let demand_b: Vec<u32> = (0..HOURS_PER_DAY)
        .map(|h| match h {
            7..=9 | 17..=19 => 2,
            10..=16 => 1,
            _ => 0,
        })
        .collect();
    let price = (0..HOURS_PER_DAY)
        .map(|h| match h {
            0..=5 | 22 | 23 => 0.6,
            _ => 1.0,
        })
        .collect();
    DemandProfile::daily(demand_a, demand_b, price).expect("valley profile is well formed")
}
