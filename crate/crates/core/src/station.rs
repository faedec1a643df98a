//! Hour-by-hour inventory dynamics of a two-type battery swap station and
//! the cost, satisfaction and penalty terms used to score a charging plan.
//!
//! Within each hour, swaps happen first: the station hands out
//! `min(demand, full)` charged packs and takes back as many empties. Charging
//! then draws on the empties present after those swaps. A chromosome gene
//! that asks for more charges than there are empties is clamped (repaired) at
//! evaluation time.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::demand::DemandProfile;

pub const DEFAULT_M_A: u32 = 5;
pub const DEFAULT_M_B: u32 = 8;
pub const DEFAULT_TAU_S: f64 = 0.9;
pub const DEFAULT_TAU_1: f64 = 2.0;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("inventory capacity for type {0:?} must be at least 1")]
    ZeroCapacity(BatteryType),
    #[error("satisfaction floor must lie in (0, 1], got {0}")]
    InvalidFloor(f64),
    #[error("penalty must be finite and non-negative, got {0}")]
    InvalidPenalty(f64),
    #[error("individual must hold an even, non-zero number of genes, got {0}")]
    BadGeneCount(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BatteryType {
    A,
    B,
}

impl BatteryType {
    pub const ALL: [BatteryType; 2] = [BatteryType::A, BatteryType::B];

    pub fn other(self) -> Self {
        match self {
            BatteryType::A => BatteryType::B,
            BatteryType::B => BatteryType::A,
        }
    }
}

/// How user satisfaction enters the objective.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SatisfactionTerm {
    /// Adds `gamma` as printed in the objective.
    #[default]
    LiteralGamma,
    /// Adds `1 - gamma`, rewarding higher satisfaction.
    OneMinusGamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StationConfig {
    pub m_a: u32,
    pub m_b: u32,
    pub tau_s: f64,
    pub tau_1: f64,
    pub satisfaction_term: SatisfactionTerm,
}

impl Default for StationConfig {
    fn default() -> Self {
        Self {
            m_a: DEFAULT_M_A,
            m_b: DEFAULT_M_B,
            tau_s: DEFAULT_TAU_S,
            tau_1: DEFAULT_TAU_1,
            satisfaction_term: SatisfactionTerm::LiteralGamma,
        }
    }
}

impl StationConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.m_a == 0 {
            return Err(ConfigError::ZeroCapacity(BatteryType::A));
        }
        if self.m_b == 0 {
            return Err(ConfigError::ZeroCapacity(BatteryType::B));
        }
        if !(self.tau_s > 0.0 && self.tau_s <= 1.0) {
            return Err(ConfigError::InvalidFloor(self.tau_s));
        }
        if !(self.tau_1.is_finite() && self.tau_1 >= 0.0) {
            return Err(ConfigError::InvalidPenalty(self.tau_1));
        }
        Ok(())
    }

    pub fn capacity(&self, ty: BatteryType) -> u32 {
        match ty {
            BatteryType::A => self.m_a,
            BatteryType::B => self.m_b,
        }
    }
}

/// Hourly charging quantities: the first half of the genes is type A, the
/// second half type B. A 24-hour plan has 48 genes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Individual {
    genes: Vec<u32>,
}

impl TryFrom<Vec<u32>> for Individual {
    type Error = ConfigError;

    fn try_from(genes: Vec<u32>) -> Result<Self, Self::Error> {
        Individual::new(genes)
    }
}

impl From<Individual> for Vec<u32> {
    fn from(ind: Individual) -> Self {
        ind.genes
    }
}

impl Individual {
    pub fn new(genes: Vec<u32>) -> Result<Self, ConfigError> {
        if genes.is_empty() || !genes.len().is_multiple_of(2) {
            return Err(ConfigError::BadGeneCount(genes.len()));
        }
        Ok(Self { genes })
    }

    /// Builds an individual from per-type plans of equal length.
    ///
    /// # Panics
    /// If the plans differ in length or are empty.
    pub fn from_parts(a: &[u32], b: &[u32]) -> Self {
        assert_eq!(a.len(), b.len(), "per-type plans must share a horizon");
        assert!(!a.is_empty(), "empty plan");
        let mut genes = Vec::with_capacity(a.len() * 2);
        genes.extend_from_slice(a);
        genes.extend_from_slice(b);
        Self { genes }
    }

    pub fn zeros(horizon: usize) -> Self {
        Self {
            genes: vec![0; 2 * horizon],
        }
    }

    pub fn horizon(&self) -> usize {
        self.genes.len() / 2
    }

    pub fn genes(&self) -> &[u32] {
        &self.genes
    }

    pub fn plan(&self, ty: BatteryType) -> &[u32] {
        let h = self.horizon();
        match ty {
            BatteryType::A => &self.genes[..h],
            BatteryType::B => &self.genes[h..],
        }
    }

    /// Static bound: no gene exceeds its type's inventory capacity.
    pub fn within_capacity(&self, cfg: &StationConfig) -> bool {
        BatteryType::ALL
            .iter()
            .all(|&ty| self.plan(ty).iter().all(|&g| g <= cfg.capacity(ty)))
    }
}

/// Packs actually handed out: demand capped by the full packs on hand.
pub fn clamp_supply(demand: u32, full_prev: u32) -> u32 {
    demand.min(full_prev)
}

#[derive(Debug, Clone, Copy)]
struct HourState {
    supplied: u32,
    /// Empties available to charge, after this hour's swaps.
    available: u32,
    charged: u32,
    full: u32,
    empty: u32,
}

/// Steps one battery type through the horizon, calling `visit` with the
/// state at the end of every hour.
fn step_type(capacity: u32, demand: &[u32], plan: &[u32], mut visit: impl FnMut(usize, HourState)) {
    let mut full = capacity;
    let mut empty = 0u32;
    for (t, (&d, &gene)) in demand.iter().zip(plan).enumerate() {
        let supplied = clamp_supply(d, full);
        full -= supplied;
        empty += supplied;
        let available = empty;
        let charged = gene.min(empty);
        full += charged;
        empty -= charged;
        visit(
            t,
            HourState {
                supplied,
                available,
                charged,
                full,
                empty,
            },
        );
    }
}

/// Per-type hourly record of one simulated plan.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeTrace {
    pub demand: Vec<u32>,
    pub supplied: Vec<u32>,
    /// Empties on hand after the hour's swaps, before charging.
    pub available: Vec<u32>,
    /// Charges actually applied after repair.
    pub charge: Vec<u32>,
    pub full: Vec<u32>,
    pub empty: Vec<u32>,
}

impl TypeTrace {
    fn with_capacity(h: usize) -> Self {
        Self {
            demand: Vec::with_capacity(h),
            supplied: Vec::with_capacity(h),
            available: Vec::with_capacity(h),
            charge: Vec::with_capacity(h),
            full: Vec::with_capacity(h),
            empty: Vec::with_capacity(h),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationTrace {
    pub a: TypeTrace,
    pub b: TypeTrace,
    /// Price-weighted number of packs charged over the horizon.
    pub cost: f64,
    pub gamma: f64,
    pub penalty: f64,
}

impl SimulationTrace {
    pub fn of(&self, ty: BatteryType) -> &TypeTrace {
        match ty {
            BatteryType::A => &self.a,
            BatteryType::B => &self.b,
        }
    }

    /// The applied (repaired) charging plan.
    pub fn applied(&self) -> Individual {
        Individual::from_parts(&self.a.charge, &self.b.charge)
    }
}

fn demand_of(profile: &DemandProfile, ty: BatteryType) -> &[u32] {
    match ty {
        BatteryType::A => profile.demand_a(),
        BatteryType::B => profile.demand_b(),
    }
}

fn check_horizon(ind: &Individual, profile: &DemandProfile) {
    assert_eq!(
        ind.horizon(),
        profile.horizon(),
        "individual and profile horizons differ"
    );
}

/// Simulates the plan hour by hour.
///
/// # Panics
/// If the individual's horizon differs from the profile's.
pub fn simulate(ind: &Individual, profile: &DemandProfile, cfg: &StationConfig) -> SimulationTrace {
    check_horizon(ind, profile);
    let h = profile.horizon();
    let price = profile.price();
    let mut cost = 0.0;
    let mut charged_total = 0u64;
    let mut traces = [TypeTrace::with_capacity(h), TypeTrace::with_capacity(h)];
    for (ty, trace) in BatteryType::ALL.into_iter().zip(traces.iter_mut()) {
        let demand = demand_of(profile, ty);
        trace.demand.extend_from_slice(demand);
        step_type(cfg.capacity(ty), demand, ind.plan(ty), |t, s| {
            trace.supplied.push(s.supplied);
            trace.available.push(s.available);
            trace.charge.push(s.charged);
            trace.full.push(s.full);
            trace.empty.push(s.empty);
            cost += f64::from(s.charged) * price[t];
            charged_total += u64::from(s.charged);
        });
    }
    let gamma = gamma_of(charged_total, profile.total_demand());
    let [a, b] = traces;
    SimulationTrace {
        a,
        b,
        cost,
        gamma,
        penalty: penalty(gamma, cfg),
    }
}

fn gamma_of(charged: u64, demanded: u64) -> f64 {
    if demanded == 0 {
        1.0
    } else {
        charged as f64 / demanded as f64
    }
}

/// Total applied charges over total demand; 1 when nothing was demanded.
pub fn satisfaction(trace: &SimulationTrace, profile: &DemandProfile) -> f64 {
    let charged: u64 = trace
        .a
        .charge
        .iter()
        .chain(&trace.b.charge)
        .map(|&c| u64::from(c))
        .sum();
    gamma_of(charged, profile.total_demand())
}

pub fn penalty(gamma: f64, cfg: &StationConfig) -> f64 {
    if gamma >= cfg.tau_s {
        0.0
    } else {
        cfg.tau_1
    }
}

/// The plan that recharges every returned pack in the hour it comes back,
/// with its cost. That cost normalises the objective.
pub fn immediate_plan(profile: &DemandProfile, cfg: &StationConfig) -> (Individual, f64) {
    let h = profile.horizon();
    let price = profile.price();
    let mut plans = [Vec::with_capacity(h), Vec::with_capacity(h)];
    let mut cost = 0.0;
    for (ty, plan) in BatteryType::ALL.into_iter().zip(plans.iter_mut()) {
        let mut full = cfg.capacity(ty);
        let mut empty = 0u32;
        for (t, &d) in demand_of(profile, ty).iter().enumerate() {
            let supplied = clamp_supply(d, full);
            full -= supplied;
            empty += supplied;
            let charge = empty;
            full += charge;
            empty = 0;
            plan.push(charge);
            cost += f64::from(charge) * price[t];
        }
    }
    (Individual::from_parts(&plans[0], &plans[1]), cost)
}

/// Cost of the immediate strategy on this profile.
pub fn xi_max(profile: &DemandProfile, cfg: &StationConfig) -> f64 {
    immediate_plan(profile, cfg).1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub cost: f64,
    pub gamma: f64,
    pub penalty: f64,
    pub fitness: f64,
}

/// Objective value and its parts, without recording a trace. Lower fitness is
/// better. A zero `xi_max` makes the cost term zero.
pub fn score(ind: &Individual, profile: &DemandProfile, cfg: &StationConfig, xi_max: f64) -> Score {
    check_horizon(ind, profile);
    let price = profile.price();
    let mut cost = 0.0;
    let mut charged_total = 0u64;
    for ty in BatteryType::ALL {
        step_type(
            cfg.capacity(ty),
            demand_of(profile, ty),
            ind.plan(ty),
            |t, s| {
                cost += f64::from(s.charged) * price[t];
                charged_total += u64::from(s.charged);
            },
        );
    }
    let gamma = gamma_of(charged_total, profile.total_demand());
    let penalty = penalty(gamma, cfg);
    let cost_term = if xi_max > 0.0 { cost / xi_max } else { 0.0 };
    let satisfaction_term = match cfg.satisfaction_term {
        SatisfactionTerm::LiteralGamma => gamma,
        SatisfactionTerm::OneMinusGamma => 1.0 - gamma,
    };
    Score {
        cost,
        gamma,
        penalty,
        fitness: cost_term + satisfaction_term + penalty,
    }
}

pub fn fitness(ind: &Individual, profile: &DemandProfile, cfg: &StationConfig, xi_max: f64) -> f64 {
    score(ind, profile, cfg, xi_max).fitness
}

/// Clamps every gene to the empties available when it is applied.
pub fn repair(ind: &Individual, profile: &DemandProfile, cfg: &StationConfig) -> Individual {
    check_horizon(ind, profile);
    let h = profile.horizon();
    let mut genes = Vec::with_capacity(2 * h);
    for ty in BatteryType::ALL {
        step_type(
            cfg.capacity(ty),
            demand_of(profile, ty),
            ind.plan(ty),
            |_, s| genes.push(s.charged),
        );
    }
    Individual { genes }
}

/// Everything written to `plan.json` for one charging plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub a: TypeTrace,
    pub b: TypeTrace,
    pub price: Vec<f64>,
    pub cost: f64,
    pub gamma: f64,
    pub penalty: f64,
    pub fitness: f64,
    /// Cost of the immediate strategy (`C_is`).
    pub immediate_cost: f64,
    pub immediate_gamma: f64,
    /// `(C_is - C_ours) / C_is`, 0 when the immediate cost is 0.
    pub r_opt: f64,
    pub genes: Individual,
}

impl PlanReport {
    pub fn new(ind: &Individual, profile: &DemandProfile, cfg: &StationConfig) -> Self {
        let (imm, immediate_cost) = immediate_plan(profile, cfg);
        let imm_trace = simulate(&imm, profile, cfg);
        let trace = simulate(ind, profile, cfg);
        let s = score(ind, profile, cfg, immediate_cost);
        let r_opt = if immediate_cost > 0.0 {
            (immediate_cost - trace.cost) / immediate_cost
        } else {
            0.0
        };
        Self {
            genes: trace.applied(),
            price: profile.price().to_vec(),
            cost: trace.cost,
            gamma: trace.gamma,
            penalty: trace.penalty,
            fitness: s.fitness,
            immediate_cost,
            immediate_gamma: imm_trace.gamma,
            r_opt,
            a: trace.a,
            b: trace.b,
        }
    }
}
