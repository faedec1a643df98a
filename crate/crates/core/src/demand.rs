//! Swap-demand estimation from charging sessions.
//!
//! Each session contributes a logistic swap probability computed from its
//! charging duration, charged energy and the station's swap time. Hourly
//! expected demand is the sum of those probabilities over the hour's
//! arrivals, which equals `p * lambda` when all arrivals share features and
//! the hourly count is a Poisson draw with rate `lambda`.

use chrono::{Datelike, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{hour_offset, hour_span, ChargingSession, PriceSeries, HOURS_PER_DAY};

pub const DEFAULT_THETA: [f64; 3] = [0.08, 0.08, -0.8];
pub const DEFAULT_SWAP_TIME_MINUTES: f64 = 5.0;
/// Share of type-A packs in a 5 + 8 pack station.
pub const DEFAULT_RATIO_A: f64 = 5.0 / 13.0;

const HOURS_PER_WEEK: usize = 168;
const POISSON_TAIL_LIMIT: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("feature vector must be finite and non-negative: {0:?}")]
    InvalidFeatures([f64; 3]),
    #[error("model parameters invalid: {0}")]
    InvalidParams(String),
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("poisson rate {0} must be finite and non-negative")]
    InvalidRate(f64),
    #[error(
        "truncation at n = {n} leaves poisson tail mass {tail:e} (limit {POISSON_TAIL_LIMIT:e})"
    )]
    TruncationTooShort { n: u32, tail: f64 },
    #[error("no sessions to estimate from")]
    Empty,
    #[error("type-A ratio {0} outside [0, 1]")]
    InvalidRatio(f64),
    #[error("demand series has {got} hours from offset {start}, need {need}")]
    SeriesTooShort {
        got: usize,
        start: usize,
        need: usize,
    },
    #[error("price series is empty")]
    EmptyPrices,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// Weights for charging duration, charged energy and swap time.
    pub theta: [f64; 3],
    pub swap_time_minutes: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            theta: DEFAULT_THETA,
            swap_time_minutes: DEFAULT_SWAP_TIME_MINUTES,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.theta.iter().all(|t| t.is_finite()) {
            return Err(ModelError::InvalidParams(format!(
                "theta must be finite, got {:?}",
                self.theta
            )));
        }
        if !(self.swap_time_minutes.is_finite() && self.swap_time_minutes > 0.0) {
            return Err(ModelError::InvalidParams(format!(
                "swap time must be positive, got {}",
                self.swap_time_minutes
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    pub t_sum: f64,
    pub v_sum: f64,
    pub c_r: f64,
}

impl FeatureVector {
    pub fn new(t_sum: f64, v_sum: f64, c_r: f64) -> Self {
        Self { t_sum, v_sum, c_r }
    }

    pub fn of_session(session: &ChargingSession, params: &ModelParams) -> Self {
        Self::new(
            session.duration_minutes,
            session.energy_kwh,
            params.swap_time_minutes,
        )
    }

    fn as_array(&self) -> [f64; 3] {
        [self.t_sum, self.v_sum, self.c_r]
    }
}

/// Logistic function, evaluated without overflow for any finite `z`.
pub fn logistic(z: f64) -> f64 {
    let e = (-z.abs()).exp();
    if z >= 0.0 {
        1.0 / (1.0 + e)
    } else {
        e / (1.0 + e)
    }
}

pub fn swap_probability(x: &FeatureVector, params: &ModelParams) -> Result<f64, ModelError> {
    let xs = x.as_array();
    if !xs.iter().all(|v| v.is_finite() && *v >= 0.0) {
        return Err(ModelError::InvalidFeatures(xs));
    }
    params.validate()?;
    let z: f64 = params.theta.iter().zip(xs).map(|(t, v)| t * v).sum();
    Ok(logistic(z))
}

fn check_prob_rate(prob: f64, lambda: f64) -> Result<(), ModelError> {
    if !(0.0..=1.0).contains(&prob) {
        return Err(ModelError::InvalidProbability(prob));
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(ModelError::InvalidRate(lambda));
    }
    Ok(())
}

/// Expected swaps per period under Poisson arrivals: `prob * lambda`.
pub fn expected_demand_poisson(prob: f64, lambda: f64) -> Result<f64, ModelError> {
    check_prob_rate(prob, lambda)?;
    Ok(prob * lambda)
}

/// Expected swaps by explicit summation over the arrival count,
/// `sum_{n=0..=truncation_n} n * prob * P(N = n)`.
///
/// Fails when the Poisson mass beyond `truncation_n` is not negligible.
pub fn expected_demand_total_expectation(
    prob: f64,
    lambda: f64,
    truncation_n: u32,
) -> Result<f64, ModelError> {
    check_prob_rate(prob, lambda)?;
    if lambda == 0.0 {
        return Ok(0.0);
    }
    // pmf(n) = pmf(n-1) * lambda / n, starting from exp(-lambda)
    let mut pmf = (-lambda).exp();
    let mut sum = 0.0;
    for n in 1..=truncation_n {
        pmf *= lambda / f64::from(n);
        sum += f64::from(n) * prob * pmf;
    }
    let tail = poisson_tail(lambda, truncation_n, pmf);
    if tail >= POISSON_TAIL_LIMIT {
        return Err(ModelError::TruncationTooShort {
            n: truncation_n,
            tail,
        });
    }
    Ok(sum)
}

/// Mass of P(N > n) given pmf(n).
fn poisson_tail(lambda: f64, n: u32, pmf_n: f64) -> f64 {
    let mut term = pmf_n;
    let mut tail = 0.0;
    let mut k = f64::from(n);
    loop {
        k += 1.0;
        term *= lambda / k;
        tail += term;
        // past the mode, terms shrink geometrically
        if k > lambda && (term == 0.0 || term < tail * 1e-17) {
            return tail;
        }
    }
}

pub fn round_half_up(x: f64) -> u32 {
    (x + 0.5).floor().max(0.0) as u32
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandSeries {
    pub origin: NaiveDateTime,
    /// Arrival count per hour, the empirical Poisson rate.
    pub lambda: Vec<f64>,
    pub expected: Vec<f64>,
    pub rounded: Vec<u32>,
}

impl DemandSeries {
    pub fn from_expected(origin: NaiveDateTime, lambda: Vec<f64>, expected: Vec<f64>) -> Self {
        let rounded = expected.iter().map(|&e| round_half_up(e)).collect();
        Self {
            origin,
            lambda,
            expected,
            rounded,
        }
    }

    pub fn len(&self) -> usize {
        self.expected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.expected.is_empty()
    }
}

/// How the hourly rate is formed from arrival counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaSmoothing {
    /// Raw hourly count.
    #[default]
    None,
    /// Mean over all hours sharing the same hour of week.
    HourOfWeek,
}

pub fn estimate_demand_series(
    sessions: &[ChargingSession],
    params: &ModelParams,
    smoothing: LambdaSmoothing,
) -> Result<DemandSeries, ModelError> {
    let (origin, len) = hour_span(sessions).ok_or(ModelError::Empty)?;
    let mut lambda = vec![0.0; len];
    let mut expected = vec![0.0; len];
    for s in sessions {
        let h = hour_offset(origin, s.start_time);
        lambda[h] += 1.0;
        expected[h] += swap_probability(&FeatureVector::of_session(s, params), params)?;
    }
    if smoothing == LambdaSmoothing::HourOfWeek {
        let phase = hour_of_week(origin);
        lambda = average_by_hour_of_week(&lambda, phase);
        expected = average_by_hour_of_week(&expected, phase);
    }
    Ok(DemandSeries::from_expected(origin, lambda, expected))
}

fn hour_of_week(t: NaiveDateTime) -> usize {
    t.weekday().num_days_from_monday() as usize * 24 + t.hour() as usize
}

/// Replaces each value with the mean of all values at the same hour of
/// week. Averaging the summed probabilities this way equals the pooled mean
/// probability times the pooled mean rate.
fn average_by_hour_of_week(values: &[f64], phase: usize) -> Vec<f64> {
    let mut sums = [0.0; HOURS_PER_WEEK];
    let mut counts = [0usize; HOURS_PER_WEEK];
    for (i, v) in values.iter().enumerate() {
        let k = (phase + i) % HOURS_PER_WEEK;
        sums[k] += v;
        counts[k] += 1;
    }
    (0..values.len())
        .map(|i| {
            let k = (phase + i) % HOURS_PER_WEEK;
            sums[k] / counts[k] as f64
        })
        .collect()
}

/// Integer demand per battery type with the matching hourly prices.
///
/// Profiles built from data span 24 hours; shorter horizons are accepted for
/// toy problems and exhaustive checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandProfile {
    demand_a: Vec<u32>,
    demand_b: Vec<u32>,
    price: Vec<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ProfileError {
    #[error("profile series lengths differ: a={a}, b={b}, price={price}")]
    LengthMismatch { a: usize, b: usize, price: usize },
    #[error("profile horizon must be at least one hour")]
    Empty,
    #[error("daily profile must span {HOURS_PER_DAY} hours, got {0}")]
    NotDaily(usize),
    #[error("price at hour {hour} is {price}; prices must be finite and non-negative")]
    InvalidPrice { hour: usize, price: f64 },
}

impl DemandProfile {
    /// A 24-hour profile.
    pub fn daily(
        demand_a: Vec<u32>,
        demand_b: Vec<u32>,
        price: Vec<f64>,
    ) -> Result<Self, ProfileError> {
        let p = Self::with_horizon(demand_a, demand_b, price)?;
        if p.horizon() != HOURS_PER_DAY {
            return Err(ProfileError::NotDaily(p.horizon()));
        }
        Ok(p)
    }

    pub fn with_horizon(
        demand_a: Vec<u32>,
        demand_b: Vec<u32>,
        price: Vec<f64>,
    ) -> Result<Self, ProfileError> {
        if demand_a.len() != demand_b.len() || demand_a.len() != price.len() {
            return Err(ProfileError::LengthMismatch {
                a: demand_a.len(),
                b: demand_b.len(),
                price: price.len(),
            });
        }
        if demand_a.is_empty() {
            return Err(ProfileError::Empty);
        }
        if let Some((hour, &price)) = price
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.is_finite() && **p >= 0.0))
        {
            return Err(ProfileError::InvalidPrice { hour, price });
        }
        Ok(Self {
            demand_a,
            demand_b,
            price,
        })
    }

    pub fn zero(horizon: usize) -> Self {
        Self {
            demand_a: vec![0; horizon],
            demand_b: vec![0; horizon],
            price: vec![1.0; horizon],
        }
    }

    pub fn horizon(&self) -> usize {
        self.demand_a.len()
    }

    pub fn demand_a(&self) -> &[u32] {
        &self.demand_a
    }

    pub fn demand_b(&self) -> &[u32] {
        &self.demand_b
    }

    pub fn price(&self) -> &[f64] {
        &self.price
    }

    pub fn total_demand(&self) -> u64 {
        self.demand_a
            .iter()
            .chain(&self.demand_b)
            .map(|&d| u64::from(d))
            .sum()
    }
}

/// Per-hour split of a whole demand series, before windowing to a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSeries {
    pub expected: Vec<f64>,
    pub demand_a: Vec<u32>,
    pub demand_b: Vec<u32>,
    pub price: Vec<f64>,
}

impl SplitSeries {
    pub fn len(&self) -> usize {
        self.expected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.expected.is_empty()
    }

    /// The `hours`-long window starting at `start` as an optimizable profile.
    pub fn window(&self, start: usize, hours: usize) -> Result<DemandProfile, ModelError> {
        if start + hours > self.len() || hours == 0 {
            return Err(ModelError::SeriesTooShort {
                got: self.len(),
                start,
                need: hours,
            });
        }
        let r = start..start + hours;
        Ok(DemandProfile::with_horizon(
            self.demand_a[r.clone()].to_vec(),
            self.demand_b[r.clone()].to_vec(),
            self.price[r].to_vec(),
        )
        .expect("split series entries are validated"))
    }
}

fn check_ratio(ratio_a: f64) -> Result<(), ModelError> {
    if !(0.0..=1.0).contains(&ratio_a) {
        return Err(ModelError::InvalidRatio(ratio_a));
    }
    Ok(())
}

/// Splits total hourly demand `d` into `round_half_up(ratio_a * d)` type-A
/// swaps and the remainder as type B, aligning prices to each hour.
pub fn split_series(
    series: &DemandSeries,
    ratio_a: f64,
    prices: &PriceSeries,
) -> Result<SplitSeries, ModelError> {
    check_ratio(ratio_a)?;
    if prices.hourly_price.is_empty() {
        return Err(ModelError::EmptyPrices);
    }
    let origin_hour = series.origin.hour();
    let (demand_a, demand_b) = series
        .rounded
        .iter()
        .map(|&d| {
            let a = round_half_up(ratio_a * f64::from(d)).min(d);
            (a, d - a)
        })
        .unzip();
    let price = (0..series.len())
        .map(|i| prices.price_for(origin_hour, i))
        .collect();
    Ok(SplitSeries {
        expected: series.expected.clone(),
        demand_a,
        demand_b,
        price,
    })
}

/// The first 24 hours of `series` split by battery type.
pub fn split_demand(
    series: &DemandSeries,
    ratio_a: f64,
    prices: &PriceSeries,
) -> Result<DemandProfile, ModelError> {
    check_ratio(ratio_a)?;
    if series.len() < HOURS_PER_DAY {
        return Err(ModelError::SeriesTooShort {
            got: series.len(),
            start: 0,
            need: HOURS_PER_DAY,
        });
    }
    split_series(series, ratio_a, prices)?.window(0, HOURS_PER_DAY)
}
