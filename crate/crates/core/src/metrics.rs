//! Quality metrics for an estimated hourly demand series: trend stability,
//! period matching against expected cycles, and the 3-sigma outlier ratio.

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_WINDOW_HOURS: usize = 24;
pub const DEFAULT_PERIODS: [f64; 2] = [24.0, 168.0];
pub const DEFAULT_TOP_K: usize = 2;

/// Spectral bins below this fraction of `N * max|x|` are treated as
/// numerical noise rather than peaks.
const PEAK_FLOOR: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("series of {got} points is too short, need at least {need}")]
    TooShort { got: usize, need: usize },
    #[error("window must be at least 2 hours, got {0}")]
    InvalidWindow(usize),
    #[error("expected period list is empty")]
    NoPeriods,
    #[error("expected periods must be positive and finite: {0:?}")]
    InvalidPeriods(Vec<f64>),
    #[error("top_k must be at least 1")]
    InvalidTopK,
    #[error("series contains a non-finite value at index {0}")]
    NonFinite(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub s_m: f64,
    pub p_m: f64,
    pub o_m: f64,
    #[serde(rename = "window")]
    pub window_hours: usize,
    #[serde(rename = "periods")]
    pub expected_periods: Vec<f64>,
}

fn check_finite(series: &[f64]) -> Result<(), MetricsError> {
    match series.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(MetricsError::NonFinite(i)),
        None => Ok(()),
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn population_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Least-squares slope of `ys` against 0, 1, ..., len - 1.
fn ols_slope(ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    let x_mean = (n - 1.0) / 2.0;
    let y_mean = mean(ys);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        let dx = i as f64 - x_mean;
        sxy += dx * (y - y_mean);
        sxx += dx * dx;
    }
    sxy / sxx
}

/// Population standard deviation of per-window OLS slopes over consecutive,
/// non-overlapping windows. A trailing partial window is dropped.
pub fn trend_stability(series: &[f64], window_hours: usize) -> Result<f64, MetricsError> {
    if window_hours < 2 {
        return Err(MetricsError::InvalidWindow(window_hours));
    }
    if series.len() < 2 * window_hours {
        return Err(MetricsError::TooShort {
            got: series.len(),
            need: 2 * window_hours,
        });
    }
    check_finite(series)?;
    let slopes: Vec<f64> = series.chunks_exact(window_hours).map(ols_slope).collect();
    Ok(population_std(&slopes))
}

/// Amplitude `|X_k|` of the DFT of `series` for k = 0..=N/2.
fn amplitude_spectrum(series: &[f64]) -> Vec<f64> {
    let n = series.len();
    let mut buf: Vec<Complex<f64>> = series.iter().map(|&x| Complex::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf[..=n / 2].iter().map(|c| c.norm()).collect()
}

/// Non-DC local maxima of the amplitude spectrum, strongest first, as
/// `(bin, amplitude)`. Equal amplitudes keep the lower bin first.
pub fn spectral_peaks(amplitudes: &[f64], floor: f64) -> Vec<(usize, f64)> {
    let last = amplitudes.len().saturating_sub(1);
    let mut peaks: Vec<(usize, f64)> = (1..=last)
        .filter(|&k| {
            let a = amplitudes[k];
            let left_ok = k == 1 || a > amplitudes[k - 1];
            let right_ok = k == last || a >= amplitudes[k + 1];
            a > floor && left_ok && right_ok
        })
        .map(|k| (k, amplitudes[k]))
        .collect();
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    peaks
}

/// Cosine similarity between the detected-period vector and an all-ones
/// expected vector, both indexed by `expected_periods`.
///
/// The series is mean-centred and its `top_k` strongest spectral peaks are
/// converted to periods `N / k`. Entry `i` of the detected vector is the
/// amplitude (relative to the strongest selected peak) of the best peak whose
/// period lies within one sample of `expected_periods[i]`, or 0.
pub fn period_match(
    series: &[f64],
    expected_periods: &[f64],
    top_k: usize,
) -> Result<f64, MetricsError> {
    if expected_periods.is_empty() {
        return Err(MetricsError::NoPeriods);
    }
    if !expected_periods.iter().all(|p| p.is_finite() && *p > 0.0) {
        return Err(MetricsError::InvalidPeriods(expected_periods.to_vec()));
    }
    if top_k == 0 {
        return Err(MetricsError::InvalidTopK);
    }
    let longest = expected_periods.iter().copied().fold(0.0, f64::max);
    let need = longest.ceil() as usize;
    if series.len() < need.max(2) {
        return Err(MetricsError::TooShort {
            got: series.len(),
            need: need.max(2),
        });
    }
    check_finite(series)?;

    let n = series.len();
    let m = mean(series);
    let centred: Vec<f64> = series.iter().map(|x| x - m).collect();
    let scale = series.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let floor = PEAK_FLOOR * n as f64 * scale;

    let peaks = spectral_peaks(&amplitude_spectrum(&centred), floor);
    let selected = &peaks[..top_k.min(peaks.len())];
    let Some(&(_, strongest)) = selected.first() else {
        return Ok(0.0);
    };

    let detected: Vec<f64> = expected_periods
        .iter()
        .map(|&p| {
            selected
                .iter()
                .filter(|(k, _)| (n as f64 / *k as f64 - p).abs() <= 1.0)
                .map(|(_, a)| a / strongest)
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(cosine_to_ones(&detected))
}

fn cosine_to_ones(a: &[f64]) -> f64 {
    let dot: f64 = a.iter().sum();
    let norm_a = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm_a == 0.0 {
        return 0.0;
    }
    (dot / (norm_a * (a.len() as f64).sqrt())).clamp(0.0, 1.0)
}

/// Fraction of points outside the open interval (mu - 3 sigma, mu + 3 sigma)
/// using the population standard deviation. Zero when sigma is zero.
pub fn outlier_ratio(series: &[f64]) -> Result<f64, MetricsError> {
    if series.len() < 2 {
        return Err(MetricsError::TooShort {
            got: series.len(),
            need: 2,
        });
    }
    check_finite(series)?;
    let mu = mean(series);
    let sigma = population_std(series);
    if sigma == 0.0 {
        return Ok(0.0);
    }
    let (lo, hi) = (mu - 3.0 * sigma, mu + 3.0 * sigma);
    let outliers = series.iter().filter(|&&x| x <= lo || x >= hi).count();
    Ok(outliers as f64 / series.len() as f64)
}

pub fn evaluate_dataset(
    series: &[f64],
    window_hours: usize,
    expected_periods: &[f64],
    top_k: usize,
) -> Result<MetricsReport, MetricsError> {
    Ok(MetricsReport {
        s_m: trend_stability(series, window_hours)?,
        p_m: period_match(series, expected_periods, top_k)?,
        o_m: outlier_ratio(series)?,
        window_hours,
        expected_periods: expected_periods.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sinusoid(n: usize, period: f64) -> Vec<f64> {
        (0..n)
            .map(|t| (2.0 * PI * t as f64 / period).sin())
            .collect()
    }

    #[test]
    fn perfect_line_is_stable() {
        let ys: Vec<f64> = (0..96).map(|t| 3.0 * t as f64).collect();
        assert!(trend_stability(&ys, 24).unwrap() < 1e-12);
    }

    #[test]
    fn two_slopes_give_unit_spread() {
        // slope 1 then slope 3; population std of {1, 3} is 1
        let mut ys: Vec<f64> = (0..24).map(|t| t as f64).collect();
        ys.extend((0..24).map(|t| 100.0 + 3.0 * t as f64));
        assert!((trend_stability(&ys, 24).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partial_window_dropped() {
        let mut ys = vec![2.0; 48];
        ys.extend([0.0, 50.0, -9.0]);
        assert_eq!(trend_stability(&ys, 24), Ok(0.0));
    }

    #[test]
    fn trend_needs_two_windows() {
        assert_eq!(
            trend_stability(&[1.0; 47], 24),
            Err(MetricsError::TooShort { got: 47, need: 48 })
        );
        assert!(matches!(
            trend_stability(&[1.0; 10], 1),
            Err(MetricsError::InvalidWindow(1))
        ));
    }

    #[test]
    fn constant_series_has_no_period() {
        assert_eq!(period_match(&[0.1; 336], &DEFAULT_PERIODS, 2), Ok(0.0));
        assert_eq!(period_match(&[7.0; 168], &DEFAULT_PERIODS, 2), Ok(0.0));
    }

    #[test]
    fn period_match_input_checks() {
        assert_eq!(
            period_match(&[1.0; 400], &[], 2),
            Err(MetricsError::NoPeriods)
        );
        assert_eq!(
            period_match(&[1.0; 400], &[24.0], 0),
            Err(MetricsError::InvalidTopK)
        );
        assert!(matches!(
            period_match(&[1.0; 100], &DEFAULT_PERIODS, 2),
            Err(MetricsError::TooShort { need: 168, .. })
        ));
    }

    #[test]
    fn single_daily_cycle_matches_half() {
        let p = period_match(&sinusoid(336, 24.0), &DEFAULT_PERIODS, 2).unwrap();
        assert!((p - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6, "{p}");
    }

    #[test]
    fn off_grid_period_within_one_sample() {
        // 336 / 14 = 24 exactly; 300 / 12 = 25 is within one sample of 24
        let p = period_match(&sinusoid(300, 25.0), &[24.0], 1).unwrap();
        assert!((p - 1.0).abs() < 1e-12);
        let p = period_match(&sinusoid(300, 30.0), &[24.0], 1).unwrap();
        assert_eq!(p, 0.0);
    }

    #[test]
    fn outlier_examples() {
        assert_eq!(outlier_ratio(&[4.0; 50]), Ok(0.0));
        let mut xs = vec![0.0; 99];
        xs.push(100.0);
        assert_eq!(outlier_ratio(&xs), Ok(0.01));
        let alt: Vec<f64> = (0..100)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        assert_eq!(outlier_ratio(&alt), Ok(0.0));
        assert!(outlier_ratio(&[1.0]).is_err());
    }

    #[test]
    fn evaluate_composes() {
        let r = evaluate_dataset(&[5.0; 168], 24, &DEFAULT_PERIODS, 2).unwrap();
        assert_eq!((r.s_m, r.p_m, r.o_m), (0.0, 0.0, 0.0));
        assert_eq!(r.window_hours, 24);

        let r = evaluate_dataset(&sinusoid(336, 24.0), 24, &DEFAULT_PERIODS, 2).unwrap();
        assert!((r.p_m - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
        assert_eq!(r.o_m, 0.0);
    }

    #[test]
    fn ramp_plus_daily_cycle_has_stable_trend() {
        let ys: Vec<f64> = (0..336)
            .map(|t| 0.5 * t as f64 + (2.0 * PI * t as f64 / 24.0).sin())
            .collect();
        assert!(trend_stability(&ys, 24).unwrap() < 1e-12);
    }

    #[test]
    fn non_finite_rejected() {
        let mut ys = vec![1.0; 400];
        ys[7] = f64::NAN;
        assert_eq!(outlier_ratio(&ys), Err(MetricsError::NonFinite(7)));
    }
}
