//! Optional TOML defaults. Command-line flags override the file, the file
//! overrides built-in defaults.
//!
//! ```toml
//! [model]
//! theta = [0.08, 0.08, -0.8]
//! swap_time_minutes = 5.0
//! ratio_a = 0.3846
//!
//! [station]
//! m_a = 5
//! m_b = 8
//!
//! [ga]
//! population_size = 100
//! max_iterations = 500
//! ```

use std::path::Path;

use serde::Deserialize;
use swapsched::demand::{LambdaSmoothing, ModelParams, DEFAULT_RATIO_A};
use swapsched::ingest::{ParseOptions, PriceKind};
use swapsched::metrics::{DEFAULT_PERIODS, DEFAULT_TOP_K, DEFAULT_WINDOW_HOURS};
use swapsched::{GaConfig, StationConfig};

use crate::error::{Classify, Result};

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "SWAPSCHED_CONFIG";

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub model: ModelSection,
    pub ingest: IngestSection,
    pub station: StationConfig,
    pub ga: GaConfig,
    pub metrics: MetricsSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub theta: [f64; 3],
    pub swap_time_minutes: f64,
    pub ratio_a: f64,
    pub lambda_smoothing: LambdaSmoothing,
}

impl Default for ModelSection {
    fn default() -> Self {
        let p = ModelParams::default();
        Self {
            theta: p.theta,
            swap_time_minutes: p.swap_time_minutes,
            ratio_a: DEFAULT_RATIO_A,
            lambda_smoothing: LambdaSmoothing::None,
        }
    }
}

// flatten and deny_unknown_fields do not mix
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default)]
pub struct IngestSection {
    #[serde(flatten)]
    pub options: ParseOptions,
    pub price_kind: PriceKind,
}

impl Default for IngestSection {
    fn default() -> Self {
        Self {
            options: ParseOptions::default(),
            price_kind: PriceKind::Daily,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsSection {
    pub window: usize,
    pub periods: Vec<f64>,
    pub top_k: usize,
}

impl Default for MetricsSection {
    fn default() -> Self {
        Self {
            window: DEFAULT_WINDOW_HOURS,
            periods: DEFAULT_PERIODS.to_vec(),
            top_k: DEFAULT_TOP_K,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).data(format!("reading config {}", path.display()))?;
        toml::from_str(&text).data(format!("parsing config {}", path.display()))
    }
}
