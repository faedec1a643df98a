//! Demand estimation and charging-schedule optimization for battery swap
//! stations.
//!
//! The pipeline runs in four stages:
//!
//! * [`ingest`] reads charging-pile sessions and electricity prices;
//! * [`demand`] turns sessions into expected hourly swap demand and splits it
//!   between two battery types;
//! * [`metrics`] scores an estimated series for trend stability,
//!   periodicity and outliers;
//! * [`station`] and [`ga`] simulate the station and search for a cheap
//!   24-hour charging plan.
//!
//! With the default `parallel` feature, population evaluation and
//! multi-seed comparisons run on rayon. Results are identical either way.

pub mod demand;
pub mod exec;
pub mod ga;
pub mod ingest;
pub mod metrics;
pub mod station;
pub mod synthetic;

pub use demand::{DemandProfile, DemandSeries, ModelParams};
pub use exec::Exec;
pub use ga::{GaConfig, RunResult, Strategy};
pub use ingest::{ChargingSession, PriceSeries};
pub use metrics::MetricsReport;
pub use station::{Individual, SimulationTrace, StationConfig};
