//! Fully resolved invocations. A manifest records everything a command
//! depends on, so re-running it reproduces the outputs byte for byte.

use std::fs::File;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use swapsched::demand::{LambdaSmoothing, ModelParams};
use swapsched::ingest::{ParseOptions, PriceKind};
use swapsched::{GaConfig, StationConfig, Strategy};

use crate::error::{Classify, Result};

pub const TOOL: &str = "swapsched";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileSource {
    /// A 24-hour window of a demand.csv, starting at row `start`.
    Demand {
        path: PathBuf,
        start: usize,
    },
    Synthetic {
        seed: u64,
    },
    Valley,
}

impl ProfileSource {
    pub fn name(&self) -> String {
        match self {
            ProfileSource::Demand { path, start } => {
                let stem = path
                    .file_stem()
                    .map_or_else(|| "demand".into(), |s| s.to_string_lossy());
                if *start == 0 {
                    stem.into_owned()
                } else {
                    format!("{stem}@{start}")
                }
            }
            ProfileSource::Synthetic { seed } => format!("synthetic-{seed}"),
            ProfileSource::Valley => "valley".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateParams {
    pub sessions: PathBuf,
    pub prices: Option<PathBuf>,
    pub price_kind: PriceKind,
    pub ingest: ParseOptions,
    pub model: ModelParams,
    pub ratio_a: f64,
    pub lambda_smoothing: LambdaSmoothing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsParams {
    pub demand: PathBuf,
    pub window: usize,
    pub periods: Vec<f64>,
    pub top_k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeParams {
    pub source: ProfileSource,
    pub station: StationConfig,
    pub ga: GaConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineParams {
    pub source: ProfileSource,
    pub station: StationConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareParams {
    pub regions: Vec<ProfileSource>,
    pub seeds: Vec<u64>,
    pub strategies: [Strategy; 2],
    pub station: StationConfig,
    /// Search settings; `seed` and `strategy` are taken from the lists above.
    pub ga: GaConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "params", rename_all = "snake_case")]
pub enum Invocation {
    Estimate(EstimateParams),
    Metrics(MetricsParams),
    Optimize(OptimizeParams),
    Baseline(BaselineParams),
    Compare(CompareParams),
}

impl Invocation {
    /// Files the command reads.
    pub fn inputs(&self) -> Vec<&Path> {
        fn source(s: &ProfileSource) -> Option<&Path> {
            match s {
                ProfileSource::Demand { path, .. } => Some(path),
                _ => None,
            }
        }
        match self {
            Invocation::Estimate(p) => std::iter::once(p.sessions.as_path())
                .chain(p.prices.as_deref())
                .collect(),
            Invocation::Metrics(p) => vec![&p.demand],
            Invocation::Optimize(p) => source(&p.source).into_iter().collect(),
            Invocation::Baseline(p) => source(&p.source).into_iter().collect(),
            Invocation::Compare(p) => p.regions.iter().filter_map(source).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    #[serde(flatten)]
    pub invocation: Invocation,
    pub inputs: Vec<InputDigest>,
}

pub fn sha256_file(path: &Path) -> io::Result<String> {
    let mut hasher = Sha256::new();
    io::copy(&mut File::open(path)?, &mut hasher)?;
    Ok(format!("{:x}", hasher.finalize()))
}

impl Manifest {
    /// Records `invocation` together with digests of its inputs.
    pub fn new(invocation: Invocation) -> Result<Self> {
        let inputs = digest_inputs(&invocation)?;
        Ok(Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            invocation,
            inputs,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).data(format!("reading manifest {}", path.display()))?;
        serde_json::from_str(&text).data(format!("parsing manifest {}", path.display()))
    }

    /// Fails when an input no longer matches its recorded digest.
    pub fn verify_inputs(&self) -> Result<()> {
        let current = digest_inputs(&self.invocation)?;
        if current != self.inputs {
            let changed: Vec<String> = current
                .iter()
                .filter(|d| !self.inputs.contains(d))
                .map(|d| d.path.display().to_string())
                .collect();
            return Err(anyhow::anyhow!(
                "inputs changed since the manifest was written: {}",
                changed.join(", ")
            ))
            .data("replay");
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        crate::output::json_bytes(self)
    }
}

fn digest_inputs(invocation: &Invocation) -> Result<Vec<InputDigest>> {
    invocation
        .inputs()
        .into_iter()
        .map(|path| {
            Ok(InputDigest {
                path: path.to_path_buf(),
                sha256: sha256_file(path).data(format!("reading {}", path.display()))?,
            })
        })
        .collect()
}
