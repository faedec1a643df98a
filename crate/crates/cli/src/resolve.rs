//! Turns parsed flags plus config defaults into a fully resolved invocation.

use std::path::{Path, PathBuf};

use swapsched::demand::LambdaSmoothing;
use swapsched::ingest::PriceKind;
use swapsched::station::SatisfactionTerm;
use swapsched::synthetic::REGION_SEEDS;
use swapsched::{GaConfig, ModelParams, StationConfig, Strategy};

use crate::args::{
    BaselineArgs, CompareArgs, EstimateArgs, MetricsArgs, OptimizeArgs, PriceKindArg,
    SatisfactionArg, SearchArgs, SmoothingArg, SourceArgs, StationArgs, StrategyArg,
};
use crate::config::Config;
use crate::error::{CliError, Result};
use crate::manifest::{
    BaselineParams, CompareParams, EstimateParams, Invocation, MetricsParams, OptimizeParams,
    ProfileSource,
};

fn absolute(path: &Path) -> Result<PathBuf> {
    std::path::absolute(path)
        .map_err(|e| CliError::Usage(format!("bad path `{}`: {e}", path.display())))
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Lru => Strategy::Lru,
            StrategyArg::Uniform => Strategy::Uniform,
        }
    }
}

pub fn estimate(args: &EstimateArgs, cfg: &Config) -> Result<Invocation> {
    let theta = match args.theta.as_deref() {
        Some(&[a, b, c]) => [a, b, c],
        Some(t) => {
            return Err(CliError::Usage(format!(
                "--theta needs 3 values, got {}",
                t.len()
            )))
        }
        None => cfg.model.theta,
    };
    let mut ingest = cfg.ingest.options.clone();
    let schema = &mut ingest.schema;
    for (flag, field) in [
        (&args.start_column, &mut schema.start),
        (&args.duration_column, &mut schema.duration),
        (&args.end_column, &mut schema.end),
        (&args.energy_column, &mut schema.energy),
        (&args.region_column, &mut schema.region),
    ] {
        if let Some(name) = flag {
            *field = name.clone();
        }
    }
    if let Some(f) = args.max_reject_fraction {
        ingest.max_reject_fraction = f;
    }
    if args.region.is_some() {
        ingest.region = args.region.clone();
    }
    Ok(Invocation::Estimate(EstimateParams {
        sessions: absolute(&args.sessions)?,
        prices: args.prices.as_deref().map(absolute).transpose()?,
        price_kind: match args.price_kind {
            Some(PriceKindArg::Daily) => PriceKind::Daily,
            Some(PriceKindArg::Horizon) => PriceKind::Horizon,
            None => cfg.ingest.price_kind,
        },
        ingest,
        model: ModelParams {
            theta,
            swap_time_minutes: args.swap_time.unwrap_or(cfg.model.swap_time_minutes),
        },
        ratio_a: args.ratio_a.unwrap_or(cfg.model.ratio_a),
        lambda_smoothing: match args.lambda_smoothing {
            Some(SmoothingArg::None) => LambdaSmoothing::None,
            Some(SmoothingArg::HourOfWeek) => LambdaSmoothing::HourOfWeek,
            None => cfg.model.lambda_smoothing,
        },
    }))
}

pub fn metrics(args: &MetricsArgs, cfg: &Config) -> Result<Invocation> {
    Ok(Invocation::Metrics(MetricsParams {
        demand: absolute(&args.demand)?,
        window: args.window.unwrap_or(cfg.metrics.window),
        periods: args
            .periods
            .clone()
            .unwrap_or_else(|| cfg.metrics.periods.clone()),
        top_k: args.top_k.unwrap_or(cfg.metrics.top_k),
    }))
}

fn source(args: &SourceArgs, start: usize) -> Result<ProfileSource> {
    if let Some(path) = &args.demand {
        return Ok(ProfileSource::Demand {
            path: absolute(path)?,
            start,
        });
    }
    if let Some(seed) = args.synthetic {
        return Ok(ProfileSource::Synthetic { seed });
    }
    Ok(ProfileSource::Valley)
}

fn station(args: &StationArgs, cfg: &Config) -> StationConfig {
    let base = cfg.station;
    StationConfig {
        m_a: args.m_a.unwrap_or(base.m_a),
        m_b: args.m_b.unwrap_or(base.m_b),
        tau_s: args.tau_s.unwrap_or(base.tau_s),
        tau_1: args.tau_1.unwrap_or(base.tau_1),
        satisfaction_term: match args.satisfaction {
            Some(SatisfactionArg::Gamma) => SatisfactionTerm::LiteralGamma,
            Some(SatisfactionArg::OneMinusGamma) => SatisfactionTerm::OneMinusGamma,
            None => base.satisfaction_term,
        },
    }
}

fn search(args: &SearchArgs, cfg: &Config) -> GaConfig {
    let base = cfg.ga;
    GaConfig {
        population_size: args.population.unwrap_or(base.population_size),
        crossover_prob: args.crossover.unwrap_or(base.crossover_prob),
        mutation_rate: args.mutation.unwrap_or(base.mutation_rate),
        max_iterations: args.iterations.unwrap_or(base.max_iterations),
        tournament_size: args.tournament.unwrap_or(base.tournament_size),
        elitism_count: args.elitism.unwrap_or(base.elitism_count),
        ..base
    }
}

pub fn optimize(args: &OptimizeArgs, cfg: &Config) -> Result<Invocation> {
    let mut ga = search(&args.search, cfg);
    if let Some(seed) = args.seed {
        ga.seed = seed;
    }
    if let Some(s) = args.strategy {
        ga.strategy = s.into();
    }
    Ok(Invocation::Optimize(OptimizeParams {
        source: source(&args.source, args.start)?,
        station: station(&args.station, cfg),
        ga,
    }))
}

pub fn baseline(args: &BaselineArgs, cfg: &Config) -> Result<Invocation> {
    Ok(Invocation::Baseline(BaselineParams {
        source: source(&args.source, args.start)?,
        station: station(&args.station, cfg),
    }))
}

pub fn compare(args: &CompareArgs, cfg: &Config) -> Result<Invocation> {
    let mut regions = args
        .demand
        .iter()
        .map(|path| {
            Ok(ProfileSource::Demand {
                path: absolute(path)?,
                start: args.start,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(n) = args.synthetic {
        // the reference seeds first, then consecutive ones
        let first = REGION_SEEDS[0];
        regions.extend((0..n as u64).map(|i| ProfileSource::Synthetic { seed: first + i }));
    }
    if regions.is_empty() {
        return Err(CliError::Usage(
            "compare needs --demand files or --synthetic N".into(),
        ));
    }
    let &[first_strategy, second_strategy] = args.strategies.as_slice() else {
        return Err(CliError::Usage(
            "--strategies needs exactly two values".into(),
        ));
    };
    if args.seeds.is_empty() {
        return Err(CliError::Usage("compare needs at least one seed".into()));
    }
    let ga = GaConfig {
        seed: 0,
        strategy: Strategy::default(),
        ..search(&args.search, cfg)
    };
    Ok(Invocation::Compare(CompareParams {
        regions,
        seeds: args.seeds.clone(),
        strategies: [first_strategy.into(), second_strategy.into()],
        station: station(&args.station, cfg),
        ga,
    }))
}
