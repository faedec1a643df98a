//! Executes resolved invocations. Nothing here touches the output directory;
//! every file is returned in memory.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use swapsched::demand::{estimate_demand_series, split_series, DemandProfile};
use swapsched::ga::{compare_with, run_with, StrategySummary, Wins};
use swapsched::ingest::{
    format_timestamp, load_prices, parse_sessions, PriceSeries, HOURS_PER_DAY,
};
use swapsched::metrics::evaluate_dataset;
use swapsched::station::{immediate_plan, PlanReport};
use swapsched::synthetic::{try_synthetic_region, valley_profile};
use swapsched::{Exec, StationConfig, Strategy};

use crate::error::{Classify, CliError, Result};
use crate::manifest::{
    BaselineParams, CompareParams, EstimateParams, Invocation, MetricsParams, OptimizeParams,
    ProfileSource,
};
use crate::output::{csv_bytes, json_bytes, Outputs};

pub const DEMAND_FILE: &str = "demand.csv";
pub const METRICS_FILE: &str = "metrics.json";
pub const PLAN_FILE: &str = "plan.json";
pub const CONVERGENCE_FILE: &str = "convergence.csv";
pub const COMPARISON_FILE: &str = "comparison.json";

/// Files to write plus a human-readable summary for stdout. Wall-clock
/// timings appear only in the summary, so the files stay reproducible.
#[derive(Debug, Default)]
pub struct Outcome {
    pub outputs: Outputs,
    pub summary: String,
}

pub fn execute(invocation: &Invocation) -> Result<Outcome> {
    match invocation {
        Invocation::Estimate(p) => estimate(p),
        Invocation::Metrics(p) => metrics(p),
        Invocation::Optimize(p) => optimize(p),
        Invocation::Baseline(p) => baseline(p),
        Invocation::Compare(p) => compare(p),
    }
}

fn fmt(x: f64) -> String {
    x.to_string()
}

fn estimate(p: &EstimateParams) -> Result<Outcome> {
    let parsed = parse_sessions(&p.sessions, &p.ingest).data("reading sessions")?;
    if parsed.sessions.is_empty() {
        return Err(anyhow::anyhow!("no sessions left after filtering")).data(p.sessions.display());
    }
    let series = estimate_demand_series(&parsed.sessions, &p.model, p.lambda_smoothing)
        .data("estimating demand")?;
    let prices = match &p.prices {
        Some(path) => load_prices(path, p.price_kind).data("reading prices")?,
        None => PriceSeries::flat(1.0),
    };
    let split = split_series(&series, p.ratio_a, &prices).data("splitting demand")?;
    let rows = (0..split.len()).map(|i| {
        let hour = series.origin + chrono::Duration::hours(i as i64);
        [
            format_timestamp(&hour),
            fmt(split.expected[i]),
            split.demand_a[i].to_string(),
            split.demand_b[i].to_string(),
            fmt(split.price[i]),
        ]
    });
    let mut outputs = Outputs::default();
    outputs.add(
        DEMAND_FILE,
        csv_bytes(&["hour", "expected", "demand_a", "demand_b", "price"], rows)?,
    );

    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "sessions: {} accepted, {} rejected",
        parsed.sessions.len(),
        parsed.rejected.len()
    );
    for r in parsed.rejected.iter().take(5) {
        let _ = writeln!(summary, "  rejected line {}: {}", r.line, r.reason);
    }
    let _ = writeln!(
        summary,
        "hours: {} from {}",
        series.len(),
        format_timestamp(&series.origin)
    );
    let _ = writeln!(
        summary,
        "expected swaps: {:.3} (rounded {})",
        series.expected.iter().sum::<f64>(),
        series.rounded.iter().map(|&d| u64::from(d)).sum::<u64>()
    );
    Ok(Outcome { outputs, summary })
}

#[derive(Debug, Deserialize)]
struct DemandRow {
    #[allow(dead_code)]
    hour: String,
    expected: f64,
    demand_a: u32,
    demand_b: u32,
    price: f64,
}

/// Columns of a demand.csv.
#[derive(Debug, Default)]
pub struct DemandTable {
    pub expected: Vec<f64>,
    pub demand_a: Vec<u32>,
    pub demand_b: Vec<u32>,
    pub price: Vec<f64>,
}

impl DemandTable {
    pub fn read(path: &Path) -> Result<Self> {
        let context = || path.display().to_string();
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .data(context())?;
        let mut t = DemandTable::default();
        for row in rdr.deserialize::<DemandRow>() {
            let row = row.data(context())?;
            t.expected.push(row.expected);
            t.demand_a.push(row.demand_a);
            t.demand_b.push(row.demand_b);
            t.price.push(row.price);
        }
        if t.expected.is_empty() {
            return Err(anyhow::anyhow!("no rows")).data(context());
        }
        Ok(t)
    }

    /// The 24 hours starting at row `start`.
    pub fn day(&self, start: usize) -> Result<DemandProfile> {
        let end = start + HOURS_PER_DAY;
        if end > self.expected.len() {
            return Err(anyhow::anyhow!(
                "a 24-hour window from row {start} needs {end} rows, found {}",
                self.expected.len()
            ))
            .data("selecting profile window");
        }
        DemandProfile::daily(
            self.demand_a[start..end].to_vec(),
            self.demand_b[start..end].to_vec(),
            self.price[start..end].to_vec(),
        )
        .data("selecting profile window")
    }
}

fn metrics(p: &MetricsParams) -> Result<Outcome> {
    let table = DemandTable::read(&p.demand)?;
    let report = evaluate_dataset(&table.expected, p.window, &p.periods, p.top_k)
        .data(format!("scoring {}", p.demand.display()))?;
    let mut outputs = Outputs::default();
    outputs.add(METRICS_FILE, json_bytes(&report)?);
    let periods: Vec<String> = p.periods.iter().map(|x| x.to_string()).collect();
    let summary = format!(
        "series length   {}\n\
         trend (S_m)     {:.6}  window {} h\n\
         period (P_m)    {:.6}  expected [{}]\n\
         outliers (O_m)  {:.6}\n",
        table.expected.len(),
        report.s_m,
        report.window_hours,
        report.p_m,
        periods.join(", "),
        report.o_m,
    );
    Ok(Outcome { outputs, summary })
}

fn load_profile(source: &ProfileSource, station: &StationConfig) -> Result<DemandProfile> {
    match source {
        ProfileSource::Demand { path, start } => DemandTable::read(path)?.day(*start),
        ProfileSource::Synthetic { seed } => {
            station.validate().data("station")?;
            try_synthetic_region(*seed, station).ok_or_else(|| {
                CliError::Data(anyhow::anyhow!(
                    "no demand-intensive synthetic region for seed {seed} at this station size"
                ))
            })
        }
        ProfileSource::Valley => Ok(valley_profile()),
    }
}

#[derive(Serialize)]
struct PlanFile<'a> {
    strategy: &'a str,
    seed: Option<u64>,
    best_generation: Option<usize>,
    mean_best_fitness: Option<f64>,
    #[serde(flatten)]
    plan: &'a PlanReport,
}

fn plan_summary(plan: &PlanReport) -> String {
    format!(
        "C_is     {:.4}\nC_ours   {:.4}\nr_opt    {:.2}%\ngamma    {:.4}\npenalty  {}\nfitness  {:.6}\n",
        plan.immediate_cost,
        plan.cost,
        100.0 * plan.r_opt,
        plan.gamma,
        plan.penalty,
        plan.fitness,
    )
}

fn optimize(p: &OptimizeParams) -> Result<Outcome> {
    p.station.validate().data("station")?;
    p.ga.validate().data("GA settings")?;
    let profile = load_profile(&p.source, &p.station)?;
    let result = run_with(&profile, &p.station, &p.ga, Exec::default()).data("optimizing")?;
    let plan = PlanReport::new(&result.best_individual, &profile, &p.station);

    let mut outputs = Outputs::default();
    outputs.add(
        PLAN_FILE,
        json_bytes(&PlanFile {
            strategy: p.ga.strategy.name(),
            seed: Some(p.ga.seed),
            best_generation: Some(result.best_generation),
            mean_best_fitness: Some(result.mean_best_fitness),
            plan: &plan,
        })?,
    );
    let rows = result
        .best_fitness_per_generation
        .iter()
        .enumerate()
        .map(|(g, f)| [g.to_string(), fmt(*f)]);
    outputs.add(
        CONVERGENCE_FILE,
        csv_bytes(&["generation", "best_fitness"], rows)?,
    );

    let mut summary = plan_summary(&plan);
    let _ = writeln!(summary, "best generation {}", result.best_generation);
    let _ = writeln!(
        summary,
        "tau      {:.6} s/iteration",
        result.per_iteration_seconds
    );
    Ok(Outcome { outputs, summary })
}

fn baseline(p: &BaselineParams) -> Result<Outcome> {
    p.station.validate().data("station")?;
    let profile = load_profile(&p.source, &p.station)?;
    let (plan, _) = immediate_plan(&profile, &p.station);
    let report = PlanReport::new(&plan, &profile, &p.station);
    let mut outputs = Outputs::default();
    outputs.add(
        PLAN_FILE,
        json_bytes(&PlanFile {
            strategy: "immediate",
            seed: None,
            best_generation: None,
            mean_best_fitness: None,
            plan: &report,
        })?,
    );
    Ok(Outcome {
        outputs,
        summary: plan_summary(&report),
    })
}

#[derive(Debug, Serialize)]
struct RegionComparison {
    region: String,
    first: StrategySummary,
    second: StrategySummary,
    /// Per-seed best-fitness wins.
    wins: Wins,
}

/// Region counts by strictly lower median best fitness.
#[derive(Debug, Serialize)]
struct ComparisonSummary {
    regions: usize,
    first_better: usize,
    second_better: usize,
    ties: usize,
    first_win_rate: f64,
}

#[derive(Debug, Serialize)]
struct ComparisonFile {
    strategies: [Strategy; 2],
    seeds: Vec<u64>,
    regions: Vec<RegionComparison>,
    summary: ComparisonSummary,
}

fn compare(p: &CompareParams) -> Result<Outcome> {
    p.station.validate().data("station")?;
    p.ga.validate().data("GA settings")?;
    let mut regions = Vec::with_capacity(p.regions.len());
    for source in &p.regions {
        let profile = load_profile(source, &p.station)?;
        let r = compare_with(
            &profile,
            &p.station,
            &p.ga,
            &p.seeds,
            p.strategies,
            Exec::default(),
        )
        .data(format!("comparing on {}", source.name()))?;
        regions.push(RegionComparison {
            region: source.name(),
            first: r.first,
            second: r.second,
            wins: r.wins,
        });
    }

    let mut first_better = 0;
    let mut second_better = 0;
    for r in &regions {
        match r.first.median_f_best.total_cmp(&r.second.median_f_best) {
            std::cmp::Ordering::Less => first_better += 1,
            std::cmp::Ordering::Greater => second_better += 1,
            std::cmp::Ordering::Equal => {}
        }
    }
    let n = regions.len();
    let summary = ComparisonSummary {
        regions: n,
        first_better,
        second_better,
        ties: n - first_better - second_better,
        first_win_rate: first_better as f64 / n as f64,
    };

    let mut text = String::new();
    let [s1, s2] = p.strategies.map(Strategy::name);
    let _ = writeln!(
        text,
        "{:<20} {:>14} {:>14}  per-seed wins",
        "region", s1, s2
    );
    for r in &regions {
        let _ = writeln!(
            text,
            "{:<20} {:>14.6} {:>14.6}  {}:{} ties {}",
            r.region,
            r.first.median_f_best,
            r.second.median_f_best,
            r.wins.first,
            r.wins.second,
            r.wins.ties
        );
    }
    let _ = writeln!(
        text,
        "{s1} lower median in {}/{} regions ({s2} {}, ties {})",
        summary.first_better, n, summary.second_better, summary.ties
    );
    let tau = |f: fn(&RegionComparison) -> &StrategySummary| {
        regions
            .iter()
            .map(|r| f(r).mean_iteration_seconds())
            .sum::<f64>()
            / n as f64
    };
    let _ = writeln!(
        text,
        "tau      {s1} {:.6} s/iteration, {s2} {:.6} s/iteration",
        tau(|r| &r.first),
        tau(|r| &r.second)
    );

    let mut rows = Vec::new();
    for r in &regions {
        for s in [&r.first, &r.second] {
            for run in &s.runs {
                for (g, f) in run.curve.iter().enumerate() {
                    rows.push([
                        r.region.clone(),
                        s.strategy.name().to_string(),
                        run.seed.to_string(),
                        g.to_string(),
                        fmt(*f),
                    ]);
                }
            }
        }
    }
    let mut outputs = Outputs::default();
    outputs.add(
        COMPARISON_FILE,
        json_bytes(&ComparisonFile {
            strategies: p.strategies,
            seeds: p.seeds.clone(),
            regions,
            summary,
        })?,
    );
    outputs.add(
        CONVERGENCE_FILE,
        csv_bytes(
            &["region", "strategy", "seed", "generation", "best_fitness"],
            rows,
        )?,
    );
    Ok(Outcome {
        outputs,
        summary: text,
    })
}
