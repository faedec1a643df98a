mod common;

use std::f64::consts::PI;
use std::fs;

use common::*;

#[test]
fn help_and_usage_exit_codes() {
    assert_eq!(swapsched(&["--help"]).status.code(), Some(0));
    assert_eq!(swapsched(&["--version"]).status.code(), Some(0));
    assert_eq!(swapsched(&[]).status.code(), Some(1));
    assert_eq!(swapsched(&["optimize", "--bogus"]).status.code(), Some(1));
    // exactly one profile source
    assert_eq!(
        swapsched(&["optimize", "--valley", "--synthetic", "3"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn estimate_writes_hourly_demand_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let sessions = fixture("sessions_200.csv");
    ok(&[
        "estimate",
        "--sessions",
        s(&sessions),
        "--out",
        s(dir.path()),
    ]);

    let text = fs::read_to_string(dir.path().join("demand.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("hour,expected,demand_a,demand_b,price"));
    assert!(lines.count() >= 24);

    let m = json(&dir.path().join("manifest.json"));
    assert_eq!(m["command"], "estimate");
    assert_eq!(
        m["params"]["model"]["theta"],
        serde_json::json!([0.08, 0.08, -0.8])
    );
    assert_eq!(m["params"]["model"]["swap_time_minutes"], 5.0);
    assert_eq!(m["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert!(m.get("out").is_none());
}

#[test]
fn estimate_records_explicit_flags() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "estimate",
        "--sessions",
        s(&fixture("sessions_200.csv")),
        "--prices",
        s(&fixture("prices.csv")),
        "--theta",
        "0.08,0.08,-0.8",
        "--swap-time",
        "5",
        "--ratio-a",
        "0.5",
        "--region",
        "north",
        "--out",
        s(dir.path()),
    ]);
    let m = json(&dir.path().join("manifest.json"));
    let p = &m["params"];
    assert_eq!(p["model"]["theta"], serde_json::json!([0.08, 0.08, -0.8]));
    assert_eq!(p["model"]["swap_time_minutes"], 5.0);
    assert_eq!(p["ratio_a"], 0.5);
    assert_eq!(p["ingest"]["region"], "north");
    assert_eq!(m["inputs"].as_array().unwrap().len(), 2);
    // prices follow the clock hour of each row
    let tariff = fs::read_to_string(fixture("prices.csv")).unwrap();
    let tariff: Vec<&str> = tariff
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    let text = fs::read_to_string(dir.path().join("demand.csv")).unwrap();
    for row in text.lines().skip(1) {
        let hour: usize = row[11..13].parse().unwrap();
        assert_eq!(row.rsplit(',').next().unwrap(), tariff[hour], "{row}");
    }
}

#[test]
fn end_column_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&[
        "estimate",
        "--sessions",
        s(&fixture("sessions_end.csv")),
        "--out",
        s(dir.path()),
    ]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("3 accepted"));
}

#[test]
fn unreadable_input_leaves_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let missing = dir.path().join("missing.csv");
    let out = swapsched(&["estimate", "--sessions", s(&missing), "--out", s(&out_dir)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_dir.exists());
}

#[test]
fn malformed_rows_report_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = swapsched(&[
        "estimate",
        "--sessions",
        s(&fixture("malformed.csv")),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("malformed.csv"), "{err}");
    assert!(err.contains("line 3"), "{err}");
    assert!(fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn metrics_of_estimated_series() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "estimate",
        "--sessions",
        s(&fixture("sessions_2w.csv")),
        "--out",
        s(dir.path()),
    ]);
    let demand = dir.path().join("demand.csv");
    let out = ok(&["metrics", "--demand", s(&demand), "--out", s(dir.path())]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("period (P_m)"), "{stdout}");
    let r = json(&dir.path().join("metrics.json"));
    for key in ["s_m", "p_m", "o_m"] {
        assert!(r[key].as_f64().unwrap() >= 0.0);
    }
    assert_eq!(r["window"], 24);
    assert_eq!(r["periods"], serde_json::json!([24.0, 168.0]));
}

#[test]
fn metrics_of_daily_sinusoid() {
    let dir = tempfile::tempdir().unwrap();
    let demand = dir.path().join("wave.csv");
    let x: Vec<f64> = (0..336)
        .map(|t| 5.0 + (2.0 * PI * t as f64 / 24.0).sin())
        .collect();
    let zeros = vec![0u32; 336];
    write_demand(&demand, &x, &zeros, &zeros, &vec![1.0; 336]);
    ok(&["metrics", "--demand", s(&demand), "--out", s(dir.path())]);
    let p = json(&dir.path().join("metrics.json"))["p_m"]
        .as_f64()
        .unwrap();
    assert!((p - 0.5f64.sqrt()).abs() < 1e-6, "{p}");
}

#[test]
fn metrics_rejects_short_series() {
    let dir = tempfile::tempdir().unwrap();
    let demand = dir.path().join("short.csv");
    write_demand(&demand, &[1.0; 30], &[0; 30], &[0; 30], &[1.0; 30]);
    let out = swapsched(&["metrics", "--demand", s(&demand), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("metrics.json").exists());
}

#[test]
fn optimize_zero_demand() {
    let dir = tempfile::tempdir().unwrap();
    let demand = dir.path().join("zero.csv");
    write_demand(&demand, &[0.0; 24], &[0; 24], &[0; 24], &[1.0; 24]);
    ok(&[
        "optimize",
        "--demand",
        s(&demand),
        "--iterations",
        "20",
        "--out",
        s(dir.path()),
    ]);
    let plan = json(&dir.path().join("plan.json"));
    assert_eq!(plan["r_opt"], 0.0);
    assert_eq!(plan["gamma"], 1.0);
    let curve = fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    assert_eq!(curve.lines().count(), 21);
}

#[test]
fn optimize_valley_saves_and_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |d: &std::path::Path| {
        ok(&[
            "optimize",
            "--valley",
            "--seed",
            "3",
            "--iterations",
            "200",
            "--out",
            s(d),
        ]);
    };
    args(a.path());
    args(b.path());
    let plan = json(&a.path().join("plan.json"));
    assert!(plan["r_opt"].as_f64().unwrap() > 0.0);
    assert!(plan["cost"].as_f64() <= plan["immediate_cost"].as_f64());
    assert_eq!(plan["a"]["charge"].as_array().unwrap().len(), 24);
    assert_eq!(snapshot(a.path()), snapshot(b.path()));
}

#[test]
fn infeasible_station_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = swapsched(&[
        "optimize",
        "--valley",
        "--tau-s",
        "1.5",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn baseline_has_no_saving() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["baseline", "--synthetic", "1001", "--out", s(dir.path())]);
    let plan = json(&dir.path().join("plan.json"));
    assert_eq!(plan["r_opt"], 0.0);
    assert_eq!(plan["strategy"], "immediate");
    assert_eq!(plan["cost"], plan["immediate_cost"]);
}

#[test]
fn compare_identical_strategies_tie() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "compare",
        "--synthetic",
        "1",
        "--seeds",
        "0,1",
        "--strategies",
        "lru,lru",
        "--iterations",
        "20",
        "--population",
        "20",
        "--out",
        s(dir.path()),
    ]);
    let c = json(&dir.path().join("comparison.json"));
    assert_eq!(c["summary"]["ties"], 1);
    assert_eq!(c["regions"][0]["wins"]["ties"], 2);
}

#[test]
fn compare_run_matrix_shape() {
    let dir = tempfile::tempdir().unwrap();
    let demand = dir.path().join("region.csv");
    let a: Vec<u32> = (0..24).map(|h| [3, 1, 0, 2][h % 4]).collect();
    let b: Vec<u32> = (0..24).map(|h| [0, 2, 4, 1][h % 4]).collect();
    let price: Vec<f64> = (0..24).map(|h| if h < 7 { 0.4 } else { 1.0 }).collect();
    write_demand(&demand, &[0.0; 24], &a, &b, &price);
    let out_dir = dir.path().join("out");
    ok(&[
        "compare",
        "--demand",
        s(&demand),
        "--synthetic",
        "1",
        "--seeds",
        "4,5,6",
        "--iterations",
        "10",
        "--population",
        "10",
        "--out",
        s(&out_dir),
    ]);
    let c = json(&out_dir.join("comparison.json"));
    let regions = c["regions"].as_array().unwrap();
    assert_eq!(regions.len(), 2);
    assert_eq!(regions[0]["region"], "region");
    for r in regions {
        assert_eq!(r["first"]["runs"].as_array().unwrap().len(), 3);
        assert_eq!(r["second"]["runs"].as_array().unwrap().len(), 3);
    }
    let curve = fs::read_to_string(out_dir.join("convergence.csv")).unwrap();
    assert_eq!(curve.lines().count(), 1 + 2 * 2 * 3 * 10);
}

#[test]
fn config_file_and_env_var() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    fs::write(
        &cfg,
        "[station]\nm_a = 7\n\n[ga]\nmax_iterations = 5\npopulation_size = 8\n",
    )
    .unwrap();

    let out_dir = dir.path().join("a");
    ok(&[
        "--config",
        s(&cfg),
        "baseline",
        "--valley",
        "--out",
        s(&out_dir),
    ]);
    assert_eq!(
        json(&out_dir.join("manifest.json"))["params"]["station"]["m_a"],
        7
    );

    let out_dir = dir.path().join("b");
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_swapsched"))
        .args(["optimize", "--valley", "--m-a", "6", "--out", s(&out_dir)])
        .env("SWAPSCHED_CONFIG", &cfg)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let m = json(&out_dir.join("manifest.json"));
    assert_eq!(m["params"]["station"]["m_a"], 6, "flag overrides config");
    assert_eq!(m["params"]["ga"]["max_iterations"], 5);

    fs::write(&cfg, "[station]\nbogus = 1\n").unwrap();
    let out_dir = dir.path().join("c");
    let out = swapsched(&[
        "--config",
        s(&cfg),
        "baseline",
        "--valley",
        "--out",
        s(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_dir.exists());
}

#[test]
fn replay_detects_changed_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let demand = dir.path().join("d.csv");
    write_demand(&demand, &[0.0; 24], &[1; 24], &[1; 24], &[1.0; 24]);
    let out_dir = dir.path().join("out");
    ok(&["baseline", "--demand", s(&demand), "--out", s(&out_dir)]);
    write_demand(&demand, &[0.0; 24], &[2; 24], &[1; 24], &[1.0; 24]);
    let replay = dir.path().join("replay");
    let out = swapsched(&[
        "replay",
        s(&out_dir.join("manifest.json")),
        "--out",
        s(&replay),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("changed"));
}

#[test]
fn inputs_are_never_overwritten() {
    let dir = tempfile::tempdir().unwrap();
    let sessions = dir.path().join("demand.csv");
    fs::copy(fixture("sessions_200.csv"), &sessions).unwrap();
    let before = fs::read(&sessions).unwrap();
    let out = swapsched(&[
        "estimate",
        "--sessions",
        s(&sessions),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(fs::read(&sessions).unwrap(), before);
}
