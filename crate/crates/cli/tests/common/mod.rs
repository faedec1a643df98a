#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn swapsched(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swapsched"))
        .args(args)
        .env_remove("SWAPSCHED_CONFIG")
        .output()
        .expect("binary runs")
}

pub fn ok(args: &[&str]) -> Output {
    let out = swapsched(args);
    assert!(
        out.status.success(),
        "swapsched {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Writes a demand.csv with the given columns.
pub fn write_demand(path: &Path, expected: &[f64], a: &[u32], b: &[u32], price: &[f64]) {
    let mut text = String::from("hour,expected,demand_a,demand_b,price\n");
    for i in 0..expected.len() {
        text.push_str(&format!(
            "{i},{},{},{},{}\n",
            expected[i], a[i], b[i], price[i]
        ));
    }
    fs::write(path, text).unwrap();
}

/// Sorted (name, bytes) of every regular file in `dir`.
pub fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}
