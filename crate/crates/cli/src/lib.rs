//! Command-line front end: `estimate`, `metrics`, `optimize`, `baseline`,
//! `compare` and `replay`.
//!
//! Every command writes `manifest.json` next to its outputs. The manifest
//! holds the fully resolved parameters and SHA-256 digests of the inputs, and
//! `swapsched replay manifest.json` reproduces the outputs byte for byte.
//!
//! Exit codes: 0 success, 1 usage, 2 data validation, 3 internal.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod output;
mod resolve;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Parser;

use args::{Cli, Command};
use config::Config;
use error::{CliError, Result};
use manifest::{Invocation, Manifest, MANIFEST_FILE, TOOL, VERSION};

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(summary) => {
            print!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<String> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let (invocation, out) = match &cli.command {
        Command::Estimate(a) => (resolve::estimate(a, &cfg)?, &a.out.out),
        Command::Metrics(a) => (resolve::metrics(a, &cfg)?, &a.out.out),
        Command::Optimize(a) => (resolve::optimize(a, &cfg)?, &a.out.out),
        Command::Baseline(a) => (resolve::baseline(a, &cfg)?, &a.out.out),
        Command::Compare(a) => (resolve::compare(a, &cfg)?, &a.out.out),
        Command::Replay(a) => return replay(&a.manifest, &a.out.out),
    };
    run_invocation(Manifest::new(invocation)?, out)
}

fn replay(manifest_path: &Path, out: &Path) -> Result<String> {
    let recorded = Manifest::load(manifest_path)?;
    if recorded.tool != TOOL {
        return Err(CliError::Data(anyhow::anyhow!(
            "{} was not written by {TOOL}",
            manifest_path.display()
        )));
    }
    if recorded.version != VERSION {
        eprintln!(
            "warning: manifest written by {TOOL} {}, replaying with {VERSION}",
            recorded.version
        );
    }
    recorded.verify_inputs()?;
    run_invocation(Manifest::new(recorded.invocation)?, out)
}

fn run_invocation(manifest: Manifest, out: &Path) -> Result<String> {
    let outcome = commands::execute(&manifest.invocation)?;
    let mut outputs = outcome.outputs;
    outputs.add(MANIFEST_FILE, manifest.to_json()?);
    guard_inputs(&manifest.invocation, &outputs, out)?;
    let written = outputs.write_to(out)?;
    let mut summary = outcome.summary;
    for path in written {
        summary.push_str(&format!("wrote {}\n", path.display()));
    }
    Ok(summary)
}

/// Refuses to overwrite any input with an output.
fn guard_inputs(invocation: &Invocation, outputs: &output::Outputs, out: &Path) -> Result<()> {
    let out = std::path::absolute(out)
        .map_err(|e| CliError::Usage(format!("bad output directory `{}`: {e}", out.display())))?;
    let same = |a: &Path, b: &Path| match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    };
    for name in outputs.names() {
        let dest: PathBuf = out.join(name);
        if let Some(input) = invocation.inputs().into_iter().find(|i| same(i, &dest)) {
            return Err(CliError::Usage(format!(
                "output {} would overwrite input {}",
                dest.display(),
                input.display()
            )));
        }
    }
    Ok(())
}
