//! Result files.
//!
//! Everything in `curves.csv`, `summary.json`, `sweep.csv` and `sweep.json`
//! is a pure function of the configuration, so repeated runs produce
//! byte-identical files. Wall-clock measurements go to separate
//! `*timings*` files.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};
use crate::run::{RunSummary, SeedRun};

/// Version stamped into every JSON result file.
pub const SCHEMA_VERSION: u64 = 1;

pub const CURVES_FILE: &str = "curves.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TIMINGS_FILE: &str = "timings.json";
pub const RANKINGS_FILE: &str = "rankings.csv";

pub const CURVE_COLUMNS: [&str; 5] =
    ["seed", "t", "step_pairwise_loss", "cum_pairwise_loss", "prefix_regret_at_checkpoint"];

/// Per-round losses of every seed; the prefix-regret column is empty
/// between checkpoints.
pub fn render_curves(runs: &[SeedRun]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CURVE_COLUMNS)?;
    for run in runs {
        let r = &run.record;
        let mut checkpoints = r.checkpoints.iter().peekable();
        let mut cum = 0.0;
        for step in &r.steps {
            cum += step.pairwise_loss;
            let prefix = match checkpoints.peek() {
                Some(c) if c.t == step.t => {
                    let v = c.prefix_regret.to_string();
                    checkpoints.next();
                    v
                }
                _ => String::new(),
            };
            w.write_record([
                r.seed.to_string(),
                step.t.to_string(),
                step.pairwise_loss.to_string(),
                cum.to_string(),
                prefix,
            ])?;
        }
    }
    w.into_inner().map_err(|e| HarnessError::Runtime(e.to_string()))
}

/// Rankings played, as item orders, for runs that kept them.
pub fn render_rankings(runs: &[SeedRun]) -> Result<Option<Vec<u8>>> {
    if runs.iter().all(|r| r.record.steps.iter().all(|s| s.ranking.is_none())) {
        return Ok(None);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["seed", "t", "order"])?;
    for run in runs {
        for step in &run.record.steps {
            if let Some(positions) = &step.ranking {
                let mut order = vec![0; positions.len()];
                for (item, &p) in positions.iter().enumerate() {
                    order[p - 1] = item;
                }
                let order: Vec<String> = order.iter().map(ToString::to_string).collect();
                w.write_record([run.record.seed.to_string(), step.t.to_string(), order.join(" ")])?;
            }
        }
    }
    Ok(Some(w.into_inner().map_err(|e| HarnessError::Runtime(e.to_string()))?))
}

pub fn render_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Wall-clock time of each seed of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTimings {
    pub schema_version: u64,
    pub seeds: Vec<SeedTiming>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedTiming {
    pub seed: u64,
    pub wall_seconds: f64,
    pub per_step_seconds: f64,
}

impl RunTimings {
    pub fn new(runs: &[SeedRun]) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            seeds: runs
                .iter()
                .map(|r| SeedTiming {
                    seed: r.record.seed,
                    wall_seconds: r.wall_seconds,
                    per_step_seconds: r.wall_seconds / r.record.steps.len().max(1) as f64,
                })
                .collect(),
        }
    }
}

pub fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, bytes)
        .map_err(|e| HarnessError::Runtime(format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// Writes the curves, summary, timings and (if kept) rankings of a run.
pub fn write_run(dir: &Path, summary: &RunSummary, runs: &[SeedRun]) -> Result<Vec<PathBuf>> {
    let mut written = vec![
        write_file(dir, CURVES_FILE, &render_curves(runs)?)?,
        write_file(dir, SUMMARY_FILE, &render_json(summary)?)?,
        write_file(dir, TIMINGS_FILE, &render_json(&RunTimings::new(runs))?)?,
    ];
    if let Some(bytes) = render_rankings(runs)? {
        written.push(write_file(dir, RANKINGS_FILE, &bytes)?);
    }
    Ok(written)
}

#[derive(Deserialize)]
struct VersionProbe {
    schema_version: Option<u64>,
}

/// Parses a JSON result file, refusing any schema version other than
/// [`SCHEMA_VERSION`].
pub fn parse_versioned<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    let probe: VersionProbe = serde_json::from_str(text)?;
    match probe.schema_version {
        Some(SCHEMA_VERSION) => Ok(serde_json::from_str(text)?),
        Some(found) => Err(HarnessError::Schema {
            what: what.to_string(),
            found,
            expected: SCHEMA_VERSION,
        }),
        None => Err(HarnessError::Runtime(format!("{what}: missing schema_version"))),
    }
}

pub fn read_summary(path: &Path) -> Result<RunSummary> {
    parse_versioned(&fs::read_to_string(path)?, &path.display().to_string())
}
