//! Grids of experiments.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

use onlinerank::evaluation::PlayOptions;
use onlinerank::prelude::*;
use onlinerank::stats::{mean, std_error};

use crate::config::{ExperimentConfig, SweepConfig};
use crate::error::{HarnessError, Result};
use crate::output::{parse_versioned, render_json, write_file, SCHEMA_VERSION};
use crate::run::{load_configured_trace, run_seed, Bounds};

pub const SWEEP_CSV: &str = "sweep.csv";
pub const SWEEP_JSON: &str = "sweep.json";
pub const SWEEP_TIMINGS: &str = "sweep_timings.csv";

/// One row of the sweep table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub k: usize,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub learner: LearnerKind,
    pub sampler: SamplerKind,
    pub seeds: usize,
    pub rate_name: String,
    pub rate: f64,
    pub mean_regret: f64,
    pub std_error: f64,
    pub theorem1_bound: f64,
    pub lower_bound: Option<f64>,
}

/// Contents of `sweep.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub schema_version: u64,
    pub cells: Vec<ExperimentConfig>,
    pub rows: Vec<SweepRow>,
}

/// A finished sweep. `mean_step_seconds` is aligned with `rows`.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub summary: SweepSummary,
    pub mean_step_seconds: Vec<f64>,
}

fn k_of(setting: Setting) -> usize {
    match setting {
        Setting::KChoice { k } => k,
        _ => 1,
    }
}

/// Runs every (cell, seed) pair in parallel and aggregates in
/// (cell, seed) order.
pub fn run_sweep(sweep: &SweepConfig) -> Result<SweepResult> {
    let cells = sweep.cells();
    let traces = cells.iter().map(load_configured_trace).collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, u64)> = (0..cells.len())
        .flat_map(|c| sweep.base.seeds.iter().map(move |&s| (c, s)))
        .collect();
    let options = PlayOptions { keep_rankings: false, checkpoint_every: None };
    let results = jobs
        .par_iter()
        .map(|&(c, seed)| run_seed(&cells[c], seed, traces[c].as_deref(), options))
        .collect::<Result<Vec<_>>>()?;

    let per_cell = sweep.base.seeds.len();
    let mut rows = Vec::with_capacity(cells.len());
    let mut mean_step_seconds = Vec::with_capacity(cells.len());
    for (cell, runs) in cells.iter().zip(results.chunks(per_cell)) {
        let regrets: Vec<f64> = runs.iter().map(|r| r.record.regret).collect();
        let bounds = Bounds::for_config(cell)?;
        rows.push(SweepRow {
            n: cell.n,
            k: k_of(cell.setting),
            horizon: cell.horizon,
            learner: cell.learner,
            sampler: cell.sampler,
            seeds: runs.len(),
            rate_name: runs[0].rate.name.clone(),
            rate: runs[0].rate.value,
            mean_regret: mean(&regrets),
            std_error: std_error(&regrets),
            theorem1_bound: bounds.theorem1_bound,
            lower_bound: bounds.lower_bound,
        });
        let steps: f64 = runs.iter().map(|r| r.record.steps.len() as f64).sum();
        mean_step_seconds.push(runs.iter().map(|r| r.wall_seconds).sum::<f64>() / steps);
    }
    Ok(SweepResult {
        summary: SweepSummary { schema_version: SCHEMA_VERSION, cells, rows },
        mean_step_seconds,
    })
}

pub fn render_sweep_csv(rows: &[SweepRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| HarnessError::Runtime(e.to_string()))
}

pub fn render_sweep_timings(result: &SweepResult) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "k", "T", "learner", "sampler", "mean_step_seconds"])?;
    for (row, secs) in result.summary.rows.iter().zip(&result.mean_step_seconds) {
        w.write_record([
            row.n.to_string(),
            row.k.to_string(),
            row.horizon.to_string(),
            row.learner.to_string(),
            row.sampler.to_string(),
            secs.to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| HarnessError::Runtime(e.to_string()))
}

pub fn write_sweep(dir: &Path, result: &SweepResult) -> Result<Vec<PathBuf>> {
    Ok(vec![
        write_file(dir, SWEEP_CSV, &render_sweep_csv(&result.summary.rows)?)?,
        write_file(dir, SWEEP_JSON, &render_json(&result.summary)?)?,
        write_file(dir, SWEEP_TIMINGS, &render_sweep_timings(result)?)?,
    ])
}

pub fn read_sweep(path: &Path) -> Result<SweepSummary> {
    parse_versioned(&fs::read_to_string(path)?, &path.display().to_string())
}
