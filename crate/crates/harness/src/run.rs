//! Running one experiment over its seeds.
//!
//! Each seed owns two streams: the adversary draws from stream
//! [`ADVERSARY_STREAM`] and the learner from [`LEARNER_STREAM`]. Seeds run
//! in parallel and results are collected in seed order, so the output does
//! not depend on scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use std::time::Instant;

use onlinerank::evaluation::{play, PlayOptions};
use onlinerank::prelude::*;
use onlinerank::stats::{mean, std_error};

use crate::config::{Adversary, ExperimentConfig, Rate};
use crate::error::{HarnessError, Result};

pub const ADVERSARY_STREAM: u64 = 0;
pub const LEARNER_STREAM: u64 = 1;

/// The rate a learner was run with, after `auto` was resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateUsed {
    /// `eta` for online-rank, `epsilon` for fpl, `beta` for mw-explicit.
    pub name: String,
    pub value: f64,
}

fn config_error(e: onlinerank::Error) -> HarnessError {
    HarnessError::Config(e.to_string())
}

/// Instantiates the configured learner.
pub fn build_learner(cfg: &ExperimentConfig) -> Result<(Box<dyn Learner>, RateUsed)> {
    let rate = |name: &str, value: f64| RateUsed { name: name.to_string(), value };
    let eta = cfg.resolved_eta().map_err(|e| match e {
        HarnessError::Runtime(msg) => HarnessError::Config(msg),
        other => other,
    })?;
    match cfg.learner {
        LearnerKind::OnlineRank => {
            let lc = LearnerConfig::new(cfg.n, cfg.horizon, cfg.setting, eta, cfg.sampler)
                .map_err(config_error)?;
            Ok((Box::new(OnlineRank::new(lc)), rate("eta", eta)))
        }
        LearnerKind::Fpl => {
            let fc = match cfg.epsilon {
                Rate::Auto => FplConfig::auto(cfg.setting, cfg.n, cfg.horizon),
                Rate::Value(e) => FplConfig::with_epsilon(e),
            }
            .map_err(config_error)?;
            let epsilon = fc.epsilon;
            let learner = Fpl::new(cfg.n, cfg.horizon, cfg.setting, fc).map_err(config_error)?;
            Ok((Box::new(learner), rate("epsilon", epsilon)))
        }
        LearnerKind::MwExplicit => {
            let beta = match cfg.beta {
                Rate::Auto => eta,
                Rate::Value(b) => b,
            };
            let learner =
                MwExplicit::new(cfg.n, cfg.horizon, cfg.setting, beta).map_err(config_error)?;
            Ok((Box::new(learner), rate("beta", beta)))
        }
    }
}

/// Loads the trace named by the config, if any, checking its length
/// against the horizon.
pub fn load_configured_trace(cfg: &ExperimentConfig) -> Result<Option<Arc<FeedbackSequence>>> {
    let Adversary::Trace { trace } = &cfg.adversary else {
        return Ok(None);
    };
    let seq = load_trace(trace, cfg.setting, cfg.n)
        .map_err(|e| HarnessError::Trace(format!("{}: {e}", trace.display())))?;
    if seq.len() != cfg.horizon {
        return Err(HarnessError::Trace(format!(
            "{}: {} rounds, but the horizon is {}",
            trace.display(),
            seq.len(),
            cfg.horizon
        )));
    }
    Ok(Some(Arc::new(seq)))
}

/// Uniformly random feedback for the configured setting.
pub fn generate_sequence(cfg: &ExperimentConfig, seed: u64) -> Result<FeedbackSequence> {
    let rng = &mut RngStream::new(seed, ADVERSARY_STREAM);
    let (n, t) = (cfg.n, cfg.horizon);
    Ok(match cfg.setting {
        Setting::Single => uniform_single_choice(n, t, rng)?,
        Setting::KChoice { k } => uniform_k_choice(n, k, t, rng)?,
        Setting::General => uniform_general(n, t, rng)?,
        Setting::Spearman => spearman_sequence(n, t, &SpearmanMode::UniformRandom, rng)?,
    })
}

/// A finished seed together with how long it took.
#[derive(Debug, Clone)]
pub struct SeedRun {
    pub record: RunRecord,
    pub rate: RateUsed,
    pub wall_seconds: f64,
}

/// Plays one seed.
pub fn run_seed(
    cfg: &ExperimentConfig,
    seed: u64,
    trace: Option<&FeedbackSequence>,
    options: PlayOptions,
) -> Result<SeedRun> {
    let generated;
    let seq = match trace {
        Some(seq) => seq,
        None => {
            generated = generate_sequence(cfg, seed)?;
            &generated
        }
    };
    let (mut learner, rate) = build_learner(cfg)?;
    let mut rng = RngStream::new(seed, LEARNER_STREAM);
    let start = Instant::now();
    let mut record = play(learner.as_mut(), seq, &mut rng, options)?;
    let wall_seconds = start.elapsed().as_secs_f64();
    record.seed = seed;
    Ok(SeedRun { record, rate, wall_seconds })
}

pub fn play_options(cfg: &ExperimentConfig) -> PlayOptions {
    let mut options = PlayOptions::for_run(cfg.n, cfg.horizon, cfg.checkpoints);
    if let Some(keep) = cfg.keep_rankings {
        options.keep_rankings = keep;
    }
    options
}

/// Runs every seed of `cfg`, in parallel, returning results in seed order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<SeedRun>> {
    cfg.validate()?;
    let trace = load_configured_trace(cfg)?;
    let options = play_options(cfg);
    cfg.seeds
        .par_iter()
        .map(|&seed| run_seed(cfg, seed, trace.as_deref(), options))
        .collect()
}

/// Regret of one seed, as written to the summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSummary {
    pub seed: u64,
    pub regret: f64,
    pub cumulative_pairwise_loss: f64,
    pub hindsight_pairwise_loss: f64,
    pub cumulative_position_loss: f64,
    pub hindsight_position_loss: f64,
    pub mean_zero_indexed_loss: f64,
    /// Hindsight-optimal ranking as an item order, first-ranked first.
    pub hindsight_order: Vec<usize>,
}

/// Theoretical reference values for a cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub complexity_bound: f64,
    pub theorem1_bound: f64,
    /// Only defined for the single- and k-choice settings.
    pub lower_bound: Option<f64>,
}

impl Bounds {
    pub fn for_config(cfg: &ExperimentConfig) -> Result<Self> {
        let m = cfg.setting.complexity_bound(cfg.n)?;
        let lower_bound = match cfg.setting {
            Setting::Single => Some(regret_lower_bound(cfg.n, cfg.horizon, 1)),
            Setting::KChoice { k } => Some(regret_lower_bound(cfg.n, cfg.horizon, k)),
            Setting::General | Setting::Spearman => None,
        };
        Ok(Self {
            complexity_bound: m,
            theorem1_bound: regret_bound_theorem1(cfg.n, cfg.horizon, m),
            lower_bound,
        })
    }
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema_version: u64,
    pub config: ExperimentConfig,
    pub rate: RateUsed,
    pub bounds: Bounds,
    pub mean_regret: f64,
    pub std_error: f64,
    pub runs: Vec<SeedSummary>,
}

impl RunSummary {
    pub fn new(cfg: &ExperimentConfig, runs: &[SeedRun]) -> Result<Self> {
        let first = runs
            .first()
            .ok_or_else(|| HarnessError::Runtime("no seeds were run".into()))?;
        let regrets: Vec<f64> = runs.iter().map(|r| r.record.regret).collect();
        Ok(Self {
            schema_version: crate::output::SCHEMA_VERSION,
            config: cfg.clone(),
            rate: first.rate.clone(),
            bounds: Bounds::for_config(cfg)?,
            mean_regret: mean(&regrets),
            std_error: std_error(&regrets),
            runs: runs
                .iter()
                .map(|r| SeedSummary {
                    seed: r.record.seed,
                    regret: r.record.regret,
                    cumulative_pairwise_loss: r.record.cumulative_pairwise_loss,
                    hindsight_pairwise_loss: r.record.hindsight_pairwise_loss,
                    cumulative_position_loss: r.record.cumulative_position_loss,
                    hindsight_position_loss: r.record.hindsight_position_loss,
                    mean_zero_indexed_loss: r.record.mean_zero_indexed_loss(),
                    hindsight_order: r.record.hindsight_ranking.order(),
                })
                .collect(),
        })
    }
}

/// Writes the configured adversary's sequence for every seed as a trace
/// file `trace-seed<S>.txt` under `cfg.out`.
pub fn generate_traces(cfg: &ExperimentConfig) -> Result<Vec<std::path::PathBuf>> {
    cfg.validate()?;
    cfg.seeds
        .iter()
        .map(|&seed| {
            let seq = generate_sequence(cfg, seed)?;
            crate::output::write_file(&cfg.out, &format!("trace-seed{seed}.txt"), render_trace(&seq).as_bytes())
        })
        .collect()
}
