//! Verification suites.
//!
//! Each suite runs one acceptance check and reports pass or fail with the
//! numbers behind the verdict. Thresholds are fixed; [`Scale::Quick`] only
//! shrinks sample sizes so the suites can be smoke-tested cheaply.

use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use onlinerank::evaluation::{all_pairs, total_position_loss};
use onlinerank::prelude::*;
use onlinerank::stats::{chi_square_homogeneity, mean, std_error};

use crate::config::{Adversary, ExperimentConfig, FileConfig, Overrides, Rate, SweepConfig};
use crate::error::{HarnessError, Result};
use crate::output::render_json;
use crate::run::{run_experiment, RunSummary};
use crate::sweep::{render_sweep_csv, run_sweep};

/// Sample sizes for the suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scale {
    /// The sizes the acceptance thresholds were set for.
    Full,
    /// Much smaller sizes for smoke tests; verdicts are less reliable.
    Quick,
}

impl Scale {
    fn pick<T>(self, full: T, quick: T) -> T {
        match self {
            Scale::Full => full,
            Scale::Quick => quick,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Marginals,
    Equivalence,
    Offsets,
    Hindsight,
    RegretBound,
    Scaling,
    Identity,
    Runtime,
    Spearman,
    Determinism,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Marginals,
        Suite::Equivalence,
        Suite::Offsets,
        Suite::Hindsight,
        Suite::RegretBound,
        Suite::Scaling,
        Suite::Identity,
        Suite::Runtime,
        Suite::Spearman,
        Suite::Determinism,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Suite::Marginals => "marginals",
            Suite::Equivalence => "equivalence",
            Suite::Offsets => "offsets",
            Suite::Hindsight => "hindsight",
            Suite::RegretBound => "regret-bound",
            Suite::Scaling => "scaling",
            Suite::Identity => "identity",
            Suite::Runtime => "runtime",
            Suite::Spearman => "spearman",
            Suite::Determinism => "determinism",
        }
    }

    /// Acceptance criterion number, 1 to 10.
    pub fn criterion(self) -> usize {
        Suite::ALL.iter().position(|&s| s == self).unwrap() + 1
    }

    pub fn run(self, scale: Scale, seed: u64) -> Result<Check> {
        let start = Instant::now();
        let mut check = match self {
            Suite::Marginals => marginals(scale, seed),
            Suite::Equivalence => equivalence(scale, seed),
            Suite::Offsets => offsets(scale, seed),
            Suite::Hindsight => hindsight(scale, seed),
            Suite::RegretBound => regret_bound(scale, seed),
            Suite::Scaling => scaling(scale, seed),
            Suite::Identity => identity(scale, seed),
            Suite::Runtime => runtime(scale),
            Suite::Spearman => spearman(scale, seed),
            Suite::Determinism => determinism(scale, seed),
        }?;
        check.seconds = start.elapsed().as_secs_f64();
        Ok(check)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.id() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown suite {s:?}")))
    }
}

/// Verdict of one suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: Suite,
    pub passed: bool,
    /// One-line statement of what was measured against what.
    pub summary: String,
    pub details: Vec<String>,
    pub seconds: f64,
}

impl Check {
    fn new(suite: Suite, passed: bool, summary: String, details: Vec<String>) -> Self {
        Self { suite, passed, summary, details, seconds: 0.0 }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} criterion {:>2} {:<12} {} ({:.1}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite.criterion(),
            self.suite.id(),
            self.summary,
            self.seconds
        )
    }
}

fn uniform_vector(n: usize, lo: f64, hi: f64, rng: &mut RngStream) -> Vec<f64> {
    (0..n).map(|_| lo + (hi - lo) * rng.unit()).collect()
}

fn experiment(setting: Setting, n: usize, horizon: usize, learner: LearnerKind, seeds: Vec<u64>) -> ExperimentConfig {
    ExperimentConfig {
        setting,
        n,
        horizon,
        learner,
        sampler: SamplerKind::PlackettLuceGumbel,
        eta: Rate::Auto,
        beta: Rate::Auto,
        epsilon: Rate::Auto,
        adversary: Adversary::Uniform,
        seeds,
        checkpoints: 0,
        keep_rankings: Some(false),
        out: Default::default(),
    }
}

fn seeds_from(base: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|i| base.wrapping_mul(1_000_003).wrapping_add(i)).collect()
}

/// Empirical `Pr[u ahead of v]` within 4 standard errors of the logistic
/// prediction for at least 95% of pairs, n = 8, weights in [−3, 3].
pub fn marginals(scale: Scale, seed: u64) -> Result<Check> {
    let n = 8;
    let vectors = scale.pick(20, 4);
    let samples = scale.pick(100_000, 5_000);
    let start = Instant::now();
    let mut details = Vec::new();
    let mut passed = true;
    let mut rates = Vec::new();
    for sampler in [SamplerKind::QuickSort, SamplerKind::PlackettLuce] {
        let reports = (0..vectors)
            .into_par_iter()
            .map(|v| {
                let mut rng = RngStream::new(seed, 100 + v as u64);
                let w = uniform_vector(n, -3.0, 3.0, &mut rng);
                marginal_test(sampler, &w, &all_pairs(n), samples, 4.0, &mut rng)
            })
            .collect::<onlinerank::Result<Vec<_>>>()?;
        let total: usize = reports.iter().map(|r| r.checks.len()).sum();
        let ok: usize = reports.iter().map(|r| r.checks.iter().filter(|c| c.passed).count()).sum();
        let worst = reports
            .iter()
            .flat_map(|r| r.checks.iter())
            .map(|c| c.z.abs())
            .fold(0.0, f64::max);
        let rate = ok as f64 / total as f64;
        passed &= rate >= 0.95;
        rates.push(format!("{sampler} {ok}/{total}"));
        details.push(format!(
            "{sampler}: {ok}/{total} pair tests within 4 SE ({:.1}%), max |z| = {worst:.2}",
            100.0 * rate
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    passed &= secs <= 300.0;
    details.push(format!("{vectors} weight vectors x {samples} draws, {secs:.1}s (limit 300s)"));
    Ok(Check::new(
        Suite::Marginals,
        passed,
        format!("pairs within 4 SE: {} (need >= 95%)", rates.join(", ")),
        details,
    ))
}

/// Chi-square homogeneity of Gumbel-perturbed and sequential
/// Plackett-Luce draws over all 24 rankings of 4 items, p > 0.001.
pub fn equivalence(scale: Scale, seed: u64) -> Result<Check> {
    let n = 4;
    let vectors = scale.pick(5, 2);
    let draws = scale.pick(1_000_000, 20_000);
    let all = Ranking::all(n);
    let index: HashMap<Ranking, usize> = all.iter().cloned().zip(0..).collect();
    let histogram = |sampler: SamplerKind, w: &[f64], rng: &mut RngStream| -> Result<Vec<u64>> {
        let mut counts = vec![0u64; all.len()];
        for _ in 0..draws {
            counts[index[&sampler.sample(w, rng)?]] += 1;
        }
        Ok(counts)
    };
    let results = (0..vectors)
        .into_par_iter()
        .map(|v| {
            let w = uniform_vector(n, -2.0, 2.0, &mut RngStream::new(seed, 200 + v as u64));
            let a = histogram(SamplerKind::PlackettLuceGumbel, &w, &mut RngStream::new(seed, 300 + v as u64))?;
            let b = histogram(SamplerKind::PlackettLuce, &w, &mut RngStream::new(seed, 400 + v as u64))?;
            Ok((w, chi_square_homogeneity(&a, &b)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let min_p = results.iter().map(|(_, c)| c.p_value).fold(1.0, f64::min);
    let details = results
        .iter()
        .map(|(w, c)| {
            format!(
                "w = {w:.3?}: chi2 = {:.2} on {} dof, p = {:.4}",
                c.statistic, c.dof, c.p_value
            )
        })
        .collect();
    Ok(Check::new(
        Suite::Equivalence,
        min_p > 0.001,
        format!("{vectors} vectors x {draws} draws, min p = {min_p:.4} (need > 0.001)"),
        details,
    ))
}

/// `ℓ − ℓℓ` is constant over all rankings, and for binary feedback the
/// largest pairwise loss equals `Σ_{u<v} (s(v) − s(u))²`.
pub fn offsets(scale: Scale, seed: u64) -> Result<Check> {
    let per_n = scale.pick(100, 10);
    let mut rng = RngStream::new(seed, 500);
    let mut worst_spread = 0.0f64;
    let mut failures = Vec::new();
    let mut cases = 0;
    for n in 2..=6 {
        let rankings = Ranking::all(n);
        for i in 0..2 * per_n {
            let binary = i < per_n;
            let s = if binary {
                let items: Vec<Item> = (0..n).filter(|_| rng.unit() < 0.5).collect();
                Feedback::general(n, &items)?
            } else {
                Feedback::real(uniform_vector(n, -5.0, 5.0, &mut rng))?
            };
            cases += 1;
            let mut offsets = Vec::with_capacity(rankings.len());
            let mut max_pairwise = f64::NEG_INFINITY;
            for pi in &rankings {
                let pairwise = pairwise_loss(pi, &s)?;
                max_pairwise = max_pairwise.max(pairwise);
                offsets.push(position_loss(pi, &s)? - pairwise);
            }
            let lo = offsets.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = offsets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let scale_ref = lo.abs().max(hi.abs()).max(1.0);
            let spread = (hi - lo) / scale_ref;
            worst_spread = worst_spread.max(spread);
            if spread > 1e-9 {
                failures.push(format!("n = {n}, s = {:?}: relative spread {spread:e}", s.scores()));
            }
            if binary {
                let mut squares = 0.0;
                for u in 0..n {
                    for v in u + 1..n {
                        squares += (s.score(v) - s.score(u)).powi(2);
                    }
                }
                if max_pairwise != squares {
                    failures.push(format!(
                        "n = {n}, s = {:?}: max pairwise loss {max_pairwise} != {squares}",
                        s.scores()
                    ));
                }
            }
        }
    }
    let passed = failures.is_empty();
    let mut details = vec![format!("{cases} score vectors over n = 2..=6, every ranking")];
    details.extend(failures);
    Ok(Check::new(
        Suite::Offsets,
        passed,
        format!("max relative spread of l - ll over rankings {worst_spread:.2e} (need <= 1e-9)"),
        details,
    ))
}

/// Minimum of `Σ_t ℓℓ(π, s_t)` over all `n!` rankings, computed from the
/// pairwise cost matrix `C[u][v] = Σ_t [s_t(v) − s_t(u)]₊`.
pub fn brute_force_pairwise(seq: &FeedbackSequence) -> f64 {
    let n = seq.n();
    let mut cost = vec![vec![0.0; n]; n];
    for s in seq.steps() {
        for u in 0..n {
            for v in 0..n {
                cost[u][v] += (s.score(v) - s.score(u)).max(0.0);
            }
        }
    }
    Ranking::all(n)
        .iter()
        .map(|r| {
            let order = r.order();
            let mut loss = 0.0;
            for (i, &u) in order.iter().enumerate() {
                for &v in &order[i + 1..] {
                    loss += cost[u][v];
                }
            }
            loss
        })
        .fold(f64::INFINITY, f64::min)
}

/// The frequency-sorted ranking attains the brute-force minimum exactly.
pub fn hindsight(scale: Scale, seed: u64) -> Result<Check> {
    let sequences = scale.pick(200, 10);
    let horizon = 50;
    let results = (3..=7usize)
        .into_par_iter()
        .map(|n| {
            let k = (n / 2).max(1);
            let mut rng = RngStream::new(seed, 600 + n as u64);
            let mut mismatches = Vec::new();
            for i in 0..2 * sequences {
                let seq = if i < sequences {
                    uniform_single_choice(n, horizon, &mut rng)?
                } else {
                    uniform_k_choice(n, k, horizon, &mut rng)?
                };
                let ours = total_pairwise_loss(&hindsight_best(&seq)?, &seq)?;
                let brute = brute_force_pairwise(&seq);
                if ours != brute {
                    mismatches.push(format!("n = {n}, {}: {ours} vs brute force {brute}", seq.setting()));
                }
            }
            Ok(mismatches)
        })
        .collect::<Result<Vec<_>>>()?;
    let mismatches: Vec<String> = results.into_iter().flatten().collect();
    let total = 5 * 2 * sequences;
    Ok(Check::new(
        Suite::Hindsight,
        mismatches.is_empty(),
        format!(
            "{}/{total} sequences (n = 3..=7, T = {horizon}, single and k-choice) match brute force exactly",
            total - mismatches.len()
        ),
        mismatches,
    ))
}

fn regrets(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    Ok(run_experiment(cfg)?.iter().map(|r| r.record.regret).collect())
}

/// Mean regret + 2 SE stays below `n·√(T·M·ln 2)` for single choice and
/// for 3-choice, n = 10, T = 2000.
pub fn regret_bound(scale: Scale, seed: u64) -> Result<Check> {
    let seeds = scale.pick(50, 8);
    let mut passed = true;
    let mut parts = Vec::new();
    let mut details = Vec::new();
    for setting in [Setting::Single, Setting::KChoice { k: 3 }] {
        let cfg = experiment(setting, 10, 2000, LearnerKind::OnlineRank, seeds_from(seed, seeds));
        let r = regrets(&cfg)?;
        let k = match setting {
            Setting::KChoice { k } => k,
            _ => 1,
        };
        let report = BoundReport::new(10, 2000, setting.complexity_bound(10)?, k, &r)?;
        let ok = report.within_upper_bound(2.0);
        passed &= ok;
        parts.push(format!(
            "{setting}: {:.1} + 2x{:.1} <= {:.1}",
            report.mean_regret, report.std_error, report.theorem1_bound
        ));
        details.push(format!(
            "{setting}: eta = {:.5}, {seeds} seeds, mean regret {:.2}, SE {:.2}, bound {:.2}, lower bound {:.2}",
            cfg.resolved_eta()?,
            report.mean_regret,
            report.std_error,
            report.theorem1_bound,
            report.lower_bound
        ));
    }
    Ok(Check::new(Suite::RegretBound, passed, parts.join("; "), details))
}

/// Mean regret at T = 8000 over mean regret at T = 2000 lies in [1.5, 2.7].
pub fn scaling(scale: Scale, seed: u64) -> Result<Check> {
    let seeds = scale.pick(100, 10);
    let mut means = Vec::new();
    let mut details = Vec::new();
    for horizon in [2000, 8000] {
        let cfg = experiment(Setting::Single, 10, horizon, LearnerKind::OnlineRank, seeds_from(seed, seeds));
        let r = regrets(&cfg)?;
        details.push(format!(
            "T = {horizon}: mean regret {:.2}, SE {:.2}, lower bound {:.2}",
            mean(&r),
            std_error(&r),
            regret_lower_bound(10, horizon, 1)
        ));
        means.push(mean(&r));
    }
    let ratio = means[1] / means[0];
    Ok(Check::new(
        Suite::Scaling,
        (1.5..=2.7).contains(&ratio),
        format!("regret ratio T=8000/T=2000 = {ratio:.3} (need in [1.5, 2.7]), {seeds} seeds"),
        details,
    ))
}

/// Mean per-round 0-indexed position loss under the uniform single-choice
/// adversary is within 3 SE of `(n − 1)/2` for OnlineRank and FPL.
pub fn identity(scale: Scale, seed: u64) -> Result<Check> {
    let n = 10;
    let horizon = scale.pick(10_000, 2_000);
    let seeds = scale.pick(20, 6);
    let target = expected_step_loss_uniform(n);
    let mut passed = true;
    let mut parts = Vec::new();
    for learner in [LearnerKind::OnlineRank, LearnerKind::Fpl] {
        let cfg = experiment(Setting::Single, n, horizon, learner, seeds_from(seed, seeds));
        let per_seed: Vec<f64> =
            run_experiment(&cfg)?.iter().map(|r| r.record.mean_zero_indexed_loss()).collect();
        let (m, se) = (mean(&per_seed), std_error(&per_seed));
        let z = (m - target) / se;
        passed &= z.abs() <= 3.0;
        parts.push(format!("{learner} {m:.4} (SE {se:.4}, z = {z:.2})"));
    }
    Ok(Check::new(
        Suite::Identity,
        passed,
        format!("mean step loss vs {target}: {} (need |z| <= 3)", parts.join(", ")),
        vec![format!("n = {n}, T = {horizon}, {seeds} seeds")],
    ))
}

/// An OnlineRank learner over `n` items whose weights have seen some
/// single-choice feedback, ready to be timed.
fn timing_learner(n: usize, sampler: SamplerKind) -> Result<OnlineRank> {
    let config = LearnerConfig::auto(n, 1_000_000, Setting::Single, sampler)?;
    let mut learner = OnlineRank::new(config);
    let mut nature = RngStream::new(n as u64, 0);
    for _ in 0..2 * n.min(5_000) {
        learner.update(&Feedback::single(n, nature.below(n))?)?;
    }
    Ok(learner)
}

/// Seconds per step for each `n`, each an average over `steps` steps.
/// Sizes are timed round-robin for `rounds` rounds and the fastest average
/// per size is kept, so a burst of outside load cannot land on one size.
pub fn time_steps(sizes: &[usize], sampler: SamplerKind, steps: usize, rounds: usize) -> Result<Vec<f64>> {
    let learners = sizes.iter().map(|&n| timing_learner(n, sampler)).collect::<Result<Vec<_>>>()?;
    let mut rngs: Vec<RngStream> = sizes.iter().map(|&n| RngStream::new(n as u64, 1)).collect();
    for (learner, rng) in learners.iter().zip(&mut rngs) {
        for _ in 0..5 {
            std::hint::black_box(learner.step(rng)?);
        }
    }
    let mut best = vec![f64::INFINITY; sizes.len()];
    for _ in 0..rounds {
        for ((learner, rng), best) in learners.iter().zip(&mut rngs).zip(&mut best) {
            let start = Instant::now();
            for _ in 0..steps {
                std::hint::black_box(learner.step(rng)?);
            }
            *best = best.min(start.elapsed().as_secs_f64() / steps as f64);
        }
    }
    Ok(best)
}

/// Doubling n from 1000 to 64000 at most multiplies the per-step time by
/// 2.6, for the Gumbel and QuickSort samplers.
pub fn runtime(scale: Scale) -> Result<Check> {
    let max_n = scale.pick(64_000, 8_000);
    let sizes: Vec<usize> = std::iter::successors(Some(1000), |&n| (n < max_n).then_some(2 * n)).collect();
    let (steps, rounds) = (50, 15);
    let mut passed = true;
    let mut worst = Vec::new();
    let mut details = Vec::new();
    for sampler in [SamplerKind::PlackettLuceGumbel, SamplerKind::QuickSort] {
        let times = time_steps(&sizes, sampler, steps, rounds)?;
        let mut max_ratio = 0.0f64;
        for (i, pair) in times.windows(2).enumerate() {
            let ratio = pair[1] / pair[0];
            max_ratio = max_ratio.max(ratio);
            details.push(format!(
                "{sampler} n = {}: {:.1} us/step, ratio {ratio:.2}",
                sizes[i + 1],
                pair[1] * 1e6
            ));
        }
        passed &= max_ratio <= 2.6;
        worst.push(format!("{sampler} {max_ratio:.2}"));
    }
    details.push(format!("best of {rounds} rounds of {steps} steps per size"));
    Ok(Check::new(
        Suite::Runtime,
        passed,
        format!("max t(2n)/t(n) for n = 1000..={max_n}: {} (need <= 2.6)", worst.join(", ")),
        details,
    ))
}

/// Spearman feedback `s = −σ`: regret of OnlineRank with
/// `η = √(ln 2)/(n√T)` lies in `[0, 2n³√T]` for n = 5, T = 200, and the
/// hindsight ranking maximizes total Spearman correlation for n ≤ 6.
pub fn spearman(scale: Scale, seed: u64) -> Result<Check> {
    let (n, horizon) = (5, 200);
    let seeds = scale.pick(20, 5);
    let eta = std::f64::consts::LN_2.sqrt() / (n as f64 * (horizon as f64).sqrt());
    let upper = 2.0 * (n as f64).powi(3) * (horizon as f64).sqrt();
    let mut cfg = experiment(Setting::Spearman, n, horizon, LearnerKind::OnlineRank, seeds_from(seed, seeds));
    cfg.eta = Rate::Value(eta);
    let runs = run_experiment(&cfg)?;
    let r: Vec<f64> = runs.iter().map(|run| run.record.regret).collect();
    let lo = r.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut passed = lo >= 0.0 && hi <= upper;
    let mut details = vec![format!(
        "eta = {eta:.6}, {seeds} seeds, regret min {lo:.1}, mean {:.1}, max {hi:.1}",
        mean(&r)
    )];

    let sequences = scale.pick(50, 5);
    let mut mismatches = 0;
    for m in 3..=6 {
        let all = Ranking::all(m);
        let mut rng = RngStream::new(seed, 700 + m as u64);
        for _ in 0..sequences {
            let seq = spearman_sequence(m, horizon, &SpearmanMode::UniformRandom, &mut rng)?;
            // Reference rankings back from s = −σ.
            let sigmas: Vec<Ranking> = seq
                .steps()
                .iter()
                .map(|s| Ranking::from_positions(s.scores().iter().map(|&x| (-x) as usize).collect()))
                .collect::<onlinerank::Result<_>>()?;
            let mut best = f64::NEG_INFINITY;
            for pi in &all {
                let total = sigmas.iter().map(|sigma| pi.spearman(sigma)).sum::<onlinerank::Result<f64>>()?;
                best = best.max(total);
            }
            let ours = -total_position_loss(&hindsight_best(&seq)?, &seq)?;
            if ours != best {
                mismatches += 1;
                details.push(format!("n = {m}: hindsight correlation {ours} vs brute force {best}"));
            }
        }
    }
    passed &= mismatches == 0;
    details.push(format!("{} Spearman sequences, n = 3..=6: {mismatches} mismatches", 4 * sequences));
    Ok(Check::new(
        Suite::Spearman,
        passed,
        format!(
            "regret in [{lo:.1}, {hi:.1}] (need within [0, {upper:.1}]); hindsight = brute force: {}",
            if mismatches == 0 { "yes" } else { "no" }
        ),
        details,
    ))
}

/// The configuration the determinism suite sweeps.
pub const DETERMINISM_SWEEP: &str = r#"
seeds = 6

[setting]
kind = "k-choice"
k = 2

[sweep]
n = [4, 6]
horizon = [300, 600]
learner = ["online-rank", "fpl", "mw-explicit"]
"#;

/// Two executions of the same sweep and run produce byte-identical result
/// files.
pub fn determinism(scale: Scale, seed: u64) -> Result<Check> {
    let file = FileConfig::parse(DETERMINISM_SWEEP)?;
    let seeds: Vec<u64> = seeds_from(seed, scale.pick(6, 3));
    let flags = Overrides { seeds: seeds.clone(), ..Default::default() };
    let sweep = SweepConfig::resolve(&file, &flags)?;
    let dirs = [tempfile::tempdir()?, tempfile::tempdir()?];
    let mut outputs = Vec::new();
    for dir in &dirs {
        let result = run_sweep(&sweep)?;
        crate::sweep::write_sweep(dir.path(), &result)?;
        let cfg = ExperimentConfig { checkpoints: 10, ..sweep.cells()[0].clone() };
        let runs = run_experiment(&cfg)?;
        crate::output::write_run(dir.path(), &RunSummary::new(&cfg, &runs)?, &runs)?;
        outputs.push(dir.path().to_path_buf());
    }
    let mut details = Vec::new();
    let mut passed = true;
    for name in [
        crate::sweep::SWEEP_CSV,
        crate::sweep::SWEEP_JSON,
        crate::output::CURVES_FILE,
        crate::output::SUMMARY_FILE,
    ] {
        let a = std::fs::read(outputs[0].join(name))?;
        let b = std::fs::read(outputs[1].join(name))?;
        let same = a == b;
        passed &= same;
        details.push(format!("{name}: {} bytes, {}", a.len(), if same { "identical" } else { "DIFFERENT" }));
    }
    // Serial rendering must agree with the parallel run too.
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| HarnessError::Runtime(e.to_string()))?
        .install(|| run_sweep(&sweep))?;
    let serial_same = render_sweep_csv(&serial.summary.rows)? == std::fs::read(outputs[0].join(crate::sweep::SWEEP_CSV))?
        && render_json(&serial.summary)? == std::fs::read(outputs[0].join(crate::sweep::SWEEP_JSON))?;
    passed &= serial_same;
    details.push(format!(
        "single-threaded sweep {}",
        if serial_same { "identical" } else { "DIFFERENT" }
    ));
    let cells = sweep.cells().len();
    Ok(Check::new(
        Suite::Determinism,
        passed,
        format!("{cells}-cell sweep and a run executed twice: outputs {}", if passed { "byte-identical" } else { "differ" }),
        details,
    ))
}
