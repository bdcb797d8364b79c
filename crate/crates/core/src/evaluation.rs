//! Hindsight optimum, regret accounting and theoretical bounds.

use serde::{Deserialize, Serialize};

use crate::environments::{cumulative_scores, FeedbackSequence};
use crate::error::{Error, Result};
use crate::learners::Learner;
use crate::loss::{pairwise_loss, position_loss, zero_indexed_position_loss};
use crate::ranking::{Item, Ranking};
use crate::rng::RngStream;
use crate::samplers::{pairwise_marginal, sort_decreasing, SamplerKind};
use crate::stats::{binomial_std_error, mean, std_error};

/// Best fixed ranking in hindsight: items sorted by decreasing cumulative
/// score, ties broken by ascending index. It minimizes the total position
/// loss, hence also the total pairwise loss.
pub fn hindsight_best(seq: &FeedbackSequence) -> Result<Ranking> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    Ok(sort_decreasing(&seq.cumulative_scores()))
}

/// `Σ_t ℓℓ(π, s_t)` over the whole sequence.
pub fn total_pairwise_loss(pi: &Ranking, seq: &FeedbackSequence) -> Result<f64> {
    if pi.len() != seq.n() {
        return Err(Error::DimensionMismatch { expected: seq.n(), got: pi.len() });
    }
    seq.steps().iter().map(|s| pairwise_loss(pi, s)).sum()
}

/// Upper bound on expected regret for the tuned learning rate:
/// `n·√(T·M·ln 2)`.
pub fn regret_bound_theorem1(n: usize, horizon: usize, m: f64) -> f64 {
    n as f64 * (horizon as f64 * m * std::f64::consts::LN_2).sqrt()
}

/// Minimax lower bound `0.003·n^{3/2}·√(T·k)`. The bound only holds for
/// unspecified large `n` and `T`; it is reported, never enforced.
pub fn regret_lower_bound(n: usize, horizon: usize, k: usize) -> f64 {
    0.003 * (n as f64).powf(1.5) * (horizon as f64 * k as f64).sqrt()
}

/// Expected 0-indexed position loss per round of any learner facing a
/// uniformly random single choice: `(n − 1)/2`.
pub fn expected_step_loss_uniform(n: usize) -> f64 {
    (n as f64 - 1.0) / 2.0
}

/// One round of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: usize,
    /// Positions of the ranking played, when kept.
    pub ranking: Option<Vec<usize>>,
    pub position_loss: f64,
    pub zero_indexed_loss: f64,
    pub pairwise_loss: f64,
}

/// Regret against the best ranking for the first `t` rounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub t: usize,
    pub prefix_regret: f64,
}

/// Everything recorded while playing one learner against one sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub learner: String,
    pub steps: Vec<StepRecord>,
    pub checkpoints: Vec<Checkpoint>,
    pub cumulative_pairwise_loss: f64,
    pub cumulative_position_loss: f64,
    pub hindsight_ranking: Ranking,
    pub hindsight_pairwise_loss: f64,
    pub hindsight_position_loss: f64,
    /// `cumulative_pairwise_loss − hindsight_pairwise_loss`.
    pub regret: f64,
}

impl RunRecord {
    /// Regret measured with the position loss instead; equal to
    /// [`RunRecord::regret`] because the two losses differ by a per-round
    /// constant.
    pub fn position_regret(&self) -> f64 {
        self.cumulative_position_loss - self.hindsight_position_loss
    }

    pub fn mean_zero_indexed_loss(&self) -> f64 {
        let losses: Vec<f64> = self.steps.iter().map(|s| s.zero_indexed_loss).collect();
        mean(&losses)
    }
}

/// Knobs for [`play`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlayOptions {
    /// Keep every ranking played in the record.
    pub keep_rankings: bool,
    /// Record prefix regret every this many rounds (and at the last round).
    pub checkpoint_every: Option<usize>,
}

impl PlayOptions {
    /// Rankings are kept up to this many items unless asked otherwise.
    pub const KEEP_RANKINGS_MAX_N: usize = 100;

    pub fn for_run(n: usize, horizon: usize, checkpoints: usize) -> Self {
        Self {
            keep_rankings: n <= Self::KEEP_RANKINGS_MAX_N,
            checkpoint_every: (checkpoints > 0).then(|| (horizon / checkpoints).max(1)),
        }
    }
}

/// Plays `learner` against `seq`: output a ranking, observe, update.
pub fn play(
    learner: &mut dyn Learner,
    seq: &FeedbackSequence,
    rng: &mut RngStream,
    options: PlayOptions,
) -> Result<RunRecord> {
    let n = seq.n();
    if learner.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: learner.n() });
    }
    let hindsight_ranking = hindsight_best(seq)?;

    let mut steps = Vec::with_capacity(seq.len());
    let mut checkpoints = Vec::new();
    let mut prefix_scores = vec![0.0; n];
    let mut cum_pairwise = 0.0;
    let mut cum_position = 0.0;
    for (i, s) in seq.steps().iter().enumerate() {
        let t = i + 1;
        let ranking = learner.play(rng)?;
        let position = position_loss(&ranking, s)?;
        let pairwise = pairwise_loss(&ranking, s)?;
        cum_position += position;
        cum_pairwise += pairwise;
        steps.push(StepRecord {
            t,
            ranking: options.keep_rankings.then(|| ranking.positions().to_vec()),
            position_loss: position,
            zero_indexed_loss: zero_indexed_position_loss(&ranking, s)?,
            pairwise_loss: pairwise,
        });
        learner.observe(s)?;

        for (acc, &x) in prefix_scores.iter_mut().zip(s.scores()) {
            *acc += x;
        }
        if let Some(every) = options.checkpoint_every {
            if t % every == 0 || t == seq.len() {
                // Position loss is linear, so the prefix optimum's total is a dot product.
                let best = sort_decreasing(&prefix_scores);
                let best_loss: f64 = best
                    .positions()
                    .iter()
                    .zip(&prefix_scores)
                    .map(|(&p, &x)| p as f64 * x)
                    .sum();
                checkpoints.push(Checkpoint { t, prefix_regret: cum_position - best_loss });
            }
        }
    }

    let hindsight_pairwise_loss = total_pairwise_loss(&hindsight_ranking, seq)?;
    let hindsight_position_loss = seq
        .steps()
        .iter()
        .map(|s| position_loss(&hindsight_ranking, s))
        .sum::<Result<f64>>()?;
    Ok(RunRecord {
        seed: rng.seed(),
        learner: learner.name().to_string(),
        steps,
        checkpoints,
        cumulative_pairwise_loss: cum_pairwise,
        cumulative_position_loss: cum_position,
        hindsight_pairwise_loss,
        hindsight_position_loss,
        regret: cum_pairwise - hindsight_pairwise_loss,
        hindsight_ranking,
    })
}

/// Empirical regret over several seeds next to the theoretical bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem1_bound: f64,
    pub lower_bound: f64,
    pub mean_regret: f64,
    pub std_error: f64,
    pub seeds: usize,
}

impl BoundReport {
    /// `k` is the number of items chosen per round (1 for single choice).
    pub fn new(n: usize, horizon: usize, m: f64, k: usize, regrets: &[f64]) -> Result<Self> {
        if regrets.is_empty() {
            return Err(Error::InvalidParameter("a bound report needs at least one seed".into()));
        }
        Ok(Self {
            theorem1_bound: regret_bound_theorem1(n, horizon, m),
            lower_bound: regret_lower_bound(n, horizon, k),
            mean_regret: mean(regrets),
            std_error: std_error(regrets),
            seeds: regrets.len(),
        })
    }

    /// `mean + z·se ≤ bound`.
    pub fn within_upper_bound(&self, z: f64) -> bool {
        self.mean_regret + z * self.std_error <= self.theorem1_bound
    }
}

/// One pair in a [`MarginalReport`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairCheck {
    pub u: Item,
    pub v: Item,
    pub empirical: f64,
    pub predicted: f64,
    pub z: f64,
    pub passed: bool,
}

/// Empirical pairwise marginals of a sampler against their closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalReport {
    pub sampler: SamplerKind,
    pub samples: usize,
    pub threshold: f64,
    pub checks: Vec<PairCheck>,
}

impl MarginalReport {
    pub fn pass_rate(&self) -> f64 {
        if self.checks.is_empty() {
            return 1.0;
        }
        self.checks.iter().filter(|c| c.passed).count() as f64 / self.checks.len() as f64
    }
}

/// Smallest sample size [`marginal_test`] accepts.
pub const MIN_MARGINAL_SAMPLES: usize = 100;

/// Draws `samples` rankings from `sampler` under weights `w` and compares the
/// frequency of `u` ahead of `v` with `e^{w(u)} / (e^{w(u)} + e^{w(v)})` for
/// every listed pair. A pair passes when its z-score is within `threshold`.
pub fn marginal_test(
    sampler: SamplerKind,
    w: &[f64],
    pairs: &[(Item, Item)],
    samples: usize,
    threshold: f64,
    rng: &mut RngStream,
) -> Result<MarginalReport> {
    if samples < MIN_MARGINAL_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "marginal test needs at least {MIN_MARGINAL_SAMPLES} samples, got {samples}"
        )));
    }
    let predicted = pairs
        .iter()
        .map(|&(u, v)| pairwise_marginal(w, u, v))
        .collect::<Result<Vec<_>>>()?;
    let mut ahead = vec![0u64; pairs.len()];
    for _ in 0..samples {
        let r = sampler.sample(w, rng)?;
        for (count, &(u, v)) in ahead.iter_mut().zip(pairs) {
            *count += r.beats(u, v) as u64;
        }
    }
    let checks = pairs
        .iter()
        .zip(&predicted)
        .zip(&ahead)
        .map(|((&(u, v), &p), &count)| {
            let empirical = count as f64 / samples as f64;
            let se = binomial_std_error(p, samples);
            let z = if se > 0.0 {
                (empirical - p) / se
            } else if empirical == p {
                0.0
            } else {
                f64::INFINITY
            };
            PairCheck { u, v, empirical, predicted: p, z, passed: z.abs() <= threshold }
        })
        .collect();
    Ok(MarginalReport { sampler, samples, threshold, checks })
}

/// Every unordered pair `(u, v)` with `u < v`.
pub fn all_pairs(n: usize) -> Vec<(Item, Item)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

/// Total 1-indexed position loss `Σ_t π·s_t` of a fixed ranking.
pub fn total_position_loss(pi: &Ranking, seq: &FeedbackSequence) -> Result<f64> {
    let totals = cumulative_scores(seq.n(), seq.steps());
    if pi.len() != totals.len() {
        return Err(Error::DimensionMismatch { expected: totals.len(), got: pi.len() });
    }
    Ok(pi.positions().iter().zip(&totals).map(|(&p, &x)| p as f64 * x).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environments::{uniform_single_choice, Provenance};
    use crate::feedback::{Feedback, Setting};
    use crate::learners::{LearnerConfig, OnlineRank};

    fn single_sequence(n: usize, items: &[usize]) -> FeedbackSequence {
        let steps = items.iter().map(|&u| Feedback::single(n, u).unwrap()).collect();
        FeedbackSequence::new(n, Setting::Single, steps, Provenance::Manual).unwrap()
    }

    #[test]
    fn hindsight_sorts_by_frequency() {
        let mut items = vec![0; 5];
        items.extend([1; 2]);
        items.extend([2; 9]);
        let seq = single_sequence(3, &items);
        assert_eq!(hindsight_best(&seq).unwrap().order(), vec![2, 0, 1]);
    }

    #[test]
    fn hindsight_of_empty_sequence_is_an_error() {
        let seq = single_sequence(3, &[]);
        assert_eq!(hindsight_best(&seq), Err(Error::EmptySequence));
        assert_eq!(total_pairwise_loss(&Ranking::identity(3), &seq).unwrap(), 0.0);
    }

    #[test]
    fn hindsight_has_zero_loss_on_constant_feedback() {
        let seq = single_sequence(4, &[2; 10]);
        let best = hindsight_best(&seq).unwrap();
        assert_eq!(total_pairwise_loss(&best, &seq).unwrap(), 0.0);
    }

    #[test]
    fn spearman_hindsight_recovers_sigma() {
        let sigma = Ranking::from_order(&[3, 0, 4, 1, 2]).unwrap();
        let seq = FeedbackSequence::new(
            5,
            Setting::Spearman,
            vec![Feedback::spearman(&sigma)],
            Provenance::Manual,
        )
        .unwrap();
        assert_eq!(hindsight_best(&seq).unwrap(), sigma);
    }

    #[test]
    fn bound_formulas() {
        let b = regret_bound_theorem1(10, 2000, 10.0);
        assert!((b - 1177.4).abs() < 0.05, "{b}");
        // k-choice form n^{3/2}√(T k ln2) equals the general formula with M = nk
        let (n, t, k) = (10usize, 2000usize, 3usize);
        let kform = (n as f64).powf(1.5) * (t as f64 * k as f64 * std::f64::consts::LN_2).sqrt();
        assert!((regret_bound_theorem1(n, t, (n * k) as f64) - kform).abs() < 1e-9);
        assert!((kform - 2039.3).abs() < 0.1);
        // general form (n²/2)√(T ln2) with M = n²/4
        let gform = (n * n) as f64 / 2.0 * (t as f64 * std::f64::consts::LN_2).sqrt();
        assert!((regret_bound_theorem1(n, t, (n * n) as f64 / 4.0) - gform).abs() < 1e-9);

        assert!((regret_lower_bound(100, 10_000, 1) - 300.0).abs() < 1e-9);
        assert!(regret_lower_bound(11, 100, 1) > regret_lower_bound(10, 100, 1));
        assert!(regret_lower_bound(10, 101, 1) > regret_lower_bound(10, 100, 1));
        assert!(regret_lower_bound(10, 100, 2) > regret_lower_bound(10, 100, 1));

        assert_eq!(expected_step_loss_uniform(2), 0.5);
        assert_eq!(expected_step_loss_uniform(10), 4.5);
    }

    #[test]
    fn play_records_consistent_totals() {
        let n = 6;
        let horizon = 300;
        let seq = uniform_single_choice(n, horizon, &mut RngStream::new(3, 0)).unwrap();
        let cfg = LearnerConfig::auto(n, horizon, Setting::Single, SamplerKind::QuickSort).unwrap();
        let mut learner = OnlineRank::new(cfg);
        let options = PlayOptions::for_run(n, horizon, 10);
        let rec = play(&mut learner, &seq, &mut RngStream::new(3, 1), options).unwrap();

        let sum: f64 = rec.steps.iter().map(|s| s.pairwise_loss).sum();
        assert_eq!(sum, rec.cumulative_pairwise_loss);
        assert_eq!(rec.regret, rec.cumulative_pairwise_loss - rec.hindsight_pairwise_loss);
        assert_eq!(rec.regret, rec.position_regret());
        assert_eq!(rec.checkpoints.len(), 10);
        assert_eq!(rec.checkpoints.last().unwrap().t, horizon);
        assert_eq!(rec.checkpoints.last().unwrap().prefix_regret, rec.regret);
        assert!(rec.steps.iter().all(|s| s.ranking.is_some()));
        assert_eq!(
            total_position_loss(&rec.hindsight_ranking, &seq).unwrap(),
            rec.hindsight_position_loss
        );
    }

    #[test]
    fn marginal_test_rejects_tiny_samples() {
        let mut rng = RngStream::new(0, 0);
        assert!(marginal_test(SamplerKind::QuickSort, &[0.0, 0.0], &[(0, 1)], 99, 4.0, &mut rng)
            .is_err());
    }

    #[test]
    fn marginal_test_is_reproducible() {
        let w = [3f64.ln(), 0.0, 0.5];
        let pairs = all_pairs(3);
        let a = marginal_test(SamplerKind::PlackettLuce, &w, &pairs, 5000, 4.0, &mut RngStream::new(1, 0))
            .unwrap();
        let b = marginal_test(SamplerKind::PlackettLuce, &w, &pairs, 5000, 4.0, &mut RngStream::new(1, 0))
            .unwrap();
        assert_eq!(a, b);
        assert!((a.checks[0].predicted - 0.75).abs() < 1e-15);
    }

    #[test]
    fn bound_report_requires_a_seed() {
        assert!(BoundReport::new(10, 100, 10.0, 1, &[]).is_err());
        let r = BoundReport::new(10, 2000, 10.0, 1, &[100.0, 120.0]).unwrap();
        assert_eq!(r.seeds, 2);
        assert!(r.within_upper_bound(2.0));
    }
}
