//! Online learners: each round they output a ranking, then observe feedback.
//!
//! * [`OnlineRank`] keeps cumulative η-scaled scores and feeds them to a
//!   randomized sorting procedure.
//! * [`Fpl`] is Follow the Perturbed Leader with uniform perturbations.
//! * [`MwExplicit`] runs multiplicative weights over all `n!` rankings and
//!   is only usable for tiny `n`.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::feedback::{Feedback, Setting};
use crate::loss::pairwise_loss;
use crate::ranking::Ranking;
use crate::rng::RngStream;
use crate::samplers::{sort_decreasing, SamplerKind};

/// Learning rate tuned for a horizon `T` and complexity bound `M`:
/// `η = n·√(ln 2) / √(T·M)`.
///
/// Logs a warning when `T < n²·ln 2 / M`, where the tuned rate exceeds 1;
/// short horizons are allowed so they can be studied.
pub fn eta_theorem1(n: usize, horizon: usize, m: f64) -> Result<f64> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be positive".into()));
    }
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidParameter(format!("complexity bound must be positive, got {m}")));
    }
    let nf = n as f64;
    let t = horizon as f64;
    if t < nf * nf * std::f64::consts::LN_2 / m {
        log::warn!(
            "horizon {horizon} is shorter than n² ln2 / M = {:.2}; the tuned rate exceeds 1",
            nf * nf * std::f64::consts::LN_2 / m
        );
    }
    Ok(nf * std::f64::consts::LN_2.sqrt() / (t * m).sqrt())
}

/// A full-information online ranking algorithm.
pub trait Learner: Send {
    fn name(&self) -> &'static str;

    /// Number of items ranked.
    fn n(&self) -> usize;

    /// Ranking to output this round. Does not change the learner's state.
    fn play(&self, rng: &mut RngStream) -> Result<Ranking>;

    /// Incorporates the feedback revealed after this round's ranking.
    fn observe(&mut self, feedback: &Feedback) -> Result<()>;
}

/// Which learner to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LearnerKind {
    #[default]
    OnlineRank,
    Fpl,
    MwExplicit,
}

impl LearnerKind {
    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::OnlineRank => "online-rank",
            LearnerKind::Fpl => "fpl",
            LearnerKind::MwExplicit => "mw-explicit",
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "online-rank" => Ok(LearnerKind::OnlineRank),
            "fpl" => Ok(LearnerKind::Fpl),
            "mw-explicit" => Ok(LearnerKind::MwExplicit),
            other => Err(Error::InvalidParameter(format!("unknown learner {other:?}"))),
        }
    }
}

/// Parameters of an [`OnlineRank`] run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub n: usize,
    pub horizon: usize,
    pub setting: Setting,
    pub eta: f64,
    pub sampler: SamplerKind,
}

impl LearnerConfig {
    pub fn new(
        n: usize,
        horizon: usize,
        setting: Setting,
        eta: f64,
        sampler: SamplerKind,
    ) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be at least 1".into()));
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::InvalidParameter(format!("eta must lie in (0, 1], got {eta}")));
        }
        setting.complexity_bound(n)?;
        Ok(Self { n, horizon, setting, eta, sampler })
    }

    /// Configuration with the tuned rate from [`eta_theorem1`], using the
    /// setting's complexity bound. Rates above 1 are capped at 1.
    pub fn auto(n: usize, horizon: usize, setting: Setting, sampler: SamplerKind) -> Result<Self> {
        let eta = eta_theorem1(n, horizon, setting.complexity_bound(n)?)?;
        Self::new(n, horizon, setting, eta.min(1.0), sampler)
    }
}

/// The OnlineRank learner.
///
/// State is the per-item sum of all observed scores; the sampler weights are
/// `η` times that sum. Keeping the raw sum means the weight after `t`
/// rounds is one multiplication away from the exact value `η·Σ s(u)`,
/// with no accumulated rounding from repeated additions of `η`.
#[derive(Debug, Clone)]
pub struct OnlineRank {
    config: LearnerConfig,
    cumulative: Vec<f64>,
    weights: Vec<f64>,
    round: usize,
}

impl OnlineRank {
    pub fn new(config: LearnerConfig) -> Self {
        Self { cumulative: vec![0.0; config.n], weights: vec![0.0; config.n], round: 0, config }
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.config
    }

    /// Number of feedback rounds observed so far.
    pub fn round(&self) -> usize {
        self.round
    }

    /// Current sampler weights `w(u) = η·Σ_t s_t(u)`.
    pub fn weights(&self) -> Vec<f64> {
        self.weights.clone()
    }

    /// Per-item sum of the observed scores.
    pub fn cumulative_scores(&self) -> &[f64] {
        &self.cumulative
    }

    /// Draws this round's ranking from the configured sampler.
    pub fn step(&self, rng: &mut RngStream) -> Result<Ranking> {
        if self.round >= self.config.horizon {
            return Err(Error::HorizonExhausted {
                round: self.round + 1,
                horizon: self.config.horizon,
            });
        }
        self.config.sampler.sample(&self.weights, rng)
    }

    /// `w(u) += η·s(u)` for every item; advances the round.
    pub fn update(&mut self, feedback: &Feedback) -> Result<()> {
        if self.round >= self.config.horizon {
            return Err(Error::HorizonExhausted {
                round: self.round + 1,
                horizon: self.config.horizon,
            });
        }
        self.config.setting.validate(self.config.n, feedback)?;
        let eta = self.config.eta;
        for ((c, w), &s) in self.cumulative.iter_mut().zip(&mut self.weights).zip(feedback.scores()) {
            *c += s;
            *w = eta * *c;
        }
        self.round += 1;
        Ok(())
    }
}

impl Learner for OnlineRank {
    fn name(&self) -> &'static str {
        "online-rank"
    }

    fn n(&self) -> usize {
        self.config.n
    }

    fn play(&self, rng: &mut RngStream) -> Result<Ranking> {
        self.step(rng)
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        self.update(feedback)
    }
}

/// Follow the Perturbed Leader parameters.
///
/// `epsilon` is the shape parameter: each round every item's history gets an
/// independent perturbation uniform on `[0, 1/epsilon]`. `diameter`,
/// `loss_bound` and `feedback_norm` are the constants it was derived from
/// (zero when `epsilon` was given directly).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FplConfig {
    pub epsilon: f64,
    pub diameter: f64,
    pub loss_bound: f64,
    pub feedback_norm: f64,
}

impl FplConfig {
    /// `epsilon = √(D / (R·A·T))` with unit-constant choices of the
    /// permutahedron diameter `D`, per-round loss bound `R` and feedback
    /// norm bound `A` for the setting:
    ///
    /// | setting  | D  | R    | A  |
    /// |----------|----|------|----|
    /// | single   | n² | n    | 1  |
    /// | k-choice | n² | k·n  | k  |
    /// | general  | n² | n²   | n  |
    /// | spearman | n² | n³   | n² |
    pub fn auto(setting: Setting, n: usize, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be positive".into()));
        }
        setting.complexity_bound(n)?;
        let nf = n as f64;
        let (diameter, loss_bound, feedback_norm) = match setting {
            Setting::Single => (nf * nf, nf, 1.0),
            Setting::KChoice { k } => (nf * nf, k as f64 * nf, k as f64),
            Setting::General => (nf * nf, nf * nf, nf),
            Setting::Spearman => (nf * nf, nf.powi(3), nf * nf),
        };
        let epsilon = (diameter / (loss_bound * feedback_norm * horizon as f64)).sqrt();
        Ok(Self { epsilon, diameter, loss_bound, feedback_norm })
    }

    /// Explicit shape parameter. `f64::INFINITY` means no perturbation
    /// (plain follow-the-leader).
    pub fn with_epsilon(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "FPL epsilon must be positive, got {epsilon}"
            )));
        }
        Ok(Self { epsilon, diameter: 0.0, loss_bound: 0.0, feedback_norm: 0.0 })
    }

    /// Width `1/epsilon` of the uniform perturbation.
    pub fn perturbation_width(&self) -> f64 {
        1.0 / self.epsilon
    }
}

/// One FPL round: sort items by decreasing `history(u) + ε_u` with fresh
/// `ε_u ~ U[0, 1/epsilon]`, ties broken by ascending index.
pub fn fpl_step(history: &[f64], config: &FplConfig, rng: &mut RngStream) -> Result<Ranking> {
    if !(config.epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "FPL epsilon must be positive, got {}",
            config.epsilon
        )));
    }
    if let Some(item) = history.iter().position(|h| !h.is_finite()) {
        return Err(Error::NonFiniteWeight { item, value: history[item] });
    }
    let width = config.perturbation_width();
    let keys: Vec<f64> = if width == 0.0 {
        history.to_vec()
    } else {
        history.iter().map(|&h| h + width * rng.unit()).collect()
    };
    Ok(sort_decreasing(&keys))
}

/// Follow the Perturbed Leader over the cumulative feedback scores.
#[derive(Debug, Clone)]
pub struct Fpl {
    n: usize,
    horizon: usize,
    setting: Setting,
    config: FplConfig,
    history: Vec<f64>,
    round: usize,
}

impl Fpl {
    pub fn new(n: usize, horizon: usize, setting: Setting, config: FplConfig) -> Result<Self> {
        setting.complexity_bound(n)?;
        FplConfig::with_epsilon(config.epsilon)?;
        Ok(Self { n, horizon, setting, config, history: vec![0.0; n], round: 0 })
    }

    pub fn config(&self) -> &FplConfig {
        &self.config
    }

    pub fn history(&self) -> &[f64] {
        &self.history
    }
}

impl Learner for Fpl {
    fn name(&self) -> &'static str {
        "fpl"
    }

    fn n(&self) -> usize {
        self.n
    }

    fn play(&self, rng: &mut RngStream) -> Result<Ranking> {
        if self.round >= self.horizon {
            return Err(Error::HorizonExhausted { round: self.round + 1, horizon: self.horizon });
        }
        fpl_step(&self.history, &self.config, rng)
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        if self.round >= self.horizon {
            return Err(Error::HorizonExhausted { round: self.round + 1, horizon: self.horizon });
        }
        self.setting.validate(self.n, feedback)?;
        for (h, &s) in self.history.iter_mut().zip(feedback.scores()) {
            *h += s;
        }
        self.round += 1;
        Ok(())
    }
}

/// Largest `n` for which [`MwExplicit`] enumerates all rankings.
pub const MW_MAX_ITEMS: usize = 8;

/// Draws `rankings[i]` with probability proportional to
/// `exp(−beta·cumulative_losses[i])`.
pub fn mw_explicit_step(
    rankings: &[Ranking],
    cumulative_losses: &[f64],
    beta: f64,
    rng: &mut RngStream,
) -> Result<Ranking> {
    if rankings.len() != cumulative_losses.len() {
        return Err(Error::DimensionMismatch {
            expected: rankings.len(),
            got: cumulative_losses.len(),
        });
    }
    let n = rankings.first().map_or(0, Ranking::len);
    if n > MW_MAX_ITEMS {
        return Err(Error::TooLarge { n, max: MW_MAX_ITEMS });
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta must be finite and >= 0, got {beta}")));
    }
    if rankings.is_empty() {
        return Err(Error::InvalidParameter("no rankings to choose from".into()));
    }
    let best = cumulative_losses.iter().copied().fold(f64::INFINITY, f64::min);
    let mass: Vec<f64> = cumulative_losses.iter().map(|&l| (-beta * (l - best)).exp()).collect();
    let total: f64 = mass.iter().sum();
    let target = rng.unit() * total;
    let mut acc = 0.0;
    for (r, m) in rankings.iter().zip(&mass) {
        acc += m;
        if target < acc {
            return Ok(r.clone());
        }
    }
    Ok(rankings[rankings.len() - 1].clone())
}

/// Multiplicative weights with one expert per ranking.
#[derive(Debug, Clone)]
pub struct MwExplicit {
    n: usize,
    horizon: usize,
    setting: Setting,
    beta: f64,
    rankings: Vec<Ranking>,
    losses: Vec<f64>,
    round: usize,
}

impl MwExplicit {
    pub fn new(n: usize, horizon: usize, setting: Setting, beta: f64) -> Result<Self> {
        if n > MW_MAX_ITEMS {
            return Err(Error::TooLarge { n, max: MW_MAX_ITEMS });
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta must be finite and >= 0, got {beta}")));
        }
        setting.complexity_bound(n)?;
        let rankings = Ranking::all(n);
        let losses = vec![0.0; rankings.len()];
        Ok(Self { n, horizon, setting, beta, rankings, losses, round: 0 })
    }

    pub fn rankings(&self) -> &[Ranking] {
        &self.rankings
    }

    /// Cumulative pairwise loss of each ranking, aligned with [`Self::rankings`].
    pub fn losses(&self) -> &[f64] {
        &self.losses
    }

    /// Probability of each ranking being played next.
    pub fn distribution(&self) -> Vec<f64> {
        let best = self.losses.iter().copied().fold(f64::INFINITY, f64::min);
        let mass: Vec<f64> =
            self.losses.iter().map(|&l| (-self.beta * (l - best)).exp()).collect();
        let total: f64 = mass.iter().sum();
        mass.into_iter().map(|m| m / total).collect()
    }
}

impl Learner for MwExplicit {
    fn name(&self) -> &'static str {
        "mw-explicit"
    }

    fn n(&self) -> usize {
        self.n
    }

    fn play(&self, rng: &mut RngStream) -> Result<Ranking> {
        if self.round >= self.horizon {
            return Err(Error::HorizonExhausted { round: self.round + 1, horizon: self.horizon });
        }
        mw_explicit_step(&self.rankings, &self.losses, self.beta, rng)
    }

    fn observe(&mut self, feedback: &Feedback) -> Result<()> {
        if self.round >= self.horizon {
            return Err(Error::HorizonExhausted { round: self.round + 1, horizon: self.horizon });
        }
        self.setting.validate(self.n, feedback)?;
        for (r, l) in self.rankings.iter().zip(self.losses.iter_mut()) {
            *l += pairwise_loss(r, feedback)?;
        }
        self.round += 1;
        Ok(())
    }
}
