//! Per-round feedback and the feedback settings a learner can be run in.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};
use crate::ranking::{Item, Ranking};

/// What kind of score function a [`Feedback`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeedbackKind {
    /// Exactly one item chosen.
    SingleChoice,
    /// Between 1 and `k` items chosen.
    KChoice(usize),
    /// Any 0/1 indicator.
    GeneralBinary,
    /// Arbitrary real scores (Spearman mode stores `s = -σ`).
    RealValued,
}

/// A score function `s` over the items, stored densely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feedback {
    scores: Vec<f64>,
    kind: FeedbackKind,
}

impl Feedback {
    /// Indicator of the single chosen `item`.
    pub fn single(n: usize, item: Item) -> Result<Self> {
        if item >= n {
            return Err(Error::ItemOutOfRange { item, n });
        }
        let mut scores = vec![0.0; n];
        scores[item] = 1.0;
        Ok(Self { scores, kind: FeedbackKind::SingleChoice })
    }

    /// Indicator of a set of between 1 and `k` distinct chosen items.
    pub fn k_choice(n: usize, k: usize, items: &[Item]) -> Result<Self> {
        check_k(n, k)?;
        if items.is_empty() || items.len() > k {
            return Err(Error::SettingViolation(format!(
                "k-choice feedback needs 1 to {k} chosen items, got {}",
                items.len()
            )));
        }
        let scores = indicator(n, items)?;
        Ok(Self { scores, kind: FeedbackKind::KChoice(k) })
    }

    /// Indicator of an arbitrary set of distinct chosen items.
    pub fn general(n: usize, items: &[Item]) -> Result<Self> {
        let scores = indicator(n, items)?;
        Ok(Self { scores, kind: FeedbackKind::GeneralBinary })
    }

    /// Real-valued scores.
    pub fn real(scores: Vec<f64>) -> Result<Self> {
        if let Some((item, &value)) = scores.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "score {value} of item {item} is not finite"
            )));
        }
        Ok(Self { scores, kind: FeedbackKind::RealValued })
    }

    /// Spearman feedback for the revealed ranking `sigma`: `s(u) = -σ(u)`.
    pub fn spearman(sigma: &Ranking) -> Self {
        let scores = sigma.positions().iter().map(|&p| -(p as f64)).collect();
        Self { scores, kind: FeedbackKind::RealValued }
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    #[inline]
    pub fn score(&self, item: Item) -> f64 {
        self.scores[item]
    }

    pub fn kind(&self) -> FeedbackKind {
        self.kind
    }

    /// `true` when every score is 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.scores.iter().all(|&s| s == 0.0 || s == 1.0)
    }

    /// Items with a nonzero score, in index order.
    pub fn chosen(&self) -> Vec<Item> {
        self.scores
            .iter()
            .enumerate()
            .filter(|(_, &s)| s != 0.0)
            .map(|(u, _)| u)
            .collect()
    }
}

fn indicator(n: usize, items: &[Item]) -> Result<Vec<f64>> {
    let mut scores = vec![0.0; n];
    for &item in items {
        if item >= n {
            return Err(Error::ItemOutOfRange { item, n });
        }
        if scores[item] != 0.0 {
            return Err(Error::SettingViolation(format!("item {item} chosen twice")));
        }
        scores[item] = 1.0;
    }
    Ok(scores)
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if 2 * k > n {
        return Err(Error::KTooLarge { k, n });
    }
    Ok(())
}

/// The feedback regime a learner is run in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Setting {
    Single,
    KChoice { k: usize },
    General,
    Spearman,
}

impl Setting {
    /// Upper bound `M` on the per-round pairwise loss used to tune the
    /// learning rate: `n`, `n·k`, `n²/4` or `n⁴`.
    pub fn complexity_bound(&self, n: usize) -> Result<f64> {
        let nf = n as f64;
        match *self {
            Setting::Single => Ok(nf),
            Setting::KChoice { k } => {
                check_k(n, k)?;
                Ok(nf * k as f64)
            }
            Setting::General => Ok(nf * nf / 4.0),
            Setting::Spearman => Ok(nf.powi(4)),
        }
    }

    /// Largest number of items chosen in one round (`n` for the unrestricted
    /// settings).
    pub fn max_chosen(&self, n: usize) -> usize {
        match *self {
            Setting::Single => 1,
            Setting::KChoice { k } => k,
            Setting::General | Setting::Spearman => n,
        }
    }

    /// Checks that `feedback` is admissible under this setting for `n` items.
    pub fn validate(&self, n: usize, feedback: &Feedback) -> Result<()> {
        if feedback.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: feedback.len() });
        }
        match *self {
            Setting::Single => {
                let ones = count_ones(feedback)?;
                if ones != 1 {
                    return Err(Error::SettingViolation(format!(
                        "single choice needs exactly one chosen item, got {ones}"
                    )));
                }
            }
            Setting::KChoice { k } => {
                check_k(n, k)?;
                let ones = count_ones(feedback)?;
                if ones == 0 || ones > k {
                    return Err(Error::SettingViolation(format!(
                        "k-choice needs 1 to {k} chosen items, got {ones}"
                    )));
                }
            }
            Setting::General => {
                count_ones(feedback)?;
            }
            Setting::Spearman => {
                let mut seen = vec![false; n];
                for &s in feedback.scores() {
                    let p = -s;
                    let ok = p.fract() == 0.0 && p >= 1.0 && p <= n as f64;
                    if !ok || std::mem::replace(&mut seen[p as usize - 1], true) {
                        return Err(Error::SettingViolation(
                            "Spearman feedback must be a negated permutation of 1..=n".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

fn count_ones(feedback: &Feedback) -> Result<usize> {
    if !feedback.is_binary() {
        return Err(Error::SettingViolation("expected a 0/1 indicator".into()));
    }
    Ok(feedback.scores().iter().filter(|&&s| s == 1.0).count())
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Setting::Single => write!(f, "single"),
            Setting::KChoice { k } => write!(f, "k-choice(k={k})"),
            Setting::General => write!(f, "general"),
            Setting::Spearman => write!(f, "spearman"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complexity_bounds() {
        assert_eq!(Setting::Single.complexity_bound(10).unwrap(), 10.0);
        assert_eq!(Setting::KChoice { k: 3 }.complexity_bound(10).unwrap(), 30.0);
        assert_eq!(Setting::General.complexity_bound(10).unwrap(), 25.0);
        assert_eq!(Setting::Spearman.complexity_bound(5).unwrap(), 625.0);
        assert_eq!(
            Setting::KChoice { k: 6 }.complexity_bound(10),
            Err(Error::KTooLarge { k: 6, n: 10 })
        );
    }

    #[test]
    fn k_choice_rejects_oversized_sets() {
        assert!(Feedback::k_choice(10, 2, &[0, 1, 2]).is_err());
        assert!(Feedback::k_choice(10, 2, &[]).is_err());
        assert!(Feedback::k_choice(10, 2, &[1, 1]).is_err());
        assert!(Feedback::k_choice(3, 2, &[0]).is_err());
        let s = Feedback::k_choice(10, 3, &[4, 7]).unwrap();
        assert_eq!(s.chosen(), vec![4, 7]);
    }

    #[test]
    fn validation_by_setting() {
        let single = Feedback::single(4, 2).unwrap();
        let pair = Feedback::general(4, &[0, 2]).unwrap();
        assert!(Setting::Single.validate(4, &single).is_ok());
        assert!(Setting::Single.validate(4, &pair).is_err());
        assert!(Setting::KChoice { k: 2 }.validate(4, &pair).is_ok());
        assert!(Setting::General.validate(4, &pair).is_ok());
        assert!(Setting::General.validate(5, &pair).is_err());

        let sigma = Feedback::spearman(&Ranking::from_positions(vec![2, 4, 1, 3]).unwrap());
        assert_eq!(sigma.scores(), &[-2.0, -4.0, -1.0, -3.0]);
        assert!(Setting::Spearman.validate(4, &sigma).is_ok());
        assert!(Setting::Spearman.validate(4, &pair).is_err());
        let dup = Feedback::real(vec![-1.0, -1.0, -2.0, -3.0]).unwrap();
        assert!(Setting::Spearman.validate(4, &dup).is_err());
    }

    #[test]
    fn real_rejects_non_finite() {
        assert!(Feedback::real(vec![0.0, f64::NAN]).is_err());
    }
}
