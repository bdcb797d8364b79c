//! Small statistics helpers for Monte Carlo checks.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean, from the unbiased sample variance. Zero for
/// fewer than two samples.
pub fn std_error(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64;
    (var / xs.len() as f64).sqrt()
}

/// Standard error of a binomial proportion with success probability `p`
/// over `trials` draws.
pub fn binomial_std_error(p: f64, trials: usize) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Outcome of a chi-square test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: f64,
    pub p_value: f64,
}

fn survival(statistic: f64, dof: f64) -> Result<f64> {
    let dist = ChiSquared::new(dof)
        .map_err(|e| Error::InvalidParameter(format!("chi-square dof {dof}: {e}")))?;
    Ok(dist.sf(statistic))
}

/// Goodness of fit of observed `counts` to category probabilities `probs`.
pub fn chi_square_gof(counts: &[u64], probs: &[f64]) -> Result<ChiSquare> {
    if counts.len() != probs.len() {
        return Err(Error::DimensionMismatch { expected: probs.len(), got: counts.len() });
    }
    if counts.len() < 2 {
        return Err(Error::InvalidParameter("need at least two categories".into()));
    }
    let total: u64 = counts.iter().sum();
    let mut statistic = 0.0;
    for (&c, &p) in counts.iter().zip(probs) {
        let expected = p * total as f64;
        if expected <= 0.0 {
            return Err(Error::InvalidParameter("category with zero expected count".into()));
        }
        statistic += (c as f64 - expected).powi(2) / expected;
    }
    let dof = (counts.len() - 1) as f64;
    Ok(ChiSquare { statistic, dof, p_value: survival(statistic, dof)? })
}

/// Two-sample homogeneity test: were `a` and `b` drawn from the same
/// categorical distribution? Categories empty in both samples are dropped.
pub fn chi_square_homogeneity(a: &[u64], b: &[u64]) -> Result<ChiSquare> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    if na == 0 || nb == 0 {
        return Err(Error::InvalidParameter("empty sample".into()));
    }
    let total = (na + nb) as f64;
    let mut statistic = 0.0;
    let mut categories = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        let col = (x + y) as f64;
        if col == 0.0 {
            continue;
        }
        categories += 1;
        let ea = col * na as f64 / total;
        let eb = col * nb as f64 / total;
        statistic += (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb;
    }
    if categories < 2 {
        return Err(Error::InvalidParameter("need at least two nonempty categories".into()));
    }
    let dof = (categories - 1) as f64;
    Ok(ChiSquare { statistic, dof, p_value: survival(statistic, dof)? })
}
