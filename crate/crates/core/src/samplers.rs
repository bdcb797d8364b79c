//! Randomized sorting procedures: map a weight vector to a random ranking.
//!
//! All three samplers share the pairwise-marginal property: for any two
//! items `u ≠ v`,
//!
//! ```text
//! Pr[u ranked ahead of v] = e^{w(u)} / (e^{w(u)} + e^{w(v)}).
//! ```
//!
//! The two Plackett-Luce samplers produce the same distribution over full
//! rankings. Noisy QuickSort is only claimed to match pairwise marginals.
//!
//! Probabilities are computed from weight differences through the logistic
//! function, so large cumulative weights never overflow.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ranking::{Item, Ranking};
use crate::rng::RngStream;

/// Which randomized sorting procedure to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum SamplerKind {
    #[serde(rename = "quicksort")]
    QuickSort,
    #[serde(rename = "pl", alias = "plackett-luce")]
    PlackettLuce,
    #[default]
    #[serde(rename = "pl-gumbel", alias = "plackett-luce-gumbel")]
    PlackettLuceGumbel,
}

impl SamplerKind {
    pub const ALL: [SamplerKind; 3] =
        [SamplerKind::QuickSort, SamplerKind::PlackettLuce, SamplerKind::PlackettLuceGumbel];

    pub fn sample(self, w: &[f64], rng: &mut RngStream) -> Result<Ranking> {
        match self {
            SamplerKind::QuickSort => quicksort_sample(w, rng),
            SamplerKind::PlackettLuce => plackett_luce_sample(w, rng),
            SamplerKind::PlackettLuceGumbel => plackett_luce_gumbel(w, rng),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::QuickSort => "quicksort",
            SamplerKind::PlackettLuce => "pl",
            SamplerKind::PlackettLuceGumbel => "pl-gumbel",
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quicksort" => Ok(SamplerKind::QuickSort),
            "pl" | "plackett-luce" => Ok(SamplerKind::PlackettLuce),
            "pl-gumbel" | "plackett-luce-gumbel" => Ok(SamplerKind::PlackettLuceGumbel),
            other => Err(Error::InvalidParameter(format!("unknown sampler {other:?}"))),
        }
    }
}

fn check_weights(w: &[f64]) -> Result<()> {
    match w.iter().position(|x| !x.is_finite()) {
        Some(item) => Err(Error::NonFiniteWeight { item, value: w[item] }),
        None => Ok(()),
    }
}

/// `1 / (1 + e^{-x})` without overflow for large `|x|`.
#[inline]
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Probability that `u` is ranked ahead of `v` under weights `w`:
/// `1 / (1 + e^{w(v) − w(u)})`.
pub fn pairwise_marginal(w: &[f64], u: Item, v: Item) -> Result<f64> {
    check_pair(w, u, v)?;
    Ok(logistic(w[u] - w[v]))
}

/// Natural log of [`pairwise_marginal`], accurate where the probability
/// itself underflows.
pub fn log_pairwise_marginal(w: &[f64], u: Item, v: Item) -> Result<f64> {
    check_pair(w, u, v)?;
    // log σ(x) = -softplus(-x)
    let x = w[u] - w[v];
    Ok(if x >= 0.0 { -(-x).exp().ln_1p() } else { x - x.exp().ln_1p() })
}

fn check_pair(w: &[f64], u: Item, v: Item) -> Result<()> {
    let n = w.len();
    for item in [u, v] {
        if item >= n {
            return Err(Error::ItemOutOfRange { item, n });
        }
    }
    if u == v {
        return Err(Error::SameItem(u));
    }
    Ok(())
}

/// Noisy QuickSort: pick a uniform pivot, send every other item `v` left
/// with probability `e^{w(v)} / (e^{w(v)} + e^{w(p)})`, recurse on both
/// sides. Runs on an explicit stack, in place, in expected `O(n log n)`.
pub fn quicksort_sample(w: &[f64], rng: &mut RngStream) -> Result<Ranking> {
    check_weights(w)?;
    let n = w.len();
    let mut items: Vec<Item> = (0..n).collect();
    let mut stack = vec![(0usize, n)];
    while let Some((lo, hi)) = stack.pop() {
        if hi - lo <= 1 {
            continue;
        }
        let pick = lo + rng.below(hi - lo);
        items.swap(pick, hi - 1);
        let pivot_weight = w[items[hi - 1]];
        let mut boundary = lo;
        for i in lo..hi - 1 {
            let v = items[i];
            if rng.unit() < logistic(w[v] - pivot_weight) {
                items.swap(i, boundary);
                boundary += 1;
            }
        }
        items.swap(boundary, hi - 1);
        stack.push((boundary + 1, hi));
        stack.push((lo, boundary));
    }
    Ok(Ranking::from_order_unchecked(&items))
}

/// Sequential Plackett-Luce: fill positions `1..=n` in turn, drawing the
/// next item from those left with probability proportional to `e^{w(u)}`.
/// `O(n²)`; kept as the reference for [`plackett_luce_gumbel`].
pub fn plackett_luce_sample(w: &[f64], rng: &mut RngStream) -> Result<Ranking> {
    check_weights(w)?;
    let mut remaining: Vec<Item> = (0..w.len()).collect();
    let mut order = Vec::with_capacity(w.len());
    let mut mass = vec![0.0; w.len()];
    while !remaining.is_empty() {
        let top = remaining.iter().map(|&u| w[u]).fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for (slot, &u) in mass.iter_mut().zip(&remaining) {
            *slot = (w[u] - top).exp();
            total += *slot;
        }
        let target = rng.unit() * total;
        let mut acc = 0.0;
        // Falls back to the last item when rounding leaves `target` unreached.
        let mut pick = remaining.len() - 1;
        for (i, &m) in mass[..remaining.len()].iter().enumerate() {
            acc += m;
            if target < acc {
                pick = i;
                break;
            }
        }
        order.push(remaining.remove(pick));
    }
    Ok(Ranking::from_order_unchecked(&order))
}

/// Plackett-Luce via Gumbel perturbations: add an independent standard
/// Gumbel variate to each weight and sort decreasing. Same distribution as
/// [`plackett_luce_sample`] in `O(n log n)`.
pub fn plackett_luce_gumbel(w: &[f64], rng: &mut RngStream) -> Result<Ranking> {
    check_weights(w)?;
    Ok(rank_keyed(w.iter().map(|&x| descending_bits(x + standard_gumbel(rng))).zip(0..).collect()))
}

/// Inverse-CDF draw from `F(x) = exp(−exp(−x))`.
#[inline]
pub fn standard_gumbel(rng: &mut RngStream) -> f64 {
    -(-rng.open01().ln()).ln()
}

/// Ranking that orders items by decreasing key, ties broken by ascending
/// item index.
pub fn sort_decreasing(keys: &[f64]) -> Ranking {
    rank_keyed(keys.iter().map(|&k| descending_bits(k)).zip(0..).collect())
}

/// Integer whose ascending order is the descending [`f64::total_cmp`]
/// order of `x`.
#[inline]
fn descending_bits(x: f64) -> u64 {
    let bits = x.to_bits();
    let ascending = if bits >> 63 == 1 { !bits } else { bits | 1 << 63 };
    !ascending
}

fn rank_keyed(mut keyed: Vec<(u64, Item)>) -> Ranking {
    keyed.sort_unstable();
    let mut positions = vec![0; keyed.len()];
    for (i, &(_, item)) in keyed.iter().enumerate() {
        positions[item] = i + 1;
    }
    Ranking::from_positions_unchecked(positions)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_valid(r: &Ranking, n: usize) -> bool {
        Ranking::from_positions(r.positions().to_vec()).is_ok() && r.len() == n
    }

    #[test]
    fn marginal_examples() {
        assert_eq!(pairwise_marginal(&[0.3, 0.3], 0, 1).unwrap(), 0.5);
        let w = [3f64.ln(), 0.0];
        assert!((pairwise_marginal(&w, 0, 1).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(pairwise_marginal(&w, 0, 0), Err(Error::SameItem(0)));
    }

    #[test]
    fn marginal_is_stable_for_huge_differences() {
        let w = [-800.0, 0.0];
        let p = pairwise_marginal(&w, 0, 1).unwrap();
        assert!(p.is_finite() && (0.0..=1e-300).contains(&p));
        assert_eq!(pairwise_marginal(&w, 1, 0).unwrap(), 1.0);
        let lp = log_pairwise_marginal(&w, 0, 1).unwrap();
        assert!((lp + 800.0).abs() < 1e-12);
        assert!(log_pairwise_marginal(&w, 1, 0).unwrap().abs() < 1e-300);
    }

    #[test]
    fn base_cases() {
        let mut rng = RngStream::new(1, 0);
        for kind in SamplerKind::ALL {
            assert_eq!(kind.sample(&[], &mut rng).unwrap().len(), 0);
            assert_eq!(kind.sample(&[4.0], &mut rng).unwrap(), Ranking::identity(1));
        }
    }

    #[test]
    fn non_finite_weights_rejected() {
        let mut rng = RngStream::new(1, 0);
        for kind in SamplerKind::ALL {
            assert!(matches!(
                kind.sample(&[0.0, f64::INFINITY], &mut rng),
                Err(Error::NonFiniteWeight { item: 1, .. })
            ));
            assert!(kind.sample(&[f64::NAN, 0.0], &mut rng).is_err());
        }
    }

    #[test]
    fn every_draw_is_a_valid_ranking() {
        let mut rng = RngStream::new(9, 0);
        let w: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin() * 40.0).collect();
        for kind in SamplerKind::ALL {
            for _ in 0..200 {
                assert!(is_valid(&kind.sample(&w, &mut rng).unwrap(), 50));
            }
        }
    }

    #[test]
    fn quicksort_sorts_separated_weights_at_scale() {
        // Comparisons are effectively deterministic, so this is a plain sort.
        let n = 100_000;
        let w: Vec<f64> = (0..n).map(|i| i as f64 * 50.0).collect();
        let mut rng = RngStream::new(3, 0);
        let r = quicksort_sample(&w, &mut rng).unwrap();
        assert_eq!(r.order()[0], n - 1);
        assert_eq!(r.order()[n - 1], 0);
    }

    #[test]
    fn ties_break_by_index() {
        let r = sort_decreasing(&[1.0, 2.0, 1.0, 2.0]);
        assert_eq!(r.order(), vec![1, 3, 0, 2]);
    }

    #[test]
    fn heavy_item_goes_first() {
        let mut rng = RngStream::new(5, 0);
        let mut w = vec![0.0; 6];
        w[4] = 20.0;
        for kind in SamplerKind::ALL {
            let first = (0..10_000)
                .filter(|_| kind.sample(&w, &mut rng).unwrap().position(4) == 1)
                .count();
            assert!(first as f64 / 10_000.0 >= 0.999, "{kind}: {first}");
        }
    }

    #[test]
    fn parses_names() {
        for kind in SamplerKind::ALL {
            assert_eq!(kind.name().parse::<SamplerKind>().unwrap(), kind);
        }
        assert_eq!("plackett-luce".parse::<SamplerKind>().unwrap(), SamplerKind::PlackettLuce);
        assert!("bogo".parse::<SamplerKind>().is_err());
    }

    #[test]
    fn descending_bits_reverses_total_order() {
        let mut xs = vec![
            f64::NEG_INFINITY,
            -1e300,
            -2.5,
            -f64::MIN_POSITIVE,
            -0.0,
            0.0,
            f64::MIN_POSITIVE,
            1.0,
            1.0 + f64::EPSILON,
            1e300,
            f64::INFINITY,
        ];
        let mut rng = RngStream::new(8, 0);
        xs.extend((0..200).map(|_| (rng.unit() - 0.5) * 1e3));
        for a in &xs {
            for b in &xs {
                assert_eq!(descending_bits(*a).cmp(&descending_bits(*b)), b.total_cmp(a), "{a} {b}");
            }
        }
    }

    #[test]
    fn sort_decreasing_matches_a_comparison_sort() {
        let mut rng = RngStream::new(9, 0);
        let keys: Vec<f64> = (0..500).map(|_| (rng.below(40) as f64 - 20.0) * 0.25).collect();
        let mut order: Vec<Item> = (0..keys.len()).collect();
        order.sort_by(|&a, &b| keys[b].partial_cmp(&keys[a]).unwrap().then(a.cmp(&b)));
        assert_eq!(sort_decreasing(&keys).order(), order);
    }
}
