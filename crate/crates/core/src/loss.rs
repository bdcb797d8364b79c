//! Position loss, pairwise loss and related quantities.
//!
//! The position loss of a ranking `π` under scores `s` is the dot product
//! `Σ_u π(u)·s(u)` with 1-indexed positions. The pairwise loss charges
//! `[s(v) − s(u)]₊` for every ordered pair with `u` ranked ahead of `v`.
//! For a fixed `s` the two differ by a constant that does not depend on `π`,
//! so regret can be measured with either.

use crate::error::{Error, Result};
use crate::feedback::Feedback;
use crate::ranking::{Item, Ranking};

fn check_dims(pi: &Ranking, s: &Feedback) -> Result<()> {
    if pi.len() != s.len() {
        return Err(Error::DimensionMismatch { expected: pi.len(), got: s.len() });
    }
    Ok(())
}

/// `Σ_u π(u)·s(u)` with positions in `1..=n`.
pub fn position_loss(pi: &Ranking, s: &Feedback) -> Result<f64> {
    check_dims(pi, s)?;
    Ok(pi
        .positions()
        .iter()
        .zip(s.scores())
        .map(|(&p, &score)| p as f64 * score)
        .sum())
}

/// Position loss counted from 0: a chosen item in first place costs nothing.
/// Equals [`position_loss`] minus `Σ_u s(u)`.
pub fn zero_indexed_position_loss(pi: &Ranking, s: &Feedback) -> Result<f64> {
    check_dims(pi, s)?;
    Ok(pi
        .positions()
        .iter()
        .zip(s.scores())
        .map(|(&p, &score)| (p - 1) as f64 * score)
        .sum())
}

/// `Σ_{u≠v} 1[u ≺_π v]·[s(v) − s(u)]₊`.
///
/// Runs in `O(n log n)`: a single counting pass for 0/1 scores, a Fenwick
/// tree over the distinct score values otherwise.
pub fn pairwise_loss(pi: &Ranking, s: &Feedback) -> Result<f64> {
    check_dims(pi, s)?;
    let order = pi.order();
    if s.is_binary() {
        // Every chosen item pays one unit per unchosen item ranked ahead of it.
        let mut unchosen_ahead = 0u64;
        let mut loss = 0u64;
        for &u in &order {
            if s.score(u) == 1.0 {
                loss += unchosen_ahead;
            } else {
                unchosen_ahead += 1;
            }
        }
        return Ok(loss as f64);
    }

    let mut values: Vec<f64> = s.scores().to_vec();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let mut counts = Fenwick::new(values.len());
    let mut sums = Fenwick::new(values.len());
    let mut loss = 0.0;
    for &v in &order {
        let sv = s.score(v);
        let idx = values.binary_search_by(|x| x.total_cmp(&sv)).expect("score is present");
        // Items ahead of v with a strictly smaller score.
        let below = counts.prefix(idx);
        let below_sum = sums.prefix(idx);
        loss += below * sv - below_sum;
        counts.add(idx, 1.0);
        sums.add(idx, sv);
    }
    Ok(loss)
}

/// Contribution of the unordered pair `{u, v}` to [`pairwise_loss`].
/// Symmetric in `u` and `v`.
pub fn pairwise_loss_term(pi: &Ranking, s: &Feedback, u: Item, v: Item) -> Result<f64> {
    check_dims(pi, s)?;
    let n = pi.len();
    for item in [u, v] {
        if item >= n {
            return Err(Error::ItemOutOfRange { item, n });
        }
    }
    if u == v {
        return Err(Error::SameItem(u));
    }
    let (first, second) = if pi.beats(u, v) { (u, v) } else { (v, u) };
    Ok((s.score(second) - s.score(first)).max(0.0))
}

/// `Σ_{{u,v}} (s(v) − s(u))²`, the per-round complexity of `s`. For 0/1
/// scores this is the largest pairwise loss any ranking can suffer.
pub fn squared_spread(s: &Feedback) -> f64 {
    let scores = s.scores();
    let mut total = 0.0;
    for (i, &a) in scores.iter().enumerate() {
        for &b in &scores[i + 1..] {
            total += (a - b) * (a - b);
        }
    }
    total
}

/// Fenwick tree over `f64` for prefix sums.
struct Fenwick {
    tree: Vec<f64>,
}

impl Fenwick {
    fn new(len: usize) -> Self {
        Self { tree: vec![0.0; len + 1] }
    }

    fn add(&mut self, idx: usize, delta: f64) {
        let mut i = idx + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over indices `0..end`.
    fn prefix(&self, end: usize) -> f64 {
        let mut i = end;
        let mut total = 0.0;
        while i > 0 {
            total += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        total
    }
}
