//! Items and rankings.
//!
//! Items are the indices `0..n`. A [`Ranking`] stores the 1-indexed position
//! of every item, so `ranking.position(u) == 1` means `u` is ranked first.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::error::{Error, Result};

/// Index of an item in the ground set.
pub type Item = usize;

/// The ground set of `n` items, optionally carrying display labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemSet {
    n: usize,
    labels: Option<Vec<String>>,
}

impl ItemSet {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "an item set needs at least 2 items, got {n}"
            )));
        }
        Ok(Self { n, labels: None })
    }

    /// Builds an item set whose items are named by `labels`, in index order.
    pub fn with_labels<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut seen = HashSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::InvalidParameter(format!("duplicate item label {label:?}")));
            }
        }
        let mut set = Self::new(labels.len())?;
        set.labels = Some(labels);
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Label of `item`, falling back to its index.
    pub fn label(&self, item: Item) -> String {
        match &self.labels {
            Some(labels) => labels[item].clone(),
            None => item.to_string(),
        }
    }

    /// Index of the item carrying `label`.
    pub fn index_of(&self, label: &str) -> Option<Item> {
        match &self.labels {
            Some(labels) => labels.iter().position(|l| l == label),
            None => label.parse().ok().filter(|&i: &usize| i < self.n),
        }
    }
}

/// A ranking of `n` items: a bijection from items onto positions `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Ranking {
    positions: Vec<usize>,
}

impl Ranking {
    /// Builds a ranking from per-item positions (`positions[u]` is the
    /// 1-indexed position of item `u`).
    pub fn from_positions(positions: Vec<usize>) -> Result<Self> {
        let n = positions.len();
        let mut seen = vec![false; n];
        for (item, &p) in positions.iter().enumerate() {
            if p == 0 || p > n {
                return Err(Error::InvalidRanking(format!(
                    "item {item} has position {p}, outside 1..={n}"
                )));
            }
            if std::mem::replace(&mut seen[p - 1], true) {
                return Err(Error::InvalidRanking(format!("position {p} is used twice")));
            }
        }
        Ok(Self { positions })
    }

    /// Builds a ranking from an ordering: `order[0]` is ranked first.
    pub fn from_order(order: &[Item]) -> Result<Self> {
        let n = order.len();
        let mut positions = vec![0; n];
        for (i, &item) in order.iter().enumerate() {
            if item >= n {
                return Err(Error::ItemOutOfRange { item, n });
            }
            if positions[item] != 0 {
                return Err(Error::InvalidRanking(format!("item {item} listed twice")));
            }
            positions[item] = i + 1;
        }
        Ok(Self { positions })
    }

    /// Same as [`Ranking::from_order`] for orders produced internally, which
    /// are permutations by construction.
    pub(crate) fn from_order_unchecked(order: &[Item]) -> Self {
        let mut positions = vec![0; order.len()];
        for (i, &item) in order.iter().enumerate() {
            positions[item] = i + 1;
        }
        debug_assert!(positions.iter().all(|&p| p != 0));
        Self { positions }
    }

    pub(crate) fn from_positions_unchecked(positions: Vec<usize>) -> Self {
        Self { positions }
    }

    /// The ranking placing item `u` at position `u + 1`.
    pub fn identity(n: usize) -> Self {
        Self { positions: (1..=n).collect() }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// 1-indexed position of `item`.
    #[inline]
    pub fn position(&self, item: Item) -> usize {
        self.positions[item]
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    /// Items listed from first to last position.
    pub fn order(&self) -> Vec<Item> {
        let mut order = vec![0; self.positions.len()];
        for (item, &p) in self.positions.iter().enumerate() {
            order[p - 1] = item;
        }
        order
    }

    /// `true` when `u` is ranked ahead of `v`.
    #[inline]
    pub fn beats(&self, u: Item, v: Item) -> bool {
        self.positions[u] < self.positions[v]
    }

    /// Unnormalized Spearman correlation `Σ_u π(u)·σ(u)`.
    pub fn spearman(&self, other: &Ranking) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: other.len() });
        }
        Ok(self
            .positions
            .iter()
            .zip(&other.positions)
            .map(|(&a, &b)| (a * b) as f64)
            .sum())
    }

    /// Every ranking of `n` items, in lexicographic order of their item
    /// orderings. There are `n!` of them; callers keep `n` small.
    pub fn all(n: usize) -> Vec<Ranking> {
        let mut order: Vec<Item> = (0..n).collect();
        let mut out = Vec::new();
        loop {
            out.push(Ranking::from_order_unchecked(&order));
            if !next_permutation(&mut order) {
                break;
            }
        }
        out
    }
}

impl TryFrom<Vec<usize>> for Ranking {
    type Error = Error;

    fn try_from(positions: Vec<usize>) -> Result<Self> {
        Ranking::from_positions(positions)
    }
}

impl From<Ranking> for Vec<usize> {
    fn from(r: Ranking) -> Self {
        r.positions
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
