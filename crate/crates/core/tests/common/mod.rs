#![allow(dead_code)]

use std::collections::HashMap;

use onlinerank::prelude::*;
use rand::Rng;

/// Index of every ranking of `n` items, for histogramming draws.
pub fn ranking_index(n: usize) -> (Vec<Ranking>, HashMap<Ranking, usize>) {
    let all = Ranking::all(n);
    let index = all.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
    (all, index)
}

pub fn histogram(
    sampler: SamplerKind,
    w: &[f64],
    draws: usize,
    rng: &mut RngStream,
) -> Vec<u64> {
    let (all, index) = ranking_index(w.len());
    let mut counts = vec![0u64; all.len()];
    for _ in 0..draws {
        counts[index[&sampler.sample(w, rng).unwrap()]] += 1;
    }
    counts
}

/// Plackett-Luce probability of a full ranking, by the chain rule.
pub fn plackett_luce_probability(w: &[f64], r: &Ranking) -> f64 {
    let order = r.order();
    let mut p = 1.0;
    for i in 0..order.len() {
        let rest: f64 = order[i..].iter().map(|&u| w[u].exp()).sum();
        p *= w[order[i]].exp() / rest;
    }
    p
}

pub fn random_weights(n: usize, lo: f64, hi: f64, rng: &mut RngStream) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// `L(π) = Σ_{u ≺_π v} C[u][v]` with `C[u][v] = Σ_t [s_t(v) − s_t(u)]₊`,
/// minimized over all `n!` rankings by enumeration.
pub fn brute_force_best(seq: &FeedbackSequence) -> (Ranking, f64) {
    let n = seq.n();
    let mut cost = vec![vec![0.0; n]; n];
    for s in seq.steps() {
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    cost[u][v] += (s.score(v) - s.score(u)).max(0.0);
                }
            }
        }
    }
    let mut best: Option<(Ranking, f64)> = None;
    for r in Ranking::all(n) {
        let mut loss = 0.0;
        for u in 0..n {
            for v in 0..n {
                if u != v && r.beats(u, v) {
                    loss += cost[u][v];
                }
            }
        }
        if best.as_ref().map_or(true, |(_, b)| loss < *b) {
            best = Some((r, loss));
        }
    }
    best.unwrap()
}
