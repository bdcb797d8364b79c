//! Behavioural properties of the learners.

mod common;

use common::{histogram, ranking_index};
use onlinerank::evaluation::{all_pairs, play, PlayOptions};
use onlinerank::prelude::*;
use onlinerank::stats::{binomial_std_error, chi_square_gof, mean, std_error};
use proptest::prelude::*;

#[test]
fn first_round_is_uniform_for_every_sampler() {
    let n = 4;
    for sampler in SamplerKind::ALL {
        let cfg = LearnerConfig::new(n, 10, Setting::Single, 0.3, sampler).unwrap();
        let learner = OnlineRank::new(cfg);
        let mut rng = RngStream::new(1, 0);
        let (_, index) = ranking_index(n);
        let mut counts = vec![0u64; 24];
        for _ in 0..120_000 {
            counts[index[&learner.step(&mut rng).unwrap()]] += 1;
        }
        assert!(chi_square_gof(&counts, &[1.0 / 24.0; 24]).unwrap().p_value > 0.001);
    }
}

#[test]
fn sampled_marginal_after_repeated_choice() {
    let cfg = LearnerConfig::new(3, 100, Setting::Single, 0.1, SamplerKind::QuickSort).unwrap();
    let mut learner = OnlineRank::new(cfg);
    for _ in 0..100 {
        learner.update(&Feedback::single(3, 0).unwrap()).unwrap();
    }
    // horizon reached; sample the frozen weights directly
    let w = learner.weights();
    let mut rng = RngStream::new(2, 0);
    let draws = 100_000;
    let ahead = (0..draws)
        .filter(|_| quicksort_sample(&w, &mut rng).unwrap().beats(0, 1))
        .count();
    let p = 1.0 / (1.0 + (-10f64).exp());
    assert!((ahead as f64 / draws as f64 - p).abs() <= 4.0 * binomial_std_error(p, draws) + 1e-5);
}

fn binary_sequence() -> impl Strategy<Value = (usize, Vec<Vec<bool>>)> {
    (2usize..9).prop_flat_map(|n| (Just(n), prop::collection::vec(prop::collection::vec(any::<bool>(), n), 1..40)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Per pair, the sampler plays two-action multiplicative weights with
    /// losses Σ[s(v)−s(u)]₊ (for u ahead of v) and Σ[s(u)−s(v)]₊.
    #[test]
    fn pairwise_marginal_is_two_action_multiplicative_weights((n, rounds) in binary_sequence(), eta in 0.01f64..1.0) {
        let cfg = LearnerConfig::new(n, rounds.len(), Setting::General, eta, SamplerKind::default()).unwrap();
        let mut learner = OnlineRank::new(cfg);
        let mut loss_ahead = vec![vec![0.0; n]; n];
        for chosen in &rounds {
            let items: Vec<usize> = (0..n).filter(|&u| chosen[u]).collect();
            let s = Feedback::general(n, &items).unwrap();
            learner.update(&s).unwrap();
            for u in 0..n {
                for v in 0..n {
                    loss_ahead[u][v] += (s.score(v) - s.score(u)).max(0.0);
                }
            }
            let w = learner.weights();
            for (u, v) in all_pairs(n) {
                let a = (-eta * loss_ahead[u][v]).exp();
                let b = (-eta * loss_ahead[v][u]).exp();
                let mw = a / (a + b);
                prop_assert!((pairwise_marginal(&w, u, v).unwrap() - mw).abs() < 1e-12);
            }
        }
    }

    /// Weights equal η times the accumulated scores.
    #[test]
    fn weights_track_cumulative_scores((n, rounds) in binary_sequence(), eta in 0.01f64..1.0) {
        let cfg = LearnerConfig::new(n, rounds.len(), Setting::General, eta, SamplerKind::QuickSort).unwrap();
        let mut learner = OnlineRank::new(cfg);
        let mut counts = vec![0u32; n];
        for chosen in &rounds {
            let items: Vec<usize> = (0..n).filter(|&u| chosen[u]).collect();
            learner.update(&Feedback::general(n, &items).unwrap()).unwrap();
            for &u in &items {
                counts[u] += 1;
            }
        }
        for (w, c) in learner.weights().iter().zip(&counts) {
            prop_assert_eq!(*w, eta * *c as f64);
        }
    }
}

#[test]
fn fpl_with_no_history_is_uniform() {
    let cfg = FplConfig::auto(Setting::Single, 3, 100).unwrap();
    let mut rng = RngStream::new(3, 0);
    let (_, index) = ranking_index(3);
    let mut counts = vec![0u64; 6];
    for _ in 0..100_000 {
        counts[index[&fpl_step(&[0.0; 3], &cfg, &mut rng).unwrap()]] += 1;
    }
    assert!(chi_square_gof(&counts, &[1.0 / 6.0; 6]).unwrap().p_value > 0.001);
}

#[test]
fn mw_explicit_samples_follow_its_distribution() {
    let beta = 0.5;
    let mut mw = MwExplicit::new(3, 10, Setting::Single, beta).unwrap();
    mw.observe(&Feedback::single(3, 0).unwrap()).unwrap();
    let probs = mw.distribution();
    let mut rng = RngStream::new(4, 0);
    let (_, index) = ranking_index(3);
    let mut counts = vec![0u64; 6];
    for _ in 0..100_000 {
        counts[index[&mw.play(&mut rng).unwrap()]] += 1;
    }
    // Ranking::all and ranking_index enumerate in the same order
    assert!(chi_square_gof(&counts, &probs).unwrap().p_value > 0.001);
}

#[test]
fn mw_explicit_matches_online_rank_marginals_at_zero_history() {
    let w = [0.0; 4];
    let uniform = histogram(SamplerKind::PlackettLuce, &w, 48_000, &mut RngStream::new(5, 0));
    assert!(chi_square_gof(&uniform, &[1.0 / 24.0; 24]).unwrap().p_value > 0.001);
    let mw = MwExplicit::new(4, 1, Setting::Single, 0.2).unwrap();
    assert!(mw.distribution().iter().all(|&p| (p - 1.0 / 24.0).abs() < 1e-15));
}

/// Against a uniformly random single choice, no learner can do better or
/// worse than (n−1)/2 per round in expectation.
#[test]
fn uniform_adversary_fixes_expected_step_loss() {
    let n = 10;
    let horizon = 5000;
    let mut means = [Vec::new(), Vec::new(), Vec::new()];
    for seed in 0..12u64 {
        let seq = uniform_single_choice(n, horizon, &mut RngStream::new(seed, 0)).unwrap();
        let options = PlayOptions { keep_rankings: false, checkpoint_every: None };
        let learners: Vec<Box<dyn Learner>> = vec![
            Box::new(OnlineRank::new(
                LearnerConfig::auto(n, horizon, Setting::Single, SamplerKind::QuickSort).unwrap(),
            )),
            Box::new(OnlineRank::new(
                LearnerConfig::auto(n, horizon, Setting::Single, SamplerKind::PlackettLuceGumbel)
                    .unwrap(),
            )),
            Box::new(
                Fpl::new(n, horizon, Setting::Single, FplConfig::auto(Setting::Single, n, horizon).unwrap())
                    .unwrap(),
            ),
        ];
        for (slot, mut learner) in means.iter_mut().zip(learners) {
            let rec = play(learner.as_mut(), &seq, &mut RngStream::new(seed, 1), options).unwrap();
            slot.push(rec.mean_zero_indexed_loss());
        }
    }
    for m in &means {
        let se = std_error(m);
        assert!((mean(m) - 4.5).abs() <= 3.0 * se, "{} ± {se}", mean(m));
    }
}

#[test]
fn every_learner_emits_valid_rankings() {
    let n = 5;
    let horizon = 60;
    let seq = uniform_k_choice(n, 2, horizon, &mut RngStream::new(6, 0)).unwrap();
    let setting = seq.setting();
    let learners: Vec<Box<dyn Learner>> = vec![
        Box::new(OnlineRank::new(LearnerConfig::auto(n, horizon, setting, SamplerKind::PlackettLuce).unwrap())),
        Box::new(Fpl::new(n, horizon, setting, FplConfig::auto(setting, n, horizon).unwrap()).unwrap()),
        Box::new(MwExplicit::new(n, horizon, setting, 0.3).unwrap()),
    ];
    for mut learner in learners {
        let mut rng = RngStream::new(6, 1);
        for s in seq.steps() {
            let r = learner.play(&mut rng).unwrap();
            assert!(Ranking::from_positions(r.positions().to_vec()).is_ok());
            learner.observe(s).unwrap();
        }
        assert!(learner.play(&mut rng).is_err(), "{} past horizon", learner.name());
    }
}
