//! Ranking-layer checks: brute-force midrank oracle, pool immutability,
//! first-batch behavior, conditional recombination arithmetic, and the
//! signed-rank statistic.

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use snscharts::math::normal_quantile;
use snscharts::{
    nsr_statistic, transform_centered_square, ConditionalRankState, RankPool, RankState,
};

/// Midrank of a new observation against a plain slice of pooled values.
fn brute_rank(pool: &[f64], x: f64) -> f64 {
    let less = pool.iter().filter(|&&v| v < x).count();
    let eq = pool.iter().filter(|&&v| v == x).count();
    less as f64 + 1.0 + eq as f64 / 2.0
}

#[test]
fn pool_rank_matches_brute_force_with_ties() {
    // A coarse value grid forces plenty of exact ties.
    let mut pool = RankPool::new();
    let mut plain: Vec<f64> = Vec::new();
    let mut state = 12345u64;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 33) % 13) as f64 * 0.5 - 3.0
    };
    for _ in 0..400 {
        let x = next();
        // Probe before inserting, at the value itself and off-grid points.
        for probe in [x, x + 0.25, x - 0.25, -10.0, 10.0] {
            assert_eq!(pool.sequential_rank(probe), brute_rank(&plain, probe));
        }
        pool.insert(x);
        plain.push(x);
        assert_eq!(pool.len(), plain.len());
    }
}

#[test]
fn pool_counts_and_zero_normalization() {
    let mut pool = RankPool::new();
    for x in [1.0, 1.0, 2.0, -0.0, 0.0, 3.5] {
        pool.insert(x);
    }
    assert_eq!(pool.counts(1.0), (2, 2));
    assert_eq!(pool.counts(0.0), (0, 2));
    assert_eq!(pool.counts(-0.0), (0, 2));
    assert_eq!(pool.counts(2.5), (5, 0));
    assert_eq!(pool.sequential_rank(1.0), 4.0);
}

#[test]
fn seed_ranks_use_midranks_within_the_batch() {
    let mut state = RankState::new();
    let score = state.seed_first_batch(&[1.0, 2.0, 2.0, 3.0]).unwrap();
    // Midranks 1, 2.5, 2.5, 4 over n = 4 give rankits 0.125, 0.5, 0.5, 0.875.
    let expect: Vec<f64> = [0.125, 0.5, 0.5, 0.875]
        .iter()
        .map(|&p| normal_quantile(p).unwrap())
        .collect();
    for (got, want) in score.sns.iter().zip(&expect) {
        assert_abs_diff_eq!(got, want, epsilon = 1e-14);
    }
    assert_eq!(state.pool_len(), 4);
}

#[test]
fn first_batch_z_is_numerically_zero() {
    let mut state = RankState::new();
    let score = state.seed_first_batch(&[3.2, 7.7, 1.1, 5.9, 4.4]).unwrap();
    assert!(score.z.abs() < 1e-12, "Z = {}", score.z);
    // A singleton seed sits at the exact median: rankit 0.5, score 0.
    let mut single = RankState::new();
    assert_eq!(single.seed_first_batch(&[42.0]).unwrap().sns, vec![0.0]);
}

#[test]
fn sequential_scores_match_brute_force() {
    let batches = [
        vec![5.0, 2.0, 8.0, 1.0],
        vec![3.0, 3.0, 9.0, 2.0],
        vec![7.5, 0.5, 5.0, 5.0],
        vec![12.0, -1.0, 6.0, 6.0],
    ];
    let mut state = RankState::new();
    let mut plain: Vec<f64> = Vec::new();
    let first = state.seed_first_batch(&batches[0]).unwrap();
    assert_eq!(first.n, 4);
    plain.extend_from_slice(&batches[0]);
    for batch in &batches[1..] {
        let score = state.score_batch(batch).unwrap();
        let n_pool = plain.len();
        let expect: Vec<f64> = batch
            .iter()
            .map(|&x| {
                normal_quantile((brute_rank(&plain, x) - 0.5) / (n_pool + 1) as f64).unwrap()
            })
            .collect();
        for (got, want) in score.sns.iter().zip(&expect) {
            assert_eq!(got.to_bits(), want.to_bits());
        }
        let z = expect.iter().sum::<f64>() / (expect.len() as f64).sqrt();
        let z_sq: f64 = expect.iter().map(|s| s * s).sum();
        assert_abs_diff_eq!(score.z, z, epsilon = 1e-15);
        assert_abs_diff_eq!(score.z_sq, z_sq, epsilon = 1e-15);
        plain.extend_from_slice(batch);
    }
    assert_eq!(state.pool_len(), 16);
    assert_eq!(state.batches_seen(), 4);
}

#[test]
fn peek_does_not_mutate_state() {
    let mut state = RankState::new();
    state.seed_first_batch(&[1.0, 4.0, 2.0]).unwrap();
    let a = state.peek_batch(&[3.0, 0.5]).unwrap();
    let b = state.peek_batch(&[3.0, 0.5]).unwrap();
    assert_eq!(state.pool_len(), 3);
    assert_eq!(state.batches_seen(), 1);
    for (x, y) in a.sns.iter().zip(&b.sns) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
}

#[test]
fn freeze_stops_pool_growth_but_not_scoring() {
    let mut state = RankState::new();
    state.seed_first_batch(&[1.0, 2.0, 3.0, 4.0]).unwrap();
    state.freeze();
    assert!(state.is_frozen());
    let a = state.score_batch(&[2.5, 10.0]).unwrap();
    let b = state.score_batch(&[2.5, 10.0]).unwrap();
    assert_eq!(state.pool_len(), 4);
    // Identical batches score identically against the frozen pool.
    for (x, y) in a.sns.iter().zip(&b.sns) {
        assert_eq!(x.to_bits(), y.to_bits());
    }
    assert_eq!(state.batches_seen(), 3);
}

#[test]
fn scoring_rejects_bad_input() {
    let mut state = RankState::new();
    assert!(state.seed_first_batch(&[]).is_err());
    assert!(state.seed_first_batch(&[1.0, f64::NAN]).is_err());
    assert!(state.score_batch(&[1.0]).is_err(), "unseeded state must refuse score_batch");
    state.seed_first_batch(&[1.0, 2.0]).unwrap();
    assert!(state.seed_first_batch(&[3.0]).is_err(), "reseeding must be refused");
    assert!(state.score_batch(&[f64::INFINITY]).is_err());
}

#[test]
fn conditional_recombination_matches_hand_arithmetic() {
    let mut state = ConditionalRankState::new(0.0, 0.5).unwrap();
    let first = state.score_next(&[-2.0, -1.0, 1.0, 2.0]).unwrap();
    // Per-side midranks over side size 2 give conditional rankits 0.25 and
    // 0.75; recombined: low side p/2, high side 0.5 + p/2.
    let expect = [0.125, 0.375, 0.625, 0.875];
    for (got, &p) in first.sns.iter().zip(&expect) {
        assert_abs_diff_eq!(got, &normal_quantile(p).unwrap(), epsilon = 1e-14);
    }
    // Next observation 0.5 ranks only against the high-side pool {1, 2}:
    // rank 1 over denominator 3, recombined 0.5 + 0.5 * (0.5/3).
    let next = state.score_next(&[0.5]).unwrap();
    assert_abs_diff_eq!(
        next.sns[0],
        normal_quantile(0.5 + 0.5 * (0.5 / 3.0)).unwrap(),
        epsilon = 1e-14
    );
    // And a low-side observation against {-2, -1}: rank 3 over 3,
    // recombined 0.5 * (2.5/3).
    let low = state.peek_next(&[-0.5]).unwrap();
    assert_abs_diff_eq!(
        low.sns[0],
        normal_quantile(0.5 * (2.5 / 3.0)).unwrap(),
        epsilon = 1e-14
    );
}

#[test]
fn conditional_ranks_view_matches_side_pools() {
    let mut state = ConditionalRankState::new(10.0, 0.25).unwrap();
    state.absorb_batch(&[8.0, 9.0, 11.0, 12.0, 13.0]);
    let ranks = state.peek_conditional_ranks(&[8.5, 12.0, 7.0, 14.0]).unwrap();
    assert_eq!(ranks, vec![2.0, 2.5, 1.0, 4.0]);
}

#[test]
fn conditional_state_rejects_bad_parameters() {
    assert!(ConditionalRankState::new(f64::NAN, 0.5).is_err());
    assert!(ConditionalRankState::new(0.0, 0.0).is_err());
    assert!(ConditionalRankState::new(0.0, 1.0).is_err());
    assert!(ConditionalRankState::new(0.0, -0.3).is_err());
}

#[test]
fn nsr_statistic_matches_hand_oracle() {
    // Diffs 3, -1, 2 have absolute ranks 3, 1, 2: W = 3 - 1 + 2 = 4,
    // scale sqrt(3*4*7/6) = sqrt(14).
    let nsr = nsr_statistic(&[3.0, -1.0, 2.0], 0.0).unwrap();
    assert_abs_diff_eq!(nsr, 4.0 / 14.0f64.sqrt(), epsilon = 1e-14);
    // Observations at theta are dropped: diffs 0, 3, -1, 2 reduce to the
    // same three diffs as above.
    let dropped = nsr_statistic(&[5.0, 8.0, 4.0, 7.0], 5.0).unwrap();
    assert_abs_diff_eq!(dropped, 4.0 / 14.0f64.sqrt(), epsilon = 1e-14);
    assert!(nsr_statistic(&[5.0, 5.0], 5.0).is_err());
    // A symmetric batch has W = 0.
    assert_abs_diff_eq!(nsr_statistic(&[-2.0, 2.0], 0.0).unwrap(), 0.0, epsilon = 1e-14);
}

#[test]
fn centered_square_transform() {
    assert_eq!(
        transform_centered_square(&[1.0, 4.0, -2.0], 1.0),
        vec![0.0, 9.0, 9.0]
    );
}

proptest! {
    #[test]
    fn scores_stay_finite_and_pool_grows_exactly(
        values in proptest::collection::vec(-50.0f64..50.0, 6..48),
    ) {
        let mut state = RankState::new();
        let mut absorbed = 0usize;
        let mut iter = values.chunks(4);
        let first = iter.next().unwrap();
        let seed = state.seed_first_batch(first).unwrap();
        absorbed += first.len();
        prop_assert!(seed.sns.iter().all(|s| s.is_finite()));
        for chunk in iter {
            let peek = state.peek_batch(chunk).unwrap();
            let scored = state.score_batch(chunk).unwrap();
            absorbed += chunk.len();
            // Peeking and scoring agree bit for bit.
            for (a, b) in peek.sns.iter().zip(&scored.sns) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
            prop_assert!(scored.sns.iter().all(|s| s.is_finite()));
            prop_assert!(scored.z_sq >= 0.0);
            prop_assert_eq!(state.pool_len(), absorbed);
        }
    }

    #[test]
    fn pool_rank_equals_brute_force(
        values in proptest::collection::vec(-8i32..8, 1..60),
        probes in proptest::collection::vec(-8i32..8, 1..10),
    ) {
        // Integer-derived values guarantee heavy ties.
        let mut pool = RankPool::new();
        let mut plain = Vec::new();
        for v in values {
            let x = v as f64 / 2.0;
            pool.insert(x);
            plain.push(x);
        }
        for p in probes {
            let x = p as f64 / 2.0;
            prop_assert_eq!(pool.sequential_rank(x), brute_rank(&plain, x));
        }
    }
}
