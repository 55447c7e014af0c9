//! Change-point scan checks: brute-force oracle, invariances, and the
//! weighted variant.

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use snscharts::{
    change_point_location, change_point_location_from, change_point_scale, change_point_weighted,
};

/// Direct two-group scan without prefix sums.
fn brute_scan(series: &[f64], signal: usize, first: usize, var: f64) -> (usize, Vec<f64>) {
    let mut best = (0usize, f64::NEG_INFINITY);
    let mut ts = Vec::new();
    for k in first..=signal {
        let x = &series[..k - 1];
        let y = &series[k - 1..signal];
        let mx = x.iter().sum::<f64>() / x.len() as f64;
        let my = y.iter().sum::<f64>() / y.len() as f64;
        let t = (my - mx) / (var / x.len() as f64 + var / y.len() as f64).sqrt();
        ts.push(t);
        if t > best.1 {
            best = (k, t);
        }
    }
    (best.0, ts)
}

#[test]
fn location_scan_matches_hand_oracle() {
    let series = [0.0, 0.0, 0.0, 2.0, 2.0, 2.0];
    let r = change_point_location(&series, 6).unwrap();
    assert_eq!(r.estimate, 4);
    // At the true split both groups have 3 entries: T = 2 / sqrt(2/3).
    let t4 = r.t_series.iter().find(|(k, _)| *k == 4).unwrap().1;
    assert_abs_diff_eq!(t4, 2.0 / (2.0f64 / 3.0).sqrt(), epsilon = 1e-12);
    assert_eq!(r.t_series.len(), 5);
    assert_eq!(r.signal_index, 6);
}

#[test]
fn scale_scan_halves_the_squared_t() {
    // Variance 2 instead of 1 scales every T by 1/sqrt(2).
    let series = [1.0, 0.5, 2.0, 6.0, 5.0, 7.0, 6.5];
    let loc = change_point_location(&series, 7).unwrap();
    let sc = change_point_scale(&series, 7, 2).unwrap();
    assert_eq!(loc.estimate, sc.estimate);
    for ((k1, t1), (k2, t2)) in loc.t_series.iter().zip(&sc.t_series) {
        assert_eq!(k1, k2);
        assert_abs_diff_eq!(t1 / 2.0f64.sqrt(), *t2, epsilon = 1e-12);
    }
}

#[test]
fn restricted_candidates_are_honored() {
    let series = [5.0, 0.0, 0.0, 0.0, 2.0, 2.0, 2.0];
    let full = change_point_location(&series, 7).unwrap();
    let restricted = change_point_location_from(&series, 7, 4).unwrap();
    assert!(restricted.t_series.iter().all(|(k, _)| *k >= 4));
    assert_eq!(restricted.t_series.len(), 4);
    // The restricted maximum can differ from the unrestricted one.
    assert!(full.t_series.len() > restricted.t_series.len());
}

#[test]
fn ties_break_toward_the_smallest_split() {
    // A symmetric series makes several splits equally good.
    let series = [0.0, 0.0, 1.0, 1.0];
    let r = change_point_location(&series, 4).unwrap();
    let max_t = r.t_series.iter().map(|&(_, t)| t).fold(f64::NEG_INFINITY, f64::max);
    let first_max = r.t_series.iter().find(|&&(_, t)| t == max_t).unwrap().0;
    assert_eq!(r.estimate, first_max);
}

#[test]
fn invalid_arguments_are_rejected() {
    let series = [1.0, 2.0, 3.0, 4.0];
    assert!(change_point_location(&series, 2).is_err());
    assert!(change_point_location(&series, 5).is_err());
    assert!(change_point_location_from(&series, 4, 1).is_err());
    assert!(change_point_location_from(&series, 4, 5).is_err());
    assert!(change_point_weighted(&series, &[1, 1], 4).is_err());
    assert!(change_point_weighted(&series, &[1; 4], 5).is_err());
}

#[test]
fn weighted_scan_with_equal_sizes_matches_location_scan() {
    let series = [0.3, -0.2, 0.1, 1.8, 2.2, 1.9, 2.4];
    for n in [1usize, 4, 9] {
        let w = change_point_weighted(&series, &vec![n; 7], 7).unwrap();
        let l = change_point_location(&series, 7).unwrap();
        assert_eq!(w.estimate, l.estimate);
        for ((k1, t1), (k2, t2)) in w.t_series.iter().zip(&l.t_series) {
            assert_eq!(k1, k2);
            assert_abs_diff_eq!(t1, t2, epsilon = 1e-10);
        }
    }
}

#[test]
fn weighted_scan_matches_hand_oracle() {
    // Three batches of sizes 4, 1, 4 with Z statistics 0, 0, 3: the k = 3
    // split has group sums 0 and 3*sqrt(4) over effective sizes 5 and 4.
    let z = [0.0, 0.0, 3.0];
    let sizes = [4usize, 1, 4];
    let r = change_point_weighted(&z, &sizes, 3).unwrap();
    let t3 = r.t_series.iter().find(|(k, _)| *k == 3).unwrap().1;
    let expect = (6.0 / 4.0 - 0.0) / (1.0f64 / 5.0 + 1.0 / 4.0).sqrt();
    assert_abs_diff_eq!(t3, expect, epsilon = 1e-12);
    assert_eq!(r.estimate, 3);
}

proptest! {
    #[test]
    fn scan_matches_brute_force(
        series in proptest::collection::vec(-5.0f64..5.0, 3..15),
        first in 2usize..5,
    ) {
        let signal = series.len();
        let first = first.min(signal);
        let r = change_point_location_from(&series, signal, first).unwrap();
        let (best, ts) = brute_scan(&series, signal, first, 1.0);
        prop_assert_eq!(r.estimate, best);
        for ((_, got), want) in r.t_series.iter().zip(&ts) {
            prop_assert!((got - want).abs() < 1e-9);
        }
    }

    #[test]
    fn scan_is_shift_invariant(
        series in proptest::collection::vec(-5.0f64..5.0, 4..12),
        shift in -100.0f64..100.0,
    ) {
        let signal = series.len();
        let base = change_point_location(&series, signal).unwrap();
        let shifted: Vec<f64> = series.iter().map(|z| z + shift).collect();
        let moved = change_point_location(&shifted, signal).unwrap();
        prop_assert_eq!(base.estimate, moved.estimate);
        for ((_, a), (_, b)) in base.t_series.iter().zip(&moved.t_series) {
            prop_assert!((a - b).abs() < 1e-7, "{} vs {}", a, b);
        }
    }
}
