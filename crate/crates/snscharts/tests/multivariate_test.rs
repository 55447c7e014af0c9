//! Multivariate-layer checks: Hotelling algebra, closed forms at p = 2,
//! permutation invariance, determinism, and the goodness-of-fit advisory.

use approx::assert_abs_diff_eq;
use snscharts::math::{chi2_quantile, SmallMatrix};
use snscharts::multivariate::{
    hotelling_t2, mv_batch_chart, mv_individual_chart, profile_monitor, sns_of_series,
    validate_chi2_fit, variation1_chart, variation3_centered_square, variation4_sns_squared,
    ProfileReplicate,
};

fn lcg_rows(seed: u64, n: usize, p: usize, scale: f64) -> Vec<Vec<f64>> {
    let mut s = seed;
    (0..n)
        .map(|_| {
            (0..p)
                .map(|_| {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((s >> 33) % 10_000) as f64 / 10_000.0 * scale
                })
                .collect()
        })
        .collect()
}

#[test]
fn hotelling_with_identity_correlation_is_a_scaled_norm() {
    let id = SmallMatrix::identity(3).unwrap();
    assert_abs_diff_eq!(hotelling_t2(&id, &[1.0, 2.0, 3.0], 2), 28.0, epsilon = 1e-12);
    assert_abs_diff_eq!(hotelling_t2(&id, &[0.0, 0.0, 0.0], 5), 0.0, epsilon = 1e-15);
}

#[test]
fn bivariate_t2_matches_the_closed_form() {
    let obs = lcg_rows(11, 16, 2, 4.0);
    let run = mv_individual_chart(&obs, 10, 200, 0.1).unwrap();
    let r = run.ref_corr[0];
    for (row, &t2) in run.sns.iter().zip(&run.t2) {
        let (a, b) = (row[0], row[1]);
        let expect = (a * a + b * b - 2.0 * r * a * b) / (1.0 - r * r);
        assert_abs_diff_eq!(t2, expect, epsilon = 1e-10);
    }
    assert_abs_diff_eq!(run.t2_upper, chi2_quantile(0.995, 2).unwrap(), epsilon = 1e-12);
}

#[test]
fn component_permutation_leaves_t2_unchanged() {
    let obs = lcg_rows(29, 18, 3, 10.0);
    let permuted: Vec<Vec<f64>> = obs.iter().map(|r| vec![r[2], r[0], r[1]]).collect();
    let a = mv_individual_chart(&obs, 10, 200, 0.1).unwrap();
    let b = mv_individual_chart(&permuted, 10, 200, 0.1).unwrap();
    for (x, y) in a.t2.iter().zip(&b.t2) {
        assert_abs_diff_eq!(x, y, epsilon = 1e-9);
    }
    assert_abs_diff_eq!(a.ref_corr_det, b.ref_corr_det, epsilon = 1e-12);
    assert_eq!(a.t2_signals, b.t2_signals);
}

#[test]
fn mv_individual_ewma_follows_the_recurrence() {
    let obs = lcg_rows(3, 20, 2, 6.0);
    let n_ref = 10;
    let run = mv_individual_chart(&obs, n_ref, 370, 0.1).unwrap();
    assert!(run.ewma[..n_ref].iter().all(|e| e.is_none()));
    let mut e = 0.0;
    for i in n_ref..obs.len() {
        e = 0.1 * run.sns_of_t2[i] + 0.9 * e;
        assert_abs_diff_eq!(run.ewma[i].unwrap(), e, epsilon = 1e-12);
    }
}

#[test]
fn batch_chart_freezes_reference_on_first_signal() {
    // Ten stable batches with positively correlated components, then
    // discordant batches (one component high, the other low): an unlikely
    // pattern under the learned correlation, so T^2 explodes.
    let mut batches: Vec<Vec<Vec<f64>>> = Vec::new();
    let base = lcg_rows(41, 10, 5, 1.0);
    let noise = lcg_rows(97, 10, 5, 0.2);
    for (row, eps) in base.iter().zip(&noise) {
        let second: Vec<f64> = row.iter().zip(eps).map(|(v, e)| v + e).collect();
        batches.push(vec![row.clone(), second]);
    }
    for _ in 0..6 {
        batches.push(vec![vec![50.0; 5], vec![-50.0; 5]]);
    }
    let run = mv_batch_chart(&batches, 200).unwrap();
    assert!(run.t2[0].is_none());
    let first = *run.signals.first().expect("the shifted tail must signal");
    assert!(first > 10);
    assert_eq!(run.frozen_at, Some(first));
    assert_abs_diff_eq!(run.upper, chi2_quantile(0.995, 2).unwrap(), epsilon = 1e-12);
    // Determinism: an identical rerun reproduces every value bit for bit.
    let rerun = mv_batch_chart(&batches, 200).unwrap();
    for (a, b) in run.t2.iter().zip(&rerun.t2) {
        assert_eq!(a.map(f64::to_bits), b.map(f64::to_bits));
    }
}

#[test]
fn sns_of_series_starts_at_zero_and_degenerates_on_constants() {
    let scores = sns_of_series(&[4.0, 7.0, 1.0, 9.0]).unwrap();
    assert_eq!(scores[0], 0.0);
    assert!(scores.iter().all(|s| s.is_finite()));
    // A constant series always ranks at the exact middle: every score is 0.
    let flat = sns_of_series(&[2.0; 6]).unwrap();
    assert!(flat.iter().all(|&s| s == 0.0));
}

#[test]
fn variation1_overlay_validates_warmup() {
    assert!(variation1_chart(&[1.0, 2.0], 2, 0.1, 370).is_err());
    let run = variation1_chart(&[2.0; 8], 3, 0.1, 370).unwrap();
    assert!(run.ewma[..3].iter().all(|e| e.is_none()));
    assert!(run.ewma[3..].iter().all(|e| *e == Some(0.0)));
    assert!(run.ewma_signals.is_empty());
}

#[test]
fn centered_square_variation_signals_on_inflated_spread() {
    // Correlated components in control; later phase-2 rows deviate hugely
    // in the first component only, breaking the learned correlation of the
    // centered squares.
    let couple = |rows: Vec<Vec<f64>>, eps: &[Vec<f64>]| -> Vec<Vec<f64>> {
        rows.iter()
            .zip(eps)
            .map(|(r, e)| vec![r[0], r[0] + e[0] * 0.2])
            .collect()
    };
    let reference = couple(lcg_rows(5, 10, 1, 2.0), &lcg_rows(51, 10, 1, 1.0));
    let mut phase2 = couple(lcg_rows(6, 10, 1, 2.0), &lcg_rows(61, 10, 1, 1.0));
    for row in phase2.iter_mut().skip(4) {
        row[0] = 9.0; // far from theta
        row[1] = 1.01; // essentially at theta
    }
    let theta = [1.0, 1.0];
    let run = variation3_centered_square(&reference, &phase2, &theta, 200, 0.1).unwrap();
    assert_eq!(run.t2.len(), 20);
    assert_eq!(run.transformed.len(), 20);
    // The transform really is the centered square.
    assert_abs_diff_eq!(
        run.transformed[0][0],
        (reference[0][0] - 1.0) * (reference[0][0] - 1.0),
        epsilon = 1e-15
    );
    assert!(
        run.t2_signals.iter().any(|&s| s > 14),
        "inflated spread must push T^2 over the limit, got {:?}",
        run.t2_signals
    );
    assert!(run.t2_signals.iter().all(|&s| s > 10));
    if let Some(cp) = &run.change_point {
        assert!(cp.estimate >= 11, "candidates are restricted past the reference");
    }
}

#[test]
fn squared_score_variation_runs_end_to_end() {
    // Three correlated components; later phase-2 rows swing the first
    // component to extremes while pinning the others near the middle.
    let couple = |rows: Vec<Vec<f64>>, eps: &[Vec<f64>]| -> Vec<Vec<f64>> {
        rows.iter()
            .zip(eps)
            .map(|(r, e)| vec![r[0], r[0] + e[0] * 0.3, r[0] - e[1] * 0.3])
            .collect()
    };
    let reference = couple(lcg_rows(15, 10, 1, 2.0), &lcg_rows(151, 10, 2, 1.0));
    let mut phase2 = couple(lcg_rows(16, 10, 1, 2.0), &lcg_rows(161, 10, 2, 1.0));
    let mid = reference.iter().map(|r| r[0]).sum::<f64>() / 10.0;
    for (i, row) in phase2.iter_mut().enumerate().skip(3) {
        row[0] = if i % 2 == 0 { 40.0 } else { -40.0 };
        row[1] = mid;
        row[2] = mid;
    }
    let run = variation4_sns_squared(&reference, &phase2, 200, 0.1).unwrap();
    assert_eq!(run.sns.len(), 20);
    // Stage-two inputs are squares of stage-one scores: all nonnegative.
    assert!(run.transformed.iter().flatten().all(|&v| v >= 0.0));
    assert!(!run.t2_signals.is_empty());
    let cp = run.change_point.as_ref().expect("a signal implies an estimate");
    assert!(cp.estimate >= 2);
    // Mismatched row widths are refused.
    assert!(variation4_sns_squared(&reference, &lcg_rows(1, 5, 2, 1.0), 200, 0.1).is_err());
}

#[test]
fn chi2_fit_advisory_tracks_the_p_value() {
    // A textbook chi-squared(3) sample by inverse transform: high p-value.
    let good: Vec<f64> = (1..=40)
        .map(|i| chi2_quantile((i as f64 - 0.5) / 40.0, 3).unwrap())
        .collect();
    let report = validate_chi2_fit(&good, 3).unwrap();
    assert!(report.p_value > 0.9, "p = {}", report.p_value);
    assert!(!report.advisory);
    // A sample crushed near zero is nothing like chi-squared(3).
    let bad: Vec<f64> = (1..=40).map(|i| i as f64 * 1e-4).collect();
    let report = validate_chi2_fit(&bad, 3).unwrap();
    assert!(report.advisory);
    assert!(report.p_value < 0.01);
}

#[test]
fn profile_monitor_validates_and_fits() {
    let x = vec![0.2, 0.4, 0.6, 0.8, 1.0];
    let reps: Vec<ProfileReplicate> = (0..6)
        .map(|i| ProfileReplicate {
            x: x.clone(),
            y: x.iter().map(|v| 2.0 + 0.8 * v + 0.01 * ((i * 7 % 5) as f64)).collect(),
        })
        .collect();
    let run = profile_monitor(&reps, (2.0, 0.8, 0.001), 370, 0.1).unwrap();
    assert_eq!(run.coeffs.len(), 6);
    for (i, &(a, b, s2)) in run.coeffs.iter().enumerate() {
        // Each replicate is an exact line: intercept absorbs the offset.
        assert_abs_diff_eq!(a, 2.0 + 0.01 * ((i * 7 % 5) as f64), epsilon = 1e-10);
        assert_abs_diff_eq!(b, 0.8, epsilon = 1e-10);
        assert_abs_diff_eq!(s2, 0.0, epsilon = 1e-15);
    }
    assert!(profile_monitor(&reps[..3], (2.0, 0.8, 0.001), 370, 0.1).is_err());
}
