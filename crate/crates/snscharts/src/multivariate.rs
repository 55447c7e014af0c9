//! Multivariate monitoring: per-component sequential normal scores, running
//! and frozen correlation matrices, Hotelling T-squared, SNS-of-T-squared
//! overlays, centered-square and squared-score variations, profile
//! monitoring, and the chi-squared goodness-of-fit check.

use crate::changepoint::{change_point_location_from, ChangePointResult};
use crate::charts::{bounds_for, ewma_step, Scheme};
use crate::error::{Error, Result};
use crate::math::{chi2_cdf, chi2_quantile, ks_test, least_squares_line, SmallMatrix};
use crate::pool::RankPool;
use crate::score::RankState;
use serde::Serialize;

/// Hotelling statistic for a mean score vector against an already inverted
/// correlation matrix: T^2 = n * v' * C^-1 * v.
pub fn hotelling_t2(corr_inv: &SmallMatrix, v: &[f64], n: usize) -> f64 {
    n as f64 * corr_inv.quadratic_form(v)
}

/// Hotelling statistic from the correlation matrix itself (inverts it,
/// reporting the determinant on failure).
pub fn mv_score(corr: &SmallMatrix, v: &[f64], n: usize) -> Result<f64> {
    Ok(hotelling_t2(&corr.invert()?, v, n))
}

/// Sequential normal scores of a univariate series treated as individuals:
/// growing pool, first value scored at rankit 0.5 (exactly 0).
pub fn sns_of_series(vals: &[f64]) -> Result<Vec<f64>> {
    let mut state = RankState::new();
    vals.iter()
        .map(|&v| Ok(state.score_next(&[v])?.z))
        .collect()
}

fn seed_columns(rows: &[Vec<f64>], denom_offset: usize) -> Result<Vec<Vec<f64>>> {
    // Rank each column within itself; denominator = column length + offset.
    let p = rows[0].len();
    let n = rows.len();
    let mut out = vec![vec![0.0; p]; n];
    for j in 0..p {
        let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        let mut state = RankState::new();
        let score = if denom_offset == 0 {
            state.seed_first_batch(&col)?
        } else {
            state.seed_first_batch_sequential_rankits(&col)?
        };
        for i in 0..n {
            out[i][j] = score.sns[i];
        }
    }
    Ok(out)
}

fn frozen_pools(rows: &[Vec<f64>]) -> Vec<RankPool> {
    let p = rows[0].len();
    let mut pools = vec![RankPool::new(); p];
    for r in rows {
        for j in 0..p {
            pools[j].insert(r[j]);
        }
    }
    pools
}

fn score_against_pools(pools: &[RankPool], row: &[f64]) -> Result<Vec<f64>> {
    row.iter()
        .zip(pools)
        .map(|(&x, pool)| {
            crate::math::normal_quantile((pool.sequential_rank(x) - 0.5) / (pool.len() + 1) as f64)
        })
        .collect()
}

fn check_rows(rows: &[Vec<f64>], p: usize, what: &str) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidInput(format!("{what}: no observations")));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != p {
            return Err(Error::InvalidInput(format!(
                "{what}: row {} has {} components, expected {p}",
                i + 1,
                r.len()
            )));
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "{what}: non-finite value in row {}",
                i + 1
            )));
        }
    }
    Ok(())
}

/// Output of the batch-mode multivariate chart.
#[derive(Debug, Clone, Serialize)]
pub struct MvBatchRun {
    /// T-squared per batch (none for the first batch).
    pub t2: Vec<Option<f64>>,
    pub upper: f64,
    pub signals: Vec<usize>,
    /// Batch at which pools and correlation were frozen (reference =
    /// batches before it).
    pub frozen_at: Option<usize>,
}

/// Batch-mode multivariate chart: per-component sequential scoring with a
/// running correlation over all scores up to and including the current
/// batch; T^2 = n * mean' * C^-1 * mean against the upper 1/ARL chi-squared
/// quantile. On the first signal the pools and the correlation matrix
/// freeze to the batches before the signal.
///
/// `batches[i][j]` holds batch i's observations for component j.
pub fn mv_batch_chart(batches: &[Vec<Vec<f64>>], arl: u32) -> Result<MvBatchRun> {
    if batches.is_empty() {
        return Err(Error::InvalidInput("mv_batch_chart: no batches".into()));
    }
    let p = batches[0].len();
    if p < 2 || p > 8 {
        return Err(Error::InvalidInput(
            "mv_batch_chart requires 2..=8 components".into(),
        ));
    }
    let upper = chi2_quantile(1.0 - 1.0 / arl as f64, p as u32)?;
    let mut states: Vec<RankState> = (0..p).map(|_| RankState::new()).collect();
    let mut hist: Vec<Vec<f64>> = vec![Vec::new(); p];
    let mut frozen_corr_inv: Option<SmallMatrix> = None;
    let mut frozen_at = None;
    let mut t2_series = Vec::with_capacity(batches.len());
    let mut signals = Vec::new();
    for (i, batch) in batches.iter().enumerate() {
        if batch.len() != p {
            return Err(Error::InvalidInput(format!(
                "batch {} has {} components, expected {p}",
                i + 1,
                batch.len()
            )));
        }
        let n = batch[0].len();
        if batch.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidInput(format!(
                "batch {}: components have unequal sizes",
                i + 1
            )));
        }
        let sns: Vec<Vec<f64>> = batch
            .iter()
            .zip(&mut states)
            .map(|(obs, st)| Ok(st.peek_next(obs)?.sns))
            .collect::<Result<_>>()?;
        let frozen = frozen_at.is_some();
        if i == 0 {
            t2_series.push(None);
        } else {
            let inv = match &frozen_corr_inv {
                Some(inv) => inv.clone(),
                None => {
                    let cols: Vec<Vec<f64>> = hist
                        .iter()
                        .zip(&sns)
                        .map(|(h, s)| {
                            let mut c = h.clone();
                            c.extend_from_slice(s);
                            c
                        })
                        .collect();
                    SmallMatrix::correlation_of(&cols)?.invert()?
                }
            };
            let means: Vec<f64> = sns
                .iter()
                .map(|s| s.iter().sum::<f64>() / s.len() as f64)
                .collect();
            let t2 = hotelling_t2(&inv, &means, n);
            t2_series.push(Some(t2));
            if t2 > upper {
                signals.push(i + 1);
                if !frozen {
                    // Reference = batches before the signal; the running
                    // correlation over them becomes the frozen matrix.
                    frozen_at = Some(i + 1);
                    frozen_corr_inv = Some(SmallMatrix::correlation_of(&hist)?.invert()?);
                    for st in &mut states {
                        st.freeze();
                    }
                }
            }
        }
        if frozen_at.is_none() {
            for (j, (obs, s)) in batch.iter().zip(&sns).enumerate() {
                states[j].absorb_batch(obs);
                hist[j].extend_from_slice(s);
            }
        }
    }
    Ok(MvBatchRun {
        t2: t2_series,
        upper,
        signals,
        frozen_at,
    })
}

/// Output of the individual-observation multivariate chart.
#[derive(Debug, Clone, Serialize)]
pub struct MvIndividualRun {
    pub sns: Vec<Vec<f64>>,
    pub t2: Vec<f64>,
    pub t2_upper: f64,
    pub t2_signals: Vec<usize>,
    /// Upper-triangle reference correlations (pairs in row-major order).
    pub ref_corr: Vec<f64>,
    pub ref_corr_det: f64,
    /// Kolmogorov test of the reference T^2 against chi-squared(p).
    pub ks: Chi2FitReport,
    pub sns_of_t2: Vec<f64>,
    pub ewma: Vec<Option<f64>>,
    pub ewma_upper: f64,
    pub ewma_signals: Vec<usize>,
}

/// Individual-observation multivariate chart: the first `n_ref` rows form
/// the reference (each component ranked within the reference, reference
/// correlation frozen), later rows score against the frozen pools. The
/// T^2 series is additionally converted to sequential normal scores (the
/// reference T^2 ranked within itself, later values against the frozen
/// reference) and smoothed with an EWMA started at 0 after the reference.
pub fn mv_individual_chart(
    obs: &[Vec<f64>],
    n_ref: usize,
    arl: u32,
    lambda: f64,
) -> Result<MvIndividualRun> {
    let p = obs.first().map(|r| r.len()).unwrap_or(0);
    check_rows(obs, p, "mv_individual_chart")?;
    if n_ref < 3 || n_ref > obs.len() {
        return Err(Error::InvalidInput(format!(
            "n_ref must lie in [3, {}], got {n_ref}",
            obs.len()
        )));
    }
    let reference = &obs[..n_ref];
    let mut sns = seed_columns(reference, 0)?;
    let pools = frozen_pools(reference);
    for row in &obs[n_ref..] {
        sns.push(score_against_pools(&pools, row)?);
    }
    let corr_cols: Vec<Vec<f64>> = (0..p).map(|j| sns[..n_ref].iter().map(|r| r[j]).collect()).collect();
    let corr = SmallMatrix::correlation_of(&corr_cols)?;
    let det = corr.det();
    let inv = corr.invert()?;
    let t2: Vec<f64> = sns.iter().map(|v| hotelling_t2(&inv, v, 1)).collect();
    let t2_upper = chi2_quantile(1.0 - 1.0 / arl as f64, p as u32)?;
    let t2_signals: Vec<usize> = t2
        .iter()
        .enumerate()
        .filter(|(_, &t)| t > t2_upper)
        .map(|(i, _)| i + 1)
        .collect();
    let ks = validate_chi2_fit(&t2[..n_ref], p as u32)?;
    // SNS of the T^2 stream with the same reference/frozen-pool structure.
    let mut t2_state = RankState::new();
    let seeded = t2_state.seed_first_batch(&t2[..n_ref])?;
    t2_state.freeze();
    let mut sns_of_t2 = seeded.sns;
    for &t in &t2[n_ref..] {
        sns_of_t2.push(t2_state.score_next(&[t])?.z);
    }
    let (_, ewma_upper) = bounds_for(Scheme::EwmaNormal { lambda }, arl)?;
    let mut ewma = vec![None; obs.len()];
    let mut ewma_signals = Vec::new();
    let mut e = 0.0;
    for i in n_ref..obs.len() {
        e = ewma_step(e, sns_of_t2[i], lambda);
        ewma[i] = Some(e);
        if e.abs() > ewma_upper {
            ewma_signals.push(i + 1);
        }
    }
    let mut ref_corr = Vec::new();
    for i in 0..p {
        for j in (i + 1)..p {
            ref_corr.push(corr.get(i, j));
        }
    }
    Ok(MvIndividualRun {
        sns,
        t2,
        t2_upper,
        t2_signals,
        ref_corr,
        ref_corr_det: det,
        ks,
        sns_of_t2,
        ewma,
        ewma_upper,
        ewma_signals,
    })
}

/// Output of the SNS-of-T-squared overlay.
#[derive(Debug, Clone, Serialize)]
pub struct Variation1Run {
    pub sns_of_t2: Vec<f64>,
    pub ewma: Vec<Option<f64>>,
    pub ewma_upper: f64,
    pub ewma_signals: Vec<usize>,
}

/// Convert a nonnegative statistic stream to sequential normal scores
/// (growing pool) and smooth with an EWMA that starts at 0 at the end of
/// `warmup` and updates from the next value on.
pub fn variation1_chart(
    t2_series: &[f64],
    warmup: usize,
    lambda: f64,
    arl: u32,
) -> Result<Variation1Run> {
    if warmup >= t2_series.len() {
        return Err(Error::InvalidInput(
            "variation1_chart: warmup must be shorter than the series".into(),
        ));
    }
    let sns_of_t2 = sns_of_series(t2_series)?;
    let (_, ewma_upper) = bounds_for(Scheme::EwmaNormal { lambda }, arl)?;
    let mut ewma = vec![None; t2_series.len()];
    let mut ewma_signals = Vec::new();
    let mut e = 0.0;
    for i in warmup..t2_series.len() {
        e = ewma_step(e, sns_of_t2[i], lambda);
        ewma[i] = Some(e);
        if e.abs() > ewma_upper {
            ewma_signals.push(i + 1);
        }
    }
    Ok(Variation1Run {
        sns_of_t2,
        ewma,
        ewma_upper,
        ewma_signals,
    })
}

/// Output of the centered-square and squared-score variations.
#[derive(Debug, Clone, Serialize)]
pub struct VariationRun {
    /// Transformed observations fed to the ranking stage (centered squares,
    /// or squared first-stage scores).
    pub transformed: Vec<Vec<f64>>,
    /// Final per-component scores entering T^2.
    pub sns: Vec<Vec<f64>>,
    pub t2: Vec<f64>,
    pub t2_upper: f64,
    pub t2_signals: Vec<usize>,
    pub ref_corr: Vec<f64>,
    pub ref_corr_det: f64,
    pub ks: Chi2FitReport,
    pub overlay: Variation1Run,
    pub change_point: Option<ChangePointResult>,
}

fn finish_variation(
    transformed: Vec<Vec<f64>>,
    sns: Vec<Vec<f64>>,
    n_ref: usize,
    p: usize,
    arl: u32,
    lambda: f64,
    cp_first_candidate: usize,
    cp_on_ewma_signal: bool,
) -> Result<VariationRun> {
    let corr_cols: Vec<Vec<f64>> =
        (0..p).map(|j| sns[..n_ref].iter().map(|r| r[j]).collect()).collect();
    let corr = SmallMatrix::correlation_of(&corr_cols)?;
    let det = corr.det();
    let inv = corr.invert()?;
    let t2: Vec<f64> = sns.iter().map(|v| hotelling_t2(&inv, v, 1)).collect();
    let t2_upper = chi2_quantile(1.0 - 1.0 / arl as f64, p as u32)?;
    let t2_signals: Vec<usize> = t2
        .iter()
        .enumerate()
        .filter(|(_, &t)| t > t2_upper)
        .map(|(i, _)| i + 1)
        .collect();
    let ks = validate_chi2_fit(&t2[..n_ref], p as u32)?;
    let overlay = variation1_chart(&t2, n_ref, lambda, arl)?;
    let signal = if cp_on_ewma_signal {
        overlay.ewma_signals.first().copied()
    } else {
        t2_signals.first().copied()
    };
    let change_point = match signal {
        Some(s) => Some(change_point_location_from(
            &overlay.sns_of_t2,
            s,
            cp_first_candidate,
        )?),
        None => None,
    };
    let mut ref_corr = Vec::new();
    for i in 0..p {
        for j in (i + 1)..p {
            ref_corr.push(corr.get(i, j));
        }
    }
    Ok(VariationRun {
        transformed,
        sns,
        t2,
        t2_upper,
        t2_signals,
        ref_corr,
        ref_corr_det: det,
        ks,
        overlay,
        change_point,
    })
}

/// Centered-square variation: with a known location vector theta, monitor
/// Y = (X - theta)^2 per component. The first `reference.len()` rows rank
/// within themselves, the correlation freezes on them, and later rows rank
/// against the frozen pools. The change point is estimated from the
/// SNS-of-T^2 series at the first EWMA signal, with candidates restricted
/// to post-reference indices.
pub fn variation3_centered_square(
    reference: &[Vec<f64>],
    phase2: &[Vec<f64>],
    theta: &[f64],
    arl: u32,
    lambda: f64,
) -> Result<VariationRun> {
    let p = theta.len();
    check_rows(reference, p, "variation3 reference")?;
    check_rows(phase2, p, "variation3 phase2")?;
    let n_ref = reference.len();
    let center = |row: &Vec<f64>| -> Vec<f64> {
        row.iter()
            .zip(theta)
            .map(|(&x, &t)| (x - t) * (x - t))
            .collect()
    };
    let y_ref: Vec<Vec<f64>> = reference.iter().map(center).collect();
    let y_p2: Vec<Vec<f64>> = phase2.iter().map(center).collect();
    let mut sns = seed_columns(&y_ref, 0)?;
    let pools = frozen_pools(&y_ref);
    for row in &y_p2 {
        sns.push(score_against_pools(&pools, row)?);
    }
    let mut transformed = y_ref;
    transformed.extend(y_p2);
    finish_variation(transformed, sns, n_ref, p, arl, lambda, n_ref + 1, true)
}

/// Squared-score variation: no location parameter. Raw observations are
/// converted to sequential normal scores (reference ranked within itself,
/// later rows against the frozen pools), the scores are squared, and the
/// squares are ranked again the same way — the reference squares with
/// sequential-style rankits (denominator reference size + 1). The change
/// point is estimated from the SNS-of-T^2 series at the first T^2 signal
/// with an unrestricted candidate range.
pub fn variation4_sns_squared(
    reference: &[Vec<f64>],
    phase2: &[Vec<f64>],
    arl: u32,
    lambda: f64,
) -> Result<VariationRun> {
    let p = reference.first().map(|r| r.len()).unwrap_or(0);
    check_rows(reference, p, "variation4 reference")?;
    check_rows(phase2, p, "variation4 phase2")?;
    let n_ref = reference.len();
    let stage1_ref = seed_columns(reference, 0)?;
    let raw_pools = frozen_pools(reference);
    let square = |rows: &[Vec<f64>]| -> Vec<Vec<f64>> {
        rows.iter()
            .map(|r| r.iter().map(|&s| s * s).collect())
            .collect()
    };
    let sq_ref = square(&stage1_ref);
    let mut sns = seed_columns(&sq_ref, 1)?;
    let sq_pools = frozen_pools(&sq_ref);
    let mut transformed = sq_ref;
    for row in phase2 {
        let s1 = score_against_pools(&raw_pools, row)?;
        let sq: Vec<f64> = s1.iter().map(|&s| s * s).collect();
        sns.push(score_against_pools(&sq_pools, &sq)?);
        transformed.push(sq);
    }
    finish_variation(transformed, sns, n_ref, p, arl, lambda, 2, false)
}

/// A single profile replicate: shared design points and responses.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileReplicate {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl ProfileReplicate {
    /// Least-squares coefficients (intercept, slope, residual variance).
    pub fn fit(&self) -> Result<(f64, f64, f64)> {
        least_squares_line(&self.x, &self.y)
    }
}

/// Output of the profile monitor.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileRun {
    /// Per-replicate (intercept, slope, residual variance).
    pub coeffs: Vec<(f64, f64, f64)>,
    /// Squared deviations from the reference triple.
    pub y: Vec<[f64; 3]>,
    /// Per-component sequential normal scores of the deviations.
    pub sns: Vec<[f64; 3]>,
    /// Running correlations including the current replicate, as
    /// (r12, r13, r23, det), where computable.
    pub corr: Vec<Option<[f64; 4]>>,
    /// T^2 per replicate, deferred while the prior-replicate correlation is
    /// unavailable or near singular.
    pub t2: Vec<Option<f64>>,
    pub sns_of_t2: Vec<Option<f64>>,
    pub ewma: Vec<Option<f64>>,
    pub ewma_upper: f64,
    pub ewma_signals: Vec<usize>,
    pub change_point: Option<ChangePointResult>,
}

/// Self-starting profile monitor: fit a line to each replicate, square the
/// coefficient deviations from the reference triple, score each component
/// sequentially, and chart T^2 built from the correlation of all previous
/// replicates (deferred while |det| < 1e-6). The T^2 values are converted
/// to sequential normal scores and smoothed with an EWMA started at the
/// first charted replicate; the change point is estimated on the score
/// series laid over the full replicate axis (zeros where T^2 was deferred).
pub fn profile_monitor(
    replicates: &[ProfileReplicate],
    theta: (f64, f64, f64),
    arl: u32,
    lambda: f64,
) -> Result<ProfileRun> {
    if replicates.len() < 4 {
        return Err(Error::InvalidInput(
            "profile_monitor requires at least 4 replicates".into(),
        ));
    }
    let coeffs: Vec<(f64, f64, f64)> = replicates
        .iter()
        .map(|r| r.fit())
        .collect::<Result<_>>()?;
    let y: Vec<[f64; 3]> = coeffs
        .iter()
        .map(|&(a, b, s2)| {
            [
                (a - theta.0) * (a - theta.0),
                (b - theta.1) * (b - theta.1),
                (s2 - theta.2) * (s2 - theta.2),
            ]
        })
        .collect();
    let n = y.len();
    let mut sns = vec![[0.0; 3]; n];
    for j in 0..3 {
        let col = sns_of_series(&y.iter().map(|r| r[j]).collect::<Vec<_>>())?;
        for i in 0..n {
            sns[i][j] = col[i];
        }
    }
    let cols_upto = |end: usize| -> Vec<Vec<f64>> {
        (0..3)
            .map(|j| sns[..end].iter().map(|r| r[j]).collect())
            .collect()
    };
    let mut corr = vec![None; n];
    let mut t2 = vec![None; n];
    for i in 1..n {
        if let Ok(c) = SmallMatrix::correlation_of(&cols_upto(i + 1)) {
            corr[i] = Some([c.get(0, 1), c.get(0, 2), c.get(1, 2), c.det()]);
        }
        if i >= 2 {
            if let Ok(c_prev) = SmallMatrix::correlation_of(&cols_upto(i)) {
                if c_prev.det().abs() >= 1e-6 {
                    t2[i] = Some(hotelling_t2(&c_prev.invert()?, &sns[i], 1));
                }
            }
        }
    }
    let present: Vec<f64> = t2.iter().flatten().copied().collect();
    let scored = sns_of_series(&present)?;
    let mut sns_of_t2 = vec![None; n];
    let mut it = scored.into_iter();
    for i in 0..n {
        if t2[i].is_some() {
            sns_of_t2[i] = it.next();
        }
    }
    let (_, ewma_upper) = bounds_for(Scheme::EwmaNormal { lambda }, arl)?;
    let mut ewma = vec![None; n];
    let mut ewma_signals = Vec::new();
    let mut e = 0.0;
    let mut started = false;
    for i in 0..n {
        if let Some(s) = sns_of_t2[i] {
            if !started {
                // EWMA anchors at 0 on the first charted replicate.
                started = true;
                ewma[i] = Some(0.0);
                continue;
            }
            e = ewma_step(e, s, lambda);
            ewma[i] = Some(e);
            if e.abs() > ewma_upper {
                ewma_signals.push(i + 1);
            }
        }
    }
    let change_point = match ewma_signals.first() {
        Some(&sig) => {
            let padded: Vec<f64> = sns_of_t2.iter().map(|v| v.unwrap_or(0.0)).collect();
            Some(change_point_location_from(&padded, sig, 2)?)
        }
        None => None,
    };
    Ok(ProfileRun {
        coeffs,
        y,
        sns,
        corr,
        t2,
        sns_of_t2,
        ewma,
        ewma_upper,
        ewma_signals,
        change_point,
    })
}

/// Kolmogorov comparison of a reference T^2 sample against chi-squared(df).
#[derive(Debug, Clone, Serialize)]
pub struct Chi2FitReport {
    pub d: f64,
    pub p_value: f64,
    /// Set when p <= 0.2: the chi-squared limits are doubtful and the
    /// SNS-of-T^2 overlay should be preferred.
    pub advisory: bool,
}

/// Check whether reference-period T^2 values are plausibly chi-squared(df).
pub fn validate_chi2_fit(t2_reference: &[f64], df: u32) -> Result<Chi2FitReport> {
    let (d, p_value) = ks_test(t2_reference, |x| {
        if x <= 0.0 {
            0.0
        } else {
            chi2_cdf(x, df).unwrap_or(0.0)
        }
    })?;
    Ok(Chi2FitReport {
        d,
        p_value,
        advisory: p_value <= 0.2,
    })
}
