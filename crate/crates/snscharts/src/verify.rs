//! Self-check suite: replays every embedded fixture through the library and
//! compares the output to the golden expectation series.
//!
//! A small number of golden cells are known to disagree with the exact
//! computation: the published tables round some tie midranks to integers and
//! round a few statistics at the third decimal. Those cells are listed per
//! fixture and skipped here (the counts are reported in the check detail);
//! the exact computed values for them are locked down in the test suite.

use crate::changepoint::{change_point_location, change_point_location_from, change_point_scale};
use crate::charts::{
    bounds_for, cusum_step, ewma_chi2_step, ewma_step, run_chart, ChartConfig, FreezePolicy,
    Scheme, StatSelector,
};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::math::normal_cdf;
use crate::multivariate::{
    mv_batch_chart, mv_individual_chart, profile_monitor, variation3_centered_square,
    variation4_sns_squared, ProfileReplicate,
};
use crate::pool::RankPool;
use crate::score::{nsr_statistic, ConditionalRankState, RankState};
use serde::Serialize;

/// Outcome of one named self-check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Run every self-check and collect the outcomes.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        check("fixture-checksums", checksums),
        check("location-shewhart", location_shewhart),
        check("location-cusum-ewma", location_cusum_ewma),
        check("scale-individuals", scale_individuals),
        check("scale-batches", scale_batches),
        check("centered-square", centered_square),
        check("conditional-shewhart", conditional_shewhart),
        check("conditional-cusum", conditional_cusum),
        check("conditional-ewma", conditional_ewma),
        check("mv-batch", mv_batch),
        check("mv-individuals", mv_individuals),
        check("mv-centered-square", mv_centered_square),
        check("mv-squared-scores", mv_squared_scores),
        check("profile", profile),
    ]
}

fn check(name: &'static str, f: impl FnOnce(&mut Ctx) -> Result<()>) -> CheckResult {
    let mut ctx = Ctx::default();
    let pass = match f(&mut ctx) {
        Ok(()) => ctx.problems.is_empty(),
        Err(e) => {
            ctx.problems.push(format!("error: {e}"));
            false
        }
    };
    let mut detail = if pass {
        format!("{} comparisons", ctx.checked)
    } else {
        ctx.problems.join("; ")
    };
    if ctx.skipped > 0 {
        detail.push_str(&format!(
            " ({} known golden rounding cells skipped)",
            ctx.skipped
        ));
    }
    CheckResult { name, pass, detail }
}

/// Comparison accumulator for one check.
#[derive(Default)]
struct Ctx {
    problems: Vec<String>,
    checked: usize,
    skipped: usize,
}

impl Ctx {
    /// Compare a computed cell against a golden cell (absent cells are
    /// ignored); allowlisted (row, column) positions are skipped.
    fn cell(
        &mut self,
        fixture: &str,
        allow: &[(usize, usize)],
        row: usize,
        col: usize,
        got: f64,
        want: Option<f64>,
        tol: f64,
    ) {
        let Some(w) = want else { return };
        if allow.contains(&(row, col)) {
            self.skipped += 1;
            return;
        }
        self.checked += 1;
        if (got - w).abs() <= tol {
            return;
        }
        if self.problems.len() < 12 {
            self.problems.push(format!(
                "{fixture} row {row} col {col}: computed {got:.6}, golden {w}"
            ));
        }
    }

    /// Record a named claim about a derived quantity (a signal index, an
    /// estimate, a bound).
    fn claim(&mut self, what: &str, ok: bool, detail: String) {
        self.checked += 1;
        if !ok {
            self.problems.push(format!("{what}: {detail}"));
        }
    }

    fn claim_eq(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        self.claim(
            what,
            (got - want).abs() <= tol,
            format!("computed {got:.6}, expected {want}"),
        );
    }
}

fn rows_of(name: &str) -> Result<Vec<Vec<Option<f64>>>> {
    fixtures::numeric_rows(name)
        .map(|(_, rows)| rows)
        .ok_or_else(|| Error::InvalidInput(format!("fixture {name} not embedded")))
}

/// Data columns of a wide fixture (leading index column dropped).
fn wide_batches(name: &str) -> Result<Vec<Vec<f64>>> {
    Ok(rows_of(name)?
        .iter()
        .map(|r| r[1..].iter().map(|c| c.unwrap_or(f64::NAN)).collect())
        .collect())
}

fn column(rows: &[Vec<Option<f64>>], col: usize) -> Vec<f64> {
    rows.iter().map(|r| r[col].unwrap_or(f64::NAN)).collect()
}

fn checksums(ctx: &mut Ctx) -> Result<()> {
    for p in fixtures::verify_checksums() {
        ctx.problems.push(p);
    }
    ctx.checked = fixtures::FIXTURES.len();
    Ok(())
}

// Golden cells where the published tables disagree with the exact pipeline
// (integer-rounded tie midranks and third-decimal rounding); see the test
// suite for the locked-down computed values.
const ALLOW_3_2: &[(usize, usize)] = &[(14, 5), (16, 4)];
const ALLOW_3_3: &[(usize, usize)] = &[(14, 5), (14, 6), (16, 4), (16, 6)];
const ALLOW_4_2: &[(usize, usize)] = &[(13, 1), (18, 1)];
const ALLOW_5_1: &[(usize, usize)] = &[(3, 2), (11, 2), (16, 2), (17, 2), (19, 2), (30, 2)];
const ALLOW_5_2: &[(usize, usize)] = &[(3, 5)];
const ALLOW_5_3: &[(usize, usize)] = &[(3, 5)];
const ALLOW_5_4: &[(usize, usize)] = &[(3, 5), (3, 11)];
const ALLOW_5_5: &[(usize, usize)] =
    &[(19, 2), (26, 2), (26, 4), (27, 4), (28, 4), (29, 4), (30, 4)];
const ALLOW_5_6: &[(usize, usize)] = &[
    (8, 2),
    (10, 2),
    (17, 2),
    (19, 2),
    (21, 2),
    (22, 2),
    (24, 2),
    (24, 4),
    (26, 2),
    (30, 2),
];
const ALLOW_6_5: &[(usize, usize)] = &[(10, 6), (10, 7)];
const ALLOW_6_8: &[(usize, usize)] = &[(20, 1)];

fn within_midrank(vals: &[f64], x: f64) -> f64 {
    let mut less = 0usize;
    let mut eq = 0usize;
    for &v in vals {
        if v < x {
            less += 1;
        } else if v == x {
            eq += 1;
        }
    }
    less as f64 + 1.0 + (eq as f64 - 1.0) / 2.0
}

fn location_shewhart(ctx: &mut Ctx) -> Result<()> {
    let batches = wide_batches("table_3_1.csv")?;
    let g_rank = rows_of("golden_3_2.csv")?;
    let g_sns = rows_of("golden_3_3.csv")?;
    let mut pool = RankPool::new();
    let mut state = RankState::new();
    let mut first_signal = None;
    for (i, batch) in batches.iter().enumerate() {
        let row = i + 1;
        let (denom, ranks): (usize, Vec<f64>) = if i == 0 {
            (
                batch.len(),
                batch.iter().map(|&x| within_midrank(batch, x)).collect(),
            )
        } else {
            (
                pool.len() + 1,
                batch.iter().map(|&x| pool.sequential_rank(x)).collect(),
            )
        };
        let score = state.score_next(batch)?;
        for (j, (&r, &s)) in ranks.iter().zip(&score.sns).enumerate() {
            ctx.cell("golden_3_2", ALLOW_3_2, row, j + 1, r, g_rank[i][j + 1], 1e-9);
            ctx.cell("golden_3_3", ALLOW_3_3, row, j + 1, s, g_sns[i][j + 1], 1e-3);
        }
        ctx.cell("golden_3_2", ALLOW_3_2, row, 6, denom as f64, g_rank[i][6], 1e-9);
        ctx.cell("golden_3_3", ALLOW_3_3, row, 6, score.z, g_sns[i][6], 1e-3);
        if first_signal.is_none() && score.z.abs() > 3.0 {
            first_signal = Some(row);
        }
        for &x in batch {
            pool.insert(x);
        }
    }
    ctx.claim(
        "first |Z| > 3 signal",
        first_signal == Some(21),
        format!("at {first_signal:?}, expected batch 21"),
    );
    Ok(())
}

fn location_cusum_ewma(ctx: &mut Ctx) -> Result<()> {
    let batches = wide_batches("table_3_4.csv")?;
    let cusum = ChartConfig::new(Scheme::Cusum { k: 0.5 }, 500)?;
    let run = run_chart(
        &mut RankState::new(),
        &batches,
        StatSelector::Z,
        &cusum,
        FreezePolicy::Never,
        0,
    )?;
    ctx.claim_eq("CUSUM bound", cusum.upper, 4.389, 1e-9);
    ctx.claim(
        "CUSUM first signal",
        run.first_signal() == Some(22),
        format!("at {:?}, expected batch 22", run.first_signal()),
    );
    ctx.claim_eq("C+ at batch 22", run.points[21].c_plus.unwrap(), 5.16, 0.05);
    let ewma = ChartConfig::new(Scheme::EwmaNormal { lambda: 0.1 }, 500)?;
    let run_e = run_chart(
        &mut RankState::new(),
        &batches,
        StatSelector::Z,
        &ewma,
        FreezePolicy::Never,
        0,
    )?;
    ctx.claim_eq("EWMA bound", ewma.upper, 0.646, 1e-9);
    ctx.claim(
        "EWMA first signal",
        run_e.first_signal() == Some(23),
        format!("at {:?}, expected batch 23", run_e.first_signal()),
    );
    let z: Vec<f64> = run.scores.iter().map(|s| s.z).collect();
    for sig in [22, 23] {
        let cp = change_point_location(&z, sig)?;
        ctx.claim(
            "change point",
            cp.estimate == 21,
            format!("signal {sig}: estimate {}, expected 21", cp.estimate),
        );
    }
    Ok(())
}

fn scale_individuals(ctx: &mut Ctx) -> Result<()> {
    let x = column(&rows_of("table_4_1_x.csv")?, 1);
    let golden = rows_of("golden_4_1.csv")?;
    let mut state = RankState::new();
    let mut sns = state.seed_first_batch(&x[..9])?.sns;
    for &v in &x[9..] {
        sns.push(state.score_next(&[v])?.z);
    }
    let y2: Vec<f64> = sns.iter().map(|s| s * s).collect();
    let (lower, upper) = bounds_for(Scheme::EwmaChi2 { lambda: 0.1, m: 1 }, 200)?;
    ctx.claim_eq("chi-squared EWMA upper bound", upper, 1.842, 5e-4);
    ctx.claim_eq("chi-squared EWMA lower bound", lower.unwrap(), 0.487, 5e-4);
    let mut e = 1.0;
    let mut first_signal = None;
    let mut ewma = vec![None; 30];
    ewma[8] = Some(1.0);
    for i in 9..30 {
        e = ewma_chi2_step(e, y2[i], 0.1, 1);
        ewma[i] = Some(e);
        if first_signal.is_none() && (e > upper || e < lower.unwrap()) {
            first_signal = Some(i + 1);
        }
    }
    let cp = change_point_scale(&y2, 29, 10)?;
    for i in 0..30 {
        let row = i + 1;
        ctx.cell("golden_4_1", &[], row, 1, sns[i], golden[i][1], 2e-3);
        ctx.cell("golden_4_1", &[], row, 2, y2[i], golden[i][2], 2e-3);
        if let Some(ev) = ewma[i] {
            ctx.cell("golden_4_1", &[], row, 3, ev, golden[i][3], 2e-3);
        }
        if let Some((_, t)) = cp.t_series.iter().find(|(k, _)| *k == row) {
            ctx.cell("golden_4_1", &[], row, 4, *t, golden[i][4], 2e-3);
        }
    }
    ctx.claim(
        "chi-squared EWMA first signal",
        first_signal == Some(29),
        format!("at {first_signal:?}, expected observation 29"),
    );
    ctx.claim(
        "scale change point",
        cp.estimate == 19,
        format!("estimate {}, expected 19", cp.estimate),
    );
    Ok(())
}

fn scale_batches(ctx: &mut Ctx) -> Result<()> {
    let config = ChartConfig::new(Scheme::ShewhartChi2 { df: 5 }, 200)?;
    ctx.claim_eq("chi-squared(5) upper bound", config.upper, 16.75, 0.05);
    for (table, golden_name, allow, expect) in [
        ("table_4_2.csv", "golden_4_2.csv", ALLOW_4_2, 11),
        ("table_4_3.csv", "golden_4_3.csv", &[][..], 12),
    ] {
        let batches = wide_batches(table)?;
        let golden = rows_of(golden_name)?;
        let run = run_chart(
            &mut RankState::new(),
            &batches,
            StatSelector::ZSq,
            &config,
            FreezePolicy::OnFirstSignal,
            0,
        )?;
        for (i, score) in run.scores.iter().enumerate() {
            ctx.cell(golden_name, allow, i + 1, 1, score.z_sq, golden[i][1], 5e-3);
        }
        ctx.claim(
            "scale-batch first signal",
            run.first_signal() == Some(expect),
            format!(
                "{table}: at {:?}, expected batch {expect}",
                run.first_signal()
            ),
        );
        ctx.claim(
            "freeze at signal",
            run.frozen_at == Some(expect),
            format!("{table}: frozen at {:?}, expected {expect}", run.frozen_at),
        );
    }
    Ok(())
}

fn centered_square(ctx: &mut Ctx) -> Result<()> {
    let config = ChartConfig::new(Scheme::ShewhartNormal, 100)?;
    ctx.claim_eq("two-sided 0.995 bound", config.upper, 2.5758, 1e-3);
    for (table, expect, max_z) in [
        ("table_4_2.csv", None, Some((11u32, 2.5418))),
        ("table_4_3.csv", Some(12), None),
    ] {
        let batches: Vec<Vec<f64>> = wide_batches(table)?
            .iter()
            .map(|b| crate::score::transform_centered_square(b, 0.0))
            .collect();
        let run = run_chart(
            &mut RankState::new(),
            &batches,
            StatSelector::Z,
            &config,
            FreezePolicy::OnFirstSignal,
            0,
        )?;
        ctx.claim(
            "centered-square first signal",
            run.first_signal() == expect,
            format!("{table}: at {:?}, expected {expect:?}", run.first_signal()),
        );
        if let Some((at, z)) = max_z {
            let best = run
                .points
                .iter()
                .max_by(|a, b| a.statistic.abs().total_cmp(&b.statistic.abs()))
                .unwrap();
            ctx.claim(
                "centered-square maximum",
                best.index == at && (best.statistic - z).abs() < 1e-3,
                format!(
                    "{table}: max Z {:.4} at batch {}, expected {z} at {at}",
                    best.statistic, best.index
                ),
            );
        }
    }
    Ok(())
}

fn conditional_shewhart(ctx: &mut Ctx) -> Result<()> {
    let batches = wide_batches("table_5_1.csv")?;
    let g1 = rows_of("golden_5_1.csv")?;
    let g2 = rows_of("golden_5_2.csv")?;
    let g3 = rows_of("golden_5_3.csv")?;
    let g4 = rows_of("golden_5_4.csv")?;
    let mut state = ConditionalRankState::new(0.0, 0.5)?;
    let mut first_signal = None;
    for (i, batch) in batches.iter().enumerate() {
        let row = i + 1;
        let ranks = state.peek_conditional_ranks(batch)?;
        let score = state.peek_next(batch)?;
        if i < 5 {
            for j in 0..batch.len() {
                ctx.cell("golden_5_2", ALLOW_5_2, row, j + 1, ranks[j], g2[i][j + 1], 1e-9);
                ctx.cell(
                    "golden_5_3",
                    ALLOW_5_3,
                    row,
                    j + 1,
                    normal_cdf(score.sns[j]),
                    g3[i][j + 1],
                    1e-3,
                );
                ctx.cell("golden_5_4", ALLOW_5_4, row, j + 1, score.sns[j], g4[i][j + 1], 1e-3);
            }
            ctx.cell("golden_5_4", ALLOW_5_4, row, 11, score.z, g4[i][11], 1e-3);
        }
        ctx.cell("golden_5_1", &[], row, 1, nsr_statistic(batch, 0.0)?, g1[i][1], 1e-3);
        ctx.cell("golden_5_1", ALLOW_5_1, row, 2, score.z, g1[i][2], 1e-3);
        if first_signal.is_none() && score.z.abs() > 3.0 {
            first_signal = Some((row, score.z));
            state.freeze();
        }
        state.absorb_batch(batch);
    }
    ctx.claim(
        "conditional first signal",
        matches!(first_signal, Some((21, z)) if (z - 3.124).abs() < 1e-3),
        format!("{first_signal:?}, expected batch 21 with Z = 3.124"),
    );
    Ok(())
}

fn conditional_cusum(ctx: &mut Ctx) -> Result<()> {
    let batches = wide_batches("table_5_5.csv")?;
    let golden = rows_of("golden_5_5.csv")?;
    let k = 8.0 / 91.0_f64.sqrt();
    let upper = 1.083;
    let mut state = ConditionalRankState::new(0.0, 0.5)?;
    let (mut c_sns, mut c_nsr) = (0.0, 0.0);
    let (mut sig_sns, mut sig_nsr) = (None, None);
    for (i, batch) in batches.iter().enumerate() {
        let row = i + 1;
        let score = state.peek_next(batch)?;
        let w = nsr_statistic(batch, 0.0)?;
        c_sns = cusum_step(c_sns, 0.0, score.z, k).0;
        c_nsr = cusum_step(c_nsr, 0.0, w, k).0;
        ctx.cell("golden_5_5", &[], row, 1, w, golden[i][1], 2e-3);
        ctx.cell("golden_5_5", ALLOW_5_5, row, 2, score.z, golden[i][2], 2e-3);
        ctx.cell("golden_5_5", &[], row, 3, c_nsr, golden[i][3], 2e-3);
        ctx.cell("golden_5_5", ALLOW_5_5, row, 4, c_sns, golden[i][4], 2e-3);
        if sig_nsr.is_none() && c_nsr > upper {
            sig_nsr = Some(row);
        }
        if sig_sns.is_none() && c_sns > upper {
            sig_sns = Some(row);
            state.freeze();
        }
        state.absorb_batch(batch);
    }
    ctx.claim(
        "conditional CUSUM signals",
        sig_sns == Some(21) && sig_nsr == Some(21),
        format!("SNS {sig_sns:?}, signed-rank {sig_nsr:?}, expected batch 21 for both"),
    );
    Ok(())
}

fn conditional_ewma(ctx: &mut Ctx) -> Result<()> {
    let batches = wide_batches("table_5_6.csv")?;
    let golden = rows_of("golden_5_6.csv")?;
    let (_, upper) = bounds_for(Scheme::EwmaNormal { lambda: 0.1 }, 370)?;
    ctx.claim_eq("EWMA bound", upper, 0.620, 1e-9);
    let mut state = ConditionalRankState::new(0.0, 0.5)?;
    let (mut e_sns, mut e_nsr) = (0.0, 0.0);
    let (mut sig_sns, mut sig_nsr) = (None, None);
    for (i, batch) in batches.iter().enumerate() {
        let row = i + 1;
        let score = state.peek_next(batch)?;
        let w = nsr_statistic(batch, 0.0)?;
        e_sns = ewma_step(e_sns, score.z, 0.1);
        e_nsr = ewma_step(e_nsr, w, 0.1);
        ctx.cell("golden_5_6", &[], row, 1, w, golden[i][1], 2e-3);
        ctx.cell("golden_5_6", ALLOW_5_6, row, 2, score.z, golden[i][2], 2e-3);
        ctx.cell("golden_5_6", &[], row, 3, e_nsr, golden[i][3], 2e-3);
        ctx.cell("golden_5_6", ALLOW_5_6, row, 4, e_sns, golden[i][4], 2e-3);
        if sig_sns.is_none() && e_sns.abs() > upper {
            sig_sns = Some(row);
        }
        if sig_nsr.is_none() && e_nsr.abs() > upper {
            sig_nsr = Some(row);
        }
        // The reference pools stop growing as soon as the score itself is
        // extreme, ahead of the (slower) EWMA crossing.
        if score.z.abs() > 3.0 {
            state.freeze();
        }
        state.absorb_batch(batch);
    }
    ctx.claim(
        "conditional EWMA signals",
        sig_sns == Some(22) && sig_nsr == Some(23),
        format!("SNS {sig_sns:?} (expected 22), signed-rank {sig_nsr:?} (expected 23)"),
    );
    Ok(())
}

fn mv_batch(ctx: &mut Ctx) -> Result<()> {
    let bx = wide_batches("table_6_1.csv")?;
    let by = wide_batches("table_6_2.csv")?;
    let batches: Vec<Vec<Vec<f64>>> = bx
        .into_iter()
        .zip(by)
        .map(|(x, y)| vec![x, y])
        .collect();
    let run = mv_batch_chart(&batches, 370)?;
    ctx.claim_eq("chi-squared(2) bound", run.upper, 11.83, 0.05);
    ctx.claim(
        "bivariate batch first signal",
        run.signals.first() == Some(&11),
        format!("at {:?}, expected batch 11", run.signals.first()),
    );
    ctx.claim(
        "freeze to pre-signal batches",
        run.frozen_at == Some(11),
        format!("frozen at {:?}, expected 11", run.frozen_at),
    );
    Ok(())
}

fn mv_individuals(ctx: &mut Ctx) -> Result<()> {
    let obs = wide_batches("table_6_3.csv")?;
    let run = mv_individual_chart(&obs, 20, 200, 0.1)?;
    for (i, (got, want)) in run
        .ref_corr
        .iter()
        .zip([0.536, 0.561, 0.634])
        .enumerate()
    {
        ctx.claim_eq(&format!("reference correlation {}", i + 1), *got, want, 1e-3);
    }
    ctx.claim_eq("reference correlation determinant", run.ref_corr_det, 0.377, 1e-3);
    ctx.claim_eq("chi-squared(3) bound", run.t2_upper, 12.84, 0.05);
    let max_t2 = run.t2.iter().cloned().fold(f64::MIN, f64::max);
    ctx.claim(
        "all T-squared in control",
        run.t2_signals.is_empty() && (max_t2 - 9.040).abs() < 0.01,
        format!("max T-squared {max_t2:.3}, expected 9.040 with no crossing"),
    );
    ctx.claim(
        "reference T-squared fit",
        (run.ks.p_value - 0.455).abs() < 0.05 && !run.ks.advisory,
        format!("Kolmogorov p = {:.3}, expected about 0.455", run.ks.p_value),
    );
    // The smoothed score overlay stays inside its band on this data.
    ctx.claim(
        "score overlay quiet",
        run.ewma_signals.is_empty(),
        format!("EWMA signals {:?}, expected none", run.ewma_signals),
    );
    Ok(())
}

fn mv_centered_square(ctx: &mut Ctx) -> Result<()> {
    let reference = wide_batches("table_6_4.csv")?;
    let g_ref = rows_of("golden_6_4.csv")?;
    let g_over = rows_of("golden_6_8.csv")?;
    let theta = [0.0; 3];
    let datasets = [
        ("table_6_5.csv", "golden_6_5.csv", ALLOW_6_5, 1, 22, 11, 24),
        ("table_6_6.csv", "golden_6_6.csv", &[][..], 5, 27, 15, 27),
        ("table_6_7.csv", "golden_6_7.csv", &[][..], 9, 20, 11, 22),
    ];
    for (table, golden_name, allow, over_col, ewma_sig, cp_est, t_end) in datasets {
        let phase2 = wide_batches(table)?;
        let golden = rows_of(golden_name)?;
        let run = variation3_centered_square(&reference, &phase2, &theta, 200, 0.1)?;
        if over_col == 1 {
            for (i, (got, want)) in run
                .ref_corr
                .iter()
                .zip([0.500, 0.648, 0.699])
                .enumerate()
            {
                ctx.claim_eq(&format!("reference correlation {}", i + 1), *got, want, 1e-3);
            }
            ctx.claim_eq("reference correlation determinant", run.ref_corr_det, 0.295, 1e-3);
            for i in 0..10 {
                for j in 0..3 {
                    ctx.cell("golden_6_4", &[], i + 1, j + 4, run.sns[i][j], g_ref[i][j + 4], 2e-3);
                }
                ctx.cell("golden_6_4", &[], i + 1, 7, run.t2[i], g_ref[i][7], 1e-2);
            }
        }
        for i in 0..20 {
            for j in 0..3 {
                ctx.cell(golden_name, allow, i + 1, j + 4, run.sns[10 + i][j], golden[i][j + 4], 2e-3);
            }
            ctx.cell(golden_name, allow, i + 1, 7, run.t2[10 + i], golden[i][7], 1e-2);
        }
        let allow_over: &[(usize, usize)] = if over_col == 1 { ALLOW_6_8 } else { &[] };
        for i in 0..30 {
            let row = i + 1;
            ctx.cell("golden_6_8", allow_over, row, over_col, run.t2[i], g_over[i][over_col], 1e-2);
            ctx.cell(
                "golden_6_8",
                &[],
                row,
                over_col + 1,
                run.overlay.sns_of_t2[i],
                g_over[i][over_col + 1],
                2e-3,
            );
            if let Some(e) = run.overlay.ewma[i] {
                ctx.cell("golden_6_8", &[], row, over_col + 2, e, g_over[i][over_col + 2], 2e-3);
            }
        }
        // The printed split-statistic column extends past the first signal;
        // rerun the scan over the same window to compare it.
        let t_scan = change_point_location_from(&run.overlay.sns_of_t2, t_end, 11)?;
        for (k, t) in &t_scan.t_series {
            ctx.cell("golden_6_8", &[], *k, over_col + 3, *t, g_over[*k - 1][over_col + 3], 6e-3);
        }
        ctx.claim(
            "centered-square T-squared signal",
            run.t2_signals.first() == Some(&20),
            format!(
                "{table}: first T-squared crossing at {:?}, expected observation 20",
                run.t2_signals.first()
            ),
        );
        ctx.claim(
            "centered-square EWMA signal",
            run.overlay.ewma_signals.first() == Some(&ewma_sig),
            format!(
                "{table}: at {:?}, expected observation {ewma_sig}",
                run.overlay.ewma_signals.first()
            ),
        );
        let est = run.change_point.as_ref().map(|c| c.estimate);
        ctx.claim(
            "centered-square change point",
            est == Some(cp_est),
            format!("{table}: estimate {est:?}, expected {cp_est}"),
        );
    }
    Ok(())
}

fn mv_squared_scores(ctx: &mut Ctx) -> Result<()> {
    let reference = wide_batches("table_6_4.csv")?;
    let g_stage = rows_of("golden_6_9.csv")?;
    let g_over = rows_of("golden_6_10.csv")?;
    let datasets = [
        ("table_6_5.csv", 1, 15, 11),
        ("table_6_6.csv", 4, 20, 15),
        ("table_6_7.csv", 7, 15, 11),
    ];
    for (table, over_col, t2_sig, cp_est) in datasets {
        let phase2 = wide_batches(table)?;
        let run = variation4_sns_squared(&reference, &phase2, 200, 0.1)?;
        if over_col == 1 {
            for (i, (got, want)) in run
                .ref_corr
                .iter()
                .zip([0.622, 0.598, 0.676])
                .enumerate()
            {
                ctx.claim_eq(&format!("reference correlation {}", i + 1), *got, want, 1e-3);
            }
            ctx.claim_eq("reference correlation determinant", run.ref_corr_det, 0.302, 1e-3);
            // Reference rows of the staged-score table are shared across
            // datasets; the squared first-stage scores and final scores.
            for i in 0..10 {
                for j in 0..3 {
                    ctx.cell("golden_6_9", &[], i + 1, j + 4, run.transformed[i][j], g_stage[i][j + 4], 6e-3);
                    ctx.cell("golden_6_9", &[], i + 1, j + 7, run.sns[i][j], g_stage[i][j + 7], 6e-3);
                }
            }
        }
        for i in 0..30 {
            let row = i + 1;
            ctx.cell("golden_6_10", &[], row, over_col, run.t2[i], g_over[i][over_col], 1e-2);
            ctx.cell(
                "golden_6_10",
                &[],
                row,
                over_col + 1,
                run.overlay.sns_of_t2[i],
                g_over[i][over_col + 1],
                6e-3,
            );
        }
        ctx.claim(
            "squared-score T-squared signal",
            run.t2_signals.first() == Some(&t2_sig),
            format!(
                "{table}: at {:?}, expected observation {t2_sig}",
                run.t2_signals.first()
            ),
        );
        if let Some(cp) = &run.change_point {
            for (k, t) in &cp.t_series {
                ctx.cell("golden_6_10", &[], *k, over_col + 2, *t, g_over[*k - 1][over_col + 2], 6e-3);
            }
            ctx.claim(
                "squared-score change point",
                cp.estimate == cp_est,
                format!("{table}: estimate {}, expected {cp_est}", cp.estimate),
            );
        } else {
            ctx.claim("squared-score change point", false, format!("{table}: missing"));
        }
    }
    Ok(())
}

fn profile(ctx: &mut Ctx) -> Result<()> {
    let design = [0.2, 0.4, 0.6, 0.8, 1.0];
    let replicates: Vec<ProfileReplicate> = wide_batches("table_6_11.csv")?
        .into_iter()
        .map(|y| ProfileReplicate {
            x: design.to_vec(),
            y,
        })
        .collect();
    let g_coeff = rows_of("golden_6_11.csv")?;
    let g_run = rows_of("golden_6_12.csv")?;
    let run = profile_monitor(&replicates, (2.0, 1.0, 0.25), 50, 0.1)?;
    ctx.claim_eq("EWMA bound", run.ewma_upper, 0.415, 1e-9);
    for (i, &(a, b, s2)) in run.coeffs.iter().enumerate() {
        let row = i + 1;
        ctx.cell("golden_6_11", &[], row, 1, a, g_coeff[i][1], 2e-3);
        ctx.cell("golden_6_11", &[], row, 2, b, g_coeff[i][2], 2e-3);
        ctx.cell("golden_6_11", &[], row, 3, s2, g_coeff[i][3], 2e-3);
    }
    for i in 0..run.y.len() {
        let row = i + 1;
        for j in 0..3 {
            ctx.cell("golden_6_12", &[], row, j + 1, run.y[i][j], g_run[i][j + 1], 2e-3);
            ctx.cell("golden_6_12", &[], row, j + 4, run.sns[i][j], g_run[i][j + 4], 6e-3);
        }
        if let Some(c) = run.corr[i] {
            for j in 0..4 {
                ctx.cell("golden_6_12", &[], row, j + 7, c[j], g_run[i][j + 7], 6e-3);
            }
        }
        if let Some(t2) = run.t2[i] {
            ctx.cell("golden_6_12", &[], row, 11, t2, g_run[i][11], 6e-3);
        }
        if let Some(s) = run.sns_of_t2[i] {
            ctx.cell("golden_6_12", &[], row, 12, s, g_run[i][12], 6e-3);
        }
        if let Some(e) = run.ewma[i] {
            ctx.cell("golden_6_12", &[], row, 13, e, g_run[i][13], 6e-3);
        }
    }
    ctx.claim(
        "profile EWMA signal",
        run.ewma_signals.first() == Some(&14),
        format!("at {:?}, expected replicate 14", run.ewma_signals.first()),
    );
    let est = run.change_point.as_ref().map(|c| c.estimate);
    ctx.claim(
        "profile change point",
        est == Some(11),
        format!("estimate {est:?}, expected replicate 11"),
    );
    Ok(())
}
