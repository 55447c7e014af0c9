//! Control-scheme engines over score streams: Shewhart limits, two-sided
//! tabular CUSUM, EWMA for approximately normal statistics, EWMA for
//! approximately chi-squared statistics, plus bound lookup and the
//! constructive minimum-reference-sample calculators.

use crate::error::{Error, Result};
use crate::math::{chi2_quantile, normal_quantile};
use crate::score::BatchScore;
use crate::tables;
use serde::Serialize;

/// Chart scheme and its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Scheme {
    /// Two-sided limits on an approximately standard normal statistic.
    ShewhartNormal,
    /// Upper limit on an approximately chi-squared statistic with `df`
    /// degrees of freedom (e.g. a batch sum of squared scores).
    ShewhartChi2 { df: u32 },
    /// Two-sided tabular CUSUM with allowance k.
    Cusum { k: f64 },
    /// EWMA with smoothing lambda on a normal statistic.
    EwmaNormal { lambda: f64 },
    /// EWMA with smoothing lambda on a chi-squared(m) statistic, updated as
    /// E = lambda * Y/m + (1 - lambda) * E.
    EwmaChi2 { lambda: f64, m: u32 },
}

/// Resolved chart configuration: scheme, nominal in-control ARL, bounds.
#[derive(Debug, Clone, Serialize)]
pub struct ChartConfig {
    pub scheme: Scheme,
    pub arl: u32,
    pub lower: Option<f64>,
    pub upper: f64,
}

fn lookup<const W: usize>(axis: &[f64; W], v: f64, what: &str) -> Result<usize> {
    axis.iter()
        .position(|&a| (a - v).abs() < 1e-9)
        .ok_or_else(|| {
            Error::UnsupportedConfig(format!("{what} = {v} has no tabulated bounds"))
        })
}

fn arl_row(arl: u32) -> Result<usize> {
    tables::CHART_ARLS
        .iter()
        .position(|&a| a == arl)
        .ok_or_else(|| Error::UnsupportedConfig(format!("ARL {arl} has no tabulated bounds")))
}

/// Resolve (lower, upper) control limits for a scheme at a nominal ARL.
///
/// Shewhart limits come from closed forms; CUSUM and EWMA limits from the
/// embedded tables; chi-squared EWMA limits from the rho factors via
/// U = 1 + rho_U * sqrt(2 lambda / ((2 - lambda) m)) and the analogous L.
pub fn bounds_for(scheme: Scheme, arl: u32) -> Result<(Option<f64>, f64)> {
    match scheme {
        Scheme::ShewhartNormal => {
            if arl < 2 {
                return Err(Error::UnsupportedConfig("ARL must be >= 2".into()));
            }
            let u = normal_quantile(1.0 - 1.0 / (2.0 * arl as f64))?;
            Ok((Some(-u), u))
        }
        Scheme::ShewhartChi2 { df } => {
            if arl < 2 {
                return Err(Error::UnsupportedConfig("ARL must be >= 2".into()));
            }
            Ok((None, chi2_quantile(1.0 - 1.0 / arl as f64, df)?))
        }
        Scheme::Cusum { k } => {
            let u = tables::CUSUM_BOUNDS[arl_row(arl)?][lookup(&tables::CUSUM_KS, k, "k")?];
            Ok((Some(-u), u))
        }
        Scheme::EwmaNormal { lambda } => {
            let u =
                tables::EWMA_BOUNDS[arl_row(arl)?][lookup(&tables::EWMA_LAMBDAS, lambda, "lambda")?];
            Ok((Some(-u), u))
        }
        Scheme::EwmaChi2 { lambda, m } => {
            if m < 1 {
                return Err(Error::UnsupportedConfig("m must be >= 1".into()));
            }
            let row = arl_row(arl)?;
            let col = lookup(&tables::EWMA_CHI2_LAMBDAS, lambda, "lambda")?;
            let rho_u = tables::EWMA_CHI2_RHO_UPPER[row][col];
            let rho_l = tables::EWMA_CHI2_RHO_LOWER[row][col];
            if rho_l.is_nan() {
                return Err(Error::UnsupportedConfig(format!(
                    "chi-squared EWMA lower bound was never published for lambda {lambda}, ARL {arl}"
                )));
            }
            let f = (2.0 * lambda / ((2.0 - lambda) * m as f64)).sqrt();
            Ok((Some(1.0 - rho_l * f), 1.0 + rho_u * f))
        }
    }
}

impl ChartConfig {
    /// Build a configuration with bounds resolved from the embedded tables
    /// or closed forms.
    pub fn new(scheme: Scheme, arl: u32) -> Result<Self> {
        validate_scheme(scheme)?;
        let (lower, upper) = bounds_for(scheme, arl)?;
        Ok(ChartConfig {
            scheme,
            arl,
            lower,
            upper,
        })
    }

    /// Build a configuration with caller-supplied bounds (for parameters
    /// outside the embedded tables).
    pub fn with_bounds(scheme: Scheme, lower: Option<f64>, upper: f64) -> Result<Self> {
        validate_scheme(scheme)?;
        Ok(ChartConfig {
            scheme,
            arl: 0,
            lower,
            upper,
        })
    }
}

fn validate_scheme(scheme: Scheme) -> Result<()> {
    match scheme {
        Scheme::Cusum { k } if !(k > 0.0) => {
            Err(Error::UnsupportedConfig("CUSUM allowance k must be > 0".into()))
        }
        Scheme::EwmaNormal { lambda } | Scheme::EwmaChi2 { lambda, .. }
            if !(lambda > 0.0 && lambda <= 1.0) =>
        {
            Err(Error::UnsupportedConfig("lambda must lie in (0, 1]".into()))
        }
        _ => Ok(()),
    }
}

/// Direction of a bound crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    Upper,
    Lower,
}

/// A single bound crossing.
#[derive(Debug, Clone, Serialize)]
pub struct SignalReport {
    pub batch_index: u32,
    pub statistic: f64,
    pub bound: f64,
    pub direction: Direction,
}

/// One CUSUM update: C+ = max(0, C+ + z - k), C- = min(0, C- + z + k).
pub fn cusum_step(c_plus: f64, c_minus: f64, z: f64, k: f64) -> (f64, f64) {
    ((c_plus + z - k).max(0.0), (c_minus + z + k).min(0.0))
}

/// One EWMA update: E = lambda * z + (1 - lambda) * E.
pub fn ewma_step(e: f64, z: f64, lambda: f64) -> f64 {
    lambda * z + (1.0 - lambda) * e
}

/// One chi-squared EWMA update: E = lambda * y/m + (1 - lambda) * E.
pub fn ewma_chi2_step(e: f64, y: f64, lambda: f64, m: u32) -> f64 {
    lambda * y / m as f64 + (1.0 - lambda) * e
}

/// Running accumulators and signal log for one chart.
#[derive(Debug, Clone)]
pub struct ChartState {
    pub config: ChartConfig,
    pub c_plus: f64,
    pub c_minus: f64,
    pub ewma: f64,
    pub step: u32,
    pub signals: Vec<SignalReport>,
}

impl ChartState {
    pub fn new(config: ChartConfig) -> Self {
        let ewma0 = match config.scheme {
            Scheme::EwmaChi2 { .. } => 1.0,
            _ => 0.0,
        };
        ChartState {
            config,
            c_plus: 0.0,
            c_minus: 0.0,
            ewma: ewma0,
            step: 0,
            signals: Vec::new(),
        }
    }

    /// Feed one statistic value; returns the charted value (the statistic
    /// itself for Shewhart schemes, C+ for CUSUM, E for EWMA) after
    /// recording any bound crossing. Accumulators are not reset on signal.
    pub fn update(&mut self, stat: f64) -> f64 {
        self.step += 1;
        let idx = self.step;
        let upper = self.config.upper;
        let lower = self.config.lower;
        match self.config.scheme {
            Scheme::ShewhartNormal | Scheme::ShewhartChi2 { .. } => {
                self.check(idx, stat, lower, upper);
                stat
            }
            Scheme::Cusum { k } => {
                let (cp, cm) = cusum_step(self.c_plus, self.c_minus, stat, k);
                self.c_plus = cp;
                self.c_minus = cm;
                if cp > upper {
                    self.push(idx, cp, upper, Direction::Upper);
                }
                if let Some(l) = lower {
                    if cm < l {
                        self.push(idx, cm, l, Direction::Lower);
                    }
                }
                cp
            }
            Scheme::EwmaNormal { lambda } => {
                self.ewma = ewma_step(self.ewma, stat, lambda);
                let e = self.ewma;
                self.check(idx, e, lower, upper);
                e
            }
            Scheme::EwmaChi2 { lambda, m } => {
                self.ewma = ewma_chi2_step(self.ewma, stat, lambda, m);
                let e = self.ewma;
                self.check(idx, e, lower, upper);
                e
            }
        }
    }

    fn check(&mut self, idx: u32, value: f64, lower: Option<f64>, upper: f64) {
        if value > upper {
            self.push(idx, value, upper, Direction::Upper);
        } else if let Some(l) = lower {
            if value < l {
                self.push(idx, value, l, Direction::Lower);
            }
        }
    }

    fn push(&mut self, batch_index: u32, statistic: f64, bound: f64, direction: Direction) {
        self.signals.push(SignalReport {
            batch_index,
            statistic,
            bound,
            direction,
        });
    }
}

/// Which batch statistic feeds the chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StatSelector {
    /// Location statistic Z = sum of SNS / sqrt(n).
    Z,
    /// Scale statistic: batch sum of squared SNS.
    ZSq,
}

/// What happens to the reference pool when the chart first signals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FreezePolicy {
    /// Keep absorbing every batch.
    Never,
    /// Freeze the pool at the first signal; the signaling batch itself and
    /// all later batches are excluded from the reference.
    OnFirstSignal,
}

/// Anything that can score successive batches against a growing reference.
pub trait SequentialScorer {
    fn peek_next(&self, batch: &[f64]) -> Result<BatchScore>;
    fn absorb_batch(&mut self, batch: &[f64]);
    fn freeze(&mut self);
    fn is_frozen(&self) -> bool;
}

impl SequentialScorer for crate::score::RankState {
    fn peek_next(&self, batch: &[f64]) -> Result<BatchScore> {
        crate::score::RankState::peek_next(self, batch)
    }
    fn absorb_batch(&mut self, batch: &[f64]) {
        crate::score::RankState::absorb_batch(self, batch)
    }
    fn freeze(&mut self) {
        crate::score::RankState::freeze(self)
    }
    fn is_frozen(&self) -> bool {
        crate::score::RankState::is_frozen(self)
    }
}

impl SequentialScorer for crate::score::ConditionalRankState {
    fn peek_next(&self, batch: &[f64]) -> Result<BatchScore> {
        crate::score::ConditionalRankState::peek_next(self, batch)
    }
    fn absorb_batch(&mut self, batch: &[f64]) {
        crate::score::ConditionalRankState::absorb_batch(self, batch)
    }
    fn freeze(&mut self) {
        crate::score::ConditionalRankState::freeze(self)
    }
    fn is_frozen(&self) -> bool {
        crate::score::ConditionalRankState::is_frozen(self)
    }
}

/// One charted batch in a run.
#[derive(Debug, Clone, Serialize)]
pub struct ChartPoint {
    pub index: u32,
    /// The selected batch statistic (Z or the SNS-square sum).
    pub statistic: f64,
    pub c_plus: Option<f64>,
    pub c_minus: Option<f64>,
    pub ewma: Option<f64>,
    pub signal: bool,
}

/// Full output of a chart run.
#[derive(Debug, Clone, Serialize)]
pub struct ChartRun {
    pub points: Vec<ChartPoint>,
    pub scores: Vec<BatchScore>,
    pub signals: Vec<SignalReport>,
    /// Batch index at which the reference pool was frozen, if any.
    pub frozen_at: Option<u32>,
}

impl ChartRun {
    pub fn first_signal(&self) -> Option<u32> {
        self.signals.first().map(|s| s.batch_index)
    }
}

/// Drive a scorer and a chart over a batch sequence.
///
/// `warmup` batches are scored and absorbed but not charted; a chi-squared
/// EWMA starts from E = 1 at the end of the warmup. With
/// `FreezePolicy::OnFirstSignal`, the pool freezes on the signaling batch,
/// excluding it and all later batches from the reference.
pub fn run_chart<S: SequentialScorer>(
    scorer: &mut S,
    batches: &[Vec<f64>],
    selector: StatSelector,
    config: &ChartConfig,
    freeze: FreezePolicy,
    warmup: usize,
) -> Result<ChartRun> {
    let mut chart = ChartState::new(config.clone());
    let mut points = Vec::with_capacity(batches.len());
    let mut scores = Vec::with_capacity(batches.len());
    let mut frozen_at = None;
    for (i, batch) in batches.iter().enumerate() {
        let index = (i + 1) as u32;
        let score = scorer.peek_next(batch)?;
        let stat = match selector {
            StatSelector::Z => score.z,
            StatSelector::ZSq => score.z_sq,
        };
        let mut point = ChartPoint {
            index,
            statistic: stat,
            c_plus: None,
            c_minus: None,
            ewma: None,
            signal: false,
        };
        if i >= warmup {
            let before = chart.signals.len();
            chart.step = index - 1;
            chart.update(stat);
            point.signal = chart.signals.len() > before;
            match config.scheme {
                Scheme::Cusum { .. } => {
                    point.c_plus = Some(chart.c_plus);
                    point.c_minus = Some(chart.c_minus);
                }
                Scheme::EwmaNormal { .. } | Scheme::EwmaChi2 { .. } => {
                    point.ewma = Some(chart.ewma);
                }
                _ => {}
            }
            if point.signal && freeze == FreezePolicy::OnFirstSignal && frozen_at.is_none() {
                scorer.freeze();
                frozen_at = Some(index);
            }
        }
        scorer.absorb_batch(batch);
        scores.push(score);
        points.push(point);
    }
    Ok(ChartRun {
        points,
        scores,
        signals: chart.signals,
        frozen_at,
    })
}

/// Scheme selector for the minimum-reference-sample calculators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinSampleScheme {
    /// Shewhart chart on batches of size m.
    Shewhart { m: u32 },
    Cusum { k: f64 },
    EwmaNormal { lambda: f64 },
    EwmaChi2Upper { lambda: f64 },
    EwmaChi2Lower { lambda: f64 },
}

/// Smallest reference-sample size after which a run of extremal new
/// observations (each beyond everything pooled so far) can breach the bound.
/// Computed constructively from the extremal score sequences, not by table
/// lookup.
pub fn min_reference_sample(scheme: MinSampleScheme, arl: u32) -> Result<u32> {
    const MAX_ITERS: u32 = 100_000;
    match scheme {
        MinSampleScheme::Shewhart { m } => {
            if m < 1 {
                return Err(Error::UnsupportedConfig("batch size m must be >= 1".into()));
            }
            // A batch of m values all beyond R pooled observations has
            // Z = sqrt(m) * quantile((R + 0.5)/(R + 1)); find the smallest R
            // pushing that past the two-sided limit.
            let bound = normal_quantile(1.0 - 1.0 / (2.0 * arl as f64))?;
            let mut r = 1u32;
            loop {
                let z = (m as f64).sqrt()
                    * normal_quantile((r as f64 + 0.5) / (r as f64 + 1.0))?;
                if z > bound {
                    return Ok(r);
                }
                r += 1;
                if r > MAX_ITERS {
                    return Err(Error::UnsupportedConfig(
                        "minimum-sample search did not converge".into(),
                    ));
                }
            }
        }
        MinSampleScheme::Cusum { k } => {
            let (lower, _) = bounds_for(Scheme::Cusum { k }, arl)?;
            let l = lower.unwrap();
            let mut c = 0.0;
            for i in 1..=MAX_ITERS {
                let z = normal_quantile(0.5 / i as f64)?;
                c = (c + z + k).min(0.0);
                if c < l {
                    return Ok(i - 1);
                }
            }
            Err(Error::UnsupportedConfig(
                "minimum-sample search did not converge".into(),
            ))
        }
        MinSampleScheme::EwmaNormal { lambda } => {
            let (_, u) = bounds_for(Scheme::EwmaNormal { lambda }, arl)?;
            let mut e = 0.0;
            for i in 1..=MAX_ITERS {
                let z = normal_quantile(0.5 / i as f64)?;
                e = ewma_step(e, z, lambda);
                if e.abs() > u {
                    return Ok(i - 1);
                }
            }
            Err(Error::UnsupportedConfig(
                "minimum-sample search did not converge".into(),
            ))
        }
        MinSampleScheme::EwmaChi2Upper { lambda } => {
            // Only the upper limit matters here; build it directly from the
            // rho factor so configurations whose lower limit was never
            // published remain usable on the upper side.
            let rho_u = tables::EWMA_CHI2_RHO_UPPER[arl_row(arl)?]
                [lookup(&tables::EWMA_CHI2_LAMBDAS, lambda, "lambda")?];
            let u = 1.0 + rho_u * (2.0 * lambda / (2.0 - lambda)).sqrt();
            // Ever-larger magnitudes: the i-th squared score is
            // quantile((i - 0.5)/i)^2, starting from E = 0.
            let mut e = 0.0;
            for i in 1..=MAX_ITERS {
                let q = normal_quantile((i as f64 - 0.5) / i as f64)?;
                e = ewma_chi2_step(e, q * q, lambda, 1);
                if e > u {
                    return Ok(i - 1);
                }
            }
            Err(Error::UnsupportedConfig(
                "minimum-sample search did not converge".into(),
            ))
        }
        MinSampleScheme::EwmaChi2Lower { lambda } => {
            let (lower, _) = bounds_for(Scheme::EwmaChi2 { lambda, m: 1 }, arl)?;
            let l = lower.unwrap();
            // Central observations keep squared scores minimal: 0 at odd
            // steps (exact middle rank), quantile(0.5 + 0.5/i)^2 at even
            // steps; E starts from 1 at the first observation.
            let mut e = 1.0;
            let mut i = 1u32;
            loop {
                i += 1;
                let y = if i % 2 == 1 {
                    0.0
                } else {
                    let q = normal_quantile(0.5 + 0.5 / i as f64)?;
                    q * q
                };
                e = ewma_chi2_step(e, y, lambda, 1);
                if e < l {
                    return Ok(i - 1);
                }
                if i > MAX_ITERS {
                    return Err(Error::UnsupportedConfig(
                        "minimum-sample search did not converge".into(),
                    ));
                }
            }
        }
    }
}
