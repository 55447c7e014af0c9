//! Sequential normal scores: the growing-reference ranking state machine,
//! its conditional (known-quantile) variant, batch summary statistics, and
//! the normalized signed-rank baseline.

use crate::error::{Error, Result};
use crate::math::normal_quantile;
use crate::pool::RankPool;
use serde::Serialize;

/// Per-batch scores: the SNS vector, the location statistic Z = sum/sqrt(n),
/// and the scale statistic Z_sq = sum of squares.
#[derive(Debug, Clone, Serialize)]
pub struct BatchScore {
    pub batch_index: u32,
    pub n: usize,
    pub sns: Vec<f64>,
    pub z: f64,
    pub z_sq: f64,
}

impl BatchScore {
    fn from_sns(batch_index: u32, sns: Vec<f64>) -> Self {
        let n = sns.len();
        let z = sns.iter().sum::<f64>() / (n as f64).sqrt();
        let z_sq = sns.iter().map(|s| s * s).sum();
        BatchScore {
            batch_index,
            n,
            sns,
            z,
            z_sq,
        }
    }
}

fn check_finite(batch: &[f64]) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::InvalidInput("empty batch".into()));
    }
    if batch.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite observation".into()));
    }
    Ok(())
}

/// Midrank of `x` within the slice itself (its own occurrence not counted
/// as a tie partner): (# below) + 1 + (# other equals) / 2.
fn within_rank(vals: &[f64], x: f64) -> f64 {
    let mut less = 0usize;
    let mut eq = 0usize;
    for &v in vals {
        if v < x {
            less += 1;
        } else if v == x {
            eq += 1;
        }
    }
    less as f64 + 1.0 + (eq - 1) as f64 / 2.0
}

fn seed_scores(batch: &[f64], denom: usize) -> Result<Vec<f64>> {
    batch
        .iter()
        .map(|&x| normal_quantile((within_rank(batch, x) - 0.5) / denom as f64))
        .collect()
}

/// Unconditional sequential ranking state: a growing pool of accepted
/// reference observations with optional freezing.
#[derive(Debug, Clone, Default)]
pub struct RankState {
    pool: RankPool,
    frozen: bool,
    batch_index: u32,
}

impl RankState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pool_len(&self) -> usize {
        self.pool.len()
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn batches_seen(&self) -> u32 {
        self.batch_index
    }

    /// Stop pool growth; scoring continues against the frozen pool.
    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    /// Rank the first batch within itself: midranks, rankits (R - 0.5)/n.
    /// The returned Z is 0 for any distinct-valued batch.
    pub fn seed_first_batch(&mut self, batch: &[f64]) -> Result<BatchScore> {
        let score = self.peek_seed(batch, batch.len())?;
        self.absorb_batch(batch);
        Ok(score)
    }

    /// Rank the first batch within itself but with sequential-style rankits
    /// (R - 0.5)/(n + 1), as used when a frozen set scores its own members
    /// on the same footing as later arrivals.
    pub fn seed_first_batch_sequential_rankits(&mut self, batch: &[f64]) -> Result<BatchScore> {
        let score = self.peek_seed(batch, batch.len() + 1)?;
        self.absorb_batch(batch);
        Ok(score)
    }

    fn peek_seed(&self, batch: &[f64], denom: usize) -> Result<BatchScore> {
        if !self.pool.is_empty() {
            return Err(Error::InvalidInput(
                "seed_first_batch requires an empty state".into(),
            ));
        }
        check_finite(batch)?;
        Ok(BatchScore::from_sns(1, seed_scores(batch, denom)?))
    }

    /// Score a batch against the pool only (observations within the batch
    /// are not ranked against each other), then absorb it unless frozen.
    pub fn score_batch(&mut self, batch: &[f64]) -> Result<BatchScore> {
        if self.pool.is_empty() {
            return Err(Error::InvalidInput(
                "score_batch requires a non-empty state; seed the first batch".into(),
            ));
        }
        let score = self.peek_batch(batch)?;
        if !self.frozen {
            self.absorb_batch(batch);
        } else {
            self.batch_index += 1;
        }
        Ok(score)
    }

    /// Compute scores without absorbing the batch.
    pub fn peek_batch(&self, batch: &[f64]) -> Result<BatchScore> {
        check_finite(batch)?;
        let n_pool = self.pool.len();
        let sns = batch
            .iter()
            .map(|&x| {
                let r = self.pool.sequential_rank(x);
                normal_quantile((r - 0.5) / (n_pool + 1) as f64)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(BatchScore::from_sns(self.batch_index + 1, sns))
    }

    /// Add a batch to the pool (no-op when frozen).
    pub fn absorb_batch(&mut self, batch: &[f64]) {
        if !self.frozen {
            for &x in batch {
                self.pool.insert(x);
            }
        }
        self.batch_index += 1;
    }

    /// Score the next batch without absorbing: seeds within the batch when
    /// the state is empty, otherwise ranks against the pool.
    pub fn peek_next(&self, batch: &[f64]) -> Result<BatchScore> {
        if self.pool.is_empty() {
            self.peek_seed(batch, batch.len())
        } else {
            self.peek_batch(batch)
        }
    }

    /// Score the next batch and absorb it unless frozen.
    pub fn score_next(&mut self, batch: &[f64]) -> Result<BatchScore> {
        let score = self.peek_next(batch)?;
        if !self.frozen {
            for &x in batch {
                self.pool.insert(x);
            }
        }
        self.batch_index += 1;
        Ok(score)
    }
}

/// Conditional sequential ranking given a known quantile theta with
/// F(theta) = p_theta: observations rank only against pooled values on
/// their own side of theta, and the two conditional rankits are recombined
/// into an unconditional probability.
#[derive(Debug, Clone)]
pub struct ConditionalRankState {
    theta: f64,
    p_theta: f64,
    low: RankPool,
    high: RankPool,
    frozen: bool,
    seeded: bool,
    batch_index: u32,
}

impl ConditionalRankState {
    pub fn new(theta: f64, p_theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidInput("theta must be finite".into()));
        }
        if !(p_theta > 0.0 && p_theta < 1.0) {
            return Err(Error::Domain(format!(
                "p_theta must lie in (0, 1), got {p_theta}"
            )));
        }
        Ok(ConditionalRankState {
            theta,
            p_theta,
            low: RankPool::new(),
            high: RankPool::new(),
            frozen: false,
            seeded: false,
            batch_index: 0,
        })
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    fn recombine(&self, x: f64, p_cond: f64) -> f64 {
        if x <= self.theta {
            self.p_theta * p_cond
        } else {
            self.p_theta + (1.0 - self.p_theta) * p_cond
        }
    }

    /// Score the next batch without absorbing. The first batch ranks within
    /// itself per side (each side's own count as denominator); later batches
    /// rank against the side pools with denominator side size + 1. The
    /// first-batch Z is not forced to zero.
    pub fn peek_next(&self, batch: &[f64]) -> Result<BatchScore> {
        check_finite(batch)?;
        let sns = if !self.seeded {
            let lo: Vec<f64> = batch.iter().copied().filter(|&x| x <= self.theta).collect();
            let hi: Vec<f64> = batch.iter().copied().filter(|&x| x > self.theta).collect();
            batch
                .iter()
                .map(|&x| {
                    let side = if x <= self.theta { &lo } else { &hi };
                    let p_cond = (within_rank(side, x) - 0.5) / side.len() as f64;
                    normal_quantile(self.recombine(x, p_cond))
                })
                .collect::<Result<Vec<f64>>>()?
        } else {
            batch
                .iter()
                .map(|&x| {
                    let side = if x <= self.theta { &self.low } else { &self.high };
                    let p_cond = (side.sequential_rank(x) - 0.5) / (side.len() + 1) as f64;
                    normal_quantile(self.recombine(x, p_cond))
                })
                .collect::<Result<Vec<f64>>>()?
        };
        Ok(BatchScore::from_sns(self.batch_index + 1, sns))
    }

    /// Add a batch to the side pools (no-op when frozen).
    pub fn absorb_batch(&mut self, batch: &[f64]) {
        if !self.frozen {
            for &x in batch {
                if x <= self.theta {
                    self.low.insert(x);
                } else {
                    self.high.insert(x);
                }
            }
            self.seeded = true;
        }
        self.batch_index += 1;
    }

    /// Score the next batch and absorb it unless frozen.
    pub fn score_next(&mut self, batch: &[f64]) -> Result<BatchScore> {
        let score = self.peek_next(batch)?;
        self.absorb_batch(batch);
        Ok(score)
    }

    /// Conditional midranks of a batch (diagnostic view of the side ranks).
    pub fn peek_conditional_ranks(&self, batch: &[f64]) -> Result<Vec<f64>> {
        check_finite(batch)?;
        if !self.seeded {
            let lo: Vec<f64> = batch.iter().copied().filter(|&x| x <= self.theta).collect();
            let hi: Vec<f64> = batch.iter().copied().filter(|&x| x > self.theta).collect();
            Ok(batch
                .iter()
                .map(|&x| within_rank(if x <= self.theta { &lo } else { &hi }, x))
                .collect())
        } else {
            Ok(batch
                .iter()
                .map(|&x| {
                    if x <= self.theta {
                        self.low.sequential_rank(x)
                    } else {
                        self.high.sequential_rank(x)
                    }
                })
                .collect())
        }
    }
}

/// Elementwise centered square transform y = (x - theta)^2.
pub fn transform_centered_square(batch: &[f64], theta: f64) -> Vec<f64> {
    batch.iter().map(|&x| (x - theta) * (x - theta)).collect()
}

/// Normalized signed-rank statistic for a single batch around theta:
/// W / sqrt(n(n+1)(2n+1)/6) with W the signed midrank sum of |x - theta|.
/// Observations exactly at theta are dropped (n shrinks accordingly).
pub fn nsr_statistic(batch: &[f64], theta: f64) -> Result<f64> {
    check_finite(batch)?;
    let diffs: Vec<f64> = batch.iter().map(|&x| x - theta).filter(|&d| d != 0.0).collect();
    if diffs.is_empty() {
        return Err(Error::InvalidInput(
            "nsr_statistic: every observation equals theta".into(),
        ));
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let n = diffs.len() as f64;
    let mut w = 0.0;
    for &d in &diffs {
        let r = within_rank(&abs, d.abs());
        w += if d > 0.0 { r } else { -r };
    }
    Ok(w / (n * (n + 1.0) * (2.0 * n + 1.0) / 6.0).sqrt())
}
