//! Nonparametric statistical process control built on sequential normal
//! scores: rank incoming observations against everything seen so far, map the
//! ranks through the standard normal quantile, and feed the resulting
//! approximately N(0,1) scores into classical Shewhart, CUSUM, and EWMA
//! machinery. No distributional assumptions are made about the process.
//!
//! Modules:
//! - [`math`]: normal and chi-squared distribution functions, least squares,
//!   correlation, small symmetric matrices.
//! - [`pool`]: an order-statistic pool with O(log n) insert and midrank query.
//! - [`score`]: sequential scoring states (unconditional and conditional on a
//!   known quantile), batch scores, and the signed-rank statistic.
//! - [`charts`]: control-chart schemes, control limits, sequential chart
//!   runners with optional freeze-on-signal, and minimum-reference-sample
//!   calculators.
//! - [`changepoint`]: post-signal change-point estimation.
//! - [`multivariate`]: Hotelling-style T-squared monitoring of component-wise
//!   scores, squared-deviation and squared-score variants, and linear-profile
//!   monitoring.
//! - [`fixtures`]: embedded validation datasets with golden expectations.
//! - [`tables`]: published control limits and minimum-sample tables.
//! - [`verify`]: self-check suite replaying every embedded golden fixture.

pub mod changepoint;
pub mod charts;
pub mod error;
pub mod fixtures;
pub mod math;
pub mod multivariate;
pub mod pool;
pub mod score;
pub mod tables;
pub mod verify;

pub use changepoint::{
    change_point_location, change_point_location_from, change_point_scale, change_point_weighted,
    ChangePointResult,
};
pub use charts::{
    min_reference_sample, run_chart, ChartConfig, ChartPoint, ChartRun, ChartState, Direction,
    FreezePolicy, MinSampleScheme, Scheme, SequentialScorer, SignalReport, StatSelector,
};
pub use error::{Error, Result};
pub use pool::RankPool;
pub use score::{
    nsr_statistic, transform_centered_square, BatchScore, ConditionalRankState, RankState,
};
