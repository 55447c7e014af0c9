//! Embedded reference tables: published bound and minimum-reference-sample
//! grids for SNS control charts (Shewhart / CUSUM / EWMA / EWMA-chi2).

/// ARL axis for the Shewhart minimum-sample grid.
pub const SHEWHART_ARLS: [u32; 7] = [20, 50, 100, 200, 370, 500, 1000];
/// ARL axis shared by the CUSUM and EWMA grids.
pub const CHART_ARLS: [u32; 8] = [50, 100, 200, 300, 370, 400, 500, 1000];
/// Allowance axis for the CUSUM grids.
pub const CUSUM_KS: [f64; 7] = [0.10, 0.25, 0.50, 0.75, 1.00, 1.25, 1.50];
/// Smoothing axis for the normal EWMA grids.
pub const EWMA_LAMBDAS: [f64; 8] = [0.01, 0.05, 0.10, 0.20, 0.30, 0.40, 0.50, 0.75];
/// Smoothing axis for the chi-squared EWMA grids.
pub const EWMA_CHI2_LAMBDAS: [f64; 4] = [0.05, 0.10, 0.20, 0.30];

/// Published minimum reference-sample sizes for Shewhart charts, batch sizes 1-24
/// (larger batches need only 1). Rows: batch size; columns: `SHEWHART_ARLS`.
pub const SHEWHART_MIN_SAMPLE: [[u32; 7]; 24] = [
    [20, 50, 99, 200, 370, 500, 1000],
    [6, 10, 14, 21, 29, 34, 50],
    [3, 5, 7, 9, 12, 13, 17],
    [3, 4, 5, 6, 7, 8, 10],
    [2, 3, 4, 4, 5, 5, 7],
    [2, 2, 3, 3, 4, 4, 5],
    [2, 2, 3, 3, 3, 4, 4],
    [2, 2, 2, 3, 3, 3, 4],
    [1, 2, 2, 2, 3, 3, 3],
    [1, 2, 2, 2, 2, 3, 3],
    [1, 2, 2, 2, 2, 2, 3],
    [1, 1, 2, 2, 2, 2, 2],
    [1, 1, 2, 2, 2, 2, 2],
    [1, 1, 2, 2, 2, 2, 2],
    [1, 1, 1, 2, 2, 2, 2],
    [1, 1, 1, 2, 2, 2, 2],
    [1, 1, 1, 2, 2, 2, 2],
    [1, 1, 1, 1, 2, 2, 2],
    [1, 1, 1, 1, 2, 2, 2],
    [1, 1, 1, 1, 1, 2, 2],
    [1, 1, 1, 1, 1, 1, 2],
    [1, 1, 1, 1, 1, 1, 2],
    [1, 1, 1, 1, 1, 1, 2],
    [1, 1, 1, 1, 1, 1, 1],
];

/// Published CUSUM upper bounds U (L = -U). Rows: `CHART_ARLS`; columns: `CUSUM_KS`.
pub const CUSUM_BOUNDS: [[f64; 7]; 8] = [
    [4.567, 3.340, 2.225, 1.601, 1.181, 0.854, 0.570],
    [6.361, 4.418, 2.849, 2.037, 1.532, 1.164, 0.860],
    [8.520, 5.597, 3.501, 2.481, 1.874, 1.458, 1.131],
    [9.943, 6.324, 3.892, 2.745, 2.073, 1.624, 1.282],
    [10.722, 6.708, 4.095, 2.882, 2.175, 1.709, 1.359],
    [11.019, 6.852, 4.171, 2.933, 2.214, 1.741, 1.387],
    [11.890, 7.267, 4.389, 3.080, 2.323, 1.830, 1.466],
    [14.764, 8.585, 5.071, 3.538, 2.665, 2.105, 1.708],
];

/// Published minimum reference-sample sizes for CUSUM charts.
pub const CUSUM_MIN_SAMPLE: [[u32; 7]; 8] = [
    [5, 5, 5, 5, 6, 8, 11],
    [7, 6, 5, 6, 7, 9, 12],
    [8, 7, 6, 6, 8, 10, 13],
    [9, 7, 6, 7, 8, 10, 14],
    [9, 8, 7, 7, 8, 10, 14],
    [10, 8, 7, 7, 8, 10, 14],
    [10, 8, 7, 7, 8, 10, 14],
    [12, 9, 8, 8, 9, 11, 15],
];

/// Published steady-state EWMA upper bounds U (L = -U).
/// Rows: `CHART_ARLS`; columns: `EWMA_LAMBDAS`.
pub const EWMA_BOUNDS: [[f64; 8]; 8] = [
    [0.060, 0.243, 0.415, 0.685, 0.910, 1.115, 1.309, 1.793],
    [0.082, 0.301, 0.493, 0.787, 1.030, 1.252, 1.463, 1.989],
    [0.106, 0.355, 0.563, 0.878, 1.140, 1.377, 1.603, 2.170],
    [0.121, 0.384, 0.601, 0.928, 1.199, 1.445, 1.681, 2.270],
    [0.129, 0.399, 0.620, 0.953, 1.229, 1.480, 1.719, 2.321],
    [0.132, 0.404, 0.627, 0.962, 1.239, 1.492, 1.733, 2.339],
    [0.140, 0.419, 0.646, 0.987, 1.270, 1.527, 1.773, 2.391],
    [0.163, 0.462, 0.702, 1.062, 1.360, 1.632, 1.892, 2.548],
];

/// Published minimum reference-sample sizes for normal EWMA charts.
pub const EWMA_MIN_SAMPLE: [[u32; 8]; 8] = [
    [6, 5, 5, 5, 5, 5, 6, 14],
    [7, 6, 6, 6, 6, 5, 8, 21],
    [9, 7, 7, 6, 6, 7, 10, 33],
    [10, 8, 7, 7, 7, 8, 11, 43],
    [11, 8, 7, 7, 7, 9, 12, 49],
    [11, 8, 7, 7, 7, 9, 13, 53],
    [11, 8, 7, 7, 8, 9, 14, 59],
    [13, 9, 8, 8, 9, 11, 18, 92],
];

/// Published rho_U factors for the chi-squared (1 d.f.) EWMA upper bound
/// U = 1 + rho_U * sqrt(2*lambda/(2-lambda)). Rows: `CHART_ARLS`; columns:
/// `EWMA_CHI2_LAMBDAS`.
pub const EWMA_CHI2_RHO_UPPER: [[f64; 4]; 8] = [
    [0.901, 1.380, 1.916, 2.259],
    [1.455, 1.988, 2.606, 2.996],
    [2.017, 2.595, 3.258, 3.702],
    [2.342, 2.944, 3.655, 4.132],
    [2.518, 3.133, 3.854, 4.354],
    [2.588, 3.199, 3.935, 4.440],
    [2.796, 3.419, 4.184, 4.722],
    [5.122, 5.822, 7.788, 8.467],
];

/// Published rho_L factors for the chi-squared EWMA lower bound
/// L = 1 - rho_L * sqrt(2*lambda/(2-lambda)). NaN cells were never published;
/// configurations hitting them are rejected.
pub const EWMA_CHI2_RHO_LOWER: [[f64; 4]; 8] = [
    [0.865, 1.100, 1.195, 1.166],
    [1.201, 1.366, 1.360, 1.273],
    [1.510, 1.580, 1.480, 1.349],
    [1.670, 1.682, 1.538, 1.384],
    [1.746, 1.731, 1.563, 1.401],
    [1.774, 1.750, 1.574, 1.407],
    [1.862, 1.808, 1.605, 1.426],
    [2.569, 2.452, f64::NAN, f64::NAN],
];

/// Published chi-squared EWMA upper limits (recomputable from the rho grid).
pub const EWMA_CHI2_UPPER: [[f64; 4]; 8] = [
    [1.204, 1.448, 1.903, 2.342],
    [1.329, 1.645, 2.228, 2.780],
    [1.457, 1.842, 2.536, 3.199],
    [1.530, 1.955, 2.723, 3.455],
    [1.570, 2.016, 2.817, 3.587],
    [1.586, 2.038, 2.855, 3.638],
    [1.633, 2.109, 2.972, 3.805],
    [2.160, 2.889, 4.671, 6.030],
];

/// Published chi-squared EWMA lower limits.
pub const EWMA_CHI2_LOWER: [[f64; 4]; 8] = [
    [0.804, 0.643, 0.437, 0.307],
    [0.728, 0.557, 0.359, 0.244],
    [0.658, 0.487, 0.302, 0.199],
    [0.622, 0.454, 0.275, 0.178],
    [0.605, 0.438, 0.263, 0.168],
    [0.598, 0.432, 0.258, 0.164],
    [0.578, 0.413, 0.243, 0.153],
    [0.418, 0.204, f64::NAN, f64::NAN],
];

/// Published minimum reference-sample sizes for the chi-squared EWMA, upper bound.
pub const EWMA_CHI2_MIN_SAMPLE_UPPER: [[u32; 4]; 8] = [
    [14, 11, 10, 10],
    [15, 12, 11, 13],
    [16, 13, 13, 16],
    [17, 14, 14, 18],
    [17, 15, 15, 19],
    [18, 15, 15, 20],
    [18, 15, 16, 22],
    [23, 21, 36, 73],
];

/// Published minimum reference-sample sizes for the chi-squared EWMA, lower bound.
/// NaN-bound configurations are marked 0 (unsupported).
pub const EWMA_CHI2_MIN_SAMPLE_LOWER: [[u32; 4]; 8] = [
    [5, 5, 5, 5],
    [7, 7, 6, 5],
    [9, 8, 7, 6],
    [10, 9, 7, 6],
    [11, 9, 7, 6],
    [11, 9, 7, 6],
    [12, 10, 8, 7],
    [18, 16, 0, 0],
];

