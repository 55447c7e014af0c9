//! Numerical primitives: normal and chi-squared distribution functions,
//! Kolmogorov goodness-of-fit test, least squares, Pearson correlation, and
//! small symmetric matrix inversion.

use crate::error::{Error, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Natural log of the gamma function (Lanczos approximation, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const G: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection formula keeps the Lanczos series in its accurate range.
        return std::f64::consts::PI.ln() - (std::f64::consts::PI * x).sin().abs().ln()
            - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = G[0];
    let t = x + 7.5;
    for (i, &g) in G.iter().enumerate().skip(1) {
        a += g / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized lower incomplete gamma function P(a, x).
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_series(a, x)
    } else {
        1.0 - gamma_cf(a, x)
    }
}

/// Regularized upper incomplete gamma function Q(a, x) = 1 - P(a, x).
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_series(a, x)
    } else {
        gamma_cf(a, x)
    }
}

fn gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..500 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_cf(a: f64, x: f64) -> f64 {
    // Modified Lentz evaluation of the continued fraction for Q(a, x).
    const FPMIN: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Complementary error function via the incomplete gamma relation.
pub fn erfc(x: f64) -> f64 {
    if x >= 0.0 {
        gamma_q(0.5, x * x)
    } else {
        2.0 - gamma_q(0.5, x * x)
    }
}

/// Standard normal cumulative distribution function.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / SQRT_2PI
}

// Rational approximation coefficients for the inverse normal CDF
// (Acklam's method), refined below by one Halley step.
const A1: f64 = -3.969_683_028_665_376e1;
const A2: f64 = 2.209_460_984_245_205e2;
const A3: f64 = -2.759_285_104_469_687e2;
const A4: f64 = 1.383_577_518_672_69e2;
const A5: f64 = -3.066_479_806_614_716e1;
const A6: f64 = 2.506_628_277_459_239;

const B1: f64 = -5.447_609_879_822_406e1;
const B2: f64 = 1.615_858_368_580_409e2;
const B3: f64 = -1.556_989_798_598_866e2;
const B4: f64 = 6.680_131_188_771_972e1;
const B5: f64 = -1.328_068_155_288_572e1;

const C1: f64 = -7.784_894_002_430_293e-3;
const C2: f64 = -3.223_964_580_411_365e-1;
const C3: f64 = -2.400_758_277_161_838;
const C4: f64 = -2.549_732_539_343_734;
const C5: f64 = 4.374_664_141_464_968;
const C6: f64 = 2.938_163_982_698_783;

const D1: f64 = 7.784_695_709_041_462e-3;
const D2: f64 = 3.224_671_290_700_398e-1;
const D3: f64 = 2.445_134_137_142_996;
const D4: f64 = 3.754_408_661_907_416;

const P_LOW: f64 = 0.02425;

fn acklam_lower(p: f64) -> f64 {
    // Valid for 0 < p <= P_LOW.
    let q = (-2.0 * p.ln()).sqrt();
    (((((C1 * q + C2) * q + C3) * q + C4) * q + C5) * q + C6)
        / ((((D1 * q + D2) * q + D3) * q + D4) * q + 1.0)
}

fn acklam_central(p: f64) -> f64 {
    let q = p - 0.5;
    let r = q * q;
    (((((A1 * r + A2) * r + A3) * r + A4) * r + A5) * r + A6) * q
        / (((((B1 * r + B2) * r + B3) * r + B4) * r + B5) * r + 1.0)
}

/// Inverse of the standard normal CDF.
///
/// Antisymmetric by construction: the upper half is evaluated as the negated
/// lower half, so `normal_quantile(1 - p) == -normal_quantile(p)` exactly.
/// Absolute error is below 1e-13 over (1e-300, 1 - 1e-16) after the Halley
/// refinement step.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "normal_quantile requires 0 < p < 1, got {p}"
        )));
    }
    if p > 0.5 {
        // 1 - p is exact for p in [0.5, 1), so this is a true reflection.
        return Ok(-normal_quantile(1.0 - p)?);
    }
    let mut x = if p < P_LOW {
        acklam_lower(p)
    } else {
        acklam_central(p)
    };
    // One Halley step against the CDF.
    let e = normal_cdf(x) - p;
    let u = e * SQRT_2PI * (0.5 * x * x).exp();
    x -= u / (1.0 + x * u / 2.0);
    Ok(x)
}

/// Chi-squared cumulative distribution function.
pub fn chi2_cdf(x: f64, df: u32) -> Result<f64> {
    if df < 1 {
        return Err(Error::Domain(format!("chi2_cdf requires df >= 1, got {df}")));
    }
    if x < 0.0 {
        return Err(Error::Domain(format!("chi2_cdf requires x >= 0, got {x}")));
    }
    Ok(gamma_p(df as f64 / 2.0, x / 2.0))
}

pub fn chi2_pdf(x: f64, df: u32) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let a = df as f64 / 2.0;
    ((a - 1.0) * x.ln() - x / 2.0 - ln_gamma(a) - a * std::f64::consts::LN_2).exp()
}

/// Inverse of the chi-squared CDF (bracketed Newton iteration).
pub fn chi2_quantile(p: f64, df: u32) -> Result<f64> {
    if df < 1 {
        return Err(Error::Domain(format!(
            "chi2_quantile requires df >= 1, got {df}"
        )));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "chi2_quantile requires 0 < p < 1, got {p}"
        )));
    }
    let k = df as f64;
    // Wilson-Hilferty starting point.
    let z = normal_quantile(p)?;
    let c = 1.0 - 2.0 / (9.0 * k) + z * (2.0 / (9.0 * k)).sqrt();
    let mut x = (k * c * c * c).max(1e-8);
    let mut lo = 0.0_f64;
    let mut hi = f64::INFINITY;
    for _ in 0..200 {
        let f = chi2_cdf(x, df)? - p;
        if f > 0.0 {
            hi = hi.min(x);
        } else {
            lo = lo.max(x);
        }
        if f.abs() < 1e-14 {
            break;
        }
        let d = chi2_pdf(x, df);
        let mut next = if d > 1e-300 { x - f / d } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = if hi.is_finite() {
                0.5 * (lo + hi)
            } else {
                lo.max(x) * 2.0
            };
        }
        if (next - x).abs() < 1e-14 * x.max(1.0) {
            x = next;
            break;
        }
        x = next;
    }
    Ok(x)
}

/// Two-sided one-sample Kolmogorov test against a fully specified CDF.
///
/// Returns (D, p-value). The p-value uses the asymptotic Kolmogorov series
/// with the sqrt(n) + 0.12 + 0.11/sqrt(n) small-sample correction.
pub fn ks_test<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<(f64, f64)> {
    if sample.is_empty() {
        return Err(Error::InvalidInput("ks_test requires a nonempty sample".into()));
    }
    let mut s: Vec<f64> = sample.to_vec();
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("ks_test requires finite values".into()));
    }
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len() as f64;
    let mut d = 0.0_f64;
    for (i, &x) in s.iter().enumerate() {
        let f = cdf(x);
        d = d.max(((i + 1) as f64 / n - f).abs());
        d = d.max((f - i as f64 / n).abs());
    }
    let t = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    Ok((d, kolmogorov_sf(t)))
}

fn kolmogorov_sf(t: f64) -> f64 {
    if t < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * t * t).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Ordinary least-squares line fit.
///
/// Returns (intercept, slope, residual variance) with the residual variance
/// computed on n - 2 degrees of freedom.
pub fn least_squares_line(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::InvalidInput(
            "least_squares_line requires >= 3 paired points".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    if sxx < 1e-12 * n {
        return Err(Error::Domain("degenerate fit: x values are all equal".into()));
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let mut rss = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let r = yi - (a + b * xi);
        rss += r * r;
    }
    Ok((a, b, rss / (n - 2.0)))
}

/// Pearson product-moment correlation.
pub fn pearson_corr(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidInput(
            "pearson_corr requires >= 2 paired points".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        syy += (yi - my) * (yi - my);
        sxy += (xi - mx) * (yi - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::Domain("pearson_corr: zero-variance input".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Small dense symmetric matrix (dimension 1..=8), used for correlation
/// matrices of score components.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SmallMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || dim > 8 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidInput(
                "SmallMatrix requires a square matrix with dimension 1..=8".into(),
            ));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            data.extend_from_slice(r);
        }
        for i in 0..dim {
            for j in 0..i {
                if (data[i * dim + j] - data[j * dim + i]).abs() > 1e-9 {
                    return Err(Error::InvalidInput("SmallMatrix must be symmetric".into()));
                }
            }
        }
        Ok(SmallMatrix { dim, data })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = SmallMatrix::from_rows(&vec![vec![0.0; dim]; dim])?;
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        Ok(m)
    }

    /// Pairwise Pearson correlation matrix of the given equal-length columns.
    pub fn correlation_of(cols: &[Vec<f64>]) -> Result<Self> {
        let dim = cols.len();
        let mut rows = vec![vec![1.0; dim]; dim];
        for i in 0..dim {
            for j in (i + 1)..dim {
                let r = pearson_corr(&cols[i], &cols[j])?;
                rows[i][j] = r;
                rows[j][i] = r;
            }
        }
        SmallMatrix::from_rows(&rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Determinant via LU decomposition with partial pivoting.
    pub fn det(&self) -> f64 {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = 1.0;
        for col in 0..n {
            let mut piv = col;
            for r in (col + 1)..n {
                if a[r * n + col].abs() > a[piv * n + col].abs() {
                    piv = r;
                }
            }
            if a[piv * n + col] == 0.0 {
                return 0.0;
            }
            if piv != col {
                for c in 0..n {
                    a.swap(piv * n + c, col * n + c);
                }
                det = -det;
            }
            det *= a[col * n + col];
            for r in (col + 1)..n {
                let f = a[r * n + col] / a[col * n + col];
                for c in col..n {
                    a[r * n + c] -= f * a[col * n + c];
                }
            }
        }
        det
    }

    /// Inverse via Gauss-Jordan elimination with partial pivoting.
    /// Rejects matrices with |det| < 1e-12.
    pub fn invert(&self) -> Result<SmallMatrix> {
        let det = self.det();
        if det.abs() < 1e-12 {
            return Err(Error::SingularMatrix { det });
        }
        let n = self.dim;
        let mut a = self.data.clone();
        let mut inv = SmallMatrix::identity(n)?.data;
        for col in 0..n {
            let mut piv = col;
            for r in (col + 1)..n {
                if a[r * n + col].abs() > a[piv * n + col].abs() {
                    piv = r;
                }
            }
            if piv != col {
                for c in 0..n {
                    a.swap(piv * n + c, col * n + c);
                    inv.swap(piv * n + c, col * n + c);
                }
            }
            let p = a[col * n + col];
            for c in 0..n {
                a[col * n + c] /= p;
                inv[col * n + c] /= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f != 0.0 {
                    for c in 0..n {
                        a[r * n + c] -= f * a[col * n + c];
                        inv[r * n + c] -= f * inv[col * n + c];
                    }
                }
            }
        }
        Ok(SmallMatrix { dim: n, data: inv })
    }

    /// Quadratic form v' * A * v.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        let n = self.dim;
        debug_assert_eq!(v.len(), n);
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += v[i] * self.data[i * n + j] * v[j];
            }
        }
        acc
    }
}

/// Round to `sig` significant digits with ties going to even, used when
/// serializing reports (internal math stays full precision).
pub fn round_sig(x: f64, sig: u32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let mag = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(sig as i32 - 1 - mag);
    (x * scale).round_ties_even() / scale
}
