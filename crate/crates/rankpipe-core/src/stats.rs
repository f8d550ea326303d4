//! Paired t-test with a Student-t CDF computed from a numerically integrated
//! incomplete-beta relation (adaptive Simpson, absolute tolerance 1e-9), so no
//! statistics library is needed.

use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TTestResult {
    pub t: f64,
    pub p: f64,
    pub n: usize,
    pub mean_difference: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StatsError {
    LengthMismatch { a: usize, b: usize },
    TooFewPairs(usize),
}

impl core::fmt::Display for StatsError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            StatsError::LengthMismatch { a, b } => {
                write!(f, "paired t-test needs equal-length samples, got {a} and {b}")
            }
            StatsError::TooFewPairs(n) => write!(f, "paired t-test needs >= 2 pairs, got {n}"),
        }
    }
}

const TOL: f64 = 1e-9;

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || libm::fabs(delta) <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1)
            + adaptive(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1)
    }
}

fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(f, a, b, fa, fm, fb, whole, TOL, 48)
}

/// Lower incomplete beta B_x(a, b) for x <= 0.5, via u = s^2 so the u -> 0
/// singularity of u^(a-1) disappears for a >= 1/2.
fn lower_beta(a: f64, b: f64, x: f64) -> f64 {
    debug_assert!((0.0..=0.5 + 1e-12).contains(&x));
    let f = move |s: f64| 2.0 * libm::pow(s, 2.0 * a - 1.0) * libm::pow(1.0 - s * s, b - 1.0);
    integrate(&f, 0.0, libm::sqrt(x))
}

/// Regularized incomplete beta I_x(a, b).
fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let complete = lower_beta(a, b, 0.5) + lower_beta(b, a, 0.5);
    if x <= 0.5 {
        lower_beta(a, b, x) / complete
    } else {
        1.0 - lower_beta(b, a, 1.0 - x) / complete
    }
}

/// Two-sided p-value for a t-statistic with `df` degrees of freedom:
/// p = I_x(df/2, 1/2) with x = df / (df + t^2).
pub fn two_sided_p(t: f64, df: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    if t.is_infinite() {
        return 0.0;
    }
    reg_inc_beta(df / 2.0, 0.5, df / (df + t * t))
}

/// Student-t CDF P(T <= t) with `df` degrees of freedom.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    let p = two_sided_p(t, df);
    if t >= 0.0 {
        1.0 - p / 2.0
    } else {
        p / 2.0
    }
}

/// Classic paired t-test on per-item differences a_i - b_i.
///
/// Conventions: all differences zero -> t = 0, p = 1; zero variance with a
/// nonzero mean -> p = 0 (t reported as signed infinity).
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch { a: a.len(), b: b.len() });
    }
    let n = a.len();
    if n < 2 {
        return Err(StatsError::TooFewPairs(n));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n as f64 - 1.0);

    if var == 0.0 {
        return Ok(if mean == 0.0 {
            TTestResult { t: 0.0, p: 1.0, n, mean_difference: 0.0 }
        } else {
            TTestResult {
                t: if mean > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY },
                p: 0.0,
                n,
                mean_difference: mean,
            }
        });
    }

    let t = mean / libm::sqrt(var / n as f64);
    let p = two_sided_p(t, n as f64 - 1.0);
    Ok(TTestResult { t, p, n, mean_difference: mean })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_vectors() {
        let r = paired_t_test(&[0.1, 0.2, 0.3], &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(r.t, 0.0);
        assert_eq!(r.p, 1.0);
    }

    #[test]
    fn zero_variance_nonzero_mean() {
        let r = paired_t_test(&[2.0, 2.0, 2.0, 2.0], &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(r.p, 0.0);
        assert!(r.t.is_infinite() && r.t > 0.0);
    }

    #[test]
    fn cdf_symmetry() {
        let c = student_t_cdf(0.0, 7.0);
        assert!((c - 0.5).abs() < 1e-9);
        let up = student_t_cdf(1.3, 9.0);
        let down = student_t_cdf(-1.3, 9.0);
        assert!((up + down - 1.0).abs() < 1e-9);
    }

    #[test]
    fn known_cdf_value() {
        // t = 1, df = 1 is the Cauchy distribution: CDF = 1/2 + atan(1)/pi = 0.75.
        assert!((student_t_cdf(1.0, 1.0) - 0.75).abs() < 1e-8);
        // df = 4 has the closed form F(t) = 1/2 + u(3 - u^2)/4, u = t/sqrt(t^2+4).
        let x: f64 = 2.5;
        let u = x / libm::sqrt(x * x + 4.0);
        let closed = 0.5 + u * (3.0 - u * u) / 4.0;
        assert!((student_t_cdf(x, 4.0) - closed).abs() < 1e-8);
    }

    #[test]
    fn textbook_fixture() {
        let diffs = [0.1, -0.05, 0.2, 0.0, 0.15];
        let b = [0.0; 5];
        let r = paired_t_test(&diffs, &b).unwrap();
        // mean = 0.08, sample sd computed by hand below.
        let mean = 0.08;
        let var = ((0.1f64 - mean).powi(2)
            + (-0.05f64 - mean).powi(2)
            + (0.2f64 - mean).powi(2)
            + (0.0f64 - mean).powi(2)
            + (0.15f64 - mean).powi(2))
            / 4.0;
        let t = mean / (var / 5.0).sqrt();
        assert!((r.t - t).abs() < 1e-6);
        assert!(r.p > 0.0 && r.p < 1.0);
    }
}
