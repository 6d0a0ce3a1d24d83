//! Student-t distribution and the paired-samples t-test.

use crate::{metrics, Error, Result};

const MAX_ITER: usize = 500;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// Continued fraction for the incomplete beta (modified Lentz).
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidParameter(
            "incomplete beta needs a, b > 0".into(),
        ));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter(
            "incomplete beta needs 0 <= x <= 1".into(),
        ));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(x);
    }
    let ln_front = libm::lgamma(a + b) - libm::lgamma(a) - libm::lgamma(b)
        + a * libm::log(x)
        + b * libm::log1p(-x);
    let front = libm::exp(ln_front);
    // The fraction converges fast for x below the mean; use symmetry otherwise.
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(front * beta_continued_fraction(a, b, x) / a)
    } else {
        Ok(1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b)
    }
}

/// `P(T ≤ t)` for Student's t with `df` degrees of freedom.
pub fn student_t_cdf(t: f64, df: f64) -> Result<f64> {
    if df.is_nan() || df <= 0.0 {
        return Err(Error::InvalidParameter(
            "degrees of freedom must be positive".into(),
        ));
    }
    if t.is_nan() {
        return Err(Error::NonFinite("t statistic".into()));
    }
    if t == 0.0 {
        return Ok(0.5);
    }
    if t.is_infinite() {
        return Ok(if t > 0.0 { 1.0 } else { 0.0 });
    }
    let tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))?;
    Ok(if t > 0.0 { 1.0 - tail } else { tail })
}

/// Two-tailed `P(|T| ≥ |t|)`.
pub fn student_t_two_tailed(t: f64, df: f64) -> Result<f64> {
    if t.is_nan() {
        return Err(Error::NonFinite("t statistic".into()));
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TTestOutcome {
    Statistic {
        t: f64,
        p_value: f64,
        df: usize,
    },
    /// Every difference is identical, so the standard error is zero.
    Degenerate {
        mean_difference: f64,
    },
}

impl TTestOutcome {
    pub fn p_value(&self) -> Option<f64> {
        match self {
            Self::Statistic { p_value, .. } => Some(*p_value),
            Self::Degenerate { .. } => None,
        }
    }

    pub fn t(&self) -> Option<f64> {
        match self {
            Self::Statistic { t, .. } => Some(*t),
            Self::Degenerate { .. } => None,
        }
    }
}

/// Paired-samples t-test on `d = a − b`, two-tailed.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTestOutcome> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "paired samples",
            expected: a.len(),
            found: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::InvalidParameter(
            "paired t-test needs at least two pairs".into(),
        ));
    }
    let d: alloc::vec::Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("paired differences".into()));
    }
    let mean = metrics::mean(&d);
    let sd = metrics::sample_sd(&d);
    if sd == 0.0 {
        return Ok(TTestOutcome::Degenerate {
            mean_difference: mean,
        });
    }
    let n = d.len();
    let t = mean / (sd / libm::sqrt(n as f64));
    let p_value = student_t_two_tailed(t, (n - 1) as f64)?;
    Ok(TTestOutcome::Statistic {
        t,
        p_value,
        df: n - 1,
    })
}
