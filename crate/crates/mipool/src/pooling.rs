//! Pooling rules for repeated-imputation estimates.
//!
//! Two rule sets are provided. The conventional rules target quantities of a
//! hypothetical infinite population: the pooled variance combines the average
//! complete-data (sampling) variance with the between-imputation variance.
//! The simplified rules target the finite population actually at hand, where
//! sampling variance is zero by definition; the total variance then collapses
//! to `(1 + 1/m) B`, the relative increase in variance is infinite, and the
//! reference distribution is t with `m - 1` degrees of freedom.
//!
//! For a scalar quantity with per-imputation estimates `q_l` and variances
//! `u_l`, `l = 1..m`:
//!
//! ```text
//! q_bar = mean(q_l)
//! u_bar = mean(u_l)                      (0 under the simplified rules)
//! b     = sum((q_l - q_bar)^2) / (m - 1)
//! t     = u_bar + (1 + 1/m) b            (conventional)
//! t     = (1 + 1/m) b                    (simplified)
//! r     = (1 + 1/m) b / u_bar            (infinite when u_bar = 0)
//! ```
//!
//! Conventional degrees of freedom use the Barnard-Rubin small-sample form,
//! which stays finite when `r` is close to zero; the simplified rules always
//! use `m - 1`.

use std::fmt;

use nalgebra::DMatrix;

use crate::data::{RepeatedEstimates, VectorEstimates};
use crate::error::{Error, Result};
use crate::mathkit::t_quantile;

/// Which pooling rule produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Infinite-population rules: `t = u_bar + (1 + 1/m) b`.
    Conventional,
    /// Finite-population rules: `t = (1 + 1/m) b`, `nu = m - 1`.
    Simplified,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Conventional => write!(f, "conventional"),
            Rule::Simplified => write!(f, "simplified"),
        }
    }
}

/// A pooled estimate with its variance decomposition and interval.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledResult {
    pub rule: Rule,
    /// Number of imputations pooled.
    pub m: usize,
    /// Pooled point estimate.
    pub q_bar: f64,
    /// Average within-imputation variance.
    pub u_bar: f64,
    /// Between-imputation variance (divisor m - 1).
    pub b: f64,
    /// Total variance.
    pub t: f64,
    /// Relative increase in variance due to nonresponse; may be infinite.
    pub r: f64,
    /// Degrees of freedom of the reference t distribution.
    pub nu: f64,
    /// Fraction of missing information (small-sample adjusted).
    pub fmi: f64,
    /// Nominal interval level.
    pub level: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// True when the total variance is exactly zero, so the interval has
    /// zero width. Arises legitimately when nothing was missing.
    pub degenerate: bool,
}

impl PooledResult {
    pub fn ci_width(&self) -> f64 {
        self.ci_high - self.ci_low
    }

    pub fn covers(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }
}

/// Neumaier-compensated mean. The compensation makes the mean of m identical
/// values return that value bit-for-bit, which keeps the degenerate
/// nothing-was-missing case exactly centered on the common estimate.
fn mean(xs: &[f64]) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for &x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    (sum + comp) / xs.len() as f64
}

/// Between-imputation variance with divisor m - 1.
fn between_variance(q_hats: &[f64], q_bar: f64) -> f64 {
    let m = q_hats.len();
    q_hats.iter().map(|q| (q - q_bar) * (q - q_bar)).sum::<f64>() / (m - 1) as f64
}

fn check_common(est: &RepeatedEstimates, level: f64) -> Result<()> {
    if est.m() < 2 {
        return Err(Error::TooFewImputations { m: est.m() });
    }
    if !level.is_finite() || level <= 0.0 || level >= 1.0 {
        return Err(Error::InvalidProbability { p: level });
    }
    Ok(())
}

/// Pool under the conventional (infinite-population) rules.
///
/// `nu_com` is the complete-data degrees of freedom of the analysis, e.g.
/// `n - 1` for a mean of `n` units; it feeds the Barnard-Rubin adjustment.
pub fn pool_conventional(
    est: &RepeatedEstimates,
    nu_com: f64,
    level: f64,
) -> Result<PooledResult> {
    check_common(est, level)?;
    if !nu_com.is_finite() || nu_com <= 0.0 {
        return Err(Error::InvalidCompleteDf { nu_com });
    }
    let m = est.m();
    let mf = m as f64;
    let q_bar = mean(est.q_hats());
    let u_bar = mean(est.u_bars());
    let b = between_variance(est.q_hats(), q_bar);
    let t = u_bar + (1.0 + 1.0 / mf) * b;

    let (r, nu, fmi) = if u_bar == 0.0 {
        // No sampling variance at all: r is infinite and the degrees of
        // freedom reduce to the m - 1 limit, making the result coincide
        // with the simplified rules.
        (f64::INFINITY, mf - 1.0, 1.0)
    } else {
        let r = (1.0 + 1.0 / mf) * b / u_bar;
        let lambda = (1.0 + 1.0 / mf) * b / t;
        let nu = barnard_rubin_df(m, r, lambda, nu_com)?;
        let fmi = (r + 2.0 / (nu + 3.0)) / (r + 1.0);
        (r, nu, fmi)
    };

    let half = if t == 0.0 {
        0.0
    } else {
        t_quantile((1.0 + level) / 2.0, nu)? * t.sqrt()
    };
    Ok(PooledResult {
        rule: Rule::Conventional,
        m,
        q_bar,
        u_bar,
        b,
        t,
        r,
        nu,
        fmi,
        level,
        ci_low: q_bar - half,
        ci_high: q_bar + half,
        degenerate: t == 0.0,
    })
}

/// Pool under the simplified (finite-population) rules.
///
/// Within-imputation variance is discarded: all variation is attributed to
/// the missing data, so `t = (1 + 1/m) b`, `r` is infinite, `nu = m - 1` and
/// the fraction of missing information is 1.
pub fn pool_simplified(est: &RepeatedEstimates, level: f64) -> Result<PooledResult> {
    check_common(est, level)?;
    let m = est.m();
    let mf = m as f64;
    let q_bar = mean(est.q_hats());
    let b = between_variance(est.q_hats(), q_bar);
    let t = (1.0 + 1.0 / mf) * b;
    let nu = mf - 1.0;
    let half = if t == 0.0 {
        0.0
    } else {
        t_quantile((1.0 + level) / 2.0, nu)? * t.sqrt()
    };
    Ok(PooledResult {
        rule: Rule::Simplified,
        m,
        q_bar,
        u_bar: 0.0,
        b,
        t,
        r: f64::INFINITY,
        nu,
        fmi: 1.0,
        level,
        ci_low: q_bar - half,
        ci_high: q_bar + half,
        degenerate: t == 0.0,
    })
}

/// Barnard-Rubin small-sample degrees of freedom.
///
/// `nu_old = (m - 1)(1 + 1/r)^2` (infinite when `r = 0`) is combined
/// harmonically with the observed-data degrees of freedom
/// `nu_obs = nu_com (nu_com + 1) / (nu_com + 3) * (1 - fmi_lambda)`, where
/// `fmi_lambda = (1 + 1/m) b / t`. When `r = 0` the result is exactly
/// `nu_obs`, which is what keeps the adjustment finite where the classic
/// `(m - 1)(1 + 1/r)^2` blows up.
pub fn barnard_rubin_df(m: usize, r: f64, fmi_lambda: f64, nu_com: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::TooFewImputations { m });
    }
    if !nu_com.is_finite() || nu_com <= 0.0 {
        return Err(Error::InvalidCompleteDf { nu_com });
    }
    if r.is_nan() || r < 0.0 {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            range: "[0, +inf]",
        });
    }
    if !(0.0..=1.0).contains(&fmi_lambda) {
        return Err(Error::InvalidParameter {
            name: "fmi_lambda",
            value: fmi_lambda,
            range: "[0, 1]",
        });
    }
    let nu_obs = nu_com * (nu_com + 1.0) / (nu_com + 3.0) * (1.0 - fmi_lambda);
    if r == 0.0 {
        return Ok(nu_obs);
    }
    let mf = m as f64;
    let nu_old = if r.is_infinite() {
        mf - 1.0
    } else {
        (mf - 1.0) * (1.0 + 1.0 / r) * (1.0 + 1.0 / r)
    };
    Ok(1.0 / (1.0 / nu_old + 1.0 / nu_obs))
}

/// Componentwise pooling of vector-valued estimates, plus the full
/// between-imputation covariance matrix.
#[derive(Debug, Clone)]
pub struct VectorPooledResult {
    /// One scalar pooled result per component.
    pub components: Vec<PooledResult>,
    /// Between-imputation covariance `sum (q_l - q_bar)(q_l - q_bar)' / (m-1)`.
    /// Off-diagonal entries are exposed for inspection but play no part in
    /// the componentwise intervals.
    pub between: DMatrix<f64>,
}

fn between_covariance(est: &VectorEstimates) -> DMatrix<f64> {
    let k = est.dim();
    let m = est.m();
    let mut q_bar = nalgebra::DVector::zeros(k);
    for q in est.q_hats() {
        q_bar += q;
    }
    q_bar /= m as f64;
    let mut between = DMatrix::zeros(k, k);
    for q in est.q_hats() {
        let d = q - &q_bar;
        between += &d * d.transpose();
    }
    between / (m - 1) as f64
}

/// Pool each component of a vector quantity under one rule.
pub fn pool_vector(
    est: &VectorEstimates,
    rule: Rule,
    nu_com: Option<f64>,
    level: f64,
) -> Result<VectorPooledResult> {
    if est.m() < 2 {
        return Err(Error::TooFewImputations { m: est.m() });
    }
    let components = (0..est.dim())
        .map(|i| {
            let scalar = est.component(i)?;
            match rule {
                Rule::Conventional => {
                    let nu_com = nu_com.ok_or(Error::InvalidCompleteDf { nu_com: f64::NAN })?;
                    pool_conventional(&scalar, nu_com, level)
                }
                Rule::Simplified => pool_simplified(&scalar, level),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VectorPooledResult {
        components,
        between: between_covariance(est),
    })
}
