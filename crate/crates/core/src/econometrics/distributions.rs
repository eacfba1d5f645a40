//! Student's t and chi-squared distribution functions, via the regularized
//! incomplete beta and gamma functions.

use statrs::function::{beta::checked_beta_reg, gamma};

use crate::error::{Error, Result};

fn check_df(df: f64) -> Result<()> {
    if df.is_finite() && df >= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("degrees of freedom must be >= 1, got {df}")))
    }
}

/// Half the two-sided tail, `P(T > |x|)`, computed without cancellation.
fn t_half_tail(x: f64, df: f64) -> Result<f64> {
    if x.is_infinite() {
        return Ok(0.0);
    }
    let z = df / (df + x * x);
    let ib = checked_beta_reg(df / 2.0, 0.5, z).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(0.5 * ib)
}

/// CDF of Student's t with `df` degrees of freedom.
pub fn student_t_cdf(x: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    if x.is_nan() {
        return Err(Error::Domain("x is NaN".into()));
    }
    if x == 0.0 {
        return Ok(0.5);
    }
    let tail = t_half_tail(x, df)?;
    Ok(if x > 0.0 { 1.0 - tail } else { tail })
}

/// Two-sided p-value `P(|T| > |t|)`.
pub fn student_t_two_sided_p(t: f64, df: f64) -> Result<f64> {
    check_df(df)?;
    if t.is_nan() {
        return Err(Error::Domain("t is NaN".into()));
    }
    Ok((2.0 * t_half_tail(t, df)?).min(1.0))
}

fn check_chi2(x: f64, df: f64) -> Result<()> {
    check_df(df)?;
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("chi-squared argument must be >= 0, got {x}")));
    }
    Ok(())
}

/// CDF of the chi-squared distribution.
pub fn chi_squared_cdf(x: f64, df: f64) -> Result<f64> {
    check_chi2(x, df)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    gamma::checked_gamma_lr(df / 2.0, x / 2.0).map_err(|e| Error::Domain(e.to_string()))
}

/// Upper tail `P(X > x)`.
pub fn chi_squared_sf(x: f64, df: f64) -> Result<f64> {
    check_chi2(x, df)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    gamma::checked_gamma_ur(df / 2.0, x / 2.0).map_err(|e| Error::Domain(e.to_string()))
}
