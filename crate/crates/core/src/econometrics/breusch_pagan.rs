//! Breusch–Pagan LM test for heteroskedasticity, `n · R²` form.
//!
//! H0: residual variance is constant. The squared residuals of a fit are
//! regressed (OLS, with intercept) on the fit's regressors; under H0 the
//! statistic `n · R²_aux` is asymptotically chi-squared with one degree of
//! freedom per non-intercept regressor.

use serde::{Deserialize, Serialize};

use super::design::DesignMatrix;
use super::distributions::chi_squared_sf;
use super::fit::{least_squares, RegressionFit};
use super::linalg::Matrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BPTestResult {
    pub lm_statistic: f64,
    pub df: usize,
    pub p_value: f64,
    /// Set when the squared residuals have no variation to explain.
    pub degenerate: bool,
}

impl BPTestResult {
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

pub fn breusch_pagan(fit: &RegressionFit, design: &DesignMatrix) -> Result<BPTestResult> {
    let n = design.n_obs();
    if fit.residuals.len() != n {
        return Err(Error::Config(format!(
            "fit has {} residuals but design has {n} rows",
            fit.residuals.len()
        )));
    }
    let (aux_x, aux_names) = if design.has_intercept() {
        (design.x.clone(), design.column_names.clone())
    } else {
        let p = design.n_params();
        let mut data = Vec::with_capacity(n * (p + 1));
        for i in 0..n {
            data.push(1.0);
            data.extend_from_slice(design.x.row(i));
        }
        let mut names = vec!["_CONS".to_string()];
        names.extend(design.column_names.iter().cloned());
        (Matrix::new(n, p + 1, data), names)
    };
    let df = aux_x.ncols() - 1;
    if df == 0 {
        return Err(Error::Domain("Breusch–Pagan test needs at least one non-intercept regressor".into()));
    }
    if n <= aux_x.ncols() {
        return Err(Error::InsufficientData {
            rows: n,
            cols: aux_x.ncols(),
        });
    }

    let u: Vec<f64> = fit.residuals.iter().map(|e| e * e).collect();
    let (lo, hi) = u
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if hi - lo <= 1e-12 * hi.abs() || hi == 0.0 {
        return Ok(BPTestResult {
            lm_statistic: 0.0,
            df,
            p_value: 1.0,
            degenerate: true,
        });
    }

    let aux = least_squares(&aux_names, &aux_x, &u, None)?;
    let lm_statistic = n as f64 * aux.r_squared;
    Ok(BPTestResult {
        lm_statistic,
        df,
        p_value: chi_squared_sf(lm_statistic, df as f64)?,
        degenerate: false,
    })
}
