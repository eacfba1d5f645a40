use serde::{Deserialize, Serialize};

use super::design::DesignMatrix;
use super::distributions::student_t_two_sided_p;
use super::linalg::{Matrix, PivotedQr};
use crate::error::{Error, Result};

/// One estimated coefficient with its inference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub name: String,
    pub coefficient: f64,
    pub std_error: f64,
    pub t_value: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub terms: Vec<Term>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    /// `y - X β̂`, unweighted.
    pub residuals: Vec<f64>,
    pub fitted: Vec<f64>,
    /// Weighted residual sum of squares (plain RSS for OLS).
    pub rss: f64,
    /// Residual standard error of the (weighted) model.
    pub sigma: f64,
    pub n_obs: usize,
    pub df_residual: usize,
    pub weighted: bool,
}

impl RegressionFit {
    pub fn term(&self, name: &str) -> Option<&Term> {
        self.terms.iter().find(|t| t.name == name)
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.term(name).map(|t| t.coefficient)
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.coefficient).collect()
    }

    pub fn names(&self) -> Vec<&str> {
        self.terms.iter().map(|t| t.name.as_str()).collect()
    }
}

/// Least squares by pivoted QR on `diag(√w) X`, `diag(√w) y`.
pub(crate) fn least_squares(
    names: &[String],
    x: &Matrix,
    y: &[f64],
    weights: Option<&[f64]>,
) -> Result<RegressionFit> {
    let (n, p) = (x.nrows(), x.ncols());
    if n <= p {
        return Err(Error::InsufficientData { rows: n, cols: p });
    }
    if let Some(w) = weights {
        if let Some((row, &value)) = w.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::NonPositiveWeight { row, value });
        }
    }
    let sqrt_w: Option<Vec<f64>> = weights.map(|w| w.iter().map(|v| v.sqrt()).collect());
    let (xs, ys) = match &sqrt_w {
        Some(s) => (
            x.scale_rows(s),
            y.iter().zip(s).map(|(a, b)| a * b).collect::<Vec<_>>(),
        ),
        None => (x.clone(), y.to_vec()),
    };

    let qr = PivotedQr::decompose(&xs);
    if !qr.is_full_rank() {
        return Err(Error::RankDeficient {
            columns: qr.dependent_columns().into_iter().map(|j| names[j].clone()).collect(),
        });
    }
    let beta = qr.solve(&ys).expect("full rank");
    let cov = qr.unscaled_covariance().expect("full rank");

    let fitted = x.mul_vec(&beta);
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let w_at = |i: usize| weights.map_or(1.0, |w| w[i]);
    let rss: f64 = residuals.iter().enumerate().map(|(i, e)| w_at(i) * e * e).sum();
    let sum_w: f64 = (0..n).map(w_at).sum();
    let y_bar = (0..n).map(|i| w_at(i) * y[i]).sum::<f64>() / sum_w;
    let tss: f64 = (0..n).map(|i| w_at(i) * (y[i] - y_bar).powi(2)).sum();

    let df = n - p;
    let s2 = rss / df as f64;
    let r_squared = if tss > 0.0 {
        (1.0 - rss / tss).max(0.0)
    } else if rss == 0.0 {
        1.0
    } else {
        0.0
    };
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (n - 1) as f64 / df as f64;

    let mut terms = Vec::with_capacity(p);
    for (j, name) in names.iter().enumerate() {
        let coefficient = beta[j];
        let std_error = (s2 * cov.get(j, j)).sqrt();
        let t_value = if std_error > 0.0 {
            coefficient / std_error
        } else if coefficient == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(coefficient)
        };
        terms.push(Term {
            name: name.clone(),
            coefficient,
            std_error,
            t_value,
            p_value: student_t_two_sided_p(t_value, df as f64)?,
        });
    }
    Ok(RegressionFit {
        terms,
        r_squared,
        adj_r_squared,
        residuals,
        fitted,
        rss,
        sigma: s2.sqrt(),
        n_obs: n,
        df_residual: df,
        weighted: weights.is_some(),
    })
}

/// Ordinary least squares; any weights on the design are ignored.
pub fn fit_ols(design: &DesignMatrix) -> Result<RegressionFit> {
    least_squares(&design.column_names, &design.x, &design.response, None)
}

/// Weighted least squares with the design's weights. Inference and R² are
/// computed in the weighted metric.
pub fn fit_wls(design: &DesignMatrix) -> Result<RegressionFit> {
    let w = design.weights.as_deref().ok_or(Error::MissingWeights)?;
    least_squares(&design.column_names, &design.x, &design.response, Some(w))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn design(rows: &[Vec<f64>], y: &[f64], w: Option<Vec<f64>>) -> DesignMatrix {
        let names = (0..rows[0].len()).map(|j| format!("x{j}")).collect();
        DesignMatrix::new(names, Matrix::from_rows(rows), y.to_vec(), w).unwrap()
    }

    #[test]
    fn exact_line() {
        let d = design(
            &[vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, 2.0]],
            &[1.0, 3.0, 5.0],
            None,
        );
        let fit = fit_ols(&d).unwrap();
        assert!((fit.coefficients()[0] - 1.0).abs() < 1e-12);
        assert!((fit.coefficients()[1] - 2.0).abs() < 1e-12);
        assert!(fit.residuals.iter().all(|e| e.abs() < 1e-12));
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn duplicated_column_is_rank_deficient() {
        let d = design(
            &[
                vec![1.0, 2.0, 2.0],
                vec![1.0, 3.0, 3.0],
                vec![1.0, 4.0, 4.0],
                vec![1.0, 7.0, 7.0],
            ],
            &[1.0, 2.0, 2.5, 4.0],
            None,
        );
        match fit_ols(&d).unwrap_err() {
            Error::RankDeficient { columns } => {
                assert_eq!(columns.len(), 1);
                assert!(columns[0] == "x1" || columns[0] == "x2");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn insufficient_data() {
        let d = design(&[vec![1.0, 0.0], vec![1.0, 1.0]], &[1.0, 2.0], None);
        assert!(matches!(fit_ols(&d).unwrap_err(), Error::InsufficientData { rows: 2, cols: 2 }));
    }

    #[test]
    fn equal_weights_reduce_to_ols_and_scale_is_irrelevant() {
        let rows = vec![
            vec![1.0, 0.3],
            vec![1.0, 1.1],
            vec![1.0, 2.4],
            vec![1.0, 3.3],
            vec![1.0, 4.9],
        ];
        let y = [0.9, 2.1, 2.8, 4.4, 5.2];
        let ols = fit_ols(&design(&rows, &y, None)).unwrap();
        let wls = fit_wls(&design(&rows, &y, Some(vec![3.0; 5]))).unwrap();
        for (a, b) in ols.terms.iter().zip(&wls.terms) {
            assert!((a.coefficient - b.coefficient).abs() < 1e-10);
            assert!((a.t_value - b.t_value).abs() < 1e-8);
        }
        let w = vec![1.0, 2.0, 0.5, 4.0, 1.5];
        let a = fit_wls(&design(&rows, &y, Some(w.clone()))).unwrap();
        let b = fit_wls(&design(&rows, &y, Some(w.iter().map(|v| v * 1e6).collect()))).unwrap();
        for (ta, tb) in a.terms.iter().zip(&b.terms) {
            assert!((ta.coefficient - tb.coefficient).abs() <= 1e-10 * ta.coefficient.abs().max(1.0));
            assert!((ta.t_value - tb.t_value).abs() <= 1e-8 * ta.t_value.abs().max(1.0));
        }
    }

    #[test]
    fn non_positive_weight_names_row() {
        let rows = vec![vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, 2.0]];
        let d = design(&rows, &[1.0, 2.0, 2.0], Some(vec![1.0, 0.0, 1.0]));
        assert!(matches!(fit_wls(&d).unwrap_err(), Error::NonPositiveWeight { row: 1, .. }));
        let d = design(&rows, &[1.0, 2.0, 2.0], None);
        assert!(matches!(fit_wls(&d).unwrap_err(), Error::MissingWeights));
    }

    #[test]
    fn adjusted_r_squared_formula() {
        let rows: Vec<Vec<f64>> = (0..8).map(|i| vec![1.0, i as f64, ((i * i) % 5) as f64]).collect();
        let y: Vec<f64> = (0..8).map(|i| 0.5 + 0.3 * i as f64 + ((i * 7) % 3) as f64).collect();
        let fit = fit_ols(&design(&rows, &y, None)).unwrap();
        let expect = 1.0 - (1.0 - fit.r_squared) * 7.0 / 5.0;
        assert!((fit.adj_r_squared - expect).abs() < 1e-14);
        assert!(fit.adj_r_squared <= fit.r_squared);
        assert_eq!(fit.df_residual, 5);
    }
}
