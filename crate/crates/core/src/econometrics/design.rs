use serde::{Deserialize, Serialize};

use super::linalg::Matrix;
use crate::dataset::{normalize_genre, PanelRow};
use crate::error::{Error, Result};

pub const INTERCEPT: &str = "_CONS";
pub const MKT: &str = "MKT";
pub const SCR: &str = "SCR";
pub const AVG: &str = "AVG";
pub const AVG_SQUARED: &str = "AVG2";
pub const CRSTD: &str = "CRSTD";
pub const LWEEK: &str = "LWEEK";

pub const DEFAULT_GENRES: [&str; 7] = [
    "SCIFI", "KIDS", "DRAMA", "COMEDY", "ROMANCE", "ACTION", "THRILLER",
];

/// Which regressors enter the density model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignSpec {
    pub tracked_genres: Vec<String>,
    pub center_avg: bool,
    pub include_quadratic: bool,
    pub intercept: bool,
}

impl Default for DesignSpec {
    fn default() -> Self {
        DesignSpec {
            tracked_genres: DEFAULT_GENRES.iter().map(|g| g.to_string()).collect(),
            center_avg: true,
            include_quadratic: true,
            intercept: true,
        }
    }
}

impl DesignSpec {
    pub fn validate(&self) -> Result<()> {
        if self.tracked_genres.is_empty() {
            return Err(Error::Config("tracked_genres must not be empty".into()));
        }
        let mut seen: Vec<String> = Vec::new();
        for g in &self.tracked_genres {
            let n = normalize_genre(g);
            if seen.contains(&n) {
                return Err(Error::Config(format!("genre `{g}` tracked twice")));
            }
            seen.push(n);
        }
        Ok(())
    }

    /// Column names in design order.
    pub fn column_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(8 + self.tracked_genres.len());
        if self.intercept {
            names.push(INTERCEPT.to_string());
        }
        names.extend([MKT, SCR, AVG].map(String::from));
        if self.include_quadratic {
            names.push(AVG_SQUARED.to_string());
        }
        names.push(CRSTD.to_string());
        names.extend(self.tracked_genres.iter().map(|g| normalize_genre(g)));
        names.push(LWEEK.to_string());
        names
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignMatrix {
    pub column_names: Vec<String>,
    pub x: Matrix,
    /// Logit density per row.
    pub response: Vec<f64>,
    /// Estimated viewers per row.
    pub weights: Option<Vec<f64>>,
    /// The constant subtracted from AVG (zero when centering is off).
    pub avg_mean: f64,
}

impl DesignMatrix {
    pub fn new(
        column_names: Vec<String>,
        x: Matrix,
        response: Vec<f64>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        if x.ncols() != column_names.len() {
            return Err(Error::Config(format!(
                "{} column names for {} columns",
                column_names.len(),
                x.ncols()
            )));
        }
        if response.len() != x.nrows() || weights.as_ref().is_some_and(|w| w.len() != x.nrows()) {
            return Err(Error::Config("response/weights length differs from row count".into()));
        }
        let finite = x.is_finite()
            && response.iter().all(|v| v.is_finite())
            && weights.iter().flatten().all(|v| v.is_finite());
        if !finite {
            return Err(Error::Domain("design contains non-finite values".into()));
        }
        Ok(DesignMatrix {
            column_names,
            x,
            response,
            weights,
            avg_mean: 0.0,
        })
    }

    pub fn n_obs(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_params(&self) -> usize {
        self.x.ncols()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|c| c == name)
    }

    pub fn has_intercept(&self) -> bool {
        self.column_index(INTERCEPT).is_some()
    }
}

/// Builds the regressor matrix for the logit-density model.
///
/// Columns: intercept, MKT, SCR, centered AVG, its square, CRSTD, one
/// fractional dummy per tracked genre, LWEEK. An item listed under k genres
/// scores 1/k in each of its tracked genres, so genre columns do not sum to
/// the intercept when an item carries untracked genres.
pub fn build_design(panel: &[PanelRow], spec: &DesignSpec) -> Result<DesignMatrix> {
    spec.validate()?;
    if panel.is_empty() {
        return Err(Error::Empty("panel has no rows"));
    }
    let avg_mean = if spec.center_avg {
        let first = panel[0].avg_rating;
        if panel.iter().all(|r| r.avg_rating == first) {
            first
        } else {
            panel.iter().map(|r| r.avg_rating).sum::<f64>() / panel.len() as f64
        }
    } else {
        0.0
    };
    let names = spec.column_names();
    let genres: Vec<String> = spec.tracked_genres.iter().map(|g| normalize_genre(g)).collect();
    let mut data = Vec::with_capacity(panel.len() * names.len());
    for row in panel {
        let avg_c = row.avg_rating - avg_mean;
        if spec.intercept {
            data.push(1.0);
        }
        data.extend([row.mkt, row.scr, avg_c]);
        if spec.include_quadratic {
            data.push(avg_c * avg_c);
        }
        data.push(row.crstd);
        for g in &genres {
            data.push(row.genre_weights.get(g).copied().unwrap_or(0.0));
        }
        data.push(row.lweek);
    }
    let x = Matrix::new(panel.len(), names.len(), data);
    let response = panel.iter().map(|r| r.ld).collect();
    let weights = Some(panel.iter().map(|r| r.viewers).collect());
    let mut design = DesignMatrix::new(names, x, response, weights)?;
    design.avg_mean = avg_mean;
    Ok(design)
}
