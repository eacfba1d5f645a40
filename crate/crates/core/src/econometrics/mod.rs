//! Logit-density regression: design construction, OLS/WLS by pivoted QR,
//! Breusch–Pagan diagnostics and the hypothesis decision rule.

mod breusch_pagan;
mod design;
mod distributions;
mod fit;
mod hypotheses;
pub mod linalg;

pub use breusch_pagan::{breusch_pagan, BPTestResult};
pub use design::{
    build_design, DesignMatrix, DesignSpec, AVG, AVG_SQUARED, CRSTD, DEFAULT_GENRES, INTERCEPT,
    LWEEK, MKT, SCR,
};
pub use distributions::{chi_squared_cdf, chi_squared_sf, student_t_cdf, student_t_two_sided_p};
pub use fit::{fit_ols, fit_wls, RegressionFit, Term};
pub use hypotheses::{
    evaluate_hypotheses, significance_code, significance_codes, HypothesisOutcome,
    HypothesisReport, Sign, Verdict,
};
