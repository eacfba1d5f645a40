use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::design::{AVG_SQUARED, CRSTD, MKT, SCR};
use super::fit::RegressionFit;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    fn of(v: f64) -> Option<Sign> {
        if v > 0.0 {
            Some(Sign::Positive)
        } else if v < 0.0 {
            Some(Sign::Negative)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Supported,
    NotSupported,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Supported => "supported",
            Verdict::NotSupported => "not-supported",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisOutcome {
    pub id: String,
    pub statement: String,
    pub coefficient: String,
    pub expected_sign: Sign,
    pub estimated_sign: Option<Sign>,
    pub estimate: f64,
    pub p_value: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub alpha: f64,
    pub outcomes: Vec<HypothesisOutcome>,
}

impl HypothesisReport {
    pub fn verdict(&self, id: &str) -> Option<Verdict> {
        self.outcomes.iter().find(|o| o.id == id).map(|o| o.verdict)
    }
}

const HYPOTHESES: [(&str, &str, &str, Sign); 4] = [
    ("H1", "density is U-shaped in perceived quality", AVG_SQUARED, Sign::Positive),
    ("H2", "density rises with marketing effort", MKT, Sign::Positive),
    ("H3", "density falls with availability", SCR, Sign::Negative),
    ("H4", "density rises with disagreement about quality", CRSTD, Sign::Positive),
];

/// Significant with the expected sign → supported; significant with the
/// opposite sign → not supported; otherwise inconclusive.
pub fn evaluate_hypotheses(fit: &RegressionFit, alpha: f64) -> Result<HypothesisReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!("alpha must be in (0, 1), got {alpha}")));
    }
    let mut outcomes = Vec::with_capacity(HYPOTHESES.len());
    for (id, statement, name, expected) in HYPOTHESES {
        let term = fit
            .term(name)
            .ok_or_else(|| Error::MissingCoefficient(name.to_string()))?;
        let estimated_sign = Sign::of(term.coefficient);
        let verdict = if term.p_value < alpha {
            if estimated_sign == Some(expected) {
                Verdict::Supported
            } else {
                Verdict::NotSupported
            }
        } else {
            Verdict::Inconclusive
        };
        outcomes.push(HypothesisOutcome {
            id: id.to_string(),
            statement: statement.to_string(),
            coefficient: name.to_string(),
            expected_sign: expected,
            estimated_sign,
            estimate: term.coefficient,
            p_value: term.p_value,
            verdict,
        });
    }
    Ok(HypothesisReport { alpha, outcomes })
}

/// `c` below 0.001, `b` below 0.01, `a` below 0.05. A p-value sitting on a
/// boundary gets the weaker code.
pub fn significance_code(p: f64) -> Option<&'static str> {
    if p < 0.001 {
        Some("c")
    } else if p < 0.01 {
        Some("b")
    } else if p < 0.05 {
        Some("a")
    } else {
        None
    }
}

pub fn significance_codes(fit: &RegressionFit) -> BTreeMap<String, Option<&'static str>> {
    fit.terms
        .iter()
        .map(|t| (t.name.clone(), significance_code(t.p_value)))
        .collect()
}
