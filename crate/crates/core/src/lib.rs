//! Ratings density as a measure of post-purchase online word-of-mouth.
//!
//! [`dataset`] builds the item-week panel, [`metrics`] computes the
//! descriptive tables, [`econometrics`] fits the logit-density model,
//! [`simulator`] generates synthetic markets with known coefficients and
//! [`cli`] wires them into the `wom-density` binary.

pub mod cli;
pub mod dataset;
pub mod econometrics;
pub mod error;
pub mod metrics;
pub mod simulator;

pub use error::{Error, ErrorKind, Result};

// The guide's code blocks run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/data.md")]
    mod data {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/regression.md")]
    mod regression {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
