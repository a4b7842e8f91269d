//! Survival estimation over right-censored durations.
//!
//! Kaplan-Meier curves with half-life medians, the log-rank family
//! (pairwise and k-sample), Cox proportional hazards with Breslow ties and
//! a scaled-Schoenfeld proportionality check, and censoring-aware parametric
//! fits compared by AIC.

mod cox;
mod km;
mod logrank;
mod parametric;
mod schoenfeld;

pub use cox::{cox_fit, CoxFit, CoxTerm};
pub use km::{km_estimate, KmStep, Median, SurvivalCurve};
pub use logrank::{logrank_test, omnibus_survival_test, LogrankResult, OmnibusResult};
pub use parametric::{parametric_fit, ParametricFamily, ParametricFit};
pub use schoenfeld::{ph_check, PhCheck, PhCovariate};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One right-censored observation: a duration in fractional days, whether
/// the event (removal) was observed, and a covariate vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalSample {
    pub duration: f64,
    pub event: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub covariates: Vec<f64>,
}

impl SurvivalSample {
    pub fn new(duration: f64, event: bool) -> SurvivalSample {
        SurvivalSample {
            duration,
            event,
            covariates: Vec::new(),
        }
    }

    pub fn with_covariates(duration: f64, event: bool, covariates: Vec<f64>) -> SurvivalSample {
        SurvivalSample {
            duration,
            event,
            covariates,
        }
    }
}

#[derive(Debug, Error)]
pub enum SurvivalError {
    #[error("no samples")]
    Empty,
    #[error("no observed events")]
    NoEvents,
    #[error("need at least {need} events, got {got}")]
    TooFewEvents { need: usize, got: usize },
    #[error("need at least two groups")]
    TooFewGroups,
    #[error("duration must be finite and non-negative, got {0}")]
    BadDuration(f64),
    #[error("covariate matrix is rank deficient (column {0})")]
    RankDeficient(usize),
    #[error("covariate vectors must all have length {expected}, sample {index} has {got}")]
    CovariateShape {
        expected: usize,
        got: usize,
        index: usize,
    },
    #[error("Newton-Raphson did not converge after {iterations} iterations (last change {last_change:e})")]
    NotConverged { iterations: usize, last_change: f64 },
    #[error("monotone likelihood: coefficient for covariate {0} diverged (data separation)")]
    Separation(usize),
    #[error("{family} fit did not converge")]
    FitFailed { family: &'static str },
}

pub(crate) fn validate_durations(samples: &[SurvivalSample]) -> Result<(), SurvivalError> {
    if samples.is_empty() {
        return Err(SurvivalError::Empty);
    }
    for s in samples {
        if !s.duration.is_finite() || s.duration < 0.0 {
            return Err(SurvivalError::BadDuration(s.duration));
        }
    }
    Ok(())
}
