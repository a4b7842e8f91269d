//! Censoring-aware parametric survival fits compared by AIC.
//!
//! The exponential rate has a closed form (events / total time at risk).
//! Weibull, log-normal and gamma are maximized numerically with Nelder-Mead
//! over log-parameters, started from method-of-moments values on the
//! uncensored durations. The censored log-likelihood is
//! `sum_events ln f(t) + sum_censored ln S(t)`.

use super::{SurvivalError, SurvivalSample};
use crate::numeric::nelder_mead;
use crate::numeric::special::{gamma_q, ln_gamma, normal_sf};
use serde::{Deserialize, Serialize};

/// Durations are floored at this value inside the likelihood so that an
/// exactly-zero duration (clock-skew clamp) cannot produce -inf densities.
const DURATION_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParametricFamily {
    Exponential,
    Weibull,
    LogNormal,
    Gamma,
}

impl ParametricFamily {
    pub const ALL: [ParametricFamily; 4] = [
        ParametricFamily::Exponential,
        ParametricFamily::Weibull,
        ParametricFamily::LogNormal,
        ParametricFamily::Gamma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ParametricFamily::Exponential => "exponential",
            ParametricFamily::Weibull => "weibull",
            ParametricFamily::LogNormal => "log_normal",
            ParametricFamily::Gamma => "gamma",
        }
    }

    fn param_count(self) -> usize {
        match self {
            ParametricFamily::Exponential => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParametricFit {
    pub family: ParametricFamily,
    /// (name, value) pairs on the natural scale.
    pub parameters: Vec<(String, f64)>,
    pub log_likelihood: f64,
    /// 2k - 2 ln L.
    pub aic: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn split(samples: &[SurvivalSample]) -> (Vec<f64>, Vec<f64>) {
    let mut events = Vec::new();
    let mut censored = Vec::new();
    for s in samples {
        let t = s.duration.max(DURATION_FLOOR);
        if s.event {
            events.push(t);
        } else {
            censored.push(t);
        }
    }
    (events, censored)
}

fn weibull_loglik(events: &[f64], censored: &[f64], shape: f64, scale: f64) -> f64 {
    let mut ll = 0.0;
    for &t in events {
        let z = t / scale;
        ll += shape.ln() - scale.ln() + (shape - 1.0) * z.ln() - z.powf(shape);
    }
    for &t in censored {
        ll -= (t / scale).powf(shape);
    }
    ll
}

fn lognormal_loglik(events: &[f64], censored: &[f64], mu: f64, sigma: f64) -> f64 {
    let mut ll = 0.0;
    let norm = (sigma * (2.0 * std::f64::consts::PI).sqrt()).ln();
    for &t in events {
        let z = (t.ln() - mu) / sigma;
        ll += -t.ln() - norm - z * z / 2.0;
    }
    for &t in censored {
        let z = (t.ln() - mu) / sigma;
        let sf = normal_sf(z);
        ll += if sf > 0.0 { sf.ln() } else { -745.0 };
    }
    ll
}

fn gamma_loglik(events: &[f64], censored: &[f64], shape: f64, rate: f64) -> f64 {
    let mut ll = 0.0;
    for &t in events {
        ll += shape * rate.ln() - ln_gamma(shape) + (shape - 1.0) * t.ln() - rate * t;
    }
    for &t in censored {
        let q = gamma_q(shape, rate * t);
        ll += if q > 0.0 { q.ln() } else { -745.0 };
    }
    ll
}

/// Fit one family by censoring-aware maximum likelihood.
///
/// Needs at least two observed events; numeric non-convergence is reported
/// per family rather than silently returned.
pub fn parametric_fit(
    samples: &[SurvivalSample],
    family: ParametricFamily,
) -> Result<ParametricFit, SurvivalError> {
    super::validate_durations(samples)?;
    let (events, censored) = split(samples);
    if events.len() < 2 {
        return Err(SurvivalError::TooFewEvents {
            need: 2,
            got: events.len(),
        });
    }

    let total_time: f64 = events.iter().sum::<f64>() + censored.iter().sum::<f64>();
    let d = events.len() as f64;
    let mean = events.iter().sum::<f64>() / d;
    let var = events.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / d;

    let build = |params: Vec<(String, f64)>, ll: f64, converged, iterations| {
        let k = family.param_count() as f64;
        ParametricFit {
            family,
            parameters: params,
            log_likelihood: ll,
            aic: 2.0 * k - 2.0 * ll,
            converged,
            iterations,
        }
    };

    match family {
        ParametricFamily::Exponential => {
            let rate = d / total_time;
            let ll = d * rate.ln() - rate * total_time;
            Ok(build(vec![("rate".into(), rate)], ll, true, 0))
        }
        ParametricFamily::Weibull => {
            // moment start: shape from the coefficient of variation, scale
            // from the mean
            let cv = (var.sqrt() / mean).max(1e-3);
            let shape0 = cv.powf(-1.086).clamp(0.05, 50.0);
            let start = [shape0.ln(), mean.max(DURATION_FLOOR).ln()];
            let r = nelder_mead::minimize(
                |p| -weibull_loglik(&events, &censored, p[0].exp(), p[1].exp()),
                &start,
                1e-12,
                5000,
            );
            if !r.converged || !r.fx.is_finite() {
                return Err(SurvivalError::FitFailed { family: "weibull" });
            }
            Ok(build(
                vec![("shape".into(), r.x[0].exp()), ("scale".into(), r.x[1].exp())],
                -r.fx,
                true,
                r.iterations,
            ))
        }
        ParametricFamily::LogNormal => {
            let logs: Vec<f64> = events.iter().map(|t| t.ln()).collect();
            let mu0 = logs.iter().sum::<f64>() / d;
            let sd0 = (logs.iter().map(|l| (l - mu0) * (l - mu0)).sum::<f64>() / d)
                .sqrt()
                .max(1e-3);
            let r = nelder_mead::minimize(
                |p| -lognormal_loglik(&events, &censored, p[0], p[1].exp()),
                &[mu0, sd0.ln()],
                1e-12,
                5000,
            );
            if !r.converged || !r.fx.is_finite() {
                return Err(SurvivalError::FitFailed { family: "log_normal" });
            }
            Ok(build(
                vec![("mu".into(), r.x[0]), ("sigma".into(), r.x[1].exp())],
                -r.fx,
                true,
                r.iterations,
            ))
        }
        ParametricFamily::Gamma => {
            let var = var.max(1e-6);
            let shape0 = (mean * mean / var).clamp(0.05, 1e4);
            let rate0 = (mean / var).clamp(1e-8, 1e6);
            let r = nelder_mead::minimize(
                |p| -gamma_loglik(&events, &censored, p[0].exp(), p[1].exp()),
                &[shape0.ln(), rate0.ln()],
                1e-12,
                5000,
            );
            if !r.converged || !r.fx.is_finite() {
                return Err(SurvivalError::FitFailed { family: "gamma" });
            }
            Ok(build(
                vec![("shape".into(), r.x[0].exp()), ("rate".into(), r.x[1].exp())],
                -r.fx,
                true,
                r.iterations,
            ))
        }
    }
}
