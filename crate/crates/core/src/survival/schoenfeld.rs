//! Proportional-hazards check via scaled Schoenfeld residuals regressed
//! against Kaplan-Meier-transformed event times (the cox.zph approach).
//!
//! For m events with Schoenfeld residual matrix S (m x p), scaled residuals
//! R = m * S * Var(beta), and centered transformed times g, the statistic
//! for covariate j is
//!
//!   T_j = (sum_k g_k R_kj)^2 / (m * Var_jj * sum g^2)
//!
//! with 1 df; the global statistic is m * (g'S) Var (g'S)' / sum g^2 with
//! p df. A drifting correlation between residuals and time signals a
//! violated proportionality assumption.

use super::cox::{schoenfeld_residuals, CoxFit};
use super::{km_estimate, SurvivalError, SurvivalSample};
use crate::numeric::special::chi2_sf;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhCovariate {
    pub name: String,
    /// Pearson correlation between scaled residuals and transformed time.
    pub correlation: f64,
    pub chi_square: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhCheck {
    pub covariates: Vec<PhCovariate>,
    pub global_chi_square: f64,
    pub global_df: usize,
    pub global_p: f64,
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

/// Test the proportional hazards assumption of a converged fit.
/// Requires at least 3 events.
pub fn ph_check(fit: &CoxFit, samples: &[SurvivalSample]) -> Result<PhCheck, SurvivalError> {
    let beta = fit.coefficients();
    let p = beta.len();
    let (times, rows) = schoenfeld_residuals(samples, &beta)?;
    let m = rows.len();
    if m < 3 {
        return Err(SurvivalError::TooFewEvents { need: 3, got: m });
    }

    // KM transform: g_k = 1 - S(t_k^-), the survival estimate just before
    // the event's time; tied events share a value
    let curve = km_estimate(samples)?;
    let mut g = Vec::with_capacity(m);
    for &t in &times {
        let mut prev = 1.0;
        for step in &curve.steps {
            if step.time < t {
                prev = step.survival;
            } else {
                break;
            }
        }
        g.push(1.0 - prev);
    }
    let gbar = g.iter().sum::<f64>() / m as f64;
    let gc: Vec<f64> = g.iter().map(|v| v - gbar).collect();
    let gss: f64 = gc.iter().map(|v| v * v).sum();

    let var = DMatrix::from_fn(p, p, |r, c| fit.covariance[r][c]);
    let s = DMatrix::from_fn(m, p, |r, c| rows[r][c]);
    let scaled = &s * &var * (m as f64);

    let mut covariates = Vec::with_capacity(p);
    for j in 0..p {
        let col: Vec<f64> = (0..m).map(|k| scaled[(k, j)]).collect();
        let test: f64 = gc.iter().zip(&col).map(|(a, b)| a * b).sum();
        let denom = var[(j, j)] * (m as f64) * gss;
        let chi = if denom > 0.0 { test * test / denom } else { 0.0 };
        covariates.push(PhCovariate {
            name: fit.terms[j].name.clone(),
            correlation: pearson(&gc, &col),
            chi_square: chi,
            p_value: if denom > 0.0 { chi2_sf(chi, 1.0) } else { 1.0 },
        });
    }

    // global: project g onto the raw residuals
    let gvec = DVector::from_fn(p, |j, _| {
        (0..m).map(|k| gc[k] * s[(k, j)]).sum::<f64>()
    });
    let global = if gss > 0.0 {
        ((&gvec.transpose() * &var * &gvec)[(0, 0)]) * (m as f64) / gss
    } else {
        0.0
    };
    Ok(PhCheck {
        covariates,
        global_chi_square: global,
        global_df: p,
        global_p: if gss > 0.0 { chi2_sf(global, p as f64) } else { 1.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::survival::cox_fit;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn simulate_ph(seed: u64, n: usize) -> Vec<SurvivalSample> {
        // proportional hazards hold: exponential with rate scaled by exp(b x)
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let x = f64::from(rng.random_range(0..2u8));
                let u: f64 = rng.random_range(0.0_f64..1.0).max(1e-12);
                let t = -u.ln() / (0.02 * (0.7 * x).exp());
                let c: f64 = rng.random_range(0.0_f64..1.0).max(1e-12);
                let censor = -c.ln() / 0.005;
                if t <= censor {
                    SurvivalSample::with_covariates(t, true, vec![x])
                } else {
                    SurvivalSample::with_covariates(censor, false, vec![x])
                }
            })
            .collect()
    }

    fn simulate_reversing(seed: u64, n: usize) -> Vec<SurvivalSample> {
        // effect reverses mid-study: group 1 removed fast early, slow late
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let x = f64::from(rng.random_range(0..2u8));
                let u: f64 = rng.random_range(0.0_f64..1.0).max(1e-12);
                let base = -u.ln();
                let t = if x > 0.5 {
                    // high early hazard, then nearly none
                    if base < 1.0 {
                        base * 5.0
                    } else {
                        5.0 + (base - 1.0) * 400.0
                    }
                } else {
                    base * 50.0
                };
                SurvivalSample::with_covariates(t, true, vec![x])
            })
            .collect()
    }

    #[test]
    fn accepts_proportional_hazards_data() {
        let samples = simulate_ph(3, 600);
        let fit = cox_fit(&samples, &["x"]).unwrap();
        let check = ph_check(&fit, &samples).unwrap();
        assert!(check.covariates[0].p_value > 0.05, "{check:?}");
        assert!(check.global_p > 0.05);
    }

    #[test]
    fn mostly_accepts_across_seeds_when_ph_true() {
        let mut pass = 0;
        for seed in 0..50 {
            let samples = simulate_ph(1000 + seed, 400);
            let fit = cox_fit(&samples, &["x"]).unwrap();
            let check = ph_check(&fit, &samples).unwrap();
            if check.covariates[0].p_value > 0.05 {
                pass += 1;
            }
        }
        assert!(pass >= 45, "only {pass}/50 PH-true runs accepted");
    }

    #[test]
    fn rejects_time_reversing_effect() {
        let samples = simulate_reversing(7, 800);
        let fit = cox_fit(&samples, &["x"]).unwrap();
        let check = ph_check(&fit, &samples).unwrap();
        assert!(
            check.covariates[0].p_value < 0.05,
            "p = {}",
            check.covariates[0].p_value
        );
    }

    #[test]
    fn too_few_events_is_an_error() {
        let samples = vec![
            SurvivalSample::with_covariates(1.0, true, vec![0.0]),
            SurvivalSample::with_covariates(2.0, false, vec![1.0]),
            SurvivalSample::with_covariates(3.0, true, vec![1.0]),
            SurvivalSample::with_covariates(4.0, false, vec![0.0]),
        ];
        let fit = cox_fit(&samples, &["x"]).unwrap();
        assert!(matches!(
            ph_check(&fit, &samples),
            Err(SurvivalError::TooFewEvents { need: 3, got: 2 })
        ));
    }
}
