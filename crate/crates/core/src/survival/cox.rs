//! Cox proportional hazards via Newton-Raphson on the Breslow partial
//! likelihood.

use super::{SurvivalError, SurvivalSample};
use crate::numeric::special::normal_sf;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

const TOL: f64 = 1e-9;
const MAX_ITER: usize = 100;
const MAX_COEF: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoxTerm {
    pub name: String,
    pub coefficient: f64,
    /// exp(coefficient), by construction.
    pub hazard_ratio: f64,
    pub std_error: f64,
    pub z: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoxFit {
    pub terms: Vec<CoxTerm>,
    pub log_likelihood: f64,
    pub null_log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
    pub events: usize,
    pub samples: usize,
    /// Log partial likelihood after each Newton iteration (non-decreasing).
    pub likelihood_history: Vec<f64>,
    /// Inverse information matrix at the solution, row-major.
    pub covariance: Vec<Vec<f64>>,
}

impl CoxFit {
    pub fn coefficients(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.coefficient).collect()
    }
}

struct Prepared {
    /// sample indices sorted by duration descending (ties by index)
    order: Vec<usize>,
    x: DMatrix<f64>,
    n_events: usize,
}

fn prepare(samples: &[SurvivalSample]) -> Result<Prepared, SurvivalError> {
    super::validate_durations(samples)?;
    let p = samples[0].covariates.len();
    if p == 0 {
        return Err(SurvivalError::CovariateShape {
            expected: 1,
            got: 0,
            index: 0,
        });
    }
    for (i, s) in samples.iter().enumerate() {
        if s.covariates.len() != p {
            return Err(SurvivalError::CovariateShape {
                expected: p,
                got: s.covariates.len(),
                index: i,
            });
        }
    }
    let n_events = samples.iter().filter(|s| s.event).count();
    if n_events == 0 {
        return Err(SurvivalError::NoEvents);
    }

    let n = samples.len();
    let mut x = DMatrix::<f64>::zeros(n, p);
    for (i, s) in samples.iter().enumerate() {
        for (j, &v) in s.covariates.iter().enumerate() {
            x[(i, j)] = v;
        }
    }
    // center columns; the partial likelihood is shift-invariant and this
    // keeps exp(eta) in range
    let means = DVector::from_iterator(p, (0..p).map(|j| x.column(j).mean()));
    for j in 0..p {
        let m = means[j];
        for i in 0..n {
            x[(i, j)] -= m;
        }
    }

    // rank check on X'X
    let xtx = x.transpose() * &x;
    let eig = xtx.clone().symmetric_eigen();
    let max_ev = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    for (idx, &ev) in eig.eigenvalues.iter().enumerate() {
        if ev <= max_ev * 1e-10 {
            // name the covariate loading heaviest on the null direction
            let col = eig
                .eigenvectors
                .column(idx)
                .iter()
                .map(|v| v.abs())
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite"))
                .map(|(j, _)| j)
                .unwrap_or(0);
            return Err(SurvivalError::RankDeficient(col));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        samples[b]
            .duration
            .partial_cmp(&samples[a].duration)
            .expect("finite durations")
            .then(a.cmp(&b))
    });

    let _ = means; // centering offsets are internal only
    Ok(Prepared { order, x, n_events })
}

/// One sweep over the risk sets: log partial likelihood, score vector and
/// information matrix at `beta` (Breslow tie handling).
fn breslow_pass(
    samples: &[SurvivalSample],
    prep: &Prepared,
    beta: &DVector<f64>,
) -> (f64, DVector<f64>, DMatrix<f64>) {
    let p = beta.len();
    let mut s0 = 0.0;
    let mut s1 = DVector::<f64>::zeros(p);
    let mut s2 = DMatrix::<f64>::zeros(p, p);
    let mut loglik = 0.0;
    let mut score = DVector::<f64>::zeros(p);
    let mut info = DMatrix::<f64>::zeros(p, p);

    let ord = &prep.order;
    let n = ord.len();
    let mut i = 0;
    while i < n {
        let t = samples[ord[i]].duration;
        // everyone with this duration enters the risk set (deaths counted
        // at t are still at risk at t, as are same-time censorings)
        let mut j = i;
        while j < n && samples[ord[j]].duration == t {
            let idx = ord[j];
            let xi = prep.x.row(idx).transpose();
            let w = (beta.dot(&xi)).exp();
            s0 += w;
            s1.axpy(w, &xi, 1.0);
            s2.syger(w, &xi, &xi, 1.0);
            j += 1;
        }
        // process the deaths at t
        let mut deaths = 0.0;
        let mut xsum = DVector::<f64>::zeros(p);
        for &idx in &ord[i..j] {
            if samples[idx].event {
                deaths += 1.0;
                let xi = prep.x.row(idx).transpose();
                loglik += beta.dot(&xi);
                xsum += xi;
            }
        }
        if deaths > 0.0 {
            loglik -= deaths * s0.ln();
            let mean = &s1 / s0;
            score += &xsum - deaths * &mean;
            // info += d * (S2/S0 - mean mean')
            let mut block = &s2 / s0;
            block.syger(-1.0, &mean, &mean, 1.0);
            info += deaths * block;
        }
        i = j;
    }
    // syger fills the lower triangle; mirror it
    let mut full = info;
    for r in 0..p {
        for c in (r + 1)..p {
            full[(r, c)] = full[(c, r)];
        }
    }
    (loglik, score, full)
}

fn solve_spd(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(ch) = a.clone().cholesky() {
        return Some(ch.solve(b));
    }
    a.clone().lu().solve(b)
}

/// Fit the proportional hazards model. `names` labels the covariates in
/// sample order; convergence is |delta log L| < 1e-9 within 100 iterations
/// with step-halving, and non-convergence or separation is an error.
pub fn cox_fit(samples: &[SurvivalSample], names: &[&str]) -> Result<CoxFit, SurvivalError> {
    let prep = prepare(samples)?;
    let p = prep.x.ncols();
    assert_eq!(names.len(), p, "one name per covariate column");

    let mut beta = DVector::<f64>::zeros(p);
    let (null_loglik, mut score, mut info) = breslow_pass(samples, &prep, &beta);
    let mut loglik = null_loglik;
    let mut history = vec![loglik];
    let mut converged = false;
    let mut iterations = 0;
    let mut last_change = f64::INFINITY;

    while iterations < MAX_ITER {
        iterations += 1;
        let step = solve_spd(&info, &score)
            .ok_or(SurvivalError::NotConverged {
                iterations,
                last_change,
            })?;
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let candidate = &beta + scale * &step;
            let (ll, sc, inf) = breslow_pass(samples, &prep, &candidate);
            if ll.is_finite() && ll >= loglik - 1e-13 * loglik.abs().max(1.0) {
                last_change = (ll - loglik).abs();
                beta = candidate;
                loglik = ll;
                score = sc;
                info = inf;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            return Err(SurvivalError::NotConverged {
                iterations,
                last_change,
            });
        }
        history.push(loglik);
        for j in 0..p {
            if beta[j].abs() > MAX_COEF {
                return Err(SurvivalError::Separation(j));
            }
        }
        if last_change < TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(SurvivalError::NotConverged {
            iterations,
            last_change,
        });
    }

    // covariance = inverse information at the solution
    let identity = DMatrix::<f64>::identity(p, p);
    let cov = match info.clone().cholesky() {
        Some(ch) => ch.solve(&identity),
        None => info
            .clone()
            .lu()
            .solve(&identity)
            .ok_or(SurvivalError::RankDeficient(0))?,
    };

    let terms = (0..p)
        .map(|j| {
            let se = cov[(j, j)].max(0.0).sqrt();
            let z = if se > 0.0 { beta[j] / se } else { 0.0 };
            CoxTerm {
                name: names[j].to_string(),
                coefficient: beta[j],
                hazard_ratio: beta[j].exp(),
                std_error: se,
                z,
                p_value: (2.0 * normal_sf(z.abs())).min(1.0),
            }
        })
        .collect();

    let covariance = (0..p)
        .map(|r| (0..p).map(|c| cov[(r, c)]).collect())
        .collect();

    Ok(CoxFit {
        terms,
        log_likelihood: loglik,
        null_log_likelihood: null_loglik,
        iterations,
        converged,
        events: prep.n_events,
        samples: samples.len(),
        likelihood_history: history,
        covariance,
    })
}

/// Schoenfeld residual machinery shared with the proportionality check:
/// per ascending event, the covariate value minus the risk-set average at
/// the event's time under `beta`.
pub(crate) fn schoenfeld_residuals(
    samples: &[SurvivalSample],
    beta: &[f64],
) -> Result<(Vec<f64>, Vec<Vec<f64>>), SurvivalError> {
    let prep = prepare(samples)?;
    let p = prep.x.ncols();
    let beta = DVector::from_column_slice(beta);

    // risk-set weighted means per distinct time, built descending
    let mut s0 = 0.0;
    let mut s1 = DVector::<f64>::zeros(p);
    let ord = &prep.order;
    let n = ord.len();
    let mut mean_at = Vec::new(); // (time, mean vector), descending times
    let mut i = 0;
    while i < n {
        let t = samples[ord[i]].duration;
        let mut j = i;
        let mut any_event = false;
        while j < n && samples[ord[j]].duration == t {
            let idx = ord[j];
            let xi = prep.x.row(idx).transpose();
            let w = (beta.dot(&xi)).exp();
            s0 += w;
            s1.axpy(w, &xi, 1.0);
            any_event |= samples[idx].event;
            j += 1;
        }
        if any_event {
            mean_at.push((t, &s1 / s0));
        }
        i = j;
    }
    mean_at.reverse();

    // events ascending by (time, index)
    let mut events: Vec<usize> = (0..n).filter(|&i| samples[i].event).collect();
    events.sort_by(|&a, &b| {
        samples[a]
            .duration
            .partial_cmp(&samples[b].duration)
            .expect("finite durations")
            .then(a.cmp(&b))
    });

    let mut times = Vec::with_capacity(events.len());
    let mut rows = Vec::with_capacity(events.len());
    for &idx in &events {
        let t = samples[idx].duration;
        let slot = mean_at
            .binary_search_by(|(mt, _)| mt.partial_cmp(&t).expect("finite durations"))
            .expect("event time present");
        let mean = &mean_at[slot].1;
        let row: Vec<f64> = (0..p).map(|j| prep.x[(idx, j)] - mean[j]).collect();
        times.push(t);
        rows.push(row);
    }
    Ok((times, rows))
}
