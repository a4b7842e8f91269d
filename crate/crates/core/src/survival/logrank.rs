//! Log-rank (Mantel-Cox) tests: pairwise and k-sample.

use super::{SurvivalError, SurvivalSample};
use crate::numeric::special::chi2_sf;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogrankResult {
    pub chi_square: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmnibusResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    /// How the omnibus statistic is computed; recorded into output metadata.
    pub method: &'static str,
}

/// Observed-vs-expected chi-square over the pooled event times for the
/// first k-1 groups, with the usual hypergeometric covariance.
fn k_sample_statistic(groups: &[&[SurvivalSample]]) -> Result<f64, SurvivalError> {
    let k = groups.len();
    if k < 2 {
        return Err(SurvivalError::TooFewGroups);
    }
    for g in groups {
        super::validate_durations(g)?;
    }
    let total_events: usize = groups
        .iter()
        .map(|g| g.iter().filter(|s| s.event).count())
        .sum();
    if total_events == 0 {
        return Err(SurvivalError::NoEvents);
    }

    // pooled distinct event times
    let mut event_times: Vec<f64> = groups
        .iter()
        .flat_map(|g| g.iter().filter(|s| s.event).map(|s| s.duration))
        .collect();
    event_times.sort_by(|a, b| a.partial_cmp(b).expect("finite durations"));
    event_times.dedup();

    // per group: all durations sorted (risk set lookups) and event durations
    // sorted (death counts)
    let cmp = |a: &f64, b: &f64| a.partial_cmp(b).expect("finite durations");
    let durations: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| {
            let mut v: Vec<f64> = g.iter().map(|s| s.duration).collect();
            v.sort_by(cmp);
            v
        })
        .collect();
    let death_times: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| {
            let mut v: Vec<f64> = g.iter().filter(|s| s.event).map(|s| s.duration).collect();
            v.sort_by(cmp);
            v
        })
        .collect();
    let lower_bound = |v: &[f64], t: f64| v.partition_point(|&x| x < t);
    let upper_bound = |v: &[f64], t: f64| v.partition_point(|&x| x <= t);

    let dim = k - 1;
    let mut diff = DVector::<f64>::zeros(dim);
    let mut cov = DMatrix::<f64>::zeros(dim, dim);

    for &t in &event_times {
        let mut at_risk = vec![0.0; k];
        let mut deaths = vec![0.0; k];
        for j in 0..k {
            at_risk[j] = (durations[j].len() - lower_bound(&durations[j], t)) as f64;
            deaths[j] =
                (upper_bound(&death_times[j], t) - lower_bound(&death_times[j], t)) as f64;
        }
        let n: f64 = at_risk.iter().sum();
        let d: f64 = deaths.iter().sum();
        if n <= 0.0 || d == 0.0 {
            continue;
        }
        for j in 0..dim {
            diff[j] += deaths[j] - d * at_risk[j] / n;
        }
        if n > 1.0 {
            let factor = d * (n - d) / (n - 1.0);
            for j in 0..dim {
                for l in 0..dim {
                    let delta = if j == l { 1.0 } else { 0.0 };
                    cov[(j, l)] +=
                        factor * (at_risk[j] / n) * (delta - at_risk[l] / n);
                }
            }
        }
    }

    // solve V x = diff; fall back to a pseudo-inverse when V is singular
    // (all events inside one group's exclusive time range, tiny groups)
    let chi = match cov.clone().cholesky() {
        Some(ch) => {
            let x = ch.solve(&diff);
            (diff.transpose() * x)[(0, 0)]
        }
        None => {
            let eig = cov.symmetric_eigen();
            let max_ev = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
            let tol = max_ev * 1e-12;
            let mut chi = 0.0;
            for (i, &ev) in eig.eigenvalues.iter().enumerate() {
                if ev > tol {
                    let proj = eig.eigenvectors.column(i).dot(&diff);
                    chi += proj * proj / ev;
                }
            }
            chi
        }
    };
    Ok(chi.max(0.0))
}

/// Two-sample Mantel-Cox log-rank test (1 degree of freedom).
pub fn logrank_test(
    group_a: &[SurvivalSample],
    group_b: &[SurvivalSample],
) -> Result<LogrankResult, SurvivalError> {
    let chi = k_sample_statistic(&[group_a, group_b])?;
    Ok(LogrankResult {
        chi_square: chi,
        p_value: if chi == 0.0 { 1.0 } else { chi2_sf(chi, 1.0) },
    })
}

/// Omnibus comparison of k >= 2 survival distributions, realized as the
/// k-sample log-rank chi-square with k-1 degrees of freedom.
pub fn omnibus_survival_test(
    groups: &[&[SurvivalSample]],
) -> Result<OmnibusResult, SurvivalError> {
    let chi = k_sample_statistic(groups)?;
    let df = groups.len() - 1;
    Ok(OmnibusResult {
        statistic: chi,
        df,
        p_value: if chi == 0.0 {
            1.0
        } else {
            chi2_sf(chi, df as f64)
        },
        method: "k-sample log-rank",
    })
}
