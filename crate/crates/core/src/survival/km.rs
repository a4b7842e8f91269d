//! Kaplan-Meier product-limit estimation.

use super::{validate_durations, SurvivalError, SurvivalSample};
use serde::{Deserialize, Serialize};

/// Median survival time: smallest step time with S(t) <= 0.5, infinite when
/// the curve never reaches one half.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Median {
    Finite(f64),
    Infinite,
}

impl Median {
    pub fn as_finite(self) -> Option<f64> {
        match self {
            Median::Finite(t) => Some(t),
            Median::Infinite => None,
        }
    }
}

/// One step of the product-limit curve, recorded at a distinct event time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmStep {
    pub time: f64,
    pub survival: f64,
    /// Number at risk just before this time (ties: deaths processed before
    /// censorings, so same-time censored samples still count as at risk).
    pub at_risk: usize,
    pub deaths: usize,
    /// Censorings at exactly this time (leave the risk set after the deaths).
    pub censored: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    /// Steps at distinct event times, ascending. S(0) = 1 implicitly; the
    /// curve is right-continuous and constant between steps.
    pub steps: Vec<KmStep>,
    pub median: Median,
    pub samples: usize,
    pub events: usize,
}

impl SurvivalCurve {
    /// S(t): survival probability at time t (right-continuous).
    pub fn survival_at(&self, t: f64) -> f64 {
        let mut s = 1.0;
        for step in &self.steps {
            if step.time <= t {
                s = step.survival;
            } else {
                break;
            }
        }
        s
    }
}

/// Product-limit estimate. At tied times deaths are processed before
/// censorings. Errors on empty input.
pub fn km_estimate(samples: &[SurvivalSample]) -> Result<SurvivalCurve, SurvivalError> {
    validate_durations(samples)?;
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| {
        samples[a]
            .duration
            .partial_cmp(&samples[b].duration)
            .expect("finite durations")
    });

    let mut steps = Vec::new();
    let n = samples.len();
    let mut at_risk = n;
    let mut survival = 1.0;
    let mut events_total = 0;
    let mut censored_seen = 0usize;
    let mut i = 0;
    while i < order.len() {
        let t = samples[order[i]].duration;
        let mut deaths = 0;
        let mut censored = 0;
        let mut j = i;
        while j < order.len() && samples[order[j]].duration == t {
            if samples[order[j]].event {
                deaths += 1;
            } else {
                censored += 1;
            }
            j += 1;
        }
        if deaths > 0 {
            // while no censoring has occurred the product telescopes to an
            // exact count ratio, which keeps the curve bit-identical to the
            // empirical survival function on fully-observed data
            survival = if censored_seen == 0 {
                (at_risk - deaths) as f64 / n as f64
            } else {
                survival * (at_risk - deaths) as f64 / at_risk as f64
            };
            events_total += deaths;
            steps.push(KmStep {
                time: t,
                survival,
                at_risk,
                deaths,
                censored,
            });
        }
        at_risk -= deaths + censored;
        censored_seen += censored;
        i = j;
    }

    let median = steps
        .iter()
        .find(|s| s.survival <= 0.5)
        .map(|s| Median::Finite(s.time))
        .unwrap_or(Median::Infinite);

    Ok(SurvivalCurve {
        steps,
        median,
        samples: samples.len(),
        events: events_total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ev(t: f64) -> SurvivalSample {
        SurvivalSample::new(t, true)
    }
    fn cs(t: f64) -> SurvivalSample {
        SurvivalSample::new(t, false)
    }

    // Hand product-limit: [1,2,3] all events
    //   S(1) = 2/3, S(2) = 2/3 * 1/2 = 1/3, S(3) = 0; median = 2
    #[test]
    fn all_events_hand_computation() {
        let c = km_estimate(&[ev(1.0), ev(2.0), ev(3.0)]).unwrap();
        let s: Vec<f64> = c.steps.iter().map(|s| s.survival).collect();
        assert!((s[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((s[1] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(s[2], 0.0);
        assert_eq!(c.median, Median::Finite(2.0));
    }

    #[test]
    fn all_censored_is_flat_with_infinite_median() {
        let c = km_estimate(&[cs(1.0), cs(5.0), cs(9.0)]).unwrap();
        assert!(c.steps.is_empty());
        assert_eq!(c.survival_at(100.0), 1.0);
        assert_eq!(c.median, Median::Infinite);
    }

    // Hand computation: [1 event, 2 censored, 3 event]
    //   at t=1: 3 at risk, 1 death -> 2/3; t=2 censor drops risk to 1;
    //   at t=3: 1 at risk, 1 death -> 0
    #[test]
    fn censoring_shrinks_risk_set() {
        let c = km_estimate(&[ev(1.0), cs(2.0), ev(3.0)]).unwrap();
        assert_eq!(c.steps.len(), 2);
        assert!((c.steps[0].survival - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.steps[0].at_risk, 3);
        assert_eq!(c.steps[1].survival, 0.0);
        assert_eq!(c.steps[1].at_risk, 1);
        assert_eq!(c.median, Median::Finite(3.0));
    }

    // Reference: statsmodels SurvfuncRight on
    //   t = [5,6,6,2,4,4,9,11,3,7,7,12], status = [1,0,1,1,1,0,1,0,1,1,0,1]
    // survival at event times [2,3,4,5,6,7,9,12]:
    #[test]
    fn matches_statsmodels_with_censoring() {
        let t = [5.0, 6.0, 6.0, 2.0, 4.0, 4.0, 9.0, 11.0, 3.0, 7.0, 7.0, 12.0];
        let s = [true, false, true, true, true, false, true, false, true, true, false, true];
        let samples: Vec<SurvivalSample> = t
            .iter()
            .zip(s)
            .map(|(&d, e)| SurvivalSample::new(d, e))
            .collect();
        let c = km_estimate(&samples).unwrap();
        let want = [
            (2.0, 0.91666666666666663),
            (3.0, 0.83333333333333326),
            (4.0, 0.74999999999999989),
            (5.0, 0.65624999999999989),
            (6.0, 0.5625),
            (7.0, 0.45000000000000007),
            (9.0, 0.30000000000000004),
            (12.0, 0.0),
        ];
        assert_eq!(c.steps.len(), want.len());
        for (step, (wt, ws)) in c.steps.iter().zip(want) {
            assert_eq!(step.time, wt);
            assert!(
                (step.survival - ws).abs() < 1e-12,
                "S({wt}) = {}, want {ws}",
                step.survival
            );
        }
        // first time with S <= 0.5 is t=7 (S = 0.45)
        assert_eq!(c.median, Median::Finite(7.0));
    }

    #[test]
    fn ties_process_deaths_before_censorings() {
        // death and censoring both at t=2: censored sample still at risk
        let c = km_estimate(&[ev(2.0), cs(2.0), ev(5.0)]).unwrap();
        assert_eq!(c.steps[0].at_risk, 3);
        assert!((c.steps[0].survival - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(km_estimate(&[]), Err(SurvivalError::Empty)));
    }

    #[test]
    fn median_at_exact_half_plateau_takes_smallest_time() {
        // S drops to exactly 0.5 at t=1 and stays: median must be 1
        let c = km_estimate(&[ev(1.0), ev(1.0), cs(4.0), cs(5.0)]).unwrap();
        assert_eq!(c.survival_at(1.0), 0.5);
        assert_eq!(c.median, Median::Finite(1.0));
    }

    /// Brute-force empirical survival: fraction of durations strictly
    /// greater than t. Independent of the product-limit path.
    fn empirical_survival(durations: &[f64], t: f64) -> f64 {
        durations.iter().filter(|&&d| d > t).count() as f64 / durations.len() as f64
    }

    proptest! {
        // With zero censoring KM is exactly the empirical survival function.
        #[test]
        fn km_equals_empirical_without_censoring(
            durations in proptest::collection::vec(0u32..50, 1..40)
        ) {
            let ds: Vec<f64> = durations.iter().map(|&d| f64::from(d)).collect();
            let samples: Vec<SurvivalSample> =
                ds.iter().map(|&d| SurvivalSample::new(d, true)).collect();
            let curve = km_estimate(&samples).unwrap();
            for step in &curve.steps {
                let emp = empirical_survival(&ds, step.time);
                prop_assert!((step.survival - emp).abs() < 1e-12,
                    "S({}) = {} vs empirical {}", step.time, step.survival, emp);
            }
            // median agrees with the empirical rule
            let mut uniq: Vec<f64> = ds.clone();
            uniq.sort_by(|a, b| a.partial_cmp(b).unwrap());
            uniq.dedup();
            let emp_median = uniq
                .iter()
                .copied()
                .find(|&t| empirical_survival(&ds, t) <= 0.5);
            match (curve.median, emp_median) {
                (Median::Finite(a), Some(b)) => prop_assert_eq!(a, b),
                (Median::Infinite, None) => {}
                other => prop_assert!(false, "median mismatch: {:?}", other),
            }
        }

        // S is non-increasing and within [0,1]; scaling time scales steps.
        #[test]
        fn km_shape_invariants(
            raw in proptest::collection::vec((0u32..60, any::<bool>()), 1..30),
            scale in 1u32..1000,
        ) {
            let samples: Vec<SurvivalSample> = raw
                .iter()
                .map(|&(d, e)| SurvivalSample::new(f64::from(d), e))
                .collect();
            let c = km_estimate(&samples).unwrap();
            let mut last = 1.0;
            for s in &c.steps {
                prop_assert!(s.survival <= last + 1e-15);
                prop_assert!((0.0..=1.0).contains(&s.survival));
                last = s.survival;
            }
            // positive time scaling leaves the survival column unchanged
            let scaled: Vec<SurvivalSample> = samples
                .iter()
                .map(|s| SurvivalSample::new(s.duration * f64::from(scale), s.event))
                .collect();
            let c2 = km_estimate(&scaled).unwrap();
            prop_assert_eq!(c.steps.len(), c2.steps.len());
            for (a, b) in c.steps.iter().zip(&c2.steps) {
                prop_assert_eq!(a.survival, b.survival);
                prop_assert_eq!(a.at_risk, b.at_risk);
            }
        }
    }
}
