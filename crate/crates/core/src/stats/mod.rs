//! Nonparametric hypothesis tests and agreement/dispersion measures.
//!
//! Only the tests the analysis battery needs: Kruskal-Wallis with Dunn's
//! post-hoc, Cliff's delta, Mann-Whitney U, Cohen's kappa and normalized
//! entropy. Tail probabilities come from [`crate::numeric::special`].

mod rank;

pub use rank::average_ranks;

use crate::numeric::special::{chi2_sf, normal_sf};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("group {0} is empty")]
    EmptyGroup(usize),
    #[error("need at least {need} values, got {got}")]
    TooFewValues { need: usize, got: usize },
    #[error("need at least two groups")]
    TooFewGroups,
    #[error("label sequences must be nonempty and equal length")]
    LabelLengthMismatch,
    #[error("bucket counts sum to zero")]
    ZeroTotal,
    #[error("sample too large for exact mode (n = {0}, limit 10)")]
    ExactTooLarge(usize),
}

/// Multiple-comparison correction applied to a p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Correction {
    None,
    Bonferroni,
}

/// Interpretation bands for Cliff's delta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Magnitude {
    Negligible,
    Small,
    Medium,
    Large,
}

impl Magnitude {
    /// |delta| < 0.147 negligible, < 0.33 small, < 0.474 medium, else large.
    pub fn from_delta(delta: f64) -> Magnitude {
        let d = delta.abs();
        if d < 0.147 {
            Magnitude::Negligible
        } else if d < 0.33 {
            Magnitude::Small
        } else if d < 0.474 {
            Magnitude::Medium
        } else {
            Magnitude::Large
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Effect {
    pub value: f64,
    pub magnitude: Magnitude,
}

/// Outcome of one hypothesis test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub df: Option<f64>,
    pub effect: Option<Effect>,
    pub correction: Correction,
}

/// One pair from a post-hoc battery; indices refer to the input group order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairwiseResult {
    pub group_a: usize,
    pub group_b: usize,
    pub result: TestResult,
}

fn validate_groups(groups: &[&[f64]]) -> Result<usize, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups);
    }
    let mut n = 0;
    for (i, g) in groups.iter().enumerate() {
        if g.is_empty() {
            return Err(StatsError::EmptyGroup(i));
        }
        n += g.len();
    }
    Ok(n)
}

/// Sum of t^3 - t over tie groups of the pooled sample.
fn tie_sum(pooled: &[f64]) -> f64 {
    let mut sorted = pooled.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("NaN in sample"));
    let mut sum = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        sum += t * t * t - t;
        i = j;
    }
    sum
}

fn pooled_mean_ranks(groups: &[&[f64]]) -> (Vec<f64>, Vec<f64>) {
    let pooled: Vec<f64> = groups.iter().flat_map(|g| g.iter().copied()).collect();
    let ranks = average_ranks(&pooled);
    let mut mean_ranks = Vec::with_capacity(groups.len());
    let mut offset = 0;
    for g in groups {
        let s: f64 = ranks[offset..offset + g.len()].iter().sum();
        mean_ranks.push(s / g.len() as f64);
        offset += g.len();
    }
    (pooled, mean_ranks)
}

/// Kruskal-Wallis H test with tie correction; p from chi-square with k-1 df.
///
/// All values identical is a legal input: H = 0, p = 1.
pub fn kruskal_wallis(groups: &[&[f64]]) -> Result<TestResult, StatsError> {
    let n = validate_groups(groups)?;
    if n < 3 {
        return Err(StatsError::TooFewValues { need: 3, got: n });
    }
    let k = groups.len();
    let (pooled, mean_ranks) = pooled_mean_ranks(groups);
    let nf = n as f64;
    let mut h = 0.0;
    for (g, rbar) in groups.iter().zip(&mean_ranks) {
        let ni = g.len() as f64;
        h += ni * (rbar - (nf + 1.0) / 2.0).powi(2);
    }
    h *= 12.0 / (nf * (nf + 1.0));
    let correction = 1.0 - tie_sum(&pooled) / (nf * nf * nf - nf);
    let h = if correction <= 0.0 { 0.0 } else { h / correction };
    let df = (k - 1) as f64;
    let p = if h == 0.0 { 1.0 } else { chi2_sf(h, df) };
    Ok(TestResult {
        statistic: h,
        p_value: p,
        df: Some(df),
        effect: None,
        correction: Correction::None,
    })
}

/// Dunn's post-hoc z tests on mean ranks with pooled tie-corrected variance.
///
/// For groups i, j the statistic is
/// `z = (Rbar_i - Rbar_j) / sqrt((N(N+1)/12 - T/(12(N-1))) (1/n_i + 1/n_j))`
/// with `T = sum(t^3 - t)` over tie groups. Bonferroni multiplies each raw p
/// by the number of pairs, capped at 1.
pub fn dunn_posthoc(
    groups: &[&[f64]],
    correction: Correction,
) -> Result<Vec<PairwiseResult>, StatsError> {
    let n = validate_groups(groups)?;
    if n < 3 {
        return Err(StatsError::TooFewValues { need: 3, got: n });
    }
    let k = groups.len();
    let (pooled, mean_ranks) = pooled_mean_ranks(groups);
    let nf = n as f64;
    let base_var = nf * (nf + 1.0) / 12.0 - tie_sum(&pooled) / (12.0 * (nf - 1.0));
    let pairs = (k * (k - 1) / 2) as f64;
    let mut out = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            let var =
                base_var * (1.0 / groups[i].len() as f64 + 1.0 / groups[j].len() as f64);
            let z = if var <= 0.0 {
                0.0
            } else {
                (mean_ranks[i] - mean_ranks[j]) / var.sqrt()
            };
            let raw = if var <= 0.0 { 1.0 } else { 2.0 * normal_sf(z.abs()) };
            let p = match correction {
                Correction::None => raw,
                Correction::Bonferroni => (raw * pairs).min(1.0),
            };
            out.push(PairwiseResult {
                group_a: i,
                group_b: j,
                result: TestResult {
                    statistic: z,
                    p_value: p,
                    df: None,
                    effect: None,
                    correction,
                },
            });
        }
    }
    Ok(out)
}

/// Cliff's delta: `(#{a_i > b_j} - #{a_i < b_j}) / (|a| |b|)`.
pub fn cliffs_delta(a: &[f64], b: &[f64]) -> Result<Effect, StatsError> {
    if a.is_empty() {
        return Err(StatsError::EmptyGroup(0));
    }
    if b.is_empty() {
        return Err(StatsError::EmptyGroup(1));
    }
    let mut gt = 0i64;
    let mut lt = 0i64;
    for &x in a {
        for &y in b {
            if x > y {
                gt += 1;
            } else if x < y {
                lt += 1;
            }
        }
    }
    let delta = (gt - lt) as f64 / (a.len() as f64 * b.len() as f64);
    Ok(Effect {
        value: delta,
        magnitude: Magnitude::from_delta(delta),
    })
}

/// Options for [`mann_whitney_u_with`].
#[derive(Debug, Clone, Copy)]
pub struct MannWhitneyOptions {
    /// Apply the 0.5 continuity correction to the normal approximation.
    pub continuity_correction: bool,
}

impl Default for MannWhitneyOptions {
    fn default() -> Self {
        MannWhitneyOptions {
            continuity_correction: true,
        }
    }
}

/// Mann-Whitney U with tie-corrected normal approximation and continuity
/// correction. The statistic is U of the first sample, so the identity
/// `delta = 2U/(mn) - 1` against [`cliffs_delta`] holds exactly; that value
/// is also reported as the effect size.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<TestResult, StatsError> {
    mann_whitney_u_with(a, b, MannWhitneyOptions::default())
}

/// Mann-Whitney U with explicit options. Disabling the continuity correction
/// makes the two-sided p algebraically identical to Kruskal-Wallis with two
/// groups on tie-free data.
pub fn mann_whitney_u_with(
    a: &[f64],
    b: &[f64],
    opts: MannWhitneyOptions,
) -> Result<TestResult, StatsError> {
    if a.is_empty() {
        return Err(StatsError::EmptyGroup(0));
    }
    if b.is_empty() {
        return Err(StatsError::EmptyGroup(1));
    }
    let (m, n) = (a.len() as f64, b.len() as f64);
    let pooled: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    let ranks = average_ranks(&pooled);
    let r1: f64 = ranks[..a.len()].iter().sum();
    let u1 = r1 - m * (m + 1.0) / 2.0;
    let nf = m + n;
    let mean = m * n / 2.0;
    let var = m * n / 12.0 * ((nf + 1.0) - tie_sum(&pooled) / (nf * (nf - 1.0)));
    let p = if var <= 0.0 {
        1.0
    } else {
        let diff = (u1 - mean).abs();
        let diff = if opts.continuity_correction {
            (diff - 0.5).max(0.0)
        } else {
            diff
        };
        (2.0 * normal_sf(diff / var.sqrt())).min(1.0)
    };
    // evaluated as (2U - mn)/(mn) so the Cliff's delta identity is bit-exact
    let delta = (2.0 * u1 - m * n) / (m * n);
    Ok(TestResult {
        statistic: u1,
        p_value: p,
        df: None,
        effect: Some(Effect {
            value: delta,
            magnitude: Magnitude::from_delta(delta),
        }),
        correction: Correction::None,
    })
}

/// Exact two-sided Mann-Whitney p for tiny samples (total n <= 10), by full
/// enumeration of group assignments: the fraction of assignments whose U is
/// at least as far from mn/2 as the observed one. Cross-check mode only.
pub fn mann_whitney_u_exact(a: &[f64], b: &[f64]) -> Result<TestResult, StatsError> {
    if a.is_empty() {
        return Err(StatsError::EmptyGroup(0));
    }
    if b.is_empty() {
        return Err(StatsError::EmptyGroup(1));
    }
    let total = a.len() + b.len();
    if total > 10 {
        return Err(StatsError::ExactTooLarge(total));
    }
    let pooled: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
    let ranks = average_ranks(&pooled);
    let m = a.len();
    let mf = m as f64;
    let nf = b.len() as f64;
    let u_of = |idx: &[usize]| -> f64 {
        let r: f64 = idx.iter().map(|&i| ranks[i]).sum();
        r - mf * (mf + 1.0) / 2.0
    };
    let observed: Vec<usize> = (0..m).collect();
    let u_obs = u_of(&observed);
    let center = mf * nf / 2.0;
    let obs_dev = (u_obs - center).abs();

    let mut extreme = 0u64;
    let mut count = 0u64;
    let mut combo: Vec<usize> = (0..m).collect();
    loop {
        count += 1;
        if (u_of(&combo) - center).abs() >= obs_dev - 1e-12 {
            extreme += 1;
        }
        // next combination of m indices out of `total`
        let mut i = m;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if combo[i] != i + total - m {
                combo[i] += 1;
                for j in (i + 1)..m {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                let delta = (2.0 * u_obs - mf * nf) / (mf * nf);
                return Ok(TestResult {
                    statistic: u_obs,
                    p_value: extreme as f64 / count as f64,
                    df: None,
                    effect: Some(Effect {
                        value: delta,
                        magnitude: Magnitude::from_delta(delta),
                    }),
                    correction: Correction::None,
                });
            }
        }
    }
}

/// Exact permutation p for Kruskal-Wallis on tiny samples (total n <= 10):
/// the fraction of group assignments with H at least the observed H.
/// Cross-check mode only.
pub fn kruskal_wallis_exact(groups: &[&[f64]]) -> Result<TestResult, StatsError> {
    let n = validate_groups(groups)?;
    if n > 10 {
        return Err(StatsError::ExactTooLarge(n));
    }
    let observed = kruskal_wallis(groups)?;
    let pooled: Vec<f64> = groups.iter().flat_map(|g| g.iter().copied()).collect();
    let sizes: Vec<usize> = groups.iter().map(|g| g.len()).collect();

    fn assignments(
        pooled: &[f64],
        sizes: &[usize],
        taken: &mut Vec<bool>,
        current: &mut Vec<Vec<f64>>,
        h_obs: f64,
        counts: &mut (u64, u64),
    ) {
        if current.len() == sizes.len() {
            let views: Vec<&[f64]> = current.iter().map(|g| g.as_slice()).collect();
            let h = kruskal_wallis(&views).expect("valid groups").statistic;
            counts.0 += 1;
            if h >= h_obs - 1e-12 {
                counts.1 += 1;
            }
            return;
        }
        let gi = current.len();
        // choose sizes[gi] untaken indices, ascending, to avoid duplicates
        fn choose(
            pooled: &[f64],
            sizes: &[usize],
            taken: &mut Vec<bool>,
            current: &mut Vec<Vec<f64>>,
            h_obs: f64,
            counts: &mut (u64, u64),
            start: usize,
            need: usize,
            group: &mut Vec<f64>,
        ) {
            if need == 0 {
                current.push(group.clone());
                assignments(pooled, sizes, taken, current, h_obs, counts);
                current.pop();
                return;
            }
            for i in start..pooled.len() {
                if !taken[i] {
                    taken[i] = true;
                    group.push(pooled[i]);
                    choose(
                        pooled, sizes, taken, current, h_obs, counts, i + 1, need - 1, group,
                    );
                    group.pop();
                    taken[i] = false;
                }
            }
        }
        let mut group = Vec::with_capacity(sizes[gi]);
        // the final group is forced, but running the chooser keeps it simple
        choose(
            pooled, sizes, taken, current, h_obs, counts, 0, sizes[gi], &mut group,
        );
    }

    let mut taken = vec![false; pooled.len()];
    let mut current = Vec::new();
    let mut counts = (0u64, 0u64);
    assignments(
        &pooled,
        &sizes,
        &mut taken,
        &mut current,
        observed.statistic,
        &mut counts,
    );
    Ok(TestResult {
        statistic: observed.statistic,
        p_value: counts.1 as f64 / counts.0 as f64,
        df: observed.df,
        effect: None,
        correction: Correction::None,
    })
}

/// Result of Cohen's kappa including the degenerate-agreement flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaResult {
    pub kappa: f64,
    /// Both raters constant and equal; kappa defined as 1.0 by convention.
    pub degenerate: bool,
}

/// Cohen's kappa over two equal-length label sequences.
pub fn cohens_kappa<T: Ord>(labels_a: &[T], labels_b: &[T]) -> Result<KappaResult, StatsError> {
    if labels_a.is_empty() || labels_a.len() != labels_b.len() {
        return Err(StatsError::LabelLengthMismatch);
    }
    let n = labels_a.len() as f64;
    let mut count_a = std::collections::BTreeMap::new();
    let mut count_b = std::collections::BTreeMap::new();
    let mut agree = 0u64;
    for (x, y) in labels_a.iter().zip(labels_b) {
        *count_a.entry(x).or_insert(0u64) += 1;
        *count_b.entry(y).or_insert(0u64) += 1;
        if x == y {
            agree += 1;
        }
    }
    let po = agree as f64 / n;
    let mut pe = 0.0;
    for (label, ca) in &count_a {
        if let Some(cb) = count_b.get(label) {
            pe += (*ca as f64 / n) * (*cb as f64 / n);
        }
    }
    if pe >= 1.0 {
        return Ok(KappaResult {
            kappa: 1.0,
            degenerate: true,
        });
    }
    Ok(KappaResult {
        kappa: (po - pe) / (1.0 - pe),
        degenerate: false,
    })
}

/// Shannon entropy of the bucket distribution normalized by log2(k).
/// One bucket yields 0 by definition.
pub fn normalized_entropy(counts: &[u64]) -> Result<f64, StatsError> {
    let total: u64 = counts.iter().sum();
    if counts.is_empty() || total == 0 {
        return Err(StatsError::ZeroTotal);
    }
    if counts.len() == 1 {
        return Ok(0.0);
    }
    let n = total as f64;
    let mut h = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / n;
            h -= p * p.log2();
        }
    }
    Ok(h / (counts.len() as f64).log2())
}
