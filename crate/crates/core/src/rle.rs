//! Sublinear estimators for the run-length encoding cost.
//!
//! Every index `t` carries the cost contribution
//! `c(t) = (ceil(log2(l(t) + 1)) + ceil(log2 |alphabet|)) / l(t)` where `l(t)`
//! is the length of its run; the RLE cost is `n * E_t[c(t)]`.
//!
//! * [`rle_additive_estimate`]: average of sampled contributions, ignoring
//!   runs longer than a cap `l0`. `(1, eps)` contract.
//! * [`rle_bucketed_estimate`]: dyadic buckets of run lengths, each sized
//!   with its own sample budget. `(3, eps)` contract.
//! * [`rle_multiplicative_search`]: repeated bucketed estimates with halving
//!   `eps` until the implied bracket is tight. `(4, 0)` contract.
//! * [`rle_refined_search`]: same search over geometric buckets of ratio
//!   `1 + gamma / 2`. `(1 + gamma, 0)` contract.
//!
//! When the string is shorter than the run cap every estimator reads the
//! whole string and returns the exact cost.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::access::{EstimateReport, QueryCountedString, RunLength};
use crate::error::{invalid, Result};
use crate::oracle::{exact_rle_cost, run_cost};
use crate::scalar::{ceil_log2, Scalar};
use crate::seed;

/// Hidden constants of the sample sizes.
///
/// The defaults are sized for binary and other small alphabets. For large
/// alphabets the per-index contribution grows with `log2 |alphabet|` and the
/// additive constant should grow with its square.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct RleConfig<F: Scalar> {
    /// `q = ceil(c / eps^2)` samples for the additive estimator.
    pub additive_samples: F,
    /// `q = ceil(c * L log2 L / eps)` samples for the bucketed estimator,
    /// `L = max(log2(1/eps), 2)`, before confidence scaling.
    pub bucketed_samples: F,
    /// `q = ceil(c * h0 log2 h0 / (eps * eta^2))` for the refined buckets.
    pub refined_samples: F,
    /// Safety bound on search rounds; never reached on nonempty input.
    pub max_rounds: u32,
}

impl<F: Scalar> Default for RleConfig<F> {
    fn default() -> Self {
        RleConfig {
            additive_samples: F::lit(8.0),
            bucketed_samples: F::lit(64.0),
            refined_samples: F::lit(1.0),
            max_rounds: 62,
        }
    }
}

/// One sampled index of the additive estimator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct RunProbe<F: Scalar> {
    pub position: usize,
    pub run: RunLength,
    /// `c(t)` when the run length is known exactly, else 0.
    pub cost_contribution: F,
}

pub fn cost_contribution<F: Scalar>(run_length: usize, alphabet_size: usize) -> F {
    F::from_count(run_cost(run_length, alphabet_size) as usize) / F::from_count(run_length)
}

/// `max c(l)` over `l >= from`. `c` is not monotone: its numerator steps up
/// at every power of two, so the maximum is at `from` or at the next power
/// of two.
pub fn max_contribution_from<F: Scalar>(from: usize, alphabet_size: usize) -> F {
    let at: F = cost_contribution(from, alphabet_size);
    at.max(cost_contribution(from.next_power_of_two(), alphabet_size))
}

/// `max c(l)` over `lower <= l < upper`.
fn max_contribution_in<F: Scalar>(lower: usize, upper: usize, alphabet_size: usize) -> F {
    let at: F = cost_contribution(lower, alphabet_size);
    let p = lower.next_power_of_two();
    if p < upper {
        at.max(cost_contribution(p, alphabet_size))
    } else {
        at
    }
}

/// Run cap `l0 = ceil(8 log2(4 |alphabet| / eps) / eps)`.
pub fn run_cap<F: Scalar>(epsilon: F, alphabet_size: usize) -> usize {
    let l = (F::lit(4.0) * F::from_count(alphabet_size) / epsilon).log2();
    (F::lit(8.0) * l / epsilon).ceil_count().max(1)
}

pub fn additive_sample_count<F: Scalar>(epsilon: F, config: &RleConfig<F>) -> usize {
    (config.additive_samples / (epsilon * epsilon)).ceil_count().max(1)
}

/// Worst-case distinct reads of [`rle_additive_estimate`]: `q (2 l0 + 1)`.
pub fn additive_query_budget<F: Scalar>(epsilon: F, alphabet_size: usize, config: &RleConfig<F>) -> u64 {
    additive_sample_count(epsilon, config) as u64 * (2 * run_cap(epsilon, alphabet_size) as u64 + 1)
}

/// `K log2(4 |alphabet| / eps) / eps^3` with `K = 17 (c + 1)`, an upper
/// bound on [`additive_query_budget`] for `eps <= 1`.
pub fn additive_query_ceiling<F: Scalar>(epsilon: F, alphabet_size: usize, config: &RleConfig<F>) -> F {
    let l = (F::lit(4.0) * F::from_count(alphabet_size) / epsilon).log2();
    F::lit(17.0) * (config.additive_samples + F::one()) * l / epsilon.powi(3)
}

fn check_open_unit<F: Scalar>(name: &'static str, x: F) -> Result<()> {
    if x > F::zero() && x < F::one() {
        Ok(())
    } else {
        Err(invalid(name, format!("{x} not in (0, 1)")))
    }
}

fn uniform_index(rng: &mut seed::Rng, n: usize) -> usize {
    rng.gen_range(0..n as u64) as usize
}

/// Run length around 1-based `t`, capped, plus the new queries it cost.
pub fn probe_run_length(w: &mut QueryCountedString, t: usize, cap: usize) -> Result<(RunLength, u64)> {
    let before = w.queries();
    let run = w.probe_run(t, cap)?;
    Ok((run, w.queries() - before))
}

fn exact_report<F: Scalar>(w: &mut QueryCountedString, lambda: F, epsilon: F, before: u64, seed: u64) -> Result<EstimateReport<F>> {
    let all = w.read_all();
    let cost = exact_rle_cost(&all, w.alphabet_size())?.total_cost;
    Ok(EstimateReport::new(
        F::from_count(cost as usize),
        lambda,
        epsilon,
        w.queries() - before,
        seed,
    ))
}

/// `eps n`-additive estimate of the RLE cost.
pub fn rle_additive_estimate<F: Scalar>(
    w: &mut QueryCountedString,
    epsilon: F,
    seed: u64,
    config: &RleConfig<F>,
) -> Result<EstimateReport<F>> {
    rle_additive_probes(w, epsilon, seed, config).map(|(r, _)| r)
}

/// [`rle_additive_estimate`] plus the individual probes (empty when the
/// string was short enough to be read in full).
pub fn rle_additive_probes<F: Scalar>(
    w: &mut QueryCountedString,
    epsilon: F,
    seed: u64,
    config: &RleConfig<F>,
) -> Result<(EstimateReport<F>, Vec<RunProbe<F>>)> {
    check_open_unit("epsilon", epsilon)?;
    let before = w.queries();
    let n = w.len();
    let sigma = w.alphabet_size();
    let cap = run_cap(epsilon, sigma);
    // Ignored indices (run length >= cap) each contribute at most eps / 2.
    let ignored = max_contribution_from::<F>(cap, sigma);
    assert!(
        ignored <= epsilon / F::lit(2.0),
        "run cap {cap} too small for eps = {epsilon}"
    );
    if n < cap {
        return Ok((exact_report(w, F::one(), epsilon, before, seed)?, Vec::new()));
    }

    let q = additive_sample_count(epsilon, config);
    let mut rng = seed::rng(seed);
    let mut total = F::zero();
    let mut probes = Vec::with_capacity(q);
    for _ in 0..q {
        let t = uniform_index(&mut rng, n);
        let run = w.probe_run0(t, cap);
        let c = match run {
            RunLength::Exact(l) => cost_contribution(l, sigma),
            RunLength::AtLeast(_) => F::zero(),
        };
        total = total + c;
        probes.push(RunProbe {
            position: t + 1,
            run,
            cost_contribution: c,
        });
    }
    let estimate = F::from_count(n) * total / F::from_count(q);
    let report = EstimateReport::new(estimate, F::one(), epsilon, w.queries() - before, seed);
    Ok((report, probes))
}

/// Run-length buckets `[lower_h, upper_h)` for `h = 1..=h0`, each weighted
/// by the largest contribution inside it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BucketLayout<F: Scalar> {
    pub lower: Vec<usize>,
    pub upper: Vec<usize>,
    pub weight: Vec<F>,
}

impl<F: Scalar> BucketLayout<F> {
    /// Buckets `[2^(h-1), 2^h)`, `h0 = ceil(log2 l0)`; the weight of bucket
    /// `h` is `(h + s) / 2^(h-1)` with `s = ceil(log2 |alphabet|)`.
    pub fn dyadic(run_cap: usize, alphabet_size: usize) -> Self {
        let h0 = ceil_log2(run_cap as u64).max(1) as usize;
        let lower: Vec<usize> = (0..h0).map(|h| 1usize << h).collect();
        let upper: Vec<usize> = (1..=h0).map(|h| 1usize << h).collect();
        Self::with_bounds(lower, upper, alphabet_size)
    }

    /// Buckets `[ceil(r^(h-1)), ceil(r^h))` for `h = 1..=ceil(log_r l0)`.
    /// Buckets containing no integer are kept (they simply never get hits).
    pub fn geometric(ratio: F, run_cap: usize, alphabet_size: usize) -> Self {
        assert!(ratio > F::one(), "bucket ratio must exceed 1");
        let h0 = (F::from_count(run_cap).ln() / ratio.ln()).ceil_count().max(1);
        let bound = |h: usize| ratio.powi(h as i32).ceil_count().max(1);
        let lower: Vec<usize> = (0..h0).map(bound).collect();
        let upper: Vec<usize> = (1..=h0).map(|h| bound(h).max(bound(h - 1))).collect();
        Self::with_bounds(lower, upper, alphabet_size)
    }

    fn with_bounds(lower: Vec<usize>, upper: Vec<usize>, alphabet_size: usize) -> Self {
        let weight = lower
            .iter()
            .zip(&upper)
            .map(|(&l, &u)| max_contribution_in(l, u.max(l + 1), alphabet_size))
            .collect();
        BucketLayout { lower, upper, weight }
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    fn bucket_of(&self, run_length: usize) -> Option<usize> {
        let h = self.upper.partition_point(|&u| u <= run_length);
        (h < self.len() && self.lower[h] <= run_length).then_some(h)
    }

    /// Per-bucket sample counts `q_h = min(q, ceil(q * weight_h))`.
    pub fn sample_counts(&self, q: usize) -> Vec<usize> {
        self.weight
            .iter()
            .map(|&wt| (F::from_count(q) * wt).ceil_count().clamp(1, q.max(1)))
            .collect()
    }

    /// Worst-case distinct reads when sample `i` is probed with the cap of
    /// the last bucket that still uses it.
    pub fn query_budget(&self, counts: &[usize]) -> u64 {
        let q = counts.iter().copied().max().unwrap_or(0);
        (0..q)
            .map(|i| match (0..self.len()).rev().find(|&h| counts[h] > i) {
                Some(h) => 2 * self.upper[h] as u64 + 1,
                None => 0,
            })
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BucketRow<F: Scalar> {
    pub h: usize,
    pub lower: usize,
    pub upper: usize,
    pub weight: F,
    pub samples: usize,
    pub hits: usize,
    pub beta: F,
}

/// Per-bucket sample counts and hit fractions of one bucketed estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BucketTable<F: Scalar> {
    pub h0: usize,
    pub s: u32,
    pub rows: Vec<BucketRow<F>>,
}

impl<F: Scalar> BucketTable<F> {
    /// `sum_h beta_h * n * weight_h`.
    pub fn estimate(&self, n: usize) -> F {
        self.rows
            .iter()
            .fold(F::zero(), |acc, r| acc + r.beta * F::from_count(n) * r.weight)
    }
}

/// Classifies the 0-based `samples` into buckets. Bucket `h` looks at the
/// first `counts[h]` samples only. Each sample is probed once, with the cap
/// of the last bucket that uses it, which reads a superset of what the
/// smaller caps would.
pub(crate) fn bucket_pass<F: Scalar>(
    w: &mut QueryCountedString,
    samples: impl IntoIterator<Item = usize>,
    layout: &BucketLayout<F>,
    counts: &[usize],
) -> BucketTable<F> {
    let mut hits = vec![0usize; layout.len()];
    // Last bucket still using sample i; non-increasing in i.
    let mut last = layout.len();
    for (i, t) in samples.into_iter().enumerate() {
        while last > 0 && counts[last - 1] <= i {
            last -= 1;
        }
        if last == 0 {
            continue;
        }
        let last = last - 1;
        if let RunLength::Exact(l) = w.probe_run0(t, layout.upper[last]) {
            if let Some(h) = layout.bucket_of(l) {
                if counts[h] > i {
                    hits[h] += 1;
                }
            }
        }
    }
    let rows = (0..layout.len())
        .map(|h| BucketRow {
            h: h + 1,
            lower: layout.lower[h],
            upper: layout.upper[h],
            weight: layout.weight[h],
            samples: counts[h],
            hits: hits[h],
            beta: F::from_count(hits[h]) / F::from_count(counts[h]),
        })
        .collect();
    BucketTable {
        h0: layout.len(),
        s: ceil_log2(w.alphabet_size() as u64),
        rows,
    }
}

fn confidence_factor<F: Scalar>(delta: F) -> usize {
    (F::lit(3.0) / delta).log2().ceil_count().max(1)
}

/// `q = ceil(c L log2 L / eps) * ceil(log2(3 / delta))`, `L = max(log2(1/eps), 2)`.
pub fn bucketed_sample_count<F: Scalar>(epsilon: F, delta: F, config: &RleConfig<F>) -> usize {
    let l = epsilon.recip().log2().max(F::lit(2.0));
    let base = (config.bucketed_samples * l * l.log2() / epsilon).ceil_count().max(1);
    base * confidence_factor(delta)
}

/// `(3, eps)` estimate of the RLE cost, succeeding with probability `1 - delta`.
pub fn rle_bucketed_estimate<F: Scalar>(
    w: &mut QueryCountedString,
    epsilon: F,
    delta: F,
    seed: u64,
    config: &RleConfig<F>,
) -> Result<EstimateReport<F>> {
    rle_bucketed_detailed(w, epsilon, delta, seed, config).map(|(r, _)| r)
}

/// [`rle_bucketed_estimate`] plus its bucket table (`None` when the string
/// was read in full).
pub fn rle_bucketed_detailed<F: Scalar>(
    w: &mut QueryCountedString,
    epsilon: F,
    delta: F,
    seed: u64,
    config: &RleConfig<F>,
) -> Result<(EstimateReport<F>, Option<BucketTable<F>>)> {
    check_open_unit("epsilon", epsilon)?;
    check_open_unit("delta", delta)?;
    let cap = run_cap(epsilon, w.alphabet_size());
    let layout = BucketLayout::dyadic(cap, w.alphabet_size());
    let q = bucketed_sample_count(epsilon, delta, config);
    bucketed_with_layout(w, &layout, q, F::lit(3.0), epsilon, seed)
        .map(|(r, t)| (r.with_confidence(F::one() - delta), t))
}

fn bucketed_with_layout<F: Scalar>(
    w: &mut QueryCountedString,
    layout: &BucketLayout<F>,
    q: usize,
    lambda: F,
    epsilon: F,
    seed: u64,
) -> Result<(EstimateReport<F>, Option<BucketTable<F>>)> {
    let before = w.queries();
    let n = w.len();
    if n < run_cap(epsilon, w.alphabet_size()) {
        return Ok((exact_report(w, lambda, epsilon, before, seed)?, None));
    }
    let counts = layout.sample_counts(q);
    let mut rng = seed::rng(seed);
    let samples = (0..q).map(|_| uniform_index(&mut rng, n));
    let table = bucket_pass(w, samples, layout, &counts);
    let estimate = table.estimate(n);
    let report = EstimateReport::new(estimate, lambda, epsilon, w.queries() - before, seed);
    Ok((report, Some(table)))
}

/// Worst-case distinct reads of [`rle_bucketed_estimate`] on a string of length `n`.
pub fn bucketed_query_budget<F: Scalar>(
    n: usize,
    epsilon: F,
    delta: F,
    alphabet_size: usize,
    config: &RleConfig<F>,
) -> u64 {
    let cap = run_cap(epsilon, alphabet_size);
    if n < cap {
        return n as u64;
    }
    let layout = BucketLayout::<F>::dyadic(cap, alphabet_size);
    let counts = layout.sample_counts(bucketed_sample_count(epsilon, delta, config));
    layout.query_budget(&counts).min(n as u64)
}

/// Configured ceiling on the reads of the multiplicative searches on a
/// string of length `n` and RLE cost `cost`: `64 (n / cost) log2(n)^2`,
/// at most `n`.
pub fn search_query_ceiling(n: usize, cost: f64) -> f64 {
    let n = n as f64;
    (64.0 * (n / cost.max(1.0)) * n.log2().max(1.0).powi(2)).min(n)
}

/// One round of the multiplicative search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SearchRound<F: Scalar> {
    pub round: u32,
    pub epsilon: F,
    pub delta: F,
    pub estimate: F,
    pub lower: F,
    pub upper: F,
    pub queries_so_far: u64,
}

/// Stop once the bracket `[lower, upper]` is positive and within `max_ratio`.
/// A nonpositive lower end never stops the search.
pub fn search_should_stop<F: Scalar>(lower: F, upper: F, max_ratio: F) -> bool {
    lower > F::zero() && upper / lower <= max_ratio
}

/// Shape of the bucketed estimator driven by the search.
#[derive(Clone, Copy, Debug)]
enum SearchBuckets<F: Scalar> {
    Dyadic,
    Geometric { gamma: F },
}

impl<F: Scalar> SearchBuckets<F> {
    /// Multiplicative factor of one bucketed estimate.
    fn lambda(&self) -> F {
        match *self {
            SearchBuckets::Dyadic => F::lit(3.0),
            SearchBuckets::Geometric { gamma } => {
                (F::one() + refined_accuracy(gamma)) * (F::one() + gamma / F::lit(2.0))
            }
        }
    }

    /// Largest accepted `upper / lower` at termination.
    fn stop_ratio(&self) -> F {
        match *self {
            SearchBuckets::Dyadic => F::lit(16.0),
            SearchBuckets::Geometric { gamma } => (F::one() + gamma).powi(2),
        }
    }

    fn claimed_lambda(&self) -> F {
        match *self {
            SearchBuckets::Dyadic => F::lit(4.0),
            SearchBuckets::Geometric { gamma } => F::one() + gamma,
        }
    }
}

/// Relative accuracy `eta = gamma / 8` asked of each refined bucket.
fn refined_accuracy<F: Scalar>(gamma: F) -> F {
    gamma / F::lit(8.0)
}

/// Internal cap on `gamma`: a `(1 + 3)`-estimate already satisfies any
/// larger `gamma`, and beyond 6 the bucket and sampling errors together
/// would exceed `1 + gamma`.
const GAMMA_CAP: f64 = 3.0;

/// Refined bucket layout and sample count for one `(eps, delta)` round.
pub fn refined_plan<F: Scalar>(
    epsilon: F,
    delta: F,
    gamma: F,
    alphabet_size: usize,
    config: &RleConfig<F>,
) -> (BucketLayout<F>, usize) {
    let gamma = gamma.min(F::lit(GAMMA_CAP));
    let cap = run_cap(epsilon, alphabet_size);
    let layout = BucketLayout::geometric(F::one() + gamma / F::lit(2.0), cap, alphabet_size);
    let h0 = F::from_count(layout.len());
    let eta = refined_accuracy(gamma);
    let base = (config.refined_samples * h0 * h0.log2().max(F::one()) / (epsilon * eta * eta))
        .ceil_count()
        .max(1);
    (layout, base * confidence_factor(delta))
}

/// `(lambda', eps)` estimate over geometric buckets of ratio `1 + gamma/2`,
/// `lambda' = (1 + gamma/8)(1 + gamma/2)`.
pub fn rle_refined_bucketed_estimate<F: Scalar>(
    w: &mut QueryCountedString,
    epsilon: F,
    delta: F,
    gamma: F,
    seed: u64,
    config: &RleConfig<F>,
) -> Result<EstimateReport<F>> {
    check_open_unit("epsilon", epsilon)?;
    check_open_unit("delta", delta)?;
    if !(gamma > F::zero()) {
        return Err(invalid("gamma", "must be positive"));
    }
    let (layout, q) = refined_plan(epsilon, delta, gamma, w.alphabet_size(), config);
    let lambda = SearchBuckets::Geometric {
        gamma: gamma.min(F::lit(GAMMA_CAP)),
    }
    .lambda();
    bucketed_with_layout(w, &layout, q, lambda, epsilon, seed)
        .map(|(r, _)| r.with_confidence(F::one() - delta))
}

/// 4-multiplicative estimate of the RLE cost with no prior knowledge of it.
pub fn rle_multiplicative_search<F: Scalar>(
    w: &mut QueryCountedString,
    seed: u64,
    config: &RleConfig<F>,
) -> Result<EstimateReport<F>> {
    search(w, SearchBuckets::Dyadic, seed, config).map(|(r, _)| r)
}

pub fn rle_multiplicative_search_trace<F: Scalar>(
    w: &mut QueryCountedString,
    seed: u64,
    config: &RleConfig<F>,
) -> Result<(EstimateReport<F>, Vec<SearchRound<F>>)> {
    search(w, SearchBuckets::Dyadic, seed, config)
}

/// `(1 + gamma)`-multiplicative estimate of the RLE cost.
pub fn rle_refined_search<F: Scalar>(
    w: &mut QueryCountedString,
    gamma: F,
    seed: u64,
    config: &RleConfig<F>,
) -> Result<EstimateReport<F>> {
    rle_refined_search_trace(w, gamma, seed, config).map(|(r, _)| r)
}

pub fn rle_refined_search_trace<F: Scalar>(
    w: &mut QueryCountedString,
    gamma: F,
    seed: u64,
    config: &RleConfig<F>,
) -> Result<(EstimateReport<F>, Vec<SearchRound<F>>)> {
    if !(gamma > F::zero()) {
        return Err(invalid("gamma", "must be positive"));
    }
    let (mut report, rounds) = search(
        w,
        SearchBuckets::Geometric {
            gamma: gamma.min(F::lit(GAMMA_CAP)),
        },
        seed,
        config,
    )?;
    report.lambda = F::one() + gamma;
    Ok((report, rounds))
}

fn search<F: Scalar>(
    w: &mut QueryCountedString,
    buckets: SearchBuckets<F>,
    seed: u64,
    config: &RleConfig<F>,
) -> Result<(EstimateReport<F>, Vec<SearchRound<F>>)> {
    let before = w.queries();
    let n = F::from_count(w.len());
    let sigma = w.alphabet_size();
    let lambda = buckets.lambda();
    let mut rounds = Vec::new();
    for j in 1..=config.max_rounds {
        let epsilon = F::lit(2.0).powi(-(j as i32));
        let delta = epsilon / F::lit(3.0);
        let round_seed = seed::derive(seed, u64::from(j));
        let (layout, q) = match buckets {
            SearchBuckets::Dyadic => (
                BucketLayout::dyadic(run_cap(epsilon, sigma), sigma),
                bucketed_sample_count(epsilon, delta, config),
            ),
            SearchBuckets::Geometric { gamma } => refined_plan(epsilon, delta, gamma, sigma, config),
        };
        let (r, _) = bucketed_with_layout(w, &layout, q, lambda, epsilon, round_seed)?;
        let upper = lambda * (r.estimate + epsilon * n);
        let lower = (r.estimate - epsilon * n) / lambda;
        rounds.push(SearchRound {
            round: j,
            epsilon,
            delta,
            estimate: r.estimate,
            lower,
            upper,
            queries_so_far: w.queries() - before,
        });
        if search_should_stop(lower, upper, buckets.stop_ratio()) {
            let estimate = (lower * upper).sqrt();
            let report = EstimateReport::new(
                estimate,
                buckets.claimed_lambda(),
                F::zero(),
                w.queries() - before,
                seed,
            );
            return Ok((report, rounds));
        }
    }
    Err(invalid(
        "max_rounds",
        format!("search did not settle within {} rounds", config.max_rounds),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::Symbol;

    fn alternating(n: usize) -> Vec<Symbol> {
        (0..n).map(|i| (i % 2) as Symbol).collect()
    }

    fn qcs(w: Vec<Symbol>) -> QueryCountedString {
        QueryCountedString::from_symbols(w, 2).unwrap()
    }

    #[test]
    fn contribution_jumps_at_powers_of_two() {
        assert_eq!(cost_contribution::<f64>(7, 2), 4.0 / 7.0);
        assert_eq!(cost_contribution::<f64>(8, 2), 5.0 / 8.0);
        assert_eq!(max_contribution_from::<f64>(7, 2), 5.0 / 8.0);
        assert_eq!(max_contribution_from::<f64>(9, 2), 5.0 / 9.0);
    }

    #[test]
    fn run_cap_value() {
        // 8 * log2(160) / 0.05 = 1171.6...
        assert_eq!(run_cap(0.05f64, 2), 1172);
        assert_eq!(run_cap(0.5f64, 2), 64);
    }

    #[test]
    fn ignored_contribution_below_half_eps() {
        for sigma in [2usize, 3, 16, 256, 65536] {
            for k in 1..200 {
                let eps = k as f64 / 200.0;
                let cap = run_cap(eps, sigma);
                let worst = (cap..cap + 5000).map(|l| cost_contribution::<f64>(l, sigma)).fold(0.0, f64::max);
                assert!(worst <= eps / 2.0, "sigma {sigma} eps {eps}");
                assert_eq!(worst, max_contribution_from(cap, sigma));
            }
        }
    }

    #[test]
    fn additive_all_ones() {
        let mut w = qcs(vec![1; 100_000]);
        let r = rle_additive_estimate(&mut w, 0.1f64, 3, &RleConfig::default()).unwrap();
        assert_eq!(r.estimate, 0.0);
        let exact = exact_rle_cost(&vec![1; 100_000], 2).unwrap().total_cost;
        assert_eq!(exact, 18);
        assert!(r.meets_contract(exact as f64, 100_000));
    }

    #[test]
    fn additive_alternating_is_exact() {
        let n = 100_000;
        let mut w = qcs(alternating(n));
        let r = rle_additive_estimate(&mut w, 0.1f64, 11, &RleConfig::default()).unwrap();
        assert_eq!(r.estimate, 2.0 * n as f64);
        assert_eq!(exact_rle_cost(&alternating(n), 2).unwrap().total_cost, 2 * n as u64);
    }

    #[test]
    fn additive_rejects_bad_epsilon() {
        let mut w = qcs(alternating(10));
        assert!(rle_additive_estimate(&mut w, 0.0f64, 0, &RleConfig::default()).is_err());
        assert!(rle_additive_estimate(&mut w, 1.0f64, 0, &RleConfig::default()).is_err());
    }

    #[test]
    fn additive_short_string_is_exact() {
        let w: Vec<Symbol> = vec![0, 0, 1, 1, 1, 0];
        let exact = exact_rle_cost(&w, 2).unwrap().total_cost as f64;
        let mut a = qcs(w);
        let r = rle_additive_estimate(&mut a, 0.2f64, 1, &RleConfig::default()).unwrap();
        assert_eq!(r.estimate, exact);
        assert_eq!(r.queries_used, 6);
    }

    #[test]
    fn additive_respects_budget() {
        let mut w = qcs((0..50_000).map(|i| ((i / 7) % 2) as Symbol).collect());
        let cfg = RleConfig::default();
        let r = rle_additive_estimate(&mut w, 0.2f64, 5, &cfg).unwrap();
        assert!(r.queries_used <= additive_query_budget(0.2f64, 2, &cfg));
        assert!((r.queries_used as f64) <= additive_query_ceiling(0.2f64, 2, &cfg));
    }

    #[test]
    fn dyadic_layout_weights() {
        let layout = BucketLayout::<f64>::dyadic(1172, 2);
        assert_eq!(layout.len(), 11);
        for h in 1..=11usize {
            let expected = (h as f64 + 1.0) / 2f64.powi(h as i32 - 1);
            assert_eq!(layout.weight[h - 1], expected);
            assert_eq!(layout.lower[h - 1], 1 << (h - 1));
            assert_eq!(layout.upper[h - 1], 1 << h);
        }
        assert_eq!(layout.bucket_of(1), Some(0));
        assert_eq!(layout.bucket_of(3), Some(1));
        assert_eq!(layout.bucket_of(4), Some(2));
        assert_eq!(layout.bucket_of(2048), None);
    }

    #[test]
    fn sample_counts_bounded_by_q() {
        let layout = BucketLayout::<f64>::dyadic(1172, 2);
        let counts = layout.sample_counts(1000);
        assert_eq!(counts[0], 1000);
        assert!(counts.iter().all(|c| (1..=1000).contains(c)));
        assert!(counts.windows(2).all(|c| c[1] <= c[0]));
        // ceil(1000 * (3 + 1) / 4) = 1000, then ceil(1000 * 5 / 8) = 625
        assert_eq!(counts[3], 625);
    }

    #[test]
    fn geometric_layout_partitions_lengths() {
        let layout = BucketLayout::<f64>::geometric(1.25, 384, 2);
        assert_eq!(layout.len(), 27);
        for l in 1..layout.upper[layout.len() - 1] {
            let h = layout.bucket_of(l).unwrap();
            assert!(layout.lower[h] <= l && l < layout.upper[h]);
        }
        for h in 0..layout.len() {
            for l in layout.lower[h]..layout.upper[h] {
                assert!(cost_contribution::<f64>(l, 2) <= layout.weight[h]);
            }
        }
    }

    #[test]
    fn full_sampling_within_factor_two() {
        // Every bucket sees every index: beta_h = |B_h| / n exactly.
        let runs = [1usize, 2, 3, 5, 1, 8, 13, 4, 1, 1, 30, 2, 7];
        let mut w: Vec<Symbol> = Vec::new();
        for (i, &l) in runs.iter().cycle().take(200).enumerate() {
            w.extend(std::iter::repeat_n((i % 2) as Symbol, l));
        }
        let n = w.len();
        let exact = exact_rle_cost(&w, 2).unwrap().total_cost as f64;
        let mut a = qcs(w);
        let layout = BucketLayout::<f64>::dyadic(64, 2);
        let table = bucket_pass(&mut a, 0..n, &layout, &vec![n; layout.len()]);
        let est = table.estimate(n);
        assert!(exact <= est + 1e-9 && est <= 2.0 * exact + 1e-9, "{exact} {est}");
    }

    #[test]
    fn bucketed_alternating() {
        let n = 100_000;
        let mut w = qcs(alternating(n));
        let (r, table) = rle_bucketed_detailed(&mut w, 0.05f64, 1.0 / 3.0, 2, &RleConfig::default()).unwrap();
        let table = table.unwrap();
        assert_eq!(table.rows[0].beta, 1.0);
        assert_eq!(r.estimate, 2.0 * n as f64);
        assert!(table.rows.iter().all(|row| row.beta >= 0.0 && row.beta <= 1.0));
    }

    #[test]
    fn bucketed_all_ones() {
        let n = 100_000;
        let mut w = qcs(vec![1; n]);
        let r = rle_bucketed_estimate(&mut w, 0.05f64, 1.0 / 3.0, 2, &RleConfig::default()).unwrap();
        assert_eq!(r.estimate, 0.0);
        assert!(r.meets_contract(18.0, n));
        assert!(rle_bucketed_estimate(&mut w, 0.05f64, 1.5, 2, &RleConfig::default()).is_err());
    }

    #[test]
    fn stop_rule() {
        assert!(!search_should_stop(0.0f64, 1.0, 16.0));
        assert!(!search_should_stop(-5.0f64, 1.0, 16.0));
        assert!(!search_should_stop(1.0f64, 17.0, 16.0));
        assert!(search_should_stop(1.0f64, 16.0, 16.0));
    }

    #[test]
    fn search_alternating_stops_early() {
        let n = 1 << 16;
        let mut w = qcs(alternating(n));
        let (r, rounds) = rle_multiplicative_search_trace(&mut w, 4, &RleConfig::<f64>::default()).unwrap();
        assert_eq!(rounds.len(), 1);
        let exact = 2.0 * n as f64;
        assert!(r.estimate >= exact / 4.0 && r.estimate <= 4.0 * exact);
        assert_eq!(r.lambda, 4.0);
        assert_eq!(r.epsilon, 0.0);
    }

    #[test]
    fn search_all_ones() {
        let n = 1 << 16;
        let mut w = qcs(vec![1; n]);
        let (r, rounds) = rle_multiplicative_search_trace(&mut w, 4, &RleConfig::<f64>::default()).unwrap();
        let exact = 18.0;
        assert!(r.estimate >= exact / 4.0 && r.estimate <= 4.0 * exact, "{}", r.estimate);
        // every round before the last had a nonpositive lower end or a loose ratio
        for round in &rounds[..rounds.len() - 1] {
            assert!(!search_should_stop(round.lower, round.upper, 16.0));
        }
        assert!(r.queries_used <= n as u64);
    }

    #[test]
    fn refined_rejects_bad_gamma() {
        let mut w = qcs(alternating(100));
        assert!(rle_refined_search(&mut w, 0.0f64, 1, &RleConfig::default()).is_err());
        assert!(rle_refined_search(&mut w, -1.0f64, 1, &RleConfig::default()).is_err());
    }

    #[test]
    fn refined_alternating() {
        let n = 1 << 16;
        let mut w = qcs(alternating(n));
        let r = rle_refined_search(&mut w, 0.5f64, 9, &RleConfig::default()).unwrap();
        let exact = 2.0 * n as f64;
        assert!(r.estimate >= exact / 1.5 && r.estimate <= exact * 1.5);
        assert_eq!(r.lambda, 1.5);
    }

    #[test]
    fn f32_scalar_works() {
        let n = 1 << 14;
        let mut w = qcs(alternating(n));
        let r = rle_additive_estimate(&mut w, 0.1f32, 1, &RleConfig::default()).unwrap();
        assert_eq!(r.estimate, 2.0 * n as f32);
        let r = rle_multiplicative_search(&mut w.fresh_view(), 1, &RleConfig::<f32>::default()).unwrap();
        assert!(r.estimate >= n as f32 / 2.0 && r.estimate <= 8.0 * n as f32);
    }
}
