//! `(A, eps)` estimation of the LZ77 cost from distinct substring counts.
//!
//! With `m = max_{l <= l0} d_l / l`, the LZ77 cost satisfies
//! `m <= C_LZ <= 4 (m log2 l0 + n / l0)`. The estimator takes
//! `l0 = ceil(2 / (A eps))`, gets a `B`-estimate of every `d_l` by treating
//! each length-`l` window as a color, and outputs `m_hat * A / B + eps n`.
//!
//! Window starts are sampled once per amplification run, against length
//! `l0`, and every shorter length reuses prefixes of the same windows: one
//! trie per run stores them and its per-depth counters give all the `d_l`
//! samples together.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::access::{EstimateReport, QueryCountedString, Symbol};
use crate::colors::{amplification_runs, colors_sample_size, lower_median};
use crate::error::{invalid, Error, Result};
use crate::oracle::distinct_substring_profile;
use crate::scalar::Scalar;
use crate::seed;
use crate::trie::SubstringTrie;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LzEstimateParams<F: Scalar> {
    pub a: F,
    pub epsilon: F,
    /// `ceil(2 / (A eps))`, clamped to `n`.
    pub ell0: usize,
    /// `A / (2 sqrt(log2(2 / (A eps))))`, reported as 1 in exact mode.
    pub b: F,
    /// Set when the formula gives `B <= 1`: every `d_l` is then counted
    /// exactly over all windows.
    pub exact_mode: bool,
}

impl<F: Scalar> LzEstimateParams<F> {
    pub fn new(a: F, epsilon: F, n: usize) -> Result<Self> {
        if !(a > F::one()) {
            return Err(invalid("A", format!("{a} must exceed 1")));
        }
        if !(epsilon > F::zero() && epsilon < F::one()) {
            return Err(invalid("epsilon", format!("{epsilon} not in (0, 1)")));
        }
        let ae = a * epsilon;
        if !(ae < F::lit(2.0)) {
            return Err(invalid("A", format!("A * eps = {ae} must be below 2")));
        }
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let ratio = F::lit(2.0) / ae;
        let ell0 = ratio.ceil_count().clamp(1, n);
        let b = a / (F::lit(2.0) * ratio.log2().sqrt());
        let exact_mode = !(b > F::one());
        Ok(LzEstimateParams {
            a,
            epsilon,
            ell0,
            b: if exact_mode { F::one() } else { b },
            exact_mode,
        })
    }

    /// Per-length failure probability `1 / (3 l0)`.
    pub fn delta_per_length(&self) -> F {
        F::one() / F::from_count(3 * self.ell0)
    }

    /// Amplification runs per length.
    pub fn runs(&self) -> usize {
        amplification_runs(self.delta_per_length())
    }

    /// Worst-case distinct reads: `runs * s_1 * l0`, at most `n`.
    pub fn query_ceiling(&self, n: usize) -> u64 {
        if self.exact_mode {
            return n as u64;
        }
        let per_run = colors_sample_size(n, self.b) as u64 * self.ell0 as u64;
        (self.runs() as u64 * per_run).min(n as u64)
    }
}

/// Window starts of one amplification run, shared by all lengths up to `max_len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowSample {
    /// 0-based starts, uniform on `[0, n - max_len]`.
    pub starts: Vec<usize>,
    /// `sizes[l - 1]` = number of leading starts used for length `l`.
    pub sizes: Vec<usize>,
}

impl WindowSample {
    /// Samples against `max_len`; length `l` uses the first
    /// `ceil(10 (n - l + 1) / B^2)` starts, which is non-increasing in `l`.
    pub fn draw<F: Scalar>(n: usize, max_len: usize, b: F, seed: u64) -> Self {
        assert!(max_len >= 1 && max_len <= n);
        let sizes: Vec<usize> = (1..=max_len).map(|l| colors_sample_size(n - l + 1, b)).collect();
        let mut rng = seed::rng(seed);
        let span = (n - max_len + 1) as u64;
        let starts = (0..sizes[0]).map(|_| rng.gen_range(0..span) as usize).collect();
        WindowSample { starts, sizes }
    }

    /// Starts used for length `ell`.
    pub fn starts_for(&self, ell: usize) -> &[usize] {
        &self.starts[..self.sizes[ell - 1]]
    }

    /// Longest length that uses sample `i`.
    fn reach(&self, i: usize) -> usize {
        self.sizes.partition_point(|&s| s > i)
    }
}

/// Distinct windows seen per length in one run: `counts[l - 1]`.
fn sample_counts(w: &mut QueryCountedString, sample: &WindowSample) -> Vec<usize> {
    let mut trie = SubstringTrie::new();
    let mut buf: Vec<Symbol> = Vec::new();
    for (i, &t) in sample.starts.iter().enumerate() {
        let len = sample.reach(i);
        w.window0(t, len, &mut buf);
        trie.insert(&buf);
    }
    (1..=sample.sizes.len()).map(|l| trie.count_at(l)).collect()
}

/// `B`-estimates `d_hat[l - 1]` of `d_l` for all `l <= max_len` at once,
/// each the lower median of `runs` amplification runs.
fn distinct_estimates<F: Scalar>(
    w: &mut QueryCountedString,
    max_len: usize,
    b: F,
    runs: usize,
    seed: u64,
) -> Vec<F> {
    let n = w.len();
    let mut per_len: Vec<Vec<F>> = vec![Vec::with_capacity(runs); max_len];
    for run in 0..runs {
        let sample = WindowSample::draw(n, max_len, b, seed::derive(seed, run as u64));
        for (l, c) in sample_counts(w, &sample).into_iter().enumerate() {
            per_len[l].push(F::from_count(c) * b);
        }
    }
    per_len
        .iter()
        .map(|v| lower_median(v).expect("at least one run"))
        .collect()
}

fn exact_profile<F: Scalar>(w: &mut QueryCountedString, max_len: usize) -> Result<Vec<F>> {
    let all = w.read_all();
    let d = distinct_substring_profile(&all, max_len)?;
    Ok(d[1..].iter().map(|&c| F::from_count(c)).collect())
}

/// `B`-estimate of `d_ell`, correct with probability `1 - delta`. For `B <= 1`
/// the count is exact.
pub fn estimate_distinct<F: Scalar>(
    w: &mut QueryCountedString,
    ell: usize,
    b: F,
    delta: F,
    seed: u64,
) -> Result<F> {
    if ell == 0 || ell > w.len() {
        return Err(invalid("ell", format!("must lie in [1, {}]", w.len())));
    }
    if !(delta > F::zero() && delta < F::one()) {
        return Err(invalid("delta", format!("{delta} not in (0, 1)")));
    }
    if !(b > F::one()) {
        return Ok(exact_profile(w, ell)?[ell - 1]);
    }
    let runs = amplification_runs(delta);
    Ok(distinct_estimates(w, ell, b, runs, seed)[ell - 1])
}

/// Intermediate values of one LZ estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LzEstimateDetail<F: Scalar> {
    pub params: LzEstimateParams<F>,
    /// `d_hat[l - 1]` for `l = 1..=l0`.
    pub distinct: Vec<F>,
    pub m_hat: F,
}

/// `(A, eps)` estimate of the LZ77 cost.
pub fn lz_estimate<F: Scalar>(w: &mut QueryCountedString, a: F, epsilon: F, seed: u64) -> Result<EstimateReport<F>> {
    lz_estimate_detailed(w, a, epsilon, seed).map(|(r, _)| r)
}

pub fn lz_estimate_detailed<F: Scalar>(
    w: &mut QueryCountedString,
    a: F,
    epsilon: F,
    seed: u64,
) -> Result<(EstimateReport<F>, LzEstimateDetail<F>)> {
    let params = LzEstimateParams::new(a, epsilon, w.len())?;
    let before = w.queries();
    let distinct = if params.exact_mode {
        exact_profile(w, params.ell0)?
    } else {
        distinct_estimates(w, params.ell0, params.b, params.runs(), seed)
    };
    let m_hat = distinct
        .iter()
        .enumerate()
        .map(|(i, &d)| d / F::from_count(i + 1))
        .fold(F::zero(), F::max);
    let estimate = m_hat * params.a / params.b + params.epsilon * F::from_count(w.len());
    let report = EstimateReport::new(estimate, a, epsilon, w.queries() - before, seed);
    Ok((report, LzEstimateDetail { params, distinct, m_hat }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Low,
    High,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Distinction<F: Scalar> {
    pub verdict: Verdict,
    /// Estimates below this are LOW.
    pub threshold: F,
    pub report: EstimateReport<F>,
}

/// Parameters for separating `C_LZ <= lo` from `C_LZ >= hi`:
/// `A = sqrt(hi / lo) / 2`, `eps = lo A / n`.
pub fn distinguish_params<F: Scalar>(lo: F, hi: F, n: usize) -> Result<(F, F)> {
    if !(lo >= F::one() && lo < hi && hi <= F::from_count(n)) {
        return Err(invalid("thresholds", format!("need 1 <= lo < hi <= n, got {lo}, {hi}")));
    }
    let a = (hi / lo).sqrt() / F::lit(2.0);
    if !(a > F::one()) {
        return Err(Error::GapTooSmall {
            factor: a.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok((a, lo * a / F::from_count(n)))
}

/// LOW when the estimate falls below the geometric mean of the largest
/// estimate a string with `C <= lo` can produce (`2 A lo`) and the smallest
/// one a string with `C >= hi` can produce (`3 A lo`).
pub fn distinguish_compressible<F: Scalar>(
    w: &mut QueryCountedString,
    lo: F,
    hi: F,
    seed: u64,
) -> Result<Distinction<F>> {
    let (a, epsilon) = distinguish_params(lo, hi, w.len())?;
    let report = lz_estimate(w, a, epsilon, seed)?;
    let threshold = a * lo * F::lit(6.0).sqrt();
    let verdict = if report.estimate < threshold {
        Verdict::Low
    } else {
        Verdict::High
    };
    Ok(Distinction {
        verdict,
        threshold,
        report,
    })
}
