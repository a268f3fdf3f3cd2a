//! Estimating the number of distinct symbols ("colors") of a string.
//!
//! A uniform sample of `s = ceil(10 n / lambda^2)` positions, drawn with
//! replacement, sees `C_hat <= C` colors; `lambda * C_hat` is a
//! `lambda`-multiplicative estimate with probability at least 2/3.

use std::collections::HashSet;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::access::{EstimateReport, QueryCountedString};
use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;
use crate::seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ColorSample<F: Scalar> {
    pub sample_size: usize,
    pub distinct_seen: usize,
    pub lambda: F,
}

impl<F: Scalar> ColorSample<F> {
    pub fn estimate(&self) -> F {
        F::from_count(self.distinct_seen) * self.lambda
    }
}

/// `ceil(10 n / lambda^2)`.
pub fn colors_sample_size<F: Scalar>(n: usize, lambda: F) -> usize {
    (F::lit(10.0) * F::from_count(n) / (lambda * lambda)).ceil_count().max(1)
}

/// Number of independent runs whose median is correct with probability
/// `1 - delta`: `max(1, ceil(18 ln(1 / delta)))`.
pub fn amplification_runs<F: Scalar>(delta: F) -> usize {
    (F::lit(18.0) * delta.recip().ln()).ceil_count().max(1)
}

fn check_lambda<F: Scalar>(lambda: F) -> Result<()> {
    if lambda > F::one() {
        Ok(())
    } else {
        Err(invalid("lambda", format!("{lambda} must exceed 1")))
    }
}

/// Draws the sample and counts its colors.
pub fn colors_sample<F: Scalar>(tau: &mut QueryCountedString, lambda: F, seed: u64) -> Result<ColorSample<F>> {
    check_lambda(lambda)?;
    let n = tau.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let s = colors_sample_size(n, lambda);
    let mut rng = seed::rng(seed);
    let mut seen = HashSet::new();
    for _ in 0..s {
        let i = rng.gen_range(0..n as u64) as usize;
        seen.insert(tau.get(i));
    }
    Ok(ColorSample {
        sample_size: s,
        distinct_seen: seen.len(),
        lambda,
    })
}

/// `lambda`-multiplicative estimate of the number of colors.
pub fn colors_estimate<F: Scalar>(tau: &mut QueryCountedString, lambda: F, seed: u64) -> Result<EstimateReport<F>> {
    let before = tau.queries();
    let sample = colors_sample(tau, lambda, seed)?;
    Ok(EstimateReport::new(
        sample.estimate(),
        lambda,
        F::zero(),
        tau.queries() - before,
        seed,
    ))
}

/// Lower median: the element of rank `(k - 1) / 2` in sorted order.
pub fn lower_median<F: Scalar>(values: &[F]) -> Option<F> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("estimates are never NaN"));
    v.get(v.len().saturating_sub(1) / 2).copied()
}

/// Median of [`amplification_runs`] runs with seeds derived from `seed`.
pub fn colors_estimate_amplified<F: Scalar>(
    tau: &mut QueryCountedString,
    lambda: F,
    delta: F,
    seed: u64,
) -> Result<EstimateReport<F>> {
    check_lambda(lambda)?;
    if !(delta > F::zero() && delta < F::one()) {
        return Err(invalid("delta", format!("{delta} not in (0, 1)")));
    }
    let before = tau.queries();
    let k = amplification_runs(delta);
    let mut estimates = Vec::with_capacity(k);
    for run in 0..k {
        estimates.push(colors_sample(tau, lambda, seed::derive(seed, run as u64))?.estimate());
    }
    let median = lower_median(&estimates).expect("k >= 1");
    Ok(EstimateReport::new(median, lambda, F::zero(), tau.queries() - before, seed)
        .with_confidence(F::one() - delta))
}
