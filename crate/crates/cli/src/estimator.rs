use serde::{Deserialize, Serialize};
use sublinear_compress::colors::{amplification_runs, colors_estimate, colors_estimate_amplified, colors_sample_size};
use sublinear_compress::lz::{lz_estimate, LzEstimateParams};
use sublinear_compress::rle::{
    additive_query_budget, bucketed_query_budget, rle_additive_estimate, rle_bucketed_estimate,
    rle_multiplicative_search, rle_refined_search, search_query_ceiling,
};
use sublinear_compress::{exact_color_count, exact_lz_cost, exact_rle_cost, EstimateReport64, QueryCountedString};
use sublinear_compress::{RleConfig64, Symbol};

/// Estimator and its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EstimatorSpec {
    RleAdditive { epsilon: f64 },
    RleBucketed { epsilon: f64, delta: f64 },
    RleSearch {},
    RleRefined { gamma: f64 },
    Lz { a: f64, epsilon: f64 },
    Colors {
        lambda: f64,
        #[serde(default)]
        delta: Option<f64>,
    },
}

/// Quantity an estimator approximates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    RleCost,
    LzCost,
    Colors,
}

impl Target {
    pub fn exact(self, w: &[Symbol], alphabet_size: usize) -> sublinear_compress::Result<f64> {
        Ok(match self {
            Target::RleCost => exact_rle_cost(w, alphabet_size)?.total_cost as f64,
            Target::LzCost => exact_lz_cost(w)?.total_cost as f64,
            Target::Colors => exact_color_count(w)? as f64,
        })
    }
}

impl EstimatorSpec {
    pub fn target(&self) -> Target {
        match self {
            EstimatorSpec::Lz { .. } => Target::LzCost,
            EstimatorSpec::Colors { .. } => Target::Colors,
            _ => Target::RleCost,
        }
    }

    pub fn run(&self, w: &mut QueryCountedString, seed: u64) -> sublinear_compress::Result<EstimateReport64> {
        let cfg = RleConfig64::default();
        match *self {
            EstimatorSpec::RleAdditive { epsilon } => rle_additive_estimate(w, epsilon, seed, &cfg),
            EstimatorSpec::RleBucketed { epsilon, delta } => rle_bucketed_estimate(w, epsilon, delta, seed, &cfg),
            EstimatorSpec::RleSearch {} => rle_multiplicative_search(w, seed, &cfg),
            EstimatorSpec::RleRefined { gamma } => rle_refined_search(w, gamma, seed, &cfg),
            EstimatorSpec::Lz { a, epsilon } => lz_estimate(w, a, epsilon, seed),
            EstimatorSpec::Colors { lambda, delta: None } => colors_estimate(w, lambda, seed),
            EstimatorSpec::Colors {
                lambda,
                delta: Some(delta),
            } => colors_estimate_amplified(w, lambda, delta, seed),
        }
    }

    /// Configured bound on distinct reads for an input of length `n`,
    /// alphabet `alphabet_size` and exact target value `exact`.
    pub fn query_ceiling(&self, n: usize, alphabet_size: usize, exact: f64) -> f64 {
        let cfg = RleConfig64::default();
        let ceiling = match *self {
            EstimatorSpec::RleAdditive { epsilon } => additive_query_budget(epsilon, alphabet_size, &cfg) as f64,
            EstimatorSpec::RleBucketed { epsilon, delta } => {
                bucketed_query_budget(n, epsilon, delta, alphabet_size, &cfg) as f64
            }
            EstimatorSpec::RleSearch {} => search_query_ceiling(n, exact),
            EstimatorSpec::RleRefined { .. } => n as f64,
            EstimatorSpec::Lz { a, epsilon } => match LzEstimateParams::new(a, epsilon, n) {
                Ok(p) => p.query_ceiling(n) as f64,
                Err(_) => n as f64,
            },
            EstimatorSpec::Colors { lambda, delta } => {
                let runs = delta.map_or(1, amplification_runs);
                (runs * colors_sample_size(n, lambda)) as f64
            }
        };
        ceiling.min(n as f64)
    }
}
