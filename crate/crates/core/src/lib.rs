//! Sublinear-time estimation of string compressibility.
//!
//! Two compression schemes are covered:
//!
//! * **Run-length encoding.** Every maximal run of length `l` costs
//!   `ceil(log2(l + 1)) + ceil(log2 |alphabet|)` bits. [`rle`] holds an
//!   additive estimator, a bucketed `(3, eps)` estimator and the adaptive
//!   multiplicative searches built on top of it.
//! * **LZ77** (greedy, self-overlapping sources allowed). The cost is the
//!   number of emitted symbols. [`lz`] estimates it from sampled counts of
//!   distinct short substrings, using the distinct-colors estimator in
//!   [`colors`] as a subroutine.
//!
//! All estimators read their input through a [`QueryCountedString`], which
//! records every distinct position touched so query budgets can be asserted.
//! [`oracle`] provides the exact (linear or worse) reference computations and
//! [`generators`] the hard instance families used for stress testing.
//!
//! Numeric parameters and estimates are generic over the floating point
//! scalar ([`Scalar`], implemented for `f32` and `f64`); the `*64` aliases
//! below fix the scalar to `f64`, which is what the CLI uses.

// `!(x > bound)` is used on purpose to reject NaN parameters.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod access;
pub mod colors;
pub mod error;
pub mod generators;
pub mod lz;
pub mod oracle;
pub mod rle;
pub mod scalar;
pub mod seed;
mod suffix;
pub mod trie;

pub use access::{meets_contract, EstimateReport, QueryCountedString, Symbol, SymbolSource};
pub use error::{Error, Result};
pub use oracle::{exact_color_count, exact_distinct_substrings, exact_lz_cost, exact_rle_cost, CostBreakdown};
pub use scalar::Scalar;

pub type EstimateReport64 = access::EstimateReport<f64>;
pub type EstimateReport32 = access::EstimateReport<f32>;
pub type RleConfig64 = rle::RleConfig<f64>;
pub type LzEstimateParams64 = lz::LzEstimateParams<f64>;
pub type ColorSample64 = colors::ColorSample<f64>;
