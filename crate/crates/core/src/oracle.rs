//! Exact reference computations: run-length and LZ77 costs, distinct
//! substring counts, distinct colors, and a checker for the structural
//! inequalities relating LZ77 cost to distinct-substring counts.
//!
//! LZ77 cost is a count of emitted symbols (literal or pointer/length pair);
//! a binary encoding is at most a `2 log2 n` factor larger.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::access::{count_distinct, Symbol};
use crate::error::{invalid, Error, Result};
use crate::scalar::ceil_log2;
use crate::suffix::{distinct_profile, PreviousFactors};

/// One run (RLE) or compressed segment (LZ77). `start` is 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Part {
    pub start: usize,
    pub length: usize,
    pub cost: u64,
}

/// Exact cost plus its decomposition; the parts tile `[1, n]` in order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub total_cost: u64,
    pub parts: Vec<Part>,
}

impl CostBreakdown {
    fn from_parts(parts: Vec<Part>) -> Self {
        CostBreakdown {
            total_cost: parts.iter().map(|p| p.cost).sum(),
            parts,
        }
    }
}

/// Bits for one run of length `len`: `ceil(log2(len + 1)) + ceil(log2 |alphabet|)`.
pub fn run_cost(len: usize, alphabet_size: usize) -> u64 {
    u64::from(ceil_log2(len as u64 + 1)) + u64::from(ceil_log2(alphabet_size as u64))
}

/// Length-only part of [`run_cost`], i.e. `ceil(log2(len + 1))`.
pub fn run_length_bits(len: usize) -> u64 {
    u64::from(ceil_log2(len as u64 + 1))
}

/// Maximal runs as `(symbol, length)`.
pub fn rle_runs(w: &[Symbol]) -> Vec<(Symbol, usize)> {
    let mut runs: Vec<(Symbol, usize)> = Vec::new();
    for &c in w {
        match runs.last_mut() {
            Some((s, len)) if *s == c => *len += 1,
            _ => runs.push((c, 1)),
        }
    }
    runs
}

pub fn exact_rle_cost(w: &[Symbol], alphabet_size: usize) -> Result<CostBreakdown> {
    if w.is_empty() {
        return Err(Error::EmptyInput);
    }
    if alphabet_size < 2 {
        return Err(invalid("alphabet_size", "must be at least 2"));
    }
    let found = count_distinct(w);
    if found > alphabet_size {
        return Err(Error::AlphabetTooSmall {
            found,
            alphabet_size,
        });
    }
    let mut start = 1;
    let parts = rle_runs(w)
        .into_iter()
        .map(|(_, length)| {
            let p = Part {
                start,
                length,
                cost: run_cost(length, alphabet_size),
            };
            start += length;
            p
        })
        .collect();
    Ok(CostBreakdown::from_parts(parts))
}

/// One symbol of the LZ77 output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LzSymbol {
    Literal(Symbol),
    /// Copy of `length` symbols from 1-based `source`, which precedes the
    /// segment start but may overlap it.
    Copy { source: usize, length: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LzSegment {
    pub start: usize,
    pub symbol: LzSymbol,
}

impl LzSegment {
    pub fn len(&self) -> usize {
        match self.symbol {
            LzSymbol::Literal(_) => 1,
            LzSymbol::Copy { length, .. } => length,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Greedy LZ77 parse: at each position take the longest match that starts
/// earlier (smallest such source on ties), else a literal.
///
/// Runs in O(n log^2 n) through a suffix array rather than the quadratic
/// scan; the parse is identical.
pub fn lz77_parse(w: &[Symbol]) -> Result<Vec<LzSegment>> {
    if w.is_empty() {
        return Err(Error::EmptyInput);
    }
    let factors = PreviousFactors::new(w);
    let mut out = Vec::new();
    let mut t = 0;
    while t < w.len() {
        let symbol = match factors.longest_previous(t) {
            Some((length, source)) => LzSymbol::Copy {
                source: source + 1,
                length,
            },
            None => LzSymbol::Literal(w[t]),
        };
        let seg = LzSegment { start: t + 1, symbol };
        t += seg.len();
        out.push(seg);
    }
    Ok(out)
}

/// Inverse of [`lz77_parse`].
pub fn lz77_expand(segments: &[LzSegment]) -> Vec<Symbol> {
    let mut out: Vec<Symbol> = Vec::new();
    for seg in segments {
        match seg.symbol {
            LzSymbol::Literal(c) => out.push(c),
            LzSymbol::Copy { source, length } => {
                for k in 0..length {
                    let c = out[source - 1 + k];
                    out.push(c);
                }
            }
        }
    }
    out
}

pub fn exact_lz_cost(w: &[Symbol]) -> Result<CostBreakdown> {
    let parts = lz77_parse(w)?
        .iter()
        .map(|s| Part {
            start: s.start,
            length: s.len(),
            cost: 1,
        })
        .collect();
    Ok(CostBreakdown::from_parts(parts))
}

/// Number of distinct (possibly overlapping) length-`ell` substrings.
pub fn exact_distinct_substrings(w: &[Symbol], ell: usize) -> Result<usize> {
    if ell == 0 || ell > w.len() {
        return Err(invalid("ell", format!("must lie in [1, {}]", w.len())));
    }
    Ok(w.windows(ell).collect::<HashSet<_>>().len())
}

/// `d[l]` for every `l` in `1..=max_len` at once (index 0 unused, set to 1).
pub fn distinct_substring_profile(w: &[Symbol], max_len: usize) -> Result<Vec<usize>> {
    if w.is_empty() {
        return Err(Error::EmptyInput);
    }
    if max_len > w.len() {
        return Err(invalid("max_len", format!("must not exceed {}", w.len())));
    }
    Ok(distinct_profile(w, max_len))
}

pub fn exact_color_count(tau: &[Symbol]) -> Result<usize> {
    if tau.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(count_distinct(tau))
}

/// `n_k` for `k` in `0..=n`: number of segments of length `k`, not counting
/// the final segment.
pub fn segment_length_counts(parts: &[Part], n: usize) -> Vec<usize> {
    let mut counts = vec![0; n + 1];
    if let Some((_, init)) = parts.split_last() {
        for p in init {
            counts[p.length] += 1;
        }
    }
    counts
}

/// One instance of an inequality `lhs <= rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub ell: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityCheck {
    fn new(ell: usize, lhs: f64, rhs: f64) -> Self {
        InequalityCheck {
            ell,
            lhs,
            rhs,
            holds: lhs <= rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub n: usize,
    pub ell0: usize,
    pub lz_cost: u64,
    /// `distinct[l]` for `l <= ell0` (index 0 unused).
    pub distinct: Vec<usize>,
    /// `segment_counts[k]` for `k <= ell0`, final segment excluded.
    pub segment_counts: Vec<usize>,
    /// `max over l <= ell0 of distinct[l] / l`.
    pub m: f64,
    /// `distinct[l] <= lz_cost * l` for each `l` in `[1, ell0]`.
    pub lower: Vec<InequalityCheck>,
    /// `lz_cost <= 4 (m log2 ell0 + n / ell0)`; skipped when `ell0 < 2`.
    pub upper: Option<InequalityCheck>,
    /// `sum_{k <= l} k n_k <= 2 l (m + 1)` for each `l` in `[1, ell0 / 2]`.
    pub weighted_segments: Vec<InequalityCheck>,
}

impl LemmaReport {
    pub fn all_hold(&self) -> bool {
        self.lower.iter().all(|c| c.holds)
            && self.upper.as_ref().is_none_or(|c| c.holds)
            && self.weighted_segments.iter().all(|c| c.holds)
    }

    pub fn violations(&self) -> Vec<&InequalityCheck> {
        self.lower
            .iter()
            .chain(self.upper.iter())
            .chain(self.weighted_segments.iter())
            .filter(|c| !c.holds)
            .collect()
    }
}

/// Evaluates both directions of the relation between LZ77 cost and the
/// distinct-substring counts `d_1 .. d_ell0` on `w`.
pub fn verify_structural_lemmas(w: &[Symbol], ell0: usize) -> Result<LemmaReport> {
    if w.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = w.len();
    if ell0 == 0 || ell0 > n {
        return Err(invalid("ell0", format!("must lie in [1, {n}]")));
    }
    let lz = exact_lz_cost(w)?;
    let c = lz.total_cost as f64;
    let distinct = distinct_profile(w, ell0);
    let m = (1..=ell0)
        .map(|l| distinct[l] as f64 / l as f64)
        .fold(0.0, f64::max);
    let mut segment_counts = segment_length_counts(&lz.parts, n);
    segment_counts.truncate(ell0 + 1);

    let lower = (1..=ell0)
        .map(|l| InequalityCheck::new(l, distinct[l] as f64, c * l as f64))
        .collect();
    let upper = (ell0 >= 2).then(|| {
        let bound = 4.0 * (m * (ell0 as f64).log2() + n as f64 / ell0 as f64);
        InequalityCheck::new(ell0, c, bound)
    });
    let mut weighted = 0.0;
    let weighted_segments = (1..=ell0 / 2)
        .map(|l| {
            weighted += (l * segment_counts[l]) as f64;
            InequalityCheck::new(l, weighted, 2.0 * l as f64 * (m + 1.0))
        })
        .collect();

    Ok(LemmaReport {
        n,
        ell0,
        lz_cost: lz.total_cost,
        distinct,
        segment_counts,
        m,
        lower,
        upper,
        weighted_segments,
    })
}
