//! Query-accounted read access to the input string.
//!
//! A *query* is the first read of a distinct position. Re-reading a position
//! is free, so the read counter equals the number of distinct positions
//! touched. Positions are 1-indexed in the public API.

use std::collections::HashSet;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

pub type Symbol = u32;

/// Backing store behind a [`QueryCountedString`]. Indices are 0-based.
pub trait SymbolSource: Send + Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn symbol(&self, index: usize) -> Symbol;

    /// Inclusive bounds of the maximal run containing `index`, when the
    /// source can answer without reading symbol by symbol. Used only to
    /// speed up run probing; the set of positions charged is unchanged.
    fn run_extent(&self, _index: usize) -> Option<(usize, usize)> {
        None
    }

    /// Whole contents, when they are already materialized.
    fn as_slice(&self) -> Option<&[Symbol]> {
        None
    }
}

/// In-memory string.
pub struct MemorySource {
    symbols: Vec<Symbol>,
    runs: OnceLock<RunIndex>,
}

struct RunIndex {
    run_of: Vec<u32>,
    bounds: Vec<(usize, usize)>,
}

impl MemorySource {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        MemorySource {
            symbols,
            runs: OnceLock::new(),
        }
    }

    fn run_index(&self) -> &RunIndex {
        self.runs.get_or_init(|| {
            let mut run_of = Vec::with_capacity(self.symbols.len());
            let mut bounds = Vec::new();
            let mut start = 0;
            for i in 0..self.symbols.len() {
                if i > 0 && self.symbols[i] != self.symbols[i - 1] {
                    bounds.push((start, i - 1));
                    start = i;
                }
                run_of.push(bounds.len() as u32);
            }
            if !self.symbols.is_empty() {
                bounds.push((start, self.symbols.len() - 1));
            }
            RunIndex { run_of, bounds }
        })
    }
}

impl SymbolSource for MemorySource {
    fn len(&self) -> usize {
        self.symbols.len()
    }

    fn symbol(&self, index: usize) -> Symbol {
        self.symbols[index]
    }

    fn run_extent(&self, index: usize) -> Option<(usize, usize)> {
        let idx = self.run_index();
        Some(idx.bounds[idx.run_of[index] as usize])
    }

    fn as_slice(&self) -> Option<&[Symbol]> {
        Some(&self.symbols)
    }
}

/// Set of positions read so far: a bitset with a one-bit-per-word summary of
/// completely set words, so long contiguous reads over already-read ground
/// cost O(len / 4096).
#[derive(Clone, Debug)]
struct ReadLedger {
    words: Vec<u64>,
    full: Vec<u64>,
    count: u64,
    len: u64,
}

impl ReadLedger {
    fn new(len: usize) -> Self {
        let nwords = len.div_ceil(64);
        ReadLedger {
            words: vec![0; nwords],
            full: vec![0; nwords.div_ceil(64)],
            count: 0,
            len: len as u64,
        }
    }

    fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn insert(&mut self, i: usize) {
        self.mark_word(i / 64, 1u64 << (i % 64));
    }

    #[inline]
    fn mark_word(&mut self, wi: usize, mask: u64) {
        let fresh = mask & !self.words[wi];
        if fresh != 0 {
            self.count += u64::from(fresh.count_ones());
            self.words[wi] |= fresh;
            if self.words[wi] == u64::MAX {
                self.full[wi / 64] |= 1u64 << (wi % 64);
            }
        }
    }

    /// Marks the inclusive range `[lo, hi]`.
    fn insert_range(&mut self, lo: usize, hi: usize) {
        debug_assert!(lo <= hi);
        if self.count == self.len {
            return;
        }
        let (wlo, whi) = (lo / 64, hi / 64);
        let mut wi = wlo;
        while wi <= whi {
            if wi % 64 == 0 && wi > wlo && wi + 63 < whi && self.full[wi / 64] == u64::MAX {
                wi += 64;
                continue;
            }
            let mut mask = u64::MAX;
            if wi == wlo {
                mask &= u64::MAX << (lo % 64);
            }
            if wi == whi {
                mask &= u64::MAX >> (63 - hi % 64);
            }
            self.mark_word(wi, mask);
            wi += 1;
        }
    }
}

/// Outcome of probing the run around a position with a length cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunLength {
    /// The run has exactly this length, which is below the cap.
    Exact(usize),
    /// The run is at least as long as the cap.
    AtLeast(usize),
}

impl RunLength {
    pub fn exact(self) -> Option<usize> {
        match self {
            RunLength::Exact(l) => Some(l),
            RunLength::AtLeast(_) => None,
        }
    }
}

/// Read-only string with a counter of distinct positions queried.
///
/// The symbols live behind an `Arc` and are shared between views; each view
/// owns its own counter. Hand every estimator call its own view (see
/// [`QueryCountedString::fresh_view`]) to get per-run accounting.
pub struct QueryCountedString {
    source: Arc<dyn SymbolSource>,
    alphabet_size: usize,
    ledger: ReadLedger,
}

impl std::fmt::Debug for QueryCountedString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QueryCountedString")
            .field("len", &self.len())
            .field("alphabet_size", &self.alphabet_size)
            .field("queries", &self.ledger.count)
            .finish()
    }
}

impl QueryCountedString {
    /// Raw bytes; the alphabet size is the number of distinct bytes (at least 2).
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let symbols: Vec<Symbol> = bytes.iter().map(|&b| Symbol::from(b)).collect();
        let distinct = count_distinct(&symbols);
        Self::from_symbols(symbols, distinct.max(2))
    }

    pub fn from_symbols(symbols: Vec<Symbol>, alphabet_size: usize) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyInput);
        }
        check_alphabet(&symbols, alphabet_size)?;
        Ok(Self::from_source(Arc::new(MemorySource::new(symbols)), alphabet_size))
    }

    /// Loads a whole file as raw bytes.
    pub fn from_file(path: impl AsRef<Path>, alphabet_size: Option<usize>) -> Result<Self> {
        let bytes = std::fs::read(path.as_ref()).map_err(|e| Error::Io(e.to_string()))?;
        match alphabet_size {
            None => Self::from_bytes(&bytes),
            Some(a) => Self::from_symbols(bytes.iter().map(|&b| Symbol::from(b)).collect(), a),
        }
    }

    /// Wraps an arbitrary (possibly lazy) provider.
    pub fn from_source(source: Arc<dyn SymbolSource>, alphabet_size: usize) -> Self {
        let len = source.len();
        QueryCountedString {
            source,
            alphabet_size,
            ledger: ReadLedger::new(len),
        }
    }

    /// A view over the same symbols with a zeroed counter.
    pub fn fresh_view(&self) -> Self {
        Self::from_source(Arc::clone(&self.source), self.alphabet_size)
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// Distinct positions read through this view so far.
    pub fn queries(&self) -> u64 {
        self.ledger.count
    }

    pub fn was_read(&self, position: usize) -> bool {
        position >= 1 && position <= self.len() && self.ledger.contains(position - 1)
    }

    pub fn source(&self) -> &Arc<dyn SymbolSource> {
        &self.source
    }

    fn check(&self, position: usize) -> Result<()> {
        if position == 0 || position > self.len() {
            Err(Error::OutOfRange {
                position,
                len: self.len(),
            })
        } else {
            Ok(())
        }
    }

    /// Symbol at 1-based `position`.
    pub fn read(&mut self, position: usize) -> Result<Symbol> {
        self.check(position)?;
        Ok(self.get(position - 1))
    }

    #[inline]
    pub(crate) fn get(&mut self, index: usize) -> Symbol {
        self.ledger.insert(index);
        self.source.symbol(index)
    }

    /// Reads `len` symbols starting at 1-based `start` into `buf` (cleared first).
    pub fn read_window(&mut self, start: usize, len: usize, buf: &mut Vec<Symbol>) -> Result<()> {
        buf.clear();
        if len == 0 {
            return Ok(());
        }
        self.check(start)?;
        self.check(start + len - 1)?;
        self.window0(start - 1, len, buf);
        Ok(())
    }

    pub(crate) fn window0(&mut self, start: usize, len: usize, buf: &mut Vec<Symbol>) {
        buf.clear();
        if len == 0 {
            return;
        }
        self.ledger.insert_range(start, start + len - 1);
        match self.source.as_slice() {
            Some(s) => buf.extend_from_slice(&s[start..start + len]),
            None => buf.extend((start..start + len).map(|i| self.source.symbol(i))),
        }
    }

    /// Reads the whole string.
    pub fn read_all(&mut self) -> Vec<Symbol> {
        let mut buf = Vec::with_capacity(self.len());
        self.window0(0, self.len(), &mut buf);
        buf
    }

    /// Length of the run containing 1-based `t`, capped at `cap`.
    ///
    /// Expands left first, then right, one read at a time, stopping at a
    /// differing symbol, at the string boundary, or once `cap` matching
    /// positions (including `t`) are confirmed.
    pub fn probe_run(&mut self, t: usize, cap: usize) -> Result<RunLength> {
        self.check(t)?;
        if cap == 0 {
            return Err(invalid("cap", "must be at least 1"));
        }
        Ok(self.probe_run0(t - 1, cap))
    }

    pub(crate) fn probe_run0(&mut self, t: usize, cap: usize) -> RunLength {
        match self.source.run_extent(t) {
            Some(extent) => self.probe_with_extent(t, cap, extent),
            None => self.probe_stepwise(t, cap),
        }
    }

    fn probe_stepwise(&mut self, t: usize, cap: usize) -> RunLength {
        let n = self.len();
        let c = self.get(t);
        let mut count = 1;
        let mut i = t;
        while count < cap && i > 0 {
            if self.get(i - 1) != c {
                break;
            }
            i -= 1;
            count += 1;
        }
        let mut j = t;
        while count < cap && j + 1 < n {
            if self.get(j + 1) != c {
                break;
            }
            j += 1;
            count += 1;
        }
        if count >= cap {
            RunLength::AtLeast(cap)
        } else {
            RunLength::Exact(count)
        }
    }

    /// Same reads as [`Self::probe_stepwise`], computed from known run bounds:
    /// the positions touched always form one contiguous interval.
    fn probe_with_extent(&mut self, t: usize, cap: usize, (a, b): (usize, usize)) -> RunLength {
        let n = self.len();
        let left_matched = (t - a).min(cap - 1);
        let mut lo = t - left_matched;
        if left_matched == t - a && left_matched < cap - 1 && a > 0 {
            lo -= 1;
        }
        let mut count = 1 + left_matched;
        let mut hi = t;
        if count < cap {
            let right_matched = (b - t).min(cap - count);
            hi = t + right_matched;
            if right_matched == b - t && right_matched < cap - count && b + 1 < n {
                hi += 1;
            }
            count += right_matched;
        }
        self.ledger.insert_range(lo, hi);
        if count >= cap {
            RunLength::AtLeast(cap)
        } else {
            RunLength::Exact(count)
        }
    }
}

pub(crate) fn count_distinct(symbols: &[Symbol]) -> usize {
    symbols.iter().collect::<HashSet<_>>().len()
}

fn check_alphabet(symbols: &[Symbol], alphabet_size: usize) -> Result<()> {
    if alphabet_size < 2 {
        return Err(invalid("alphabet_size", "must be at least 2"));
    }
    let found = count_distinct(symbols);
    if found > alphabet_size {
        return Err(Error::AlphabetTooSmall {
            found,
            alphabet_size,
        });
    }
    Ok(())
}

/// Result of one estimator call.
///
/// The claimed contract is `exact / lambda - epsilon * n <= estimate <=
/// lambda * exact + epsilon * n`, holding with probability `confidence`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EstimateReport<F: Scalar> {
    pub estimate: F,
    pub lambda: F,
    pub epsilon: F,
    pub queries_used: u64,
    pub seed: u64,
    pub confidence: F,
}

impl<F: Scalar> EstimateReport<F> {
    pub fn new(estimate: F, lambda: F, epsilon: F, queries_used: u64, seed: u64) -> Self {
        debug_assert!(estimate >= F::zero(), "negative estimate");
        EstimateReport {
            estimate,
            lambda,
            epsilon,
            queries_used,
            seed,
            confidence: F::lit(2.0) / F::lit(3.0),
        }
    }

    pub fn with_confidence(mut self, confidence: F) -> Self {
        self.confidence = confidence;
        self
    }

    pub fn meets_contract(&self, exact: F, n: usize) -> bool {
        meets_contract(self, exact, n)
    }
}

/// Whether `report.estimate` lies in `[exact/lambda - eps*n, lambda*exact + eps*n]`.
pub fn meets_contract<F: Scalar>(report: &EstimateReport<F>, exact: F, n: usize) -> bool {
    let slack = report.epsilon * F::from_count(n);
    let lo = exact / report.lambda - slack;
    let hi = report.lambda * exact + slack;
    lo <= report.estimate && report.estimate <= hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(text: &str) -> QueryCountedString {
        QueryCountedString::from_bytes(text.as_bytes()).unwrap()
    }

    #[test]
    fn read_counts_once() {
        let mut w = s("abc");
        assert_eq!(w.queries(), 0);
        assert_eq!(w.read(2).unwrap(), u32::from(b'b'));
        assert_eq!(w.queries(), 1);
        assert_eq!(w.read(2).unwrap(), u32::from(b'b'));
        assert_eq!(w.queries(), 1);
    }

    #[test]
    fn read_out_of_range() {
        let mut w = s("abc");
        assert_eq!(w.read(4), Err(Error::OutOfRange { position: 4, len: 3 }));
        assert!(w.read(0).is_err());
        assert_eq!(w.queries(), 0);
    }

    #[test]
    fn fresh_view_resets_counter() {
        let mut w = s("abcd");
        w.read(1).unwrap();
        let mut v = w.fresh_view();
        assert_eq!(v.queries(), 0);
        v.read(1).unwrap();
        assert_eq!(w.queries(), 1);
    }

    #[test]
    fn constructors_validate() {
        assert_eq!(QueryCountedString::from_bytes(b"").unwrap_err(), Error::EmptyInput);
        assert!(QueryCountedString::from_symbols(vec![1, 2, 3], 2).is_err());
        assert_eq!(QueryCountedString::from_bytes(b"1111").unwrap().alphabet_size(), 2);
    }

    #[test]
    fn probe_examples() {
        let mut w = s("00110");
        assert_eq!(w.probe_run(3, 8).unwrap(), RunLength::Exact(2));

        let mut ones = s(&"1".repeat(100));
        assert_eq!(ones.probe_run(50, 8).unwrap(), RunLength::AtLeast(8));
        assert!(ones.queries() <= 17);

        let mut edge = s(&format!("0{}", "1".repeat(99)));
        assert_eq!(edge.probe_run(1, 8).unwrap(), RunLength::Exact(1));
    }

    #[test]
    fn meets_contract_examples() {
        let r = |e: f64, l: f64, eps: f64| EstimateReport::new(e, l, eps, 0, 0);
        assert!(meets_contract(&r(5.0, 1.0, 0.0), 5.0, 10));
        assert!(meets_contract(&r(0.0, 1.0, 0.5), 4.0, 10));
        assert!(!meets_contract(&r(100.0, 2.0, 0.0), 10.0, 10));
    }

    #[test]
    fn ledger_range_skips_full_blocks() {
        let mut l = ReadLedger::new(64 * 64 * 3 + 17);
        l.insert_range(5, 64 * 64 * 3 + 10);
        assert_eq!(l.count, (64 * 64 * 3 + 10 - 5 + 1) as u64);
        l.insert_range(0, 64 * 64 * 3 + 16);
        assert_eq!(l.count, (64 * 64 * 3 + 17) as u64);
        l.insert(3);
        assert_eq!(l.count, (64 * 64 * 3 + 17) as u64);
    }

    /// Source without a run index, forcing the stepwise probe.
    struct Plain(Vec<Symbol>);
    impl SymbolSource for Plain {
        fn len(&self) -> usize {
            self.0.len()
        }
        fn symbol(&self, i: usize) -> Symbol {
            self.0[i]
        }
    }

    proptest! {
        #[test]
        fn fast_probe_matches_stepwise(
            w in proptest::collection::vec(0u32..3, 1..200),
            probes in proptest::collection::vec((0usize..200, 1usize..40), 1..20),
        ) {
            let mut fast = QueryCountedString::from_symbols(w.clone(), 3).unwrap();
            let mut slow = QueryCountedString::from_source(Arc::new(Plain(w.clone())), 3);
            for (t, cap) in probes {
                let t = t % w.len() + 1;
                prop_assert_eq!(fast.probe_run(t, cap).unwrap(), slow.probe_run(t, cap).unwrap());
                prop_assert_eq!(fast.queries(), slow.queries());
            }
            for p in 1..=w.len() {
                prop_assert_eq!(fast.was_read(p), slow.was_read(p));
            }
        }

        #[test]
        fn counter_equals_distinct_positions(reads in proptest::collection::vec(1usize..50, 0..100)) {
            let mut w = QueryCountedString::from_symbols((0..49).map(|i| i % 2).collect(), 2).unwrap();
            let mut seen = HashSet::new();
            for p in reads {
                let p = p.min(49);
                w.read(p).unwrap();
                seen.insert(p);
                prop_assert!(w.queries() <= w.len() as u64);
            }
            prop_assert_eq!(w.queries(), seen.len() as u64);
        }

        #[test]
        fn window_reads_match_pointwise(start in 1usize..300, len in 1usize..300) {
            let n = 500;
            let mut a = QueryCountedString::from_symbols((0..n as u32).map(|i| i % 7).collect(), 7).unwrap();
            let mut b = a.fresh_view();
            let len = len.min(n - start + 1);
            let mut buf = Vec::new();
            a.read_window(start, len, &mut buf).unwrap();
            let pointwise: Vec<Symbol> = (start..start + len).map(|p| b.read(p).unwrap()).collect();
            prop_assert_eq!(buf, pointwise);
            prop_assert_eq!(a.queries(), b.queries());
        }
    }
}
