//! Suffix array machinery backing the exact LZ77 parse and distinct-substring
//! profile. Indices are 0-based.

use crate::access::Symbol;

pub(crate) struct SuffixIndex {
    pub sa: Vec<usize>,
    pub rank: Vec<usize>,
    /// `lcp[i]` = longest common prefix of suffixes `sa[i-1]` and `sa[i]`; `lcp[0] = 0`.
    pub lcp: Vec<usize>,
}

impl SuffixIndex {
    pub fn new(w: &[Symbol]) -> Self {
        let sa = suffix_array(w);
        let n = w.len();
        let mut rank = vec![0; n];
        for (i, &s) in sa.iter().enumerate() {
            rank[s] = i;
        }
        let lcp = kasai(w, &sa, &rank);
        SuffixIndex { sa, rank, lcp }
    }
}

/// Prefix doubling, O(n log^2 n).
fn suffix_array(w: &[Symbol]) -> Vec<usize> {
    let n = w.len();
    let mut sa: Vec<usize> = (0..n).collect();
    if n <= 1 {
        return sa;
    }
    let mut rank: Vec<u64> = w.iter().map(|&c| u64::from(c)).collect();
    let mut tmp = vec![0u64; n];
    let mut k = 1;
    loop {
        let key = |i: usize| (rank[i], if i + k < n { rank[i + k] + 1 } else { 0 });
        sa.sort_unstable_by_key(|&i| key(i));
        tmp[sa[0]] = 0;
        for j in 1..n {
            tmp[sa[j]] = tmp[sa[j - 1]] + u64::from(key(sa[j - 1]) != key(sa[j]));
        }
        std::mem::swap(&mut rank, &mut tmp);
        if rank[sa[n - 1]] as usize == n - 1 {
            break;
        }
        k *= 2;
    }
    sa
}

fn kasai(w: &[Symbol], sa: &[usize], rank: &[usize]) -> Vec<usize> {
    let n = w.len();
    let mut lcp = vec![0; n];
    let mut h = 0usize;
    for i in 0..n {
        if rank[i] > 0 {
            let j = sa[rank[i] - 1];
            while i + h < n && j + h < n && w[i + h] == w[j + h] {
                h += 1;
            }
            lcp[rank[i]] = h;
            h = h.saturating_sub(1);
        } else {
            h = 0;
        }
    }
    lcp
}

/// Static range-minimum table.
pub(crate) struct SparseMin {
    levels: Vec<Vec<usize>>,
}

impl SparseMin {
    pub fn new(values: &[usize]) -> Self {
        let mut levels = vec![values.to_vec()];
        let mut width = 1;
        while 2 * width <= values.len() {
            let prev = levels.last().unwrap();
            let next: Vec<usize> = (0..=values.len() - 2 * width)
                .map(|i| prev[i].min(prev[i + width]))
                .collect();
            levels.push(next);
            width *= 2;
        }
        SparseMin { levels }
    }

    /// Minimum over the inclusive range `[lo, hi]`.
    pub fn min(&self, lo: usize, hi: usize) -> usize {
        debug_assert!(lo <= hi);
        let len = hi - lo + 1;
        let k = (usize::BITS - 1 - len.leading_zeros()) as usize;
        self.levels[k][lo].min(self.levels[k][hi + 1 - (1 << k)])
    }
}

/// One greedy LZ77 step target: for position `t`, the longest previous
/// factor length and the smallest source position achieving it.
pub(crate) struct PreviousFactors {
    index: SuffixIndex,
    lcp_min: SparseMin,
    sa_min: SparseMin,
    psv: Vec<Option<usize>>,
    nsv: Vec<Option<usize>>,
}

impl PreviousFactors {
    pub fn new(w: &[Symbol]) -> Self {
        let index = SuffixIndex::new(w);
        let n = w.len();
        let lcp_min = SparseMin::new(&index.lcp);
        let sa_min = SparseMin::new(&index.sa);
        // Nearest ranks on either side whose suffix starts earlier in the text.
        let mut psv = vec![None; n];
        let mut nsv = vec![None; n];
        let mut stack: Vec<usize> = Vec::new();
        for (r, slot) in psv.iter_mut().enumerate() {
            while let Some(&top) = stack.last() {
                if index.sa[top] > index.sa[r] {
                    nsv[top] = Some(r);
                    stack.pop();
                } else {
                    break;
                }
            }
            *slot = stack.last().copied();
            stack.push(r);
        }
        PreviousFactors {
            index,
            lcp_min,
            sa_min,
            psv,
            nsv,
        }
    }

    fn lcp_ranks(&self, a: usize, b: usize) -> usize {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.lcp_min.min(lo + 1, hi)
    }

    /// `(length, source)` of the longest match for the suffix at `t` starting
    /// strictly before `t`; `None` when `w[t]` has not occurred before.
    pub fn longest_previous(&self, t: usize) -> Option<(usize, usize)> {
        let r = self.index.rank[t];
        let len = [self.psv[r], self.nsv[r]]
            .iter()
            .flatten()
            .map(|&o| self.lcp_ranks(o, r))
            .max()
            .unwrap_or(0);
        if len == 0 {
            return None;
        }
        let n = self.index.sa.len();
        // Widen [lo, hi] around r while the shared prefix stays >= len.
        let (mut a, mut b) = (0, r);
        while a < b {
            let mid = (a + b) / 2;
            if self.lcp_min.min(mid + 1, r) >= len {
                b = mid;
            } else {
                a = mid + 1;
            }
        }
        let lo = a;
        let (mut a, mut b) = (r, n - 1);
        while a < b {
            let mid = (a + b).div_ceil(2);
            if self.lcp_min.min(r + 1, mid) >= len {
                a = mid;
            } else {
                b = mid - 1;
            }
        }
        let hi = a;
        let source = self.sa_min.min(lo, hi);
        debug_assert!(source < t);
        Some((len, source))
    }
}

/// `d[l]` for `l` in `0..=max_len`: number of distinct length-`l` substrings
/// (`d[0]` is 1 by convention).
pub(crate) fn distinct_profile(w: &[Symbol], max_len: usize) -> Vec<usize> {
    let n = w.len();
    let index = SuffixIndex::new(w);
    let mut diff = vec![0isize; max_len + 2];
    for i in 0..n {
        let suffix_len = n - index.sa[i];
        let shared = if i == 0 { 0 } else { index.lcp[i] };
        // Contributes a new length-l substring for every l in (shared, suffix_len].
        let lo = shared + 1;
        let hi = suffix_len.min(max_len);
        if lo <= hi {
            diff[lo] += 1;
            diff[hi + 1] -= 1;
        }
    }
    let mut out = vec![0; max_len + 1];
    out[0] = 1;
    let mut acc = 0isize;
    for l in 1..=max_len {
        acc += diff[l];
        out[l] = acc as usize;
    }
    out
}
