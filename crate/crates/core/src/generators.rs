//! Instance families that are hard for the estimators or tight for the
//! structural bounds.
//!
//! Binary families use the symbols `b'0'` and `b'1'`, so their output is
//! printable when written as bytes. [`generate_lz_tight`] uses the symbols
//! `1..=m`; [`binarize`] turns it into a binary string.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::access::{QueryCountedString, Symbol, SymbolSource};
use crate::error::{invalid, Result};
use crate::scalar::ceil_log2;
use crate::seed;

pub const ZERO: Symbol = b'0' as Symbol;
pub const ONE: Symbol = b'1' as Symbol;

fn bit(b: bool) -> Symbol {
    if b {
        ONE
    } else {
        ZERO
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GeneratorSpec {
    /// `k` blocks of ones, every second block with one planted zero.
    Wk { n: usize, k: usize, seed: u64 },
    /// Runs drawn from `floor(n / 3)` coins of bias `p`.
    CoinRuns { n: usize, p: f64, seed: u64 },
    /// `ell0` phases over the alphabet `1..=m`.
    LzTight { m: usize, ell0: usize },
    /// Blocks of `ceil(1 / alpha_prime)` random symbols, one block per color
    /// of a shuffled color sequence with `colors` distinct values.
    ColorsToLz {
        n_prime: usize,
        colors: usize,
        alpha_prime: f64,
        alphabet_size: usize,
        seed: u64,
    },
}

/// A generated string with the alphabet size it was drawn over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated {
    pub symbols: Vec<Symbol>,
    pub alphabet_size: usize,
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<Generated> {
        match *self {
            GeneratorSpec::Wk { n, k, seed } => Ok(Generated {
                symbols: generate_wk(n, k, seed)?,
                alphabet_size: 2,
            }),
            GeneratorSpec::CoinRuns { n, p, seed } => Ok(Generated {
                symbols: generate_coin_runs(n, p, seed)?,
                alphabet_size: 2,
            }),
            GeneratorSpec::LzTight { m, ell0 } => Ok(Generated {
                symbols: generate_lz_tight(m, ell0)?,
                alphabet_size: m.max(2),
            }),
            GeneratorSpec::ColorsToLz {
                n_prime,
                colors,
                alpha_prime,
                alphabet_size,
                seed,
            } => {
                let tau = color_sequence(n_prime, colors, seed::derive(seed, 0))?;
                let tau = QueryCountedString::from_symbols(tau, colors.max(2))?;
                let lazy = generate_colors_to_lz(tau, alpha_prime, alphabet_size, seed::derive(seed, 1))?;
                Ok(Generated {
                    symbols: lazy.materialize(),
                    alphabet_size,
                })
            }
        }
    }
}

/// W_k with the planted zero of every even block at the given 1-based
/// offset within its block.
pub fn wk_with_offsets(n: usize, k: usize, offsets: &[usize]) -> Result<Vec<Symbol>> {
    if k < 2 || k > n / 2 {
        return Err(invalid("k", format!("need 2 <= k <= n / 2, got k = {k}, n = {n}")));
    }
    if offsets.len() != k / 2 {
        return Err(invalid("offsets", format!("expected {} offsets", k / 2)));
    }
    let base = n / k;
    let mut w = Vec::with_capacity(n);
    for block in 1..=k {
        let len = if block == k { n - base * (k - 1) } else { base };
        let start = w.len();
        w.extend(std::iter::repeat_n(ONE, len));
        if block % 2 == 0 {
            let off = offsets[block / 2 - 1];
            if off == 0 || off > len {
                return Err(invalid("offsets", format!("offset {off} outside block of length {len}")));
            }
            w[start + off - 1] = ZERO;
        }
    }
    Ok(w)
}

/// W_k with uniformly random planted zeros.
pub fn generate_wk(n: usize, k: usize, seed: u64) -> Result<Vec<Symbol>> {
    if k < 2 || k > n / 2 {
        return Err(invalid("k", format!("need 2 <= k <= n / 2, got k = {k}, n = {n}")));
    }
    let base = n / k;
    let mut rng = seed::rng(seed);
    let offsets: Vec<usize> = (1..=k / 2)
        .map(|j| {
            let len = if 2 * j == k { n - base * (k - 1) } else { base };
            rng.gen_range(1..=len)
        })
        .collect();
    wk_with_offsets(n, k, &offsets)
}

/// Binary string starting with 0 whose runs follow the coins: heads gives
/// three runs of length 1, tails one run of length 3. `prefix` zeros go in
/// front.
pub fn coin_runs_from_flips(flips: &[bool], prefix: usize) -> Vec<Symbol> {
    let mut w = vec![ZERO; prefix];
    let mut next = false;
    for &heads in flips {
        if heads {
            for _ in 0..3 {
                w.push(bit(next));
                next = !next;
            }
        } else {
            w.extend(std::iter::repeat_n(bit(next), 3));
            next = !next;
        }
    }
    w
}

pub fn coin_flips(count: usize, p: f64, seed: u64) -> Result<Vec<bool>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid("p", format!("{p} not in [0, 1]")));
    }
    let mut rng = seed::rng(seed);
    Ok((0..count).map(|_| rng.gen_bool(p)).collect())
}

/// Coin-run string of length `n`; `n mod 3` zeros are prepended.
pub fn generate_coin_runs(n: usize, p: f64, seed: u64) -> Result<Vec<Symbol>> {
    let flips = coin_flips(n / 3, p, seed)?;
    Ok(coin_runs_from_flips(&flips, n % 3))
}

/// Phase 1 is `1..=m`; phase `l > 1` is `1..=m` with every symbol divisible
/// by `l - 1` written twice.
pub fn generate_lz_tight(m: usize, ell0: usize) -> Result<Vec<Symbol>> {
    if ell0 < 1 || ell0 > m {
        return Err(invalid("ell0", format!("need 1 <= ell0 <= m, got ell0 = {ell0}, m = {m}")));
    }
    if m > Symbol::MAX as usize {
        return Err(invalid("m", "too large for the symbol type"));
    }
    let mut w = Vec::new();
    for phase in 1..=ell0 {
        for c in 1..=m {
            w.push(c as Symbol);
            if phase > 1 && c % (phase - 1) == 0 {
                w.push(c as Symbol);
            }
        }
    }
    Ok(w)
}

/// Writes each symbol `v` of `1..=m` as the `ceil(log2 m)`-bit big-endian
/// encoding of `v - 1` (one bit for `m = 1`).
pub fn binarize(w: &[Symbol], m: usize) -> Result<Vec<Symbol>> {
    let width = ceil_log2(m as u64).max(1);
    let mut out = Vec::with_capacity(w.len() * width as usize);
    for &v in w {
        if v == 0 || v as usize > m {
            return Err(invalid("w", format!("symbol {v} outside 1..={m}")));
        }
        let x = v - 1;
        out.extend((0..width).rev().map(|b| bit((x >> b) & 1 == 1)));
    }
    Ok(out)
}

/// `n_prime` colors from `0..colors`, each used `n_prime / colors` or one
/// more times, in shuffled order.
pub fn color_sequence(n_prime: usize, colors: usize, seed: u64) -> Result<Vec<Symbol>> {
    if colors == 0 || colors > n_prime {
        return Err(invalid("colors", format!("need 1 <= colors <= n' = {n_prime}")));
    }
    let mut tau: Vec<Symbol> = (0..n_prime).map(|i| (i % colors) as Symbol).collect();
    tau.shuffle(&mut seed::rng(seed));
    Ok(tau)
}

/// Uniform string over `symbols`.
pub fn random_string(n: usize, symbols: &[Symbol], seed: u64) -> Vec<Symbol> {
    let mut rng = seed::rng(seed);
    (0..n).map(|_| symbols[rng.gen_range(0..symbols.len())]).collect()
}

pub fn random_binary(n: usize, seed: u64) -> Vec<Symbol> {
    random_string(n, &[ZERO, ONE], seed)
}

/// Alternating binary runs, each of length 1 or 8 with probability 1/2.
pub fn planted_run_mix(n: usize, seed: u64) -> Vec<Symbol> {
    let mut rng = seed::rng(seed);
    let mut w = Vec::with_capacity(n + 8);
    let mut next = false;
    while w.len() < n {
        let len = if rng.gen_bool(0.5) { 1 } else { 8 };
        w.extend(std::iter::repeat_n(bit(next), len));
        next = !next;
    }
    w.truncate(n);
    w
}

/// Lazily built string whose `i`-th block of length `k` is a random string
/// fixed per color of `tau[i]`.
///
/// Reading a position of an unseen block reads exactly one position of
/// `tau`; blocks and colors are memoized.
pub struct ColorsToLz {
    tau: Mutex<QueryCountedString>,
    k: usize,
    alphabet_size: usize,
    seed: u64,
    state: Mutex<Memo>,
}

#[derive(Default)]
struct Memo {
    color_of_block: HashMap<usize, Symbol>,
    block_of_color: HashMap<Symbol, Arc<[Symbol]>>,
}

/// Block length `ceil(1 / alpha_prime)`.
pub fn colors_to_lz_block_len(alpha_prime: f64) -> usize {
    (1.0 / alpha_prime).ceil() as usize
}

/// Wraps `tau` as a lazy string of length `n' * ceil(1 / alpha_prime)`.
pub fn generate_colors_to_lz(
    tau: QueryCountedString,
    alpha_prime: f64,
    alphabet_size: usize,
    seed: u64,
) -> Result<Arc<ColorsToLz>> {
    let n_prime = tau.len() as f64;
    if !(alpha_prime > 1.0 / n_prime && alpha_prime < 1.0) {
        return Err(invalid(
            "alpha_prime",
            format!("{alpha_prime} not in (1/n', 1) for n' = {n_prime}"),
        ));
    }
    if alphabet_size < 2 {
        return Err(invalid("alphabet_size", "must be at least 2"));
    }
    Ok(Arc::new(ColorsToLz {
        tau: Mutex::new(tau),
        k: colors_to_lz_block_len(alpha_prime),
        alphabet_size,
        seed,
        state: Mutex::new(Memo::default()),
    }))
}

impl ColorsToLz {
    pub fn block_len(&self) -> usize {
        self.k
    }

    pub fn tau_queries(&self) -> u64 {
        self.tau.lock().expect("tau lock").queries()
    }

    /// Distinct blocks materialized so far.
    pub fn blocks_touched(&self) -> usize {
        self.state.lock().expect("memo lock").color_of_block.len()
    }

    /// The lazy string behind a fresh query counter.
    pub fn accessor(self: &Arc<Self>) -> QueryCountedString {
        QueryCountedString::from_source(Arc::clone(self) as Arc<dyn SymbolSource>, self.alphabet_size)
    }

    pub fn materialize(&self) -> Vec<Symbol> {
        (0..self.len()).map(|i| self.symbol(i)).collect()
    }

    fn block_for_color(&self, color: Symbol) -> Vec<Symbol> {
        let mut rng = seed::rng(seed::derive(self.seed, u64::from(color)));
        (0..self.k)
            .map(|_| rng.gen_range(0..self.alphabet_size as u64) as Symbol)
            .collect()
    }

    fn block(&self, b: usize) -> Arc<[Symbol]> {
        let mut memo = self.state.lock().expect("memo lock");
        let color = match memo.color_of_block.get(&b) {
            Some(&c) => c,
            None => {
                let c = self.tau.lock().expect("tau lock").get(b);
                memo.color_of_block.insert(b, c);
                c
            }
        };
        if let Some(block) = memo.block_of_color.get(&color) {
            return Arc::clone(block);
        }
        let block: Arc<[Symbol]> = self.block_for_color(color).into();
        memo.block_of_color.insert(color, Arc::clone(&block));
        block
    }
}

impl SymbolSource for ColorsToLz {
    fn len(&self) -> usize {
        self.tau.lock().expect("tau lock").len() * self.k
    }

    fn symbol(&self, index: usize) -> Symbol {
        self.block(index / self.k)[index % self.k]
    }
}
