use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sublinear_compress::generators::{generate_coin_runs, generate_lz_tight, generate_wk, planted_run_mix};
use sublinear_compress::oracle::{lz77_parse, verify_structural_lemmas, LzSymbol};
use sublinear_compress::{exact_distinct_substrings, exact_lz_cost, exact_rle_cost, Symbol};

fn random_string(rng: &mut ChaCha8Rng, n: usize, sigma: u32) -> Vec<Symbol> {
    (0..n).map(|_| rng.gen_range(0..sigma)).collect()
}

fn scan_rle(w: &[Symbol], sigma: usize) -> u64 {
    let bits = |x: u64| 64 - (x - 1).leading_zeros() as u64;
    let s = if sigma <= 1 { 0 } else { bits(sigma as u64) };
    let mut total = 0;
    let mut i = 0;
    while i < w.len() {
        let mut j = i;
        while j < w.len() && w[j] == w[i] {
            j += 1;
        }
        total += bits(j as u64 - i as u64 + 1) + s;
        i = j;
    }
    total
}

fn quadratic_lz(w: &[Symbol]) -> u64 {
    let mut count = 0;
    let mut t = 0;
    while t < w.len() {
        let mut best = 0;
        for p in 0..t {
            let mut l = 0;
            while t + l < w.len() && w[p + l] == w[t + l] {
                l += 1;
            }
            best = best.max(l);
        }
        t += best.max(1);
        count += 1;
    }
    count
}

#[test]
fn oracles_match_naive_versions() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..300 {
        let sigma = [2u32, 4, 26][i % 3];
        let n = rng.gen_range(1..=512);
        // small alphabets and occasional long runs
        let w: Vec<Symbol> = if i % 5 == 0 {
            random_string(&mut rng, n, sigma).into_iter().map(|c| c / 2).collect()
        } else {
            random_string(&mut rng, n, sigma)
        };
        assert_eq!(
            exact_rle_cost(&w, sigma as usize).unwrap().total_cost,
            scan_rle(&w, sigma as usize)
        );
        assert_eq!(exact_lz_cost(&w).unwrap().total_cost, quadratic_lz(&w));
    }
}

#[test]
fn parse_sources_precede_targets() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let w = random_string(&mut rng, 300, 3);
        for seg in lz77_parse(&w).unwrap() {
            if let LzSymbol::Copy { source, length } = seg.symbol {
                // 1-based positions
                assert!(source < seg.start);
                let (src, dst) = (source - 1, seg.start - 1);
                assert_eq!(&w[src..src + length], &w[dst..dst + length]);
            }
        }
    }
}

#[test]
fn distinct_counts_match_window_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let w = random_string(&mut rng, 400, 3);
    for l in 1..=12 {
        let set: HashSet<&[Symbol]> = w.windows(l).collect();
        assert_eq!(exact_distinct_substrings(&w, l).unwrap(), set.len());
    }
}

#[test]
fn structural_bounds_hold_on_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut corpus: Vec<Vec<Symbol>> = (0..200)
        .map(|i| random_string(&mut rng, 512, [2, 4, 26][i % 3]))
        .collect();
    corpus.push(generate_wk(512, 8, 1).unwrap());
    corpus.push(generate_coin_runs(512, 0.5, 1).unwrap());
    corpus.push(generate_lz_tight(16, 16).unwrap());
    corpus.push(planted_run_mix(512, 1));
    corpus.push(vec![1; 512]);
    for w in &corpus {
        let report = verify_structural_lemmas(w, 16).unwrap();
        assert!(report.all_hold(), "{:?}", report.violations());
    }
}
