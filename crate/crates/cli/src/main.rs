use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use sublinear_compress::generators::{self, GeneratorSpec};
use sublinear_compress::lz::{distinguish_compressible, lz_estimate_detailed};
use sublinear_compress::oracle::{exact_color_count, exact_lz_cost, exact_rle_cost};
use sublinear_compress::rle::{
    rle_additive_estimate, rle_bucketed_detailed, rle_multiplicative_search_trace, rle_refined_search_trace,
};
use sublinear_compress::{QueryCountedString, RleConfig64, Symbol};

use compress_harness::audit::audit_queries;
use compress_harness::campaign::{run_file, CampaignFile, CampaignReport, CampaignResult};

#[derive(Parser)]
#[command(name = "compress-est", version, about = "Sublinear estimates of RLE and LZ77 compressibility")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Input {
    /// Input file, read as raw bytes.
    file: PathBuf,
    /// Alphabet size; defaults to the number of distinct bytes (at least 2).
    #[arg(long)]
    alphabet_size: Option<usize>,
}

#[derive(clap::Args)]
struct SeedArg {
    /// Random seed.
    #[arg(long, env = "COMPRESS_EST_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum RleMode {
    /// (1, eps)-estimate.
    Additive,
    /// (3, eps)-estimate with confidence 1 - delta.
    Bucketed,
    /// 4-multiplicative estimate.
    Search,
    /// (1 + gamma)-multiplicative estimate.
    Refined,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Family {
    /// Blocks of ones with planted zeros (needs --n, --k).
    Wk,
    /// Runs from biased coins (needs --n, --p).
    Coin,
    /// Phased construction over 1..=m (needs --m, --ell0).
    Lztight,
    /// Random blocks per color of a color sequence (needs --alpha-prime and
    /// either --tau or --n-prime with --colors).
    Col2lz,
}

#[derive(Subcommand)]
enum Command {
    /// Exact RLE cost, LZ77 cost and number of distinct symbols.
    Exact {
        #[command(flatten)]
        input: Input,
    },
    /// Estimate the RLE cost.
    RleEst {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "additive")]
        mode: RleMode,
        /// Additive error fraction (additive and bucketed modes).
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        /// Failure probability (bucketed mode).
        #[arg(long, default_value_t = 1.0 / 3.0)]
        delta: f64,
        /// Multiplicative slack (refined mode).
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Estimate the LZ77 cost.
    LzEst {
        #[command(flatten)]
        input: Input,
        /// Multiplicative factor.
        #[arg(long = "A", default_value_t = 8.0)]
        a: f64,
        /// Additive error fraction.
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Decide whether the LZ77 cost is at most --lo or at least --hi.
    LzDistinguish {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Estimate the number of distinct symbols.
    ColorsEst {
        #[command(flatten)]
        input: Input,
        /// Multiplicative factor, above 1.
        #[arg(long)]
        lambda: f64,
        /// Failure probability; enables median amplification.
        #[arg(long)]
        delta: Option<f64>,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Generate an instance and write it as raw bytes.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        ell0: Option<usize>,
        /// Color sequence file (col2lz).
        #[arg(long, conflicts_with_all = ["n_prime", "colors"])]
        tau: Option<PathBuf>,
        /// Length of the generated color sequence (col2lz).
        #[arg(long)]
        n_prime: Option<usize>,
        /// Number of colors in the generated color sequence (col2lz).
        #[arg(long)]
        colors: Option<usize>,
        #[arg(long)]
        alpha_prime: Option<f64>,
        /// Block alphabet size (col2lz), at most 256.
        #[arg(long, default_value_t = 2)]
        alphabet_size: usize,
        /// Write each symbol of 1..=m as ceil(log2 m) bits (lztight).
        #[arg(long)]
        binarize: bool,
        /// Also write FILE.meta.json with exact costs.
        #[arg(long)]
        emit_meta: bool,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Batch experiments.
    Campaign {
        #[command(subcommand)]
        action: CampaignAction,
    },
}

#[derive(Subcommand)]
enum CampaignAction {
    /// Run every [[campaign]] of a TOML config; exit code 1 unless all meet
    /// their success threshold.
    Run {
        config: PathBuf,
        /// Record wall time in the output (breaks byte-identical replays).
        #[arg(long)]
        timing: bool,
    },
    /// Compare measured reads with ceilings in a `campaign run` result;
    /// exit code 1 if any run exceeds its ceiling.
    Audit { result: PathBuf },
}

fn load(input: &Input) -> Result<QueryCountedString> {
    QueryCountedString::from_file(&input.file, input.alphabet_size)
        .with_context(|| format!("reading {}", input.file.display()))
}

fn describe(w: &QueryCountedString) -> serde_json::Value {
    json!({ "n": w.len(), "alphabet_size": w.alphabet_size() })
}

fn print(value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn need<T>(value: Option<T>, flag: &str, family: &str) -> Result<T> {
    value.with_context(|| format!("--{flag} is required for --family {family}"))
}

fn exact_summary(symbols: &[Symbol], alphabet_size: usize) -> Result<serde_json::Value> {
    Ok(json!({
        "n": symbols.len(),
        "alphabet_size": alphabet_size,
        "rle_cost": exact_rle_cost(symbols, alphabet_size)?.total_cost,
        "lz_cost": exact_lz_cost(symbols)?.total_cost,
        "distinct_symbols": exact_color_count(symbols)?,
    }))
}

fn to_bytes(symbols: &[Symbol]) -> Result<Vec<u8>> {
    symbols
        .iter()
        .map(|&c| u8::try_from(c).map_err(|_| anyhow::anyhow!("symbol {c} does not fit in a byte; try --binarize")))
        .collect()
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let cfg = RleConfig64::default();
    match cli.command {
        Command::Exact { input } => {
            let w = load(&input)?;
            let symbols = w.fresh_view().read_all();
            print(&exact_summary(&symbols, w.alphabet_size())?)?;
        }
        Command::RleEst {
            input,
            mode,
            epsilon,
            delta,
            gamma,
            seed,
        } => {
            let mut w = load(&input)?;
            let info = describe(&w);
            let out = match mode {
                RleMode::Additive => {
                    let r = rle_additive_estimate(&mut w, epsilon, seed.seed, &cfg)?;
                    json!({ "input": info, "mode": mode, "report": r })
                }
                RleMode::Bucketed => {
                    let (r, table) = rle_bucketed_detailed(&mut w, epsilon, delta, seed.seed, &cfg)?;
                    json!({ "input": info, "mode": mode, "report": r, "buckets": table })
                }
                RleMode::Search => {
                    let (r, rounds) = rle_multiplicative_search_trace(&mut w, seed.seed, &cfg)?;
                    json!({ "input": info, "mode": mode, "report": r, "rounds": rounds })
                }
                RleMode::Refined => {
                    let (r, rounds) = rle_refined_search_trace(&mut w, gamma, seed.seed, &cfg)?;
                    json!({ "input": info, "mode": mode, "report": r, "rounds": rounds })
                }
            };
            print(&out)?;
        }
        Command::LzEst { input, a, epsilon, seed } => {
            let mut w = load(&input)?;
            let info = describe(&w);
            let (r, detail) = lz_estimate_detailed(&mut w, a, epsilon, seed.seed)?;
            print(&json!({ "input": info, "report": r, "detail": detail }))?;
        }
        Command::LzDistinguish { input, lo, hi, seed } => {
            let mut w = load(&input)?;
            let info = describe(&w);
            let d = distinguish_compressible(&mut w, lo, hi, seed.seed)?;
            print(&json!({ "input": info, "lo": lo, "hi": hi, "result": d }))?;
        }
        Command::ColorsEst {
            input,
            lambda,
            delta,
            seed,
        } => {
            let mut w = load(&input)?;
            let info = describe(&w);
            let r = match delta {
                None => sublinear_compress::colors::colors_estimate(&mut w, lambda, seed.seed)?,
                Some(d) => sublinear_compress::colors::colors_estimate_amplified(&mut w, lambda, d, seed.seed)?,
            };
            print(&json!({ "input": info, "report": r }))?;
        }
        Command::Gen {
            family,
            n,
            k,
            p,
            m,
            ell0,
            tau,
            n_prime,
            colors,
            alpha_prime,
            alphabet_size,
            binarize,
            emit_meta,
            out,
            seed,
        } => {
            let seed = seed.seed;
            ensure!(!binarize || matches!(family, Family::Lztight), "--binarize applies to --family lztight only");
            let (spec, mut symbols, mut alphabet) = match family {
                Family::Wk => {
                    let spec = GeneratorSpec::Wk {
                        n: need(n, "n", "wk")?,
                        k: need(k, "k", "wk")?,
                        seed,
                    };
                    let g = spec.generate()?;
                    (json!(spec), g.symbols, g.alphabet_size)
                }
                Family::Coin => {
                    let spec = GeneratorSpec::CoinRuns {
                        n: need(n, "n", "coin")?,
                        p: need(p, "p", "coin")?,
                        seed,
                    };
                    let g = spec.generate()?;
                    (json!(spec), g.symbols, g.alphabet_size)
                }
                Family::Lztight => {
                    let spec = GeneratorSpec::LzTight {
                        m: need(m, "m", "lztight")?,
                        ell0: need(ell0, "ell0", "lztight")?,
                    };
                    let g = spec.generate()?;
                    (json!(spec), g.symbols, g.alphabet_size)
                }
                Family::Col2lz => {
                    ensure!(alphabet_size <= 256, "--alphabet-size must be at most 256");
                    let alpha_prime = need(alpha_prime, "alpha-prime", "col2lz")?;
                    match &tau {
                        Some(path) => {
                            let t = QueryCountedString::from_file(path, None)
                                .with_context(|| format!("reading {}", path.display()))?;
                            let lazy =
                                generators::generate_colors_to_lz(t, alpha_prime, alphabet_size, generators_seed(seed))?;
                            let spec = json!({
                                "family": "colors_to_lz",
                                "tau": path,
                                "alpha_prime": alpha_prime,
                                "alphabet_size": alphabet_size,
                                "seed": seed,
                            });
                            (spec, lazy.materialize(), alphabet_size)
                        }
                        None => {
                            let spec = GeneratorSpec::ColorsToLz {
                                n_prime: need(n_prime, "n-prime", "col2lz")?,
                                colors: need(colors, "colors", "col2lz")?,
                                alpha_prime,
                                alphabet_size,
                                seed,
                            };
                            let g = spec.generate()?;
                            (json!(spec), g.symbols, g.alphabet_size)
                        }
                    }
                }
            };
            if binarize {
                symbols = generators::binarize(&symbols, need(m, "m", "lztight")?)?;
                alphabet = 2;
            }
            std::fs::write(&out, to_bytes(&symbols)?).with_context(|| format!("writing {}", out.display()))?;
            let mut meta = json!({ "out": out, "spec": spec, "binarized": binarize });
            if emit_meta {
                meta["exact"] = exact_summary(&symbols, alphabet)?;
                let path = meta_path(&out);
                std::fs::write(&path, serde_json::to_string_pretty(&meta)?)?;
                meta["meta"] = json!(path);
            } else {
                meta["n"] = json!(symbols.len());
            }
            print(&meta)?;
        }
        Command::Campaign { action } => match action {
            CampaignAction::Run { config, timing } => {
                let file = CampaignFile::load(&config)?;
                let base = config.parent().unwrap_or(Path::new("."));
                let report = run_file(&file, base, timing)?;
                print(&report)?;
                if !report.all_met {
                    std::process::exit(1);
                }
            }
            CampaignAction::Audit { result } => {
                let text = std::fs::read_to_string(&result).with_context(|| format!("reading {}", result.display()))?;
                let campaigns: Vec<CampaignResult> = match serde_json::from_str::<CampaignReport>(&text) {
                    Ok(r) => r.campaigns,
                    Err(_) => match serde_json::from_str::<CampaignResult>(&text) {
                        Ok(c) => vec![c],
                        Err(e) => bail!("{}: not a campaign result: {e}", result.display()),
                    },
                };
                let table = audit_queries(&campaigns);
                print(&table)?;
                if table.violations > 0 {
                    std::process::exit(1);
                }
            }
        },
    }
    Ok(())
}

/// Block seed used for a color sequence read from a file; matches the one
/// [`GeneratorSpec::ColorsToLz`] derives for its own color sequence.
fn generators_seed(seed: u64) -> u64 {
    sublinear_compress::seed::derive(seed, 1)
}

fn meta_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}
