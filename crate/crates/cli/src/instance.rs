use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sublinear_compress::generators::{self, GeneratorSpec};
use sublinear_compress::{QueryCountedString, Symbol};

/// Where a campaign's input string comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum InstanceSpec {
    /// Raw bytes; the alphabet defaults to the number of distinct bytes.
    File {
        path: PathBuf,
        #[serde(default)]
        alphabet_size: Option<usize>,
    },
    /// `0101...` of length `n`.
    Alternating { n: usize },
    /// `n` ones.
    Constant { n: usize },
    /// Uniform over `alphabet_size` symbols.
    Random { n: usize, alphabet_size: usize, seed: u64 },
    /// Alternating runs of length 1 or 8.
    RunMix { n: usize, seed: u64 },
    /// Shuffled sequence of `colors` colors, each used about equally often.
    ColorSequence { n: usize, colors: usize, seed: u64 },
    Generator { generator: GeneratorSpec },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub symbols: Vec<Symbol>,
    pub alphabet_size: usize,
}

impl Instance {
    pub fn accessor(&self) -> Result<QueryCountedString> {
        Ok(QueryCountedString::from_symbols(self.symbols.clone(), self.alphabet_size)?)
    }
}

impl InstanceSpec {
    /// Materializes the string. Relative file paths resolve against `base`.
    pub fn load(&self, base: &Path) -> Result<Instance> {
        let binary = |symbols: Vec<Symbol>| Instance {
            symbols,
            alphabet_size: 2,
        };
        Ok(match self {
            InstanceSpec::File { path, alphabet_size } => {
                let path = base.join(path);
                let w = QueryCountedString::from_file(&path, *alphabet_size)
                    .with_context(|| format!("reading {}", path.display()))?;
                let alphabet_size = w.alphabet_size();
                Instance {
                    symbols: w.fresh_view().read_all(),
                    alphabet_size,
                }
            }
            InstanceSpec::Alternating { n } => binary(
                (0..*n)
                    .map(|i| if i % 2 == 0 { generators::ZERO } else { generators::ONE })
                    .collect(),
            ),
            InstanceSpec::Constant { n } => binary(vec![generators::ONE; *n]),
            InstanceSpec::Random { n, alphabet_size, seed } => {
                anyhow::ensure!(*alphabet_size >= 2, "alphabet_size must be at least 2");
                let symbols: Vec<Symbol> = (0..*alphabet_size as Symbol).collect();
                Instance {
                    symbols: generators::random_string(*n, &symbols, *seed),
                    alphabet_size: *alphabet_size,
                }
            }
            InstanceSpec::RunMix { n, seed } => binary(generators::planted_run_mix(*n, *seed)),
            InstanceSpec::ColorSequence { n, colors, seed } => Instance {
                symbols: generators::color_sequence(*n, *colors, *seed)?,
                alphabet_size: (*colors).max(2),
            },
            InstanceSpec::Generator { generator } => {
                let g = generator.generate()?;
                Instance {
                    symbols: g.symbols,
                    alphabet_size: g.alphabet_size,
                }
            }
        })
    }
}
