//! Repeated seeded runs of one estimator on one instance.
//!
//! Config files are TOML with one `[[campaign]]` table per campaign:
//!
//! ```toml
//! [[campaign]]
//! name = "additive-alternating"
//! trials = 100
//! base_seed = 7
//! success_threshold = 0.9
//! output = "out/additive"        # optional: writes out/additive.{csv,json}
//! estimator = { kind = "rle_additive", epsilon = 0.05 }
//! instance = { source = "alternating", n = 100000 }
//! ```
//!
//! Trial `i` runs with seed `derive(base_seed, i)` on a fresh query counter.
//! A trial passes when its report meets its own `(lambda, eps)` contract
//! against the exact value, which is computed once per campaign.
//!
//! CSV columns: `trial,seed,estimate,exact,queries,ceiling,lambda,epsilon,pass,error`.
//! Failed trials leave `estimate`, `queries`, `lambda` and `epsilon` empty
//! and carry the message in `error`. The JSON result holds the same rows.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{ensure, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sublinear_compress::seed;

use crate::estimator::{EstimatorSpec, Target};
use crate::instance::InstanceSpec;

fn default_threshold() -> f64 {
    2.0 / 3.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub name: String,
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Smallest success rate for the campaign to count as met.
    #[serde(default = "default_threshold")]
    pub success_threshold: f64,
    /// Path stem for the `.csv` and `.json` outputs, relative to the config file.
    #[serde(default)]
    pub output: Option<PathBuf>,
    pub estimator: EstimatorSpec,
    pub instance: InstanceSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignFile {
    #[serde(rename = "campaign")]
    pub campaigns: Vec<CampaignConfig>,
}

impl CampaignFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub estimate: Option<f64>,
    pub exact: f64,
    pub queries: Option<u64>,
    pub ceiling: f64,
    pub lambda: Option<f64>,
    pub epsilon: Option<f64>,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub passes: usize,
    pub success_rate: f64,
    pub mean_queries: f64,
    pub max_queries: u64,
    pub ceiling_violations: usize,
    pub threshold: f64,
    pub met: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub name: String,
    pub base_seed: u64,
    pub trials: usize,
    pub estimator: EstimatorSpec,
    pub target: Target,
    pub n: usize,
    pub alphabet_size: usize,
    pub exact: f64,
    pub aggregate: Aggregate,
    pub rows: Vec<TrialRow>,
    /// Only recorded on request, so that replays stay byte-identical.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl CampaignResult {
    pub fn to_csv(&self) -> Result<String> {
        let mut out = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            out.serialize(row)?;
        }
        Ok(String::from_utf8(out.into_inner()?)?)
    }
}

/// Runs every trial (in parallel, rows in trial order), then writes the
/// CSV and JSON outputs if the config names a path.
pub fn run_campaign(config: &CampaignConfig, base_dir: &Path, timing: bool) -> Result<CampaignResult> {
    ensure!(config.trials >= 1, "campaign {:?}: trials must be at least 1", config.name);
    let started = Instant::now();
    let instance = config.instance.load(base_dir)?;
    let target = config.estimator.target();
    let exact = target.exact(&instance.symbols, instance.alphabet_size)?;
    let w = instance.accessor()?;
    let n = w.len();
    let ceiling = config.estimator.query_ceiling(n, instance.alphabet_size, exact);

    let rows: Vec<TrialRow> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = seed::derive(config.base_seed, trial as u64);
            match config.estimator.run(&mut w.fresh_view(), seed) {
                Ok(r) => TrialRow {
                    trial,
                    seed,
                    estimate: Some(r.estimate),
                    exact,
                    queries: Some(r.queries_used),
                    ceiling,
                    lambda: Some(r.lambda),
                    epsilon: Some(r.epsilon),
                    pass: r.meets_contract(exact, n),
                    error: None,
                },
                Err(e) => TrialRow {
                    trial,
                    seed,
                    estimate: None,
                    exact,
                    queries: None,
                    ceiling,
                    lambda: None,
                    epsilon: None,
                    pass: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let passes = rows.iter().filter(|r| r.pass).count();
    let queries: Vec<u64> = rows.iter().filter_map(|r| r.queries).collect();
    let mean_queries = if queries.is_empty() {
        0.0
    } else {
        queries.iter().sum::<u64>() as f64 / queries.len() as f64
    };
    let success_rate = passes as f64 / config.trials as f64;
    let aggregate = Aggregate {
        passes,
        success_rate,
        mean_queries,
        max_queries: queries.iter().copied().max().unwrap_or(0),
        ceiling_violations: queries.iter().filter(|&&q| q as f64 > ceiling).count(),
        threshold: config.success_threshold,
        met: success_rate >= config.success_threshold,
    };
    let result = CampaignResult {
        name: config.name.clone(),
        base_seed: config.base_seed,
        trials: config.trials,
        estimator: config.estimator.clone(),
        target,
        n,
        alphabet_size: instance.alphabet_size,
        exact,
        aggregate,
        rows,
        wall_time_ms: timing.then(|| started.elapsed().as_secs_f64() * 1000.0),
    };

    if let Some(stem) = &config.output {
        let stem = base_dir.join(stem);
        if let Some(parent) = stem.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(stem.with_extension("csv"), result.to_csv()?)?;
        std::fs::write(stem.with_extension("json"), serde_json::to_string_pretty(&result)?)?;
    }
    Ok(result)
}

/// Output of `campaign run`: every campaign of one config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub campaigns: Vec<CampaignResult>,
    pub all_met: bool,
}

pub fn run_file(file: &CampaignFile, base_dir: &Path, timing: bool) -> Result<CampaignReport> {
    let campaigns = file
        .campaigns
        .iter()
        .map(|c| run_campaign(c, base_dir, timing))
        .collect::<Result<Vec<_>>>()?;
    let all_met = campaigns.iter().all(|c| c.aggregate.met);
    Ok(CampaignReport { campaigns, all_met })
}
