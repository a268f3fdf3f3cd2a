use std::path::Path;

use compress_harness::audit::{audit_queries, query_growth};
use compress_harness::campaign::{run_campaign, run_file, CampaignConfig, CampaignFile};
use compress_harness::{EstimatorSpec, InstanceSpec};

fn config(name: &str, trials: usize, estimator: EstimatorSpec, instance: InstanceSpec) -> CampaignConfig {
    CampaignConfig {
        name: name.into(),
        trials,
        base_seed: 17,
        success_threshold: 0.9,
        output: None,
        estimator,
        instance,
    }
}

#[test]
fn additive_on_alternating_always_succeeds() {
    let c = config(
        "alt",
        100,
        EstimatorSpec::RleAdditive { epsilon: 0.05 },
        InstanceSpec::Alternating { n: 100_000 },
    );
    let r = run_campaign(&c, Path::new("."), false).unwrap();
    assert_eq!(r.aggregate.success_rate, 1.0);
    assert_eq!(r.exact, 200_000.0);
    assert!(r.rows.iter().all(|row| row.estimate == Some(200_000.0)));
    assert!(r.aggregate.met);
    assert!(r.wall_time_ms.is_none());
    let trials: Vec<usize> = r.rows.iter().map(|row| row.trial).collect();
    assert_eq!(trials, (0..100).collect::<Vec<_>>());
}

#[test]
fn zero_trials_is_an_error() {
    let c = config("none", 0, EstimatorSpec::RleSearch {}, InstanceSpec::Constant { n: 10 });
    assert!(run_campaign(&c, Path::new("."), false).is_err());
}

#[test]
fn replay_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(
        "replay",
        20,
        EstimatorSpec::RleBucketed { epsilon: 0.1, delta: 0.2 },
        InstanceSpec::RunMix { n: 20_000, seed: 1 },
    );
    c.output = Some("out/replay".into());
    run_campaign(&c, dir.path(), false).unwrap();
    let first = std::fs::read(dir.path().join("out/replay.csv")).unwrap();
    let first_json = std::fs::read(dir.path().join("out/replay.json")).unwrap();
    run_campaign(&c, dir.path(), false).unwrap();
    assert_eq!(first, std::fs::read(dir.path().join("out/replay.csv")).unwrap());
    assert_eq!(first_json, std::fs::read(dir.path().join("out/replay.json")).unwrap());
    let header = String::from_utf8(first).unwrap();
    assert!(header.starts_with("trial,seed,estimate,exact,queries,ceiling,lambda,epsilon,pass,error\n"));
}

#[test]
fn json_mirrors_csv_rows() {
    let c = config(
        "mirror",
        5,
        EstimatorSpec::Colors { lambda: 2.0, delta: None },
        InstanceSpec::ColorSequence { n: 1000, colors: 30, seed: 2 },
    );
    let r = run_campaign(&c, Path::new("."), false).unwrap();
    let text = r.to_csv().unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<compress_harness::TrialRow> = reader.deserialize().collect::<Result<_, _>>().unwrap();
    assert_eq!(rows, r.rows);
    let back: compress_harness::CampaignResult =
        serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(back, r);
}

#[test]
fn parameter_errors_mark_rows_invalid() {
    let c = config(
        "bad",
        3,
        EstimatorSpec::RleAdditive { epsilon: 1.5 },
        InstanceSpec::Alternating { n: 100 },
    );
    let r = run_campaign(&c, Path::new("."), false).unwrap();
    assert_eq!(r.aggregate.passes, 0);
    assert!(!r.aggregate.met);
    for row in &r.rows {
        assert!(!row.pass);
        assert!(row.estimate.is_none());
        assert!(row.error.as_deref().unwrap().contains("epsilon"));
    }
    let csv = r.to_csv().unwrap();
    assert!(csv.lines().nth(1).unwrap().contains(",,"));
}

#[test]
fn toml_config_parses() {
    let text = r#"
[[campaign]]
name = "a"
trials = 3
base_seed = 5
estimator = { kind = "rle_additive", epsilon = 0.1 }
instance = { source = "random", n = 5000, alphabet_size = 4, seed = 9 }

[[campaign]]
name = "b"
trials = 2
success_threshold = 0.5
estimator = { kind = "lz", a = 8.0, epsilon = 0.05 }

[campaign.instance]
source = "generator"
generator = { family = "wk", n = 4096, k = 8, seed = 1 }
"#;
    let file = CampaignFile::parse(text).unwrap();
    assert_eq!(file.campaigns.len(), 2);
    assert_eq!(file.campaigns[1].success_threshold, 0.5);
    assert_eq!(file.campaigns[0].success_threshold, 2.0 / 3.0);
    let report = run_file(&file, Path::new("."), false).unwrap();
    assert!(report.all_met);
}

#[test]
fn audit_flags_runs_above_ceiling() {
    let c = config(
        "audit",
        4,
        EstimatorSpec::RleAdditive { epsilon: 0.1 },
        InstanceSpec::Random { n: 50_000, alphabet_size: 2, seed: 3 },
    );
    let mut r = run_campaign(&c, Path::new("."), false).unwrap();
    assert_eq!(audit_queries([&r]).violations, 0);
    r.rows[2].ceiling = 1.0;
    let table = audit_queries([&r]);
    assert_eq!(table.violations, 1);
    assert!(table.rows[2].flagged);
    assert!(table.max_ratio > 1.0);
}

#[test]
fn additive_reads_grow_when_epsilon_halves() {
    let run = |epsilon: f64| {
        let c = config(
            "scale",
            5,
            EstimatorSpec::RleAdditive { epsilon },
            InstanceSpec::Random { n: 1_000_000, alphabet_size: 2, seed: 4 },
        );
        run_campaign(&c, Path::new("."), false).unwrap()
    };
    let growth = query_growth(&run(0.1), &run(0.05));
    assert!((2.0..=32.0).contains(&growth), "{growth}");
}

#[test]
fn lz_reads_shrink_when_a_doubles() {
    let run = |a: f64| {
        let c = config(
            "scale",
            3,
            EstimatorSpec::Lz { a, epsilon: 0.0005 },
            InstanceSpec::Random { n: 300_000, alphabet_size: 2, seed: 5 },
        );
        run_campaign(&c, Path::new("."), false).unwrap()
    };
    let (small, large) = (run(512.0), run(1024.0));
    assert_eq!(audit_queries([&small, &large]).violations, 0);
    let shrink = 1.0 / query_growth(&small, &large);
    assert!((2.0..=32.0).contains(&shrink), "{shrink}");
}
