use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_compress-est"));
    c.env_remove("COMPRESS_EST_SEED");
    c
}

fn json(out: &std::process::Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn exact_reports_costs() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("w");
    std::fs::write(&f, b"abab").unwrap();
    let out = bin().arg("exact").arg(&f).output().unwrap();
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["lz_cost"], 3);
    assert_eq!(v["n"], 4);
    assert_eq!(v["alphabet_size"], 2);
    // four runs of length 1, one bit each for length and symbol
    assert_eq!(v["rle_cost"], 8);
}

#[test]
fn alphabet_override() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("w");
    std::fs::write(&f, b"aabb").unwrap();
    let out = bin().arg("exact").arg(&f).args(["--alphabet-size", "256"]).output().unwrap();
    assert_eq!(json(&out)["rle_cost"], 2 * (2 + 8));
    let out = bin().arg("exact").arg(&f).args(["--alphabet-size", "1"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn help_lists_every_flag() {
    let out = bin().args(["gen", "--help"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for flag in ["--family", "--tau", "--n-prime", "--alpha-prime", "--binarize", "--emit-meta", "--out", "--seed"] {
        assert!(text.contains(flag), "{flag}");
    }
    let out = bin().args(["rle-est", "--help"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("COMPRESS_EST_SEED"));
    assert!(text.contains("--mode"));
}

#[test]
fn distinguish_gap_too_small_fails() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("w");
    std::fs::write(&f, vec![b'1'; 1000]).unwrap();
    let out = bin().arg("lz-distinguish").arg(&f).args(["--lo", "10", "--hi", "30"]).output().unwrap();
    assert!(!out.status.success());
    let out = bin().arg("lz-distinguish").arg(&f).args(["--lo", "10", "--hi", "900"]).output().unwrap();
    assert_eq!(json(&out)["result"]["verdict"], "LOW");
}

#[test]
fn gen_col2lz_from_tau_file() {
    let dir = tempfile::tempdir().unwrap();
    let tau = dir.path().join("tau");
    std::fs::write(&tau, b"abcabcabca").unwrap();
    let out_file = dir.path().join("w");
    let out = bin()
        .args(["gen", "--family", "col2lz", "--alpha-prime", "0.25", "--alphabet-size", "8", "--tau"])
        .arg(&tau)
        .arg("--out")
        .arg(&out_file)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let w = std::fs::read(&out_file).unwrap();
    assert_eq!(w.len(), 40);
    assert_eq!(w[0..4], w[12..16]);
}

#[test]
fn gen_requires_family_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["gen", "--family", "wk", "--n", "100", "--out"])
        .arg(dir.path().join("w"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--k"));
    let out = bin()
        .args(["gen", "--family", "lztight", "--m", "300", "--ell0", "2", "--out"])
        .arg(dir.path().join("w"))
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn campaign_exit_code_follows_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.toml");
    std::fs::write(
        &good,
        "[[campaign]]\nname = \"g\"\ntrials = 4\nestimator = { kind = \"rle_additive\", epsilon = 0.1 }\n\
         instance = { source = \"alternating\", n = 1000 }\n",
    )
    .unwrap();
    let out = bin().args(["campaign", "run"]).arg(&good).output().unwrap();
    assert!(out.status.success());
    let result = dir.path().join("result.json");
    std::fs::write(&result, &out.stdout).unwrap();
    let audit = bin().args(["campaign", "audit"]).arg(&result).output().unwrap();
    assert!(audit.status.success());
    assert_eq!(json(&audit)["violations"], 0);

    let bad = dir.path().join("bad.toml");
    std::fs::write(
        &bad,
        "[[campaign]]\nname = \"b\"\ntrials = 2\nestimator = { kind = \"colors\", lambda = 0.5 }\n\
         instance = { source = \"constant\", n = 100 }\n",
    )
    .unwrap();
    let out = bin().args(["campaign", "run"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["all_met"], false);
}

#[test]
fn timing_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(
        &cfg,
        "[[campaign]]\nname = \"t\"\ntrials = 1\nestimator = { kind = \"rle_search\" }\n\
         instance = { source = \"alternating\", n = 1000 }\n",
    )
    .unwrap();
    let plain = bin().args(["campaign", "run"]).arg(&cfg).output().unwrap();
    assert!(json(&plain)["campaigns"][0].get("wall_time_ms").is_none());
    let timed = bin().args(["campaign", "run", "--timing"]).arg(&cfg).output().unwrap();
    assert!(json(&timed)["campaigns"][0]["wall_time_ms"].is_number());
}
