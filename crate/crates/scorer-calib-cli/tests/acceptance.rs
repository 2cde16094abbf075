//! CLI acceptance: byte-determinism of every subcommand (criterion 10 of
//! the library's acceptance suite) plus exit-code and config behavior.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scorer-calib"))
}

fn run_ok(args: &[&str]) -> Output {
    let output = bin().args(args).output().expect("spawn scorer-calib");
    assert!(
        output.status.success(),
        "command {:?} failed\nstdout: {}\nstderr: {}",
        args,
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

fn path_str(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Runs the full pipeline into `dir`, producing every output artifact.
fn run_pipeline(dir: &Path) -> Vec<PathBuf> {
    let p = |name: &str| dir.join(name);
    let data = p("data.jsonl");
    let truth = p("truth.json");
    run_ok(&[
        "synth",
        "--preset",
        "table3",
        "--scorers",
        "8",
        "--pairs",
        "60",
        "--responses-per-scorer",
        "24",
        "--dim",
        "6",
        "--embed-dim",
        "4",
        "--seed",
        "7",
        // pool prefix scored by every scorer, so the case-study pair ids
        // below are guaranteed to exist for scorer s0000
        "--shared-pairs",
        "0.1",
        "--out",
        path_str(&data),
        "--truth",
        path_str(&truth),
    ]);

    let common = [
        "--data",
        path_str(&data),
        "--k",
        "3",
        "--lr",
        "0.02",
        "--batch",
        "16",
        "--epochs",
        "3",
        "--seed",
        "7",
        "--d-e",
        "4",
    ];
    let scorer_ckpt = p("scorer.json");
    let report = p("report.json");
    let mut args = vec!["train"];
    args.extend_from_slice(&common);
    args.extend_from_slice(&[
        "--head",
        "scorer",
        "--loss",
        "ce",
        "--test-fold",
        "0",
        "--val-fold",
        "1",
        "--out",
        path_str(&scorer_ckpt),
        "--report",
        path_str(&report),
    ]);
    run_ok(&args);

    let content_ckpt = p("content.json");
    let mut args = vec!["train"];
    args.extend_from_slice(&common);
    args.extend_from_slice(&[
        "--head",
        "content",
        "--loss",
        "oll",
        "--test-fold",
        "0",
        "--val-fold",
        "1",
        "--out",
        path_str(&content_ckpt),
    ]);
    run_ok(&args);

    let cv_csv = p("cv.csv");
    let mut args = vec!["cv"];
    args.extend_from_slice(&common);
    args.extend_from_slice(&["--head", "universal", "--loss", "mse", "--out", path_str(&cv_csv)]);
    run_ok(&args);

    let eval_json = p("eval.json");
    run_ok(&[
        "eval",
        "--ckpt",
        path_str(&scorer_ckpt),
        "--data",
        path_str(&data),
        "--kappa",
        "all",
        "--out",
        path_str(&eval_json),
    ]);

    let profiles = p("profiles.csv");
    let coords = p("coords.csv");
    let svg = p("embeddings.svg");
    run_ok(&[
        "cluster",
        "--ckpt",
        path_str(&scorer_ckpt),
        "--data",
        path_str(&data),
        "--k",
        "3",
        "--seed",
        "5",
        "--out",
        path_str(&profiles),
        "--coords",
        path_str(&coords),
        "--svg",
        path_str(&svg),
    ]);

    let corr = p("corr.csv");
    run_ok(&[
        "correlate",
        "--ckpt",
        path_str(&scorer_ckpt),
        "--data",
        path_str(&data),
        "--out",
        path_str(&corr),
    ]);

    let case = p("case.json");
    run_ok(&[
        "case-study",
        "--ckpt",
        path_str(&content_ckpt),
        "--scorer-ckpt",
        path_str(&scorer_ckpt),
        "--data",
        path_str(&data),
        "--scorer",
        "s0000",
        "--pairs",
        "p000000,p000001",
        "--out",
        path_str(&case),
    ]);

    let summary = p("summary.csv");
    run_ok(&["report", path_str(&cv_csv), "--out", path_str(&summary)]);

    vec![
        data,
        truth,
        scorer_ckpt,
        report,
        content_ckpt,
        cv_csv,
        eval_json,
        profiles,
        coords,
        svg,
        corr,
        case,
        summary,
    ]
}

#[test]
fn c10_every_subcommand_is_byte_deterministic() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let files_a = run_pipeline(dir_a.path());
    let files_b = run_pipeline(dir_b.path());
    assert_eq!(files_a.len(), files_b.len());
    for (a, b) in files_a.iter().zip(&files_b) {
        let bytes_a = std::fs::read(a).unwrap();
        let bytes_b = std::fs::read(b).unwrap();
        assert!(
            bytes_a == bytes_b,
            "{} differs between identical runs",
            a.file_name().unwrap().to_string_lossy()
        );
        assert!(!bytes_a.is_empty());
    }
    println!(
        "acceptance 10 CLI determinism: PASS ({} artifacts byte-identical across two runs)",
        files_a.len()
    );
}

#[test]
fn cv_is_deterministic_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.jsonl");
    run_ok(&[
        "synth", "--scorers", "6", "--pairs", "40", "--responses-per-scorer", "20", "--dim", "4",
        "--embed-dim", "2", "--seed", "3", "--out", path_str(&data),
    ]);
    let serial = dir.path().join("serial.csv");
    let parallel = dir.path().join("parallel.csv");
    let args = |out: &Path| {
        vec![
            "cv".to_string(),
            "--data".into(),
            path_str(&data).into(),
            "--head".into(),
            "scorer".into(),
            "--loss".into(),
            "ce".into(),
            "--k".into(),
            "3".into(),
            "--lr".into(),
            "0.02".into(),
            "--epochs".into(),
            "2".into(),
            "--seed".into(),
            "1".into(),
            "--d-e".into(),
            "2".into(),
            "--out".into(),
            path_str(out).into(),
        ]
    };
    let out = bin()
        .args(args(&serial))
        .env("SCORER_CALIB_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = bin()
        .args(args(&parallel))
        .env("SCORER_CALIB_THREADS", "3")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(&serial).unwrap(), std::fs::read(&parallel).unwrap());
}

#[test]
fn usage_errors_exit_with_one() {
    // no arguments
    let out = bin().output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());

    // unknown subcommand
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    // conflicting folds
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.jsonl");
    run_ok(&[
        "synth", "--scorers", "4", "--pairs", "20", "--responses-per-scorer", "10", "--dim", "4",
        "--embed-dim", "2", "--seed", "1", "--out", path_str(&data),
    ]);
    let out = bin()
        .args([
            "train", "--data", path_str(&data), "--head", "universal", "--loss", "ce", "--k",
            "3", "--test-fold", "1", "--val-fold", "1", "--out",
            path_str(&dir.path().join("x.json")),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("differ"));

    // missing required option value choices
    let out = bin()
        .args([
            "train", "--data", path_str(&data), "--loss", "ce", "--out",
            path_str(&dir.path().join("x.json")),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--head"));
}

#[test]
fn data_errors_exit_with_two() {
    let out = bin()
        .args([
            "eval", "--ckpt", "/nonexistent/ckpt.json", "--data", "/nonexistent/data.jsonl",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // malformed dataset
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "not json\n").unwrap();
    let out = bin()
        .args([
            "train", "--data", path_str(&bad), "--head", "universal", "--loss", "ce", "--out",
            path_str(&dir.path().join("x.json")),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn help_documents_every_flag_with_defaults() {
    for sub in ["synth", "train", "cv", "eval", "cluster", "correlate", "case-study", "report"] {
        let out = bin().args([sub, "--help"]).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{sub} --help should succeed");
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(text.contains("--help"), "{sub} help is missing flags");
    }
    // subcommands with tunable parameters state their defaults
    for sub in ["synth", "train", "cv", "eval", "cluster"] {
        let out = bin().args([sub, "--help"]).output().unwrap();
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(text.contains("default"), "{sub} help should document defaults");
    }
}

#[test]
fn config_file_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.jsonl");
    run_ok(&[
        "synth", "--scorers", "4", "--pairs", "30", "--responses-per-scorer", "15", "--dim", "4",
        "--embed-dim", "2", "--seed", "2", "--out", path_str(&data),
    ]);
    let config = dir.path().join("exp.toml");
    std::fs::write(
        &config,
        "[train]\nhead = \"universal\"\nloss = \"ce\"\nlr = 0.02\nbatch = 8\nepochs = 2\nseed = 4\nk = 3\nd_e = 2\n",
    )
    .unwrap();

    // config alone supplies head/loss
    let from_file = dir.path().join("from_file.csv");
    run_ok(&[
        "cv", "--data", path_str(&data), "--config", path_str(&config), "--out",
        path_str(&from_file),
    ]);
    let text = std::fs::read_to_string(&from_file).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("universal,ce,"));

    // an explicit flag overrides the file
    let overridden = dir.path().join("overridden.csv");
    run_ok(&[
        "cv", "--data", path_str(&data), "--config", path_str(&config), "--head", "scorer",
        "--out", path_str(&overridden),
    ]);
    let text = std::fs::read_to_string(&overridden).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("scorer,ce,"));

    // unknown keys are rejected before any work starts
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[train]\nlearning_rate = 0.1\n").unwrap();
    let out = bin()
        .args([
            "cv", "--data", path_str(&data), "--config", path_str(&bad), "--head", "scorer",
            "--loss", "ce", "--out", path_str(&dir.path().join("x.csv")),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn eval_kappa_selection_filters_fields() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.jsonl");
    run_ok(&[
        "synth", "--scorers", "4", "--pairs", "30", "--responses-per-scorer", "15", "--dim", "4",
        "--embed-dim", "2", "--seed", "2", "--out", path_str(&data),
    ]);
    let ckpt = dir.path().join("u.json");
    run_ok(&[
        "train", "--data", path_str(&data), "--head", "universal", "--loss", "ce", "--k", "3",
        "--lr", "0.02", "--epochs", "2", "--seed", "2", "--out", path_str(&ckpt),
    ]);
    let out = run_ok(&[
        "eval", "--ckpt", path_str(&ckpt), "--data", path_str(&data), "--kappa", "linear",
    ]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json.get("auc").is_some());
    assert!(json.get("rmse").is_some());
    assert!(json.get("kappa_linear").is_some());
    assert!(json.get("kappa_quadratic").is_none());
    assert!(json.get("kappa_unweighted").is_none());
}

#[test]
fn report_merges_rows_in_table_order() {
    let dir = tempfile::tempdir().unwrap();
    let header = "head,loss,auc_mean,auc_std,rmse_mean,rmse_std,kappa_mean,kappa_std,kappa_weighting\n";
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    std::fs::write(&a, format!("{header}content,oll,0.779,0.004,0.924,0.013,0.641,0.005,quadratic\n")).unwrap();
    std::fs::write(&b, format!("{header}universal,ce,0.765,0.003,0.954,0.014,0.614,0.009,quadratic\n")).unwrap();
    let merged = dir.path().join("merged.csv");
    run_ok(&["report", path_str(&a), path_str(&b), "--out", path_str(&merged)]);
    let text = std::fs::read_to_string(&merged).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "head,loss,auc,rmse,kappa,kappa_weighting");
    assert!(lines[1].starts_with("universal,ce,0.765±0.003,0.954±0.014,0.614±0.009"));
    assert!(lines[2].starts_with("content,oll,0.779±0.004,0.924±0.013,0.641±0.005"));
}
