use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_pitchtrack");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn pitchtrack")
}

fn write_small_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("small.toml");
    fs::write(
        &path,
        "[scenario]\nn_tracks = 12\nn_frames = 120\n\n[grid]\nseeds = 1\nbase_seed = 7\n",
    )
    .unwrap();
    path
}

#[test]
fn generate_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_small_config(tmp.path());
    for sub in ["a", "b"] {
        let out = tmp.path().join(sub);
        let res = run(&[
            "generate",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "5",
            "--detector",
            "q40",
            "--dataset",
            "q50",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(res.status.success(), "generate failed: {:?}", res);
    }
    for name in ["gt.txt", "dets.txt", "dets.emb.csv"] {
        let a = fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = fs::read(tmp.path().join("b").join(name)).unwrap();
        assert!(!a.is_empty(), "{name} is empty");
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn generate_track_eval_roundtrip() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_small_config(tmp.path());
    let gen = tmp.path().join("gen");
    let res = run(&[
        "generate",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "5",
        "--out",
        gen.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "generate failed: {:?}", res);

    let hyp = tmp.path().join("hyp.txt");
    for _ in 0..2 {
        let res = run(&[
            "track",
            "--dets",
            gen.join("dets.txt").to_str().unwrap(),
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            hyp.to_str().unwrap(),
        ]);
        assert!(res.status.success(), "track failed: {:?}", res);
    }
    let first = fs::read(&hyp).unwrap();
    assert!(!first.is_empty());

    let res = run(&[
        "track",
        "--dets",
        gen.join("dets.txt").to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        hyp.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    assert_eq!(first, fs::read(&hyp).unwrap(), "track output differs between identical runs");

    let res = run(&[
        "eval",
        "--gt",
        gen.join("gt.txt").to_str().unwrap(),
        "--hyp",
        hyp.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "eval failed: {:?}", res);
    let text = String::from_utf8(res.stdout).unwrap();
    for field in ["mota", "motp", "id_switches", "recall", "precision"] {
        assert!(text.contains(field), "eval output missing {field}: {text}");
    }
}

#[test]
fn track_with_camera_compensation_needs_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_small_config(tmp.path());
    let gen = tmp.path().join("gen");
    let res = run(&[
        "generate",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "5",
        "--out",
        gen.to_str().unwrap(),
    ]);
    assert!(res.status.success());

    let dets = gen.join("dets.txt");
    let hyp = tmp.path().join("hyp.txt");
    let res = run(&[
        "track",
        "--dets",
        dets.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        hyp.to_str().unwrap(),
        "--motion",
        "cva+cmc",
    ]);
    assert_eq!(res.status.code(), Some(1), "cmc without --seed should fail");
    let err = String::from_utf8(res.stderr).unwrap();
    assert!(err.contains("--seed"), "error should mention --seed: {err}");

    let res = run(&[
        "track",
        "--dets",
        dets.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        hyp.to_str().unwrap(),
        "--motion",
        "cva+cmc",
        "--seed",
        "5",
    ]);
    assert!(res.status.success(), "cmc with --seed failed: {:?}", res);
    assert!(!fs::read(&hyp).unwrap().is_empty());
}

#[test]
fn grid_writes_report_and_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_small_config(tmp.path());
    let out = tmp.path().join("gridout");
    let res = run(&[
        "grid",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "grid failed: {:?}", res);

    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("mota"), "report missing header: {report}");
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.contains("detector") && header.contains("dataset"), "csv header: {header}");
    // 12 cells x 5 variants, one row each, plus the header.
    assert_eq!(csv.lines().count(), 61, "unexpected csv row count");
}

#[test]
fn grid_check_flags_miscalibrated_config() {
    // The small scenario is far from the operating point the detector
    // profiles were fitted at, so the self-check has to reject it.
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_small_config(tmp.path());
    let res = run(&["grid", "--config", cfg.to_str().unwrap(), "--check"]);
    assert_eq!(res.status.code(), Some(2), "expected check failure: {:?}", res);
    let err = String::from_utf8(res.stderr).unwrap();
    assert!(err.contains("check failed"), "stderr: {err}");
}

#[test]
fn exit_codes_for_bad_invocations() {
    let res = run(&["--help"]);
    assert_eq!(res.status.code(), Some(0));

    let res = run(&["no-such-command"]);
    assert_eq!(res.status.code(), Some(1));

    let res = run(&["track", "--dets", "/no/such/file.txt", "--out", "/tmp/unused-hyp.txt"]);
    assert_eq!(res.status.code(), Some(1));
    let err = String::from_utf8(res.stderr).unwrap();
    assert!(err.contains("/no/such/file.txt"), "stderr: {err}");

    let res = run(&["generate", "--seed", "not-a-number", "--out", "/tmp/unused-gen"]);
    assert_eq!(res.status.code(), Some(1));
}
