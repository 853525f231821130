use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn phaseron(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phaseron"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all = args.to_vec();
    let out = dir.to_str().unwrap();
    all.extend(["--out", out]);
    phaseron(&all)
}

#[test]
fn writes_expected_files() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("ip");
    let out = run_in(&dir, &["inner-product-binary", "--qubits", "2", "--dump-circuit"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in [
        "pool.csv",
        "pairs.csv",
        "discrepancy.csv",
        "plot_hsgs.csv",
        "plot_hsgs.csv.meta",
        "plot_rotation.csv",
        "metadata.txt",
        "circuit_hsgs.txt",
        "circuit_rotation.txt",
    ] {
        assert!(dir.join(f).exists(), "missing {f}");
    }
    let pairs = fs::read_to_string(dir.join("pairs.csv")).unwrap();
    // 16 vectors of length 4, all ordered pairs, two backends
    assert_eq!(pairs.lines().count(), 1 + 2 * 256);
    let circuit = fs::read_to_string(dir.join("circuit_hsgs.txt")).unwrap();
    assert!(phaseron::Circuit::from_text(&circuit).is_ok());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    fs::write(&cfg, "seed = 5\nmax_steps = 3\nsamples = 20\nmode = \"statevector\"\n").unwrap();
    let dir = tmp.path().join("s");
    let out = run_in(&dir, &["sigmoid", "--config", cfg.to_str().unwrap(), "--max-steps", "2", "--no-stop-on-increase"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let meta = fs::read_to_string(dir.join("metadata.txt")).unwrap();
    assert!(meta.contains("seed = 5\n"));
    assert!(meta.contains("max_steps = 2\n"));
    assert!(meta.contains("mode = statevector\n"));
    assert!(meta.contains("stop_on_cost_increase = false\n"));
    let trajectory = fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    assert!(trajectory.lines().count() <= 2 + 3);
}

#[test]
fn identical_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["binary-perceptron", "--seed", "3", "--restarts", "4", "--max-steps", "20"];
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(run_in(&a, &args).status.success());
    assert!(run_in(&b, &args).status.success());
    for f in ["dataset.csv", "restarts.csv", "affinity.csv", "mean_affinity.csv", "metadata.txt"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(phaseron(&["sigmoid", "--qubits", "0"]).status.code(), Some(2));
    assert_eq!(phaseron(&["sigmoid", "--backend", "both"]).status.code(), Some(2));
    assert_eq!(phaseron(&["sigmoid", "--mode", "quantum"]).status.code(), Some(2));

    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "qubits = \"two\"\n").unwrap();
    assert_eq!(phaseron(&["sigmoid", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
    let unknown = tmp.path().join("unknown.toml");
    fs::write(&unknown, "qbits = 2\n").unwrap();
    assert_eq!(phaseron(&["sigmoid", "--config", unknown.to_str().unwrap()]).status.code(), Some(2));

    let missing = tmp.path().join("missing.toml");
    assert_eq!(phaseron(&["sigmoid", "--config", missing.to_str().unwrap()]).status.code(), Some(3));

    let file = tmp.path().join("file");
    fs::write(&file, b"").unwrap();
    let out = run_in(&file.join("sub"), &["inner-product-continuous", "--vectors", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sub"));
}
