//! End-to-end tests against the built `ccwf` binary.

use std::path::Path;
use std::process::{Command, Output};

fn ccwf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccwf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

fn write_cfg(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

const TINY_GEN: &str = "n_true_clusters = 2\ncluster_size = 30\np = 4\nn_active = 3\n\
                        separation = 0.8\nn_test_sets = 2\ntest_clusters = 1\nseed = 5\n";

#[test]
fn gen_writes_expected_files_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "gen.cfg", TINY_GEN);
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    assert_ok(&ccwf(&["gen", "--config", &cfg, "--out", out_a.to_str().unwrap()]));
    assert_ok(&ccwf(&["gen", "--config", &cfg, "--out", out_b.to_str().unwrap()]));

    let train = read(&out_a.join("train.csv"));
    assert_eq!(train.lines().count(), 1 + 60); // header + 2 x 30 rows
    assert!(train.starts_with("x1,x2,x3,x4,y,label\n"));
    assert!(out_a.join("test_0.csv").exists() && out_a.join("test_1.csv").exists());
    assert!(!out_a.join("test_2.csv").exists());

    let manifest = read(&out_a.join("manifest.json"));
    let v: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    assert_eq!(v["subcommand"], "gen");
    assert_eq!(v["seed"], 5);
    assert_eq!(v["config"]["cluster_size"], "30");

    for name in ["train.csv", "test_0.csv", "test_1.csv", "manifest.json"] {
        assert_eq!(read(&out_a.join(name)), read(&out_b.join(name)), "{name}");
    }
}

#[test]
fn gen_seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "gen.cfg", TINY_GEN);
    let out = dir.path().join("g");
    assert_ok(&ccwf(&["gen", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "9"]));
    let v: serde_json::Value = serde_json::from_str(&read(&out.join("manifest.json"))).unwrap();
    assert_eq!(v["seed"], 9);
    assert_eq!(v["config"]["seed"], "9");
}

#[test]
fn fit_predict_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "gen.cfg", TINY_GEN);
    let data = dir.path().join("data");
    let model = dir.path().join("model");
    let preds = dir.path().join("preds.csv");
    assert_ok(&ccwf(&["gen", "--config", &cfg, "--out", data.to_str().unwrap()]));
    assert_ok(&ccwf(&[
        "fit",
        "--train",
        data.join("train.csv").to_str().unwrap(),
        "--variant",
        "cluster",
        "--k",
        "2",
        "--weights",
        "simple",
        "--outcome",
        "y",
        "--labels",
        "label",
        "--out",
        model.to_str().unwrap(),
        "--seed",
        "3",
    ]));
    assert!(model.join("model.txt").exists());
    assert!(model.join("forest_0.txt").exists());
    let v: serde_json::Value = serde_json::from_str(&read(&model.join("manifest.json"))).unwrap();
    assert_eq!(v["subcommand"], "fit");
    assert_eq!(v["seed"], 3);

    assert_ok(&ccwf(&[
        "predict",
        "--model",
        model.to_str().unwrap(),
        "--features",
        data.join("test_0.csv").to_str().unwrap(),
        "--out",
        preds.to_str().unwrap(),
    ]));
    let text = read(&preds);
    // prediction row count equals the test file's row count
    let test_rows = read(&data.join("test_0.csv")).lines().count() - 1;
    assert_eq!(text.lines().count(), 1 + test_rows);
    assert!(text.starts_with("pred\n"));
    for line in text.lines().skip(1) {
        line.parse::<f64>().unwrap();
    }
    assert!(dir.path().join("preds.manifest.json").exists());
}

const TINY_BENCH: &str = "name = tiny\nn_true_clusters = 2\ncluster_size = 30\np = 4\n\
    n_active = 3\nseparation = 0.8\nn_test_sets = 2\ntest_clusters = 1\nseed = 11\n\
    n_trees = 8\nn_reps = 2\nvariants = cluster:2:simple, merged\nk = 2\nweights = simple\n\
    k_values = 2,3\n";

#[test]
fn bench_emits_summary_per_k_and_variant_and_is_thread_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "bench.cfg", TINY_BENCH);
    let out1 = dir.path().join("r1");
    let out2 = dir.path().join("r2");
    assert_ok(&ccwf(&[
        "bench", "--config", &cfg, "--out", out1.to_str().unwrap(), "--threads", "1", "--gnuplot",
    ]));
    assert_ok(&ccwf(&[
        "bench", "--config", &cfg, "--out", out2.to_str().unwrap(), "--threads", "4", "--gnuplot",
    ]));

    let summary = read(&out1.join("summary.csv"));
    assert_eq!(summary.lines().count(), 1 + 2 * 2); // header + 2 k values x 2 variants
    let records = read(&out1.join("records.csv"));
    assert_eq!(records.lines().count(), 1 + 2 * 2 * 2); // + 2 reps each
    assert!(out1.join("sweep.dat").exists());

    // identical bytes regardless of --threads
    for name in ["summary.csv", "records.csv", "sweep.dat", "manifest.json"] {
        assert_eq!(read(&out1.join(name)), read(&out2.join(name)), "{name}");
    }
}

#[test]
fn bench_modes_emit_their_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let base = "n_true_clusters = 2\ncluster_size = 30\np = 4\nn_active = 3\nseparation = 0.8\n\
                n_test_sets = 2\ntest_clusters = 1\nseed = 11\nn_trees = 6\nn_reps = 2\n";

    let cfg = write_cfg(
        dir.path(),
        "w.cfg",
        &format!("{base}mode = weights\nvariants = cluster, random\nweights = stack_ridge\nk_values = 2\n"),
    );
    let out = dir.path().join("w");
    assert_ok(&ccwf(&["bench", "--config", &cfg, "--out", out.to_str().unwrap()]));
    let w = read(&out.join("weights.csv"));
    assert!(w.starts_with("variant,k,rep,rank,weight\n"));
    assert_eq!(w.lines().count(), 1 + 2 * 2 * 2); // 2 variants x 2 reps x k=2 weights

    let cfg = write_cfg(
        dir.path(),
        "r.cfg",
        &format!("{base}mode = range\nvariants = merged\nk = 2\nweights = simple\n"),
    );
    let out = dir.path().join("r");
    assert_ok(&ccwf(&["bench", "--config", &cfg, "--out", out.to_str().unwrap()]));
    let r = read(&out.join("range.csv"));
    assert_eq!(r.lines().count(), 1 + 3); // cluster, random, multi

    let cfg = write_cfg(
        dir.path(),
        "bv.cfg",
        &format!(
            "{base}mode = bias_variance\nvariants = multi, merged\nweights = simple\n\
             n_train_draws = 2\nn_test_per_cluster = 5\n"
        ),
    );
    let out = dir.path().join("bv");
    assert_ok(&ccwf(&["bench", "--config", &cfg, "--out", out.to_str().unwrap()]));
    let bv = read(&out.join("bias_variance.csv"));
    assert_eq!(bv.lines().count(), 1 + 2);

    let cfg = write_cfg(
        dir.path(),
        "ms.cfg",
        &format!(
            "{base}mode = multistudy\noutcome = multistudy_nonlinear\n\
             variants = cluster:2:simple, multi:2:simple, merged:2:simple\n\
             n_train_studies = 2\nn_test_studies = 1\n"
        ),
    );
    let out = dir.path().join("ms");
    assert_ok(&ccwf(&["bench", "--config", &cfg, "--out", out.to_str().unwrap()]));
    let s = read(&out.join("summary.csv"));
    assert_eq!(s.lines().count(), 1 + 3);
}

#[test]
fn sweep_over_cluster_size() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "s.cfg",
        "n_true_clusters = 2\ncluster_size = 30\np = 4\nn_active = 3\nseparation = 0.8\n\
         n_test_sets = 2\ntest_clusters = 1\nseed = 11\nn_trees = 6\nn_reps = 2\n\
         variants = cluster:2:simple, merged\n",
    );
    let out = dir.path().join("s");
    assert_ok(&ccwf(&[
        "sweep",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--parameter",
        "cluster_size",
        "--values",
        "20,30",
    ]));
    let summary = read(&out.join("summary.csv"));
    assert_eq!(summary.lines().count(), 1 + 2 * 2);
    assert!(summary.contains("cluster_size,20,"));
    let v: serde_json::Value = serde_json::from_str(&read(&out.join("manifest.json"))).unwrap();
    assert_eq!(v["config"]["parameter"], "cluster_size");
    assert_eq!(v["subcommand"], "sweep");
}

#[test]
fn exit_codes_distinguish_usage_io_and_config_errors() {
    let dir = tempfile::tempdir().unwrap();

    // unknown flag -> usage (1)
    let out = ccwf(&["gen", "--nope"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: usage:"));

    // unknown subcommand -> usage (1)
    assert_eq!(code(&ccwf(&["frobnicate"])), 1);

    // unreadable config file -> io (2)
    let out = ccwf(&["bench", "--config", "/nonexistent.cfg", "--out", "/tmp/x"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: io:"));

    // invalid config content -> usage (1)
    let bad = write_cfg(dir.path(), "bad.cfg", "not_a_key = 4\n");
    let out = ccwf(&["bench", "--config", &bad, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error: usage:"), "{err}");
    assert!(err.lines().count() == 1);

    // --help exits 0
    assert_eq!(code(&ccwf(&["--help"])), 0);
    let help = ccwf(&["fit", "--help"]);
    assert_eq!(code(&help), 0);
    let text = String::from_utf8_lossy(&help.stdout);
    for flag in ["--train", "--variant", "--k", "--weights", "--outcome", "--labels", "--seed"] {
        assert!(text.contains(flag), "missing {flag} in fit --help");
    }
}
