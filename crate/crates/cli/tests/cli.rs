use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn maxlr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxlr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header and value line of a one-row CSV as pairs.
fn row(o: &Output) -> Vec<(String, String)> {
    let text = stdout(o);
    let mut lines = text.lines();
    let keys = lines.next().unwrap().split(',').map(String::from);
    let vals = lines.next().unwrap().split(',').map(String::from);
    keys.zip(vals).collect()
}

fn field(o: &Output, key: &str) -> String {
    row(o).into_iter().find(|(k, _)| k == key).unwrap().1
}

fn gen_identity(dir: &Path, n: usize) -> String {
    let path = dir.join(format!("i{n}.txt"));
    let p = path.to_str().unwrap();
    let o = maxlr(&["gen", "--class", "identity", "--n", &n.to_string(), "--out", p]);
    assert!(o.status.success());
    p.to_string()
}

#[test]
fn gen_writes_matrix_format() {
    let o = maxlr(&["gen", "--class", "hadamard", "--n", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("2 2"));
    let first: Vec<f64> = lines.next().unwrap().split_whitespace().map(|t| t.parse().unwrap()).collect();
    assert_eq!(first, vec![1.0, 1.0]);

    let bad = maxlr(&["gen", "--class", "hadamard", "--n", "3"]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("power of two"));
}

#[test]
fn diag_on_identity() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_identity(dir.path(), 8);
    let o = maxlr(&["diag", &p, "--rank", "2"]);
    assert!(o.status.success());
    let spik: f64 = field(&o, "spikiness").parse().unwrap();
    assert_eq!(spik, 8.0);
    assert_eq!(field(&o, "numerical_rank"), "8");
    assert_eq!(field(&o, "mu_col").parse::<f64>().unwrap(), 1.0);
    let pretty = maxlr(&["diag", &p, "--pretty"]);
    assert!(stdout(&pretty).lines().any(|l| l.starts_with("spikiness")));
}

#[test]
fn construct_both_methods() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_identity(dir.path(), 16);
    let y = dir.path().join("y.txt");
    let ys = y.to_str().unwrap();
    for method in ["jl", "hw"] {
        let o = maxlr(&["construct", &p, "--method", method, "--rank", "4", "--trials", "3", "--seed", "9", "--out", ys]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(field(&o, "method"), method);
        assert_eq!(field(&o, "trials_used"), "3");
        let err: f64 = field(&o, "achieved_error").parse().unwrap();
        assert!(err > 0.0 && err.is_finite());
        assert!(fs::read_to_string(&y).unwrap().starts_with("16 16\n"));
    }
}

#[test]
fn approx_and_distance_on_identity_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_identity(dir.path(), 2);
    let dump = dir.path().join("cert.txt");
    let o = maxlr(&["approx", &p, "--rank", "1", "--eps", "0.6", "--dump", dump.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(field(&o, "feasible"), "true");
    assert_eq!(field(&o, "stop_reason"), "converged");
    assert!(dump.exists());

    let o = maxlr(&["distance", &p, "--rank", "1", "--bs-tol", "1e-3"]);
    assert!(o.status.success());
    assert_eq!(field(&o, "status"), "ok");
    let eps: f64 = field(&o, "eps_plus").parse().unwrap();
    assert!((0.499..=0.502).contains(&eps), "{eps}");

    // a bad bracket is reported, not fatal
    let o = maxlr(&["distance", &p, "--rank", "1", "--lo", "0.8", "--hi", "0.5"]);
    assert!(o.status.success());
    assert!(field(&o, "status").contains("error"));
}

#[test]
fn sweep_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    fs::write(
        &cfg,
        "axis = \"rank\"\nvalues = [1, 2]\ntrials = 2\nrestarts = 2\nbs_tol = 0.01\nplots = [\"loglog\", \"semilog\"]\n[family]\nclass = \"identity\"\nn = 6\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = maxlr(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["results.csv", "manifest.toml", "plot_loglog.svg", "plot_semilog.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);

    fs::write(&cfg, "axis = \"rank\"\nvalues = []\n[family]\nclass = \"identity\"\nn = 6\n").unwrap();
    let o = maxlr(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
