use std::path::Path;
use std::process::Command;

use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn bin(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_graphmatch")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn ok(args: &[&str]) -> String {
    let r = bin(args);
    assert_eq!(r.code, 0, "{args:?}\nstderr: {}", r.stderr);
    r.stdout
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

fn sample(dir: &Path, prefix: &str, extra: &[&str]) -> (String, String, String) {
    let out = p(dir, prefix);
    let mut args = vec!["sample", "--out", &out];
    args.extend_from_slice(extra);
    ok(&args);
    (format!("{out}.a.tsv"), format!("{out}.b.tsv"), format!("{out}.truth.csv"))
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn sampling_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let flags = ["--model", "gnp", "--n", "5", "--p", "0.5", "--corr", "0.7", "--seed", "1"];
    let x = sample(dir.path(), "x", &flags);
    let y = sample(dir.path(), "y", &flags);
    assert_eq!(read(&x.0), read(&y.0));
    assert_eq!(read(&x.1), read(&y.1));
    assert_eq!(read(&x.2), read(&y.2));
}

fn fnorm(a: &str, b: &str, corr: &str) -> f64 {
    let s = json(&ok(&["summary", "--a", a, "--b", b, "--corr", corr, "--n-a", "30", "--n-b", "30"]));
    s["summary"]["layers"][0]["fnorm"].as_f64().unwrap()
}

#[test]
fn shuffled_sample_matches_back_through_the_truth() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["--model", "gnp", "--n", "30", "--p", "0.3", "--corr", "0.6", "--seed", "9"];
    let plain = sample(dir.path(), "plain", &base);
    let mut shuffled_flags = base.to_vec();
    shuffled_flags.extend(["--permutation", "shuffle"]);
    let shuffled = sample(dir.path(), "shuf", &shuffled_flags);
    assert_ne!(read(&plain.1), read(&shuffled.1));
    let f0 = fnorm(&plain.0, &plain.1, &plain.2);
    let f1 = fnorm(&shuffled.0, &shuffled.1, &shuffled.2);
    assert!(f0 > 0.0);
    assert_eq!(f0, f1);

    let mut one = shuffled_flags.clone();
    one[7] = "1";
    let same = sample(dir.path(), "one", &one);
    assert_eq!(fnorm(&same.0, &same.1, &same.2), 0.0);
}

#[test]
fn match_writes_deterministic_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, truth) = sample(dir.path(), "g", &["--n", "20", "--p", "0.3", "--corr", "0.9", "--seed", "3"]);
    let seeds = p(dir.path(), "seeds.csv");
    std::fs::write(&seeds, "a,b\n0,0\n1,1\n2,2\n").unwrap();
    let run = |prefix: &str| {
        let out = p(dir.path(), prefix);
        let report = ok(&[
            "match", "--method", "indefinite", "--a", &a, "--b", &b, "--seeds", &seeds, "--start", "bari",
            "--seed", "11", "--out", &out, "--emit-soft", "--truth", &truth,
        ]);
        (report, read(format!("{out}.corr.csv")), read(format!("{out}.soft.csv")))
    };
    let (r1, c1, s1) = run("m1");
    let (r2, c2, s2) = run("m2");
    assert_eq!((&c1, &s1), (&c2, &s2));
    assert!(c1.starts_with("corr_A,corr_B,seed\n0,0,1\n1,1,1\n2,2,1\n"));
    let (j1, j2) = (json(&r1), json(&r2));
    assert_eq!(j1["summary"], j2["summary"]);
    assert_eq!(j1["schema_version"], 1);
    assert_eq!(j1["summary"]["n_seeds"], 3);
    let details = json(&read(format!("{}.details.json", p(dir.path(), "m1"))));
    assert_eq!(details["details"]["lap_method"], "dense");
}

#[test]
fn percolation_without_prior_is_a_precondition_failure() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, _) = sample(dir.path(), "g", &["--n", "10", "--p", "0.4", "--corr", "0.9"]);
    let out = p(dir.path(), "m");
    let r = bin(&["match", "--method", "percolation", "--r", "2", "--a", &a, "--b", &b, "--out", &out]);
    assert_eq!(r.code, 3, "{}", r.stderr);
}

#[test]
fn input_errors_name_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let a = p(dir.path(), "bad.tsv");
    std::fs::write(&a, "0 1\n1 two\n").unwrap();
    let r = bin(&["match", "--a", &a, "--b", &a, "--out", &p(dir.path(), "m")]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("bad.tsv:2:"), "{}", r.stderr);
    assert_eq!(bin(&["match", "--method", "simplex", "--a", &a, "--b", &a, "--out", "x"]).code, 2);
}

#[test]
fn multilayer_summary_has_a_row_per_layer() {
    let dir = tempfile::tempdir().unwrap();
    let a = p(dir.path(), "a.tsv");
    let b = p(dir.path(), "b.tsv");
    std::fs::write(&a, "1 2 1 x\n2 3 1 x\n1 3 1 y\n3 4 1 y\n4 5 1 z\n").unwrap();
    std::fs::write(&b, "1 2 1 x\n2 3 1 x\n1 3 1 y\n2 4 1 y\n4 5 1 z\n").unwrap();
    let seeds = p(dir.path(), "s.csv");
    std::fs::write(&seeds, "1,1\n2,2\n").unwrap();
    let out = p(dir.path(), "m");
    let report = json(&ok(&[
        "match", "--method", "percolation", "--r", "1", "--a", &a, "--b", &b, "--seeds", &seeds,
        "--one-based", "--layer-column", "4", "--out", &out,
    ]));
    let layers = report["summary"]["layers"].as_array().unwrap();
    assert_eq!(layers.len(), 3);
    assert!(read(format!("{out}.corr.csv")).starts_with("corr_A,corr_B,seed\n1,1,1\n2,2,1\n"));
}

#[test]
fn summary_best_matches_and_discrepancy() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, truth) = sample(dir.path(), "g", &["--n", "12", "--p", "0.4", "--corr", "1", "--seed", "2"]);
    let disc = p(dir.path(), "d.csv");
    let s = json(&ok(&["summary", "--a", &a, "--b", &b, "--corr", &truth, "--truth", &truth, "--emit-discrepancy", &disc]));
    assert_eq!(s["summary"]["layers"][0]["missing_edges"], 0.0);
    assert_eq!(s["edge_correctness"], 1.0);
    assert_eq!(s["summary"]["n_true_matches"], 12);
    let d = read(&disc);
    assert_eq!(d.lines().count(), 12);
    assert!(d.lines().all(|l| l.split(',').all(|v| v.parse::<f64>().unwrap() <= 1.0)));

    let csv = ok(&["best-matches", "--a", &a, "--b", &b, "--corr", &truth, "--truth", &truth, "--measure", "row_diff", "--num", "3"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "A_best,B_best,measure_value,precision");
    assert_eq!(lines.len(), 4);
    assert!(lines[1..].iter().all(|l| l.ends_with(",1.0000000000000000e0")));
    assert_eq!(bin(&["best-matches", "--a", &a, "--b", &b, "--corr", &truth, "--measure", "nope"]).code, 2);
}

#[test]
fn lap_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let cost = p(dir.path(), "c.csv");
    std::fs::write(&cost, "4,1,3\n2,0,5\n3,2,2\n").unwrap();
    let r = json(&ok(&["lap", "--cost", &cost]));
    assert_eq!(r["objective"], 5.0);
    assert_eq!(r["mapping"], serde_json::json!([[0, 1], [1, 0], [2, 2]]));
    let trip = p(dir.path(), "t.csv");
    std::fs::write(&trip, "0,0,1\n1,0,2\n").unwrap();
    let r = bin(&["lap", "--cost-triplets", &trip, "--lap-method", "sparse", "--ncols", "2"]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("dense"));
}

#[test]
fn map_at_k_reports() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, truth) = sample(dir.path(), "g", &["--n", "30", "--p", "0.3", "--corr", "0.8", "--seed", "4", "--permutation", "shuffle"]);
    let seeds = p(dir.path(), "s.csv");
    let t = read(&truth);
    std::fs::write(&seeds, t.lines().skip(1).take(5).collect::<Vec<_>>().join("\n")).unwrap();
    let run = |method: &str, k: &str| {
        bin(&["map-at-k", "--a", &a, "--b", &b, "--truth", &truth, "--method", method, "--k", k, "--seeds", &seeds])
    };
    for method in ["indefinite", "path", "isorank", "umeyama"] {
        let r1 = json(&run(method, "1").stdout);
        let r3 = json(&run(method, "3").stdout);
        assert_eq!(r3["evaluated"], 25);
        assert!(r3["map_at_k"].as_f64().unwrap() >= r1["map_at_k"].as_f64().unwrap(), "{method}");
    }
    let indef = json(&run("indefinite", "3").stdout);
    assert!(indef["map_at_k"].as_f64().unwrap() >= indef["precision"].as_f64().unwrap());
    assert_eq!(run("percolation", "3").code, 3);
}

#[test]
fn adaptive_seeding_table() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, truth) = sample(dir.path(), "g", &["--n", "40", "--p", "0.3", "--corr", "0.9", "--seed", "5"]);
    let seeds = p(dir.path(), "s.csv");
    std::fs::write(&seeds, "0,0\n1,1\n2,2\n").unwrap();
    let baseline = json(&ok(&["match", "--a", &a, "--b", &b, "--seeds", &seeds, "--truth", &truth, "--out", &p(dir.path(), "m")]));
    for mode in [&[][..], &["--soft"][..]] {
        let mut args = vec!["adaptive-seeds", "--a", &a, "--b", &b, "--seeds", &seeds, "--truth", &truth, "--ns", "0,5,10", "--n-mc", "50"];
        args.extend_from_slice(mode);
        let r = json(&ok(&args));
        let rows = r["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0]["common_edges"], baseline["summary"]["layers"][0]["common_edges"]);
    }
}

#[test]
fn correct_adaptive_seeds_do_not_lose_common_edges() {
    let dir = tempfile::tempdir().unwrap();
    let seeds = p(dir.path(), "s.csv");
    std::fs::write(&seeds, "0,0\n1,1\n2,2\n").unwrap();
    let mut gains = Vec::new();
    for t in 0..10 {
        let prefix = format!("g{t}");
        let (a, b, truth) = sample(dir.path(), &prefix, &["--n", "50", "--p", "0.3", "--corr", "0.9", "--seed", &t.to_string()]);
        let r = json(&ok(&["adaptive-seeds", "--a", &a, "--b", &b, "--seeds", &seeds, "--truth", &truth, "--ns", "0,10", "--n-mc", "100"]));
        let rows = r["rows"].as_array().unwrap();
        if rows[1]["seed_precision"] == 1.0 {
            gains.push(rows[1]["common_edges"].as_f64().unwrap() - rows[0]["common_edges"].as_f64().unwrap());
        }
    }
    assert!(!gains.is_empty());
    gains.sort_by(f64::total_cmp);
    let median = gains[gains.len() / 2];
    assert!(median >= 0.0, "{gains:?}");
}
