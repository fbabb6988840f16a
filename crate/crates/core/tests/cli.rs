use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn flowcomm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flowcomm")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = flowcomm(args);
    assert!(
        out.status.success(),
        "flowcomm {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn synth_bundles(dir: &Path, name: &str, extra: &[&str]) -> String {
    let path = dir.join(name).display().to_string();
    let mut args = vec!["--seed", "7", "synth", "bundles", "--b", "2", "--n", "20", "--gap", "100"];
    args.extend_from_slice(extra);
    args.extend_from_slice(&["-o", &path]);
    ok(&args);
    path
}

#[test]
fn synth_writes_labeled_bundles() {
    let dir = tempfile::tempdir().unwrap();
    let a = synth_bundles(dir.path(), "a.json", &["--m", "10", "--jitter", "0.1"]);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&a).unwrap()).unwrap();
    let lines = v["streamlines"].as_array().unwrap();
    assert_eq!(lines.len(), 20);
    assert!(lines.iter().all(|l| l.as_array().unwrap().len() == 20));
    let labels: Vec<i64> = serde_json::from_value(v["labels"].clone()).unwrap();
    assert_eq!(labels.iter().filter(|&&l| l == 0).count(), 10);
    assert_eq!(labels.iter().filter(|&&l| l == 1).count(), 10);

    let b = synth_bundles(dir.path(), "b.json", &["--m", "10", "--jitter", "0.1"]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let straight = synth_bundles(dir.path(), "c.json", &["--m", "10", "--jitter", "0"]);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(straight).unwrap()).unwrap();
    for line in v["streamlines"].as_array().unwrap() {
        let pts: Vec<[f64; 3]> = serde_json::from_value(line.clone()).unwrap();
        let d0: Vec<f64> = (0..3).map(|i| pts[1][i] - pts[0][i]).collect();
        for w in pts.windows(2) {
            for i in 0..3 {
                assert!((w[1][i] - w[0][i] - d0[i]).abs() < 1e-9, "jitter 0 gives straight, even lines");
            }
        }
    }
}

#[test]
fn detect_recovers_two_bundles() {
    let dir = tempfile::tempdir().unwrap();
    let input = synth_bundles(dir.path(), "a.json", &["--jitter", "0.1"]);
    for distance in ["shortest", "longest", "average"] {
        let out = ok(&[
            "detect", "-i", &input, "--level", "streamline", "--knn", "3", "--distance", distance, "--resolution", "1.0",
        ]);
        let v = json(&out);
        assert_eq!(v["level"], "streamline");
        assert_eq!(v["n_communities"], 2, "{distance}");
        let a: Vec<usize> = serde_json::from_value(v["assignment"].clone()).unwrap();
        assert_eq!(a.len(), 12);
        assert!(a[..6].iter().all(|&x| x == a[0]) && a[6..].iter().all(|&x| x == a[6]) && a[0] != a[6]);
    }

    let missing = flowcomm(&["detect", "-i", &dir.path().join("nope.json").display().to_string()]);
    assert_eq!(missing.status.code(), Some(2));
    let bad_flag = flowcomm(&["detect", "-i", &input, "--distance", "manhattan"]);
    assert_eq!(bad_flag.status.code(), Some(2));
    let bad_k = flowcomm(&["detect", "-i", &input, "--knn", "0"]);
    assert_eq!(bad_k.status.code(), Some(1));
}

#[test]
fn detect_outputs_are_seed_stable() {
    let dir = tempfile::tempdir().unwrap();
    let input = synth_bundles(dir.path(), "a.json", &["--jitter", "0.3"]);
    let run = |tag: &str, threads: &str| {
        let part = dir.path().join(format!("{tag}.json"));
        let csng = dir.path().join(format!("{tag}.bin"));
        let report = dir.path().join(format!("{tag}.csv"));
        ok(&[
            "--seed", "3", "--threads", threads, "--format", "csv", "detect", "-i", &input, "--knn", "6", "-o", &part.display().to_string(),
            "--csng-out", &csng.display().to_string(), "--report", &report.display().to_string(),
        ]);
        (std::fs::read(part).unwrap(), std::fs::read(csng).unwrap(), std::fs::read(report).unwrap())
    };
    assert_eq!(run("x", "1"), run("y", "4"));
}

#[test]
fn compare_reports_both_methods() {
    let dir = tempfile::tempdir().unwrap();
    let input = synth_bundles(dir.path(), "a.json", &["--jitter", "0.1"]);
    let no_kc = flowcomm(&["compare", "-i", &input]);
    assert_eq!(no_kc.status.code(), Some(2));

    let out = ok(&["compare", "-i", &input, "--level", "streamline", "--knn", "3", "--kc", "2"]);
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["method"], "louvain");
    assert_eq!(rows[1]["method"], "pca_kmeans");
    for r in rows {
        assert_eq!(r["weighted_jaccard"], 1.0, "{r}");
        assert_eq!(r["communities"], 2);
    }

    let csv = ok(&["--format", "csv", "compare", "-i", &input, "--level", "streamline", "--knn", "3", "--kc", "2"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("method,level,weighted_jaccard,wall_ms,graph_ms,communities\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn eval_scores_a_partition_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = synth_bundles(dir.path(), "a.json", &["--jitter", "0.1"]);
    let part = dir.path().join("p.json").display().to_string();
    ok(&["detect", "-i", &input, "--level", "streamline", "--knn", "3", "-o", &part]);
    let v = json(&ok(&["eval", "--partition", &part, "-i", &input]));
    assert_eq!(v["weighted_jaccard"], 1.0);
    assert_eq!(v["n_communities"], 2);
    let no_labels = flowcomm(&["eval", "--partition", &part]);
    assert_eq!(no_labels.status.code(), Some(2));
}

#[test]
fn amcs_needs_a_selection() {
    let dir = tempfile::tempdir().unwrap();
    let input = synth_bundles(dir.path(), "a.json", &["--jitter", "0.1"]);
    assert_eq!(flowcomm(&["amcs", "-i", &input, "--knn", "4"]).status.code(), Some(2));
    let img = dir.path().join("m.ppm");
    let v = json(&ok(&["amcs", "-i", &input, "--knn", "4", "--full", "--image", &img.display().to_string()]));
    assert_eq!(v["n"], 12 * 19);
    assert!(std::fs::read(img).unwrap().starts_with(b"P6\n"));
}

#[test]
fn bench_rows_and_scaling() {
    let v = json(&ok(&["bench", "--sizes", "2000"]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    for key in [
        "label", "streamlines", "segments", "data_ms", "kdtree_ms", "knn_ms", "detection_ms", "nodes", "edges",
        "communities", "peak_memory_bytes",
    ] {
        assert!(rows[0].get(key).is_some(), "missing {key}");
    }
    assert!(rows[0]["segments"].as_u64().unwrap() >= 2000);

    let csv = ok(&["--format", "csv", "bench", "--sizes", "2000"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("label,streamlines,segments,"));

    let v = json(&ok(&["bench", "--sizes", "5000,50000"]));
    let rows = v["rows"].as_array().unwrap();
    let ms = |r: &Value, k: &str| r[k].as_f64().unwrap();
    assert!(ms(&rows[1], "kdtree_ms") > ms(&rows[0], "kdtree_ms"));
    assert!(ms(&rows[1], "knn_ms") > ms(&rows[0], "knn_ms"));
    assert!(rows[1]["edges"].as_u64().unwrap() > rows[0]["edges"].as_u64().unwrap());
}
