use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use degdist::graph::ceil_degree;
use degdist::ModelSpec;
use tempfile::TempDir;

fn degdist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degdist")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = degdist(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn pln_degree_file(dir: &Path, n: usize) -> PathBuf {
    let m = ModelSpec::pln(1.2, 4.0, 1.0).unwrap();
    let text: String = degdist::dist::sample_values(&m, n, 5)
        .unwrap()
        .iter()
        .map(|&x| format!("{}\n", ceil_degree(x, u64::MAX)))
        .collect();
    write(dir, "pln.deg", &text)
}

#[test]
fn fit_flags_pln_on_pln_degrees_and_is_byte_stable() {
    let tmp = TempDir::new().unwrap();
    let input = pln_degree_file(tmp.path(), 100_000);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&a, &b] {
        ok(&["fit", "--input", s(&input), "--format", "degrees", "--out-dir", s(out)]);
    }
    let rows = csv_rows(&a.join("fit.csv"));
    assert_eq!(rows.len(), 7);
    let best_aic: Vec<&str> = rows.iter().filter(|r| r[8] == "true").map(|r| r[0].as_str()).collect();
    assert_eq!(best_aic, ["pln"]);
    for f in ["fit.csv", "ccdf.csv", "qq.csv", "fit.json", "manifest.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn empty_input_fails_without_outputs() {
    let tmp = TempDir::new().unwrap();
    let input = write(tmp.path(), "empty.txt", "");
    let out_dir = tmp.path().join("out");
    let out = degdist(&["fit", "--input", s(&input), "--out-dir", s(&out_dir)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out_dir.exists());
    let bad = write(tmp.path(), "bad.txt", "1 2\n3\n");
    let out = degdist(&["fit", "--input", s(&bad), "--out-dir", s(&out_dir)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn tail_reports_the_power_law_threshold_formula() {
    let tmp = TempDir::new().unwrap();
    let input = pln_degree_file(tmp.path(), 5_000);
    let out_dir = tmp.path().join("t");
    ok(&["tail", "--input", s(&input), "--format", "degrees", "--gamma", "0.5", "--out-dir", s(&out_dir)]);
    let doc: serde_json::Value = serde_json::from_slice(&fs::read(out_dir.join("tail.json")).unwrap()).unwrap();
    let alpha = doc["powerlaw"]["model"]["alpha"].as_f64().unwrap();
    let d0 = doc["powerlaw"]["model"]["d0"].as_f64().unwrap();
    let xi: f64 = csv_rows(&out_dir.join("tail.csv"))[0][1].parse().unwrap();
    assert!((xi - d0 * 2f64.powf(1.0 / (alpha - 1.0))).abs() < 1e-12 * xi);

    let out = degdist(&["tail", "--input", s(&input), "--gamma", "1.5", "--out-dir", s(&out_dir)]);
    assert_eq!(out.status.code(), Some(2));
}

fn ks(a: &[u64], b: &[u64]) -> f64 {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    a.sort_unstable();
    b.sort_unstable();
    let top = *a.last().unwrap().max(b.last().unwrap());
    (0..=top)
        .map(|x| {
            let fa = a.partition_point(|&d| d <= x) as f64 / a.len() as f64;
            let fb = b.partition_point(|&d| d <= x) as f64 / b.len() as f64;
            (fa - fb).abs()
        })
        .fold(0.0, f64::max)
}

fn read_graph(path: &Path) -> degdist::Graph {
    degdist::graph::load_edge_list(fs::read(path).unwrap().as_slice()).unwrap().0
}

#[test]
fn gen_config_model_matches_its_target() {
    let tmp = TempDir::new().unwrap();
    let out_dir = tmp.path().join("g");
    ok(&["gen", "--params", "beta=2,mu=2,tau=1", "--n", "10000", "--seed", "1", "--out-dir", s(&out_dir)]);
    let g = read_graph(&out_dir.join("graph.edges"));
    g.validate().unwrap();
    let target = degdist::graph::read_degrees(fs::read(out_dir.join("target_degrees.txt")).unwrap().as_slice()).unwrap();
    assert_eq!(target.iter().sum::<u64>() % 2, 0);
    let mut realized = g.degree_sequence();
    realized.resize(target.len(), 0);
    assert!(ks(&realized, &target) < 0.02);
}

#[test]
fn gen_two_nodes_gives_one_edge() {
    let tmp = TempDir::new().unwrap();
    let out_dir = tmp.path().join("g");
    ok(&["gen", "--model", "pln", "--params", "beta=2,mu=2,tau=1", "--n", "2", "--out-dir", s(&out_dir)]);
    assert_eq!(fs::read_to_string(out_dir.join("graph.edges")).unwrap(), "0 1\n");
}

#[test]
fn gen_records_parity_adjustment() {
    let tmp = TempDir::new().unwrap();
    let out_dir = tmp.path().join("g");
    ok(&["gen", "--params", "beta=2,mu=2,tau=1", "--n", "5000", "--seed", "1", "--out-dir", s(&out_dir)]);
    let doc: serde_json::Value = serde_json::from_slice(&fs::read(out_dir.join("gen.json")).unwrap()).unwrap();
    let adj = &doc["parity_adjustment"];
    assert_eq!(adj["to"].as_u64().unwrap(), adj["from"].as_u64().unwrap() + 1);
}

#[test]
fn influence_on_a_path_with_certain_transmission() {
    let tmp = TempDir::new().unwrap();
    let input = write(tmp.path(), "p5.edges", "0 1\n1 2\n2 3\n3 4\n");
    let out_dir = tmp.path().join("i");
    ok(&["experiment", "influence", "--input", s(&input), "--cascade", "ic", "--p", "1", "--seed-counts", "1", "--trials", "5", "--out-dir", s(&out_dir)]);
    let rows = csv_rows(&out_dir.join("influence_real.csv"));
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 5.0);
    assert_eq!(rows[0][3], "real");
}

#[test]
fn privacy_baseline_discloses_nothing() {
    let tmp = TempDir::new().unwrap();
    let input = write(tmp.path(), "p3.edges", "0 1\n1 2\n");
    let out_dir = tmp.path().join("p");
    ok(&["experiment", "privacy", "--input", s(&input), "--k", "1", "--out-dir", s(&out_dir)]);
    let rows = csv_rows(&out_dir.join("privacy_real.csv"));
    assert_eq!(rows[0][..2], ["0.0000000000000000e0", "0.0000000000000000e0"]);
    let disclosed: f64 = rows[1][1].parse().unwrap();
    let eps = 2.0 / 3.0 * (-0.5f64).exp() + 1.0 / 3.0 * (-1.0f64).exp();
    assert!((disclosed - 3.0 * (1.0 - eps)).abs() < 1e-12);
}

#[test]
fn robustness_with_auto_synthetic_writes_three_curves() {
    let tmp = TempDir::new().unwrap();
    let g_dir = tmp.path().join("g");
    ok(&["gen", "--params", "beta=2,mu=2,tau=1", "--n", "3000", "--seed", "4", "--out-dir", s(&g_dir)]);
    let out_dir = tmp.path().join("r");
    let edges = g_dir.join("graph.edges");
    ok(&["experiment", "robustness", "--input", s(&edges), "--auto-synthetic", "--fraction-grid", "0,0.05,0.1", "--out-dir", s(&out_dir)]);
    for label in ["real", "synthetic_pln", "synthetic_powerlaw"] {
        let rows = csv_rows(&out_dir.join(format!("robustness_{label}.csv")));
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r[3] == label));
    }
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert!(manifest["input_digest"].as_str().unwrap().starts_with("sha256:"));
    assert_eq!(manifest["parameters"]["kind"], "robustness");
}
