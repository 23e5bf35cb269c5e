use std::path::Path;
use std::process::{Command, Output};

use rmtkit::ensembles::{sample_data_matrix, EnsembleSpec};
use rmtkit::numerics::RngStream;

fn rmtkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmtkit")).args(args).output().expect("spawn rmtkit")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn sampling_is_byte_identical_across_runs() {
    let args = ["sample", "--ensemble", "wishart-complex", "-n", "60", "-p", "30", "--seed", "17", "--count", "5"];
    let (a, b) = (rmtkit(&args), rmtkit(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 5);
    let other = rmtkit(&["sample", "--ensemble", "wishart-complex", "-n", "60", "-p", "30", "--seed", "18", "--count", "5"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn gue_512_sample_is_reproducible() {
    let args = ["sample", "--ensemble", "gue", "-n", "512", "--sigma2", "1", "--seed", "7"];
    let (a, b) = (rmtkit(&args), rmtkit(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let row: Vec<f64> = stdout(&a).trim().split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(row.len(), 512);
    // 17 significant digits round-trip exactly
    assert!(stdout(&a).trim().split(',').zip(&row).all(|(c, v)| rmtkit::io::fmt_f64(*v) == c));
}

#[test]
fn sampled_matrix_has_complex_columns() {
    let o = rmtkit(&["sample", "--ensemble", "gue", "-n", "3", "--seed", "1", "--matrix"]);
    assert!(o.status.success());
    let rows: Vec<Vec<f64>> =
        stdout(&o).lines().map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.len() == 6));
    // Hermitian: H[0][1] = conj(H[1][0])
    assert_eq!(rows[0][2], rows[1][0]);
    assert_eq!(rows[0][3], -rows[1][1]);
}

#[test]
fn tw_table_is_monotone_and_reaches_one() {
    let o = rmtkit(&["tw", "--beta", "2", "--grid=-8:4:0.05"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# {"));
    assert_eq!(lines.next().unwrap(), "s,cdf");
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (s, f) = l.split_once(',').unwrap();
            (s.parse().unwrap(), f.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 241);
    assert_eq!(rows[0].0, -8.0);
    assert_eq!(rows[240].0, 4.0);
    assert!(rows.windows(2).all(|w| w[1].1 >= w[0].1));
    assert!((rows[240].1 - 1.0).abs() < 1e-6);
    let table = rmtkit::kernels::TwTable::from_csv(&text).unwrap();
    assert_eq!(table.beta, 2);
}

#[test]
fn json_artifacts_carry_an_envelope() {
    let o = rmtkit(&["tw", "--beta", "1", "--pvalue", "0.5"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
    assert!(v["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    let p = v["payload"]["p_value"].as_f64().unwrap();
    assert!(p > 0.0 && p < 0.5);
    let again: serde_json::Value = serde_json::from_slice(&rmtkit(&["tw", "--beta", "1", "--pvalue", "0.5"]).stdout).unwrap();
    assert_eq!(v["config_hash"], again["config_hash"]);
    assert_eq!(v["payload"], again["payload"]);
}

fn write_null_fixture(path: &Path, n: usize, p: usize, seed: u64) {
    let x = sample_data_matrix::<f64>(&EnsembleSpec::wishart(false, n, p, 1.0, RngStream::new(seed, 0))).unwrap();
    let mut text = (0..p).map(|j| format!("v{j}")).collect::<Vec<_>>().join(",") + "\n";
    for row in x.chunks(p) {
        text.push_str(&rmtkit::io::csv_row(row));
        text.push('\n');
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn pca_test_finds_nothing_in_null_data() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("null.csv");
    write_null_fixture(&data, 1000, 500, 2024);
    let out = dir.path().join("report.json");
    let o = rmtkit(&["pca-test", "--data", data.to_str().unwrap(), "--alpha", "0.01", "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["payload"]["k_significant"], 0);
    assert_eq!(v["payload"]["spectrum"].as_array().unwrap().len(), 500);
    let table = rmtkit(&["pca-test", "--data", data.to_str().unwrap(), "--format", "table"]);
    assert!(table.status.success());
    assert!(!stdout(&table).is_empty());
}

#[test]
fn exit_codes() {
    assert_eq!(rmtkit(&["sample", "--ensemble", "gue", "-n", "4"]).status.code(), Some(64));
    assert_eq!(rmtkit(&["nonsense"]).status.code(), Some(64));
    assert_eq!(rmtkit(&["law", "--law", "mp", "--grid", "0:1:0.5"]).status.code(), Some(64));
    assert_eq!(rmtkit(&["law", "--law", "semicircle", "--grid", "0:1"]).status.code(), Some(64));
    assert_eq!(rmtkit(&["pca-test", "--data", "/nonexistent/file.csv"]).status.code(), Some(64));
    assert_eq!(rmtkit(&["tw", "--beta", "3"]).status.code(), Some(64));
    assert_eq!(rmtkit(&["validate", "--criteria", "15"]).status.code(), Some(64));
    assert_eq!(rmtkit(&["--help"]).status.code(), Some(0));
    assert_eq!(rmtkit(&["validate", "--criteria", "4"]).status.code(), Some(0));
}

#[test]
fn numerical_failure_exits_3_with_json_diagnostic() {
    // 8 → 16 → 32 nodes cannot reach the default tolerance at s = -2
    let o = rmtkit(&["gap", "--grid=-2:-2:1", "--nodes", "8"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let diag: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(diag["error"], "numerical");
}

#[test]
fn law_with_empirical_column() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.csv");
    let s = rmtkit(&["sample", "--ensemble", "goe", "-n", "200", "--seed", "5", "-o", spec.to_str().unwrap()]);
    assert!(s.status.success());
    let o = rmtkit(&["law", "--law", "semicircle", "--mode", "cdf", "--grid=-2.5:2.5:0.5", "--empirical", spec.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("x,empirical,law\n"));
    for l in text.lines().skip(1) {
        let v: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((v[1] - v[2]).abs() < 0.1, "{l}");
    }
}

#[test]
fn denoise_fits_band_from_observations() {
    let dir = tempfile::tempdir().unwrap();
    let (n, p) = (400, 40);
    let x = sample_data_matrix::<f64>(&EnsembleSpec::wishart(false, n, p, 1.0, RngStream::new(8, 0)).with_spikes(vec![9.0])).unwrap();
    let m = rmtkit::ensembles::gram(&x, n, p);
    let cov = dir.path().join("cov.csv");
    let text: String = (0..p).map(|i| rmtkit::io::csv_row(m.row(i)) + "\n").collect();
    std::fs::write(&cov, text).unwrap();
    let o = rmtkit(&["denoise", "--cov", cov.to_str().unwrap(), "--observations", "400", "--exclude-top", "1", "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let band = v["payload"]["band"].as_array().unwrap();
    assert!(band[0].as_u64().unwrap() >= 1);
    assert_eq!(v["payload"]["matrix"].as_array().unwrap().len(), p);
}
