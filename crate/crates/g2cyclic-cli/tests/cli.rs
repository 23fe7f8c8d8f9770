use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn g2cyclic(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_g2cyclic")).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn summary(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap()
}

fn data_rows(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().skip(1).count()
}

#[test]
fn algebra_check_lists_all_table_entries() {
    let dir = tempfile::tempdir().unwrap();
    let o = g2cyclic(&["algebra-check", "--seed", "7"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(dir.path());
    assert_eq!(s["all_pass"], true);
    assert_eq!(s["seed"], 7);
    assert_eq!(s["data"]["table_entries_verified"], 42);
    assert_eq!(data_rows(&dir.path().join("cross_table.csv")), 42);
    let cert = fs::read_to_string(dir.path().join("certificate.txt")).unwrap();
    assert_eq!(cert.lines().filter(|l| l.starts_with("[pass] f")).count(), 42);
}

#[test]
fn lie_check_passes_and_writes_constants() {
    let dir = tempfile::tempdir().unwrap();
    let o = g2cyclic(&["lie-check"], dir.path());
    assert!(o.status.success());
    assert!(data_rows(&dir.path().join("structure_constants.csv")) > 0);
    assert!(fs::read_to_string(dir.path().join("bases.txt")).unwrap().contains("X13"));
}

#[test]
fn stability_all_degrees_genus_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = g2cyclic(&["stability", "--genus", "2", "--all-d"], dir.path());
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("stability.csv")).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 9);
    assert!(rows[0].starts_with("2,-1,false,InvalidDegree"));
    assert!(rows[8].starts_with("2,7,false,InvalidDegree"));
    assert_eq!(data_rows(&dir.path().join("verdicts.csv")), 36);
}

#[test]
fn stability_single_flags_and_batch() {
    let dir = tempfile::tempdir().unwrap();
    let o = g2cyclic(&["stability", "--genus", "3", "--d", "2", "--beta", "false", "--delta", "false"], dir.path());
    assert!(o.status.success());
    assert!(!dir.path().join("stability.csv").exists());
    let v = fs::read_to_string(dir.path().join("verdicts.csv")).unwrap();
    assert!(v.lines().nth(1).unwrap().starts_with("3,2,false,false,StrictlyPolystable"));

    let batch = configs().join("stability-batch.csv");
    let o = g2cyclic(&["stability", "--batch", batch.to_str().unwrap()], dir.path());
    assert!(o.status.success());
    assert_eq!(data_rows(&dir.path().join("verdicts.csv")), 8);
}

#[test]
fn bad_batch_row_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let batch = dir.path().join("rows.csv");
    fs::write(&batch, "g,d,beta,delta\n2,0,true,true\n2,x,true,true\n").unwrap();
    let o = g2cyclic(&["stability", "--batch", batch.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("data row 2"));
}

#[test]
fn moduli_table_for_genus_two_to_ten() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("moduli.toml");
    let o = g2cyclic(&["moduli", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(o.status.success());
    let expected: i64 = (2..=10).map(|g| 6 * g - 5).sum();
    assert_eq!(data_rows(&dir.path().join("moduli.csv")) as i64, expected);
    let text = fs::read_to_string(dir.path().join("moduli.csv")).unwrap();
    let g10 = text.lines().find(|l| l.starts_with("10,0,")).unwrap();
    assert!(g10.contains(&(1u64 << 20).to_string()));
}

#[test]
fn constant_pipeline_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("pipeline.toml");
    let o = g2cyclic(&["pipeline", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", fs::read_to_string(dir.path().join("report.txt")).unwrap_or_default());
    let s = summary(dir.path());
    assert_eq!(s["all_pass"], true);
    assert_eq!(s["passed"], s["total"]);
    assert_eq!(data_rows(&dir.path().join("curve.csv")), 64 * 64);
    assert!(fs::read_to_string(dir.path().join("metric.csv")).unwrap().contains("# converged:true"));
}

#[test]
fn serial_outputs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = configs().join("pipeline.toml");
    for d in [&a, &b] {
        assert!(g2cyclic(&["pipeline", "--serial", "--config", cfg.to_str().unwrap()], d.path()).status.success());
    }
    for f in ["summary.json", "metric.csv", "curve.csv", "checks.json", "solve_report.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn solve_then_reconstruct_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("generic.toml");
    fs::write(
        &cfg,
        "[problem]\nnx = 40\nb_re = [1.0, 0.5]\nb_im = [0.0, 0.2]\ndd_re = [0.8, 0.0]\ndd_im = [0.0, -0.3]\nboundary = \"dirichlet\"\n\n[checks]\ndefect_tol = 1e-2\nexpect_parallel_line = false\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let solved = dir.path().join("solved");
    assert!(g2cyclic(&["solve", "--config", c], &solved).status.success());
    let metric = solved.join("metric.csv");
    let o = g2cyclic(&["reconstruct", "--config", c, "--metric", metric.to_str().unwrap()], &dir.path().join("curve"));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(data_rows(&dir.path().join("curve/curve.csv")), 1600);

    // a different problem must not accept this metric
    let pipe = configs().join("pipeline.toml");
    let o = g2cyclic(&["reconstruct", "--config", pipe.to_str().unwrap(), "--metric", metric.to_str().unwrap()], &dir.path().join("x"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("was solved for problem"));
}

#[test]
fn failed_check_gives_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("short.toml");
    fs::write(&cfg, "[problem]\nnx = 24\nboundary = \"dirichlet\"\nmax_iter = 1\n").unwrap();
    let o = g2cyclic(&["solve", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    let s = summary(&dir.path().join("out"));
    assert_eq!(s["all_pass"], false);
    assert!(fs::read_to_string(dir.path().join("out/metric.csv")).unwrap().contains("converged:false"));
}

#[test]
fn config_errors_name_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[problem]\nnx = 16\nbogus = 3\n").unwrap();
    let o = g2cyclic(&["solve", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3") && err.contains("bogus"), "{err}");

    fs::write(&cfg, "[problem]\nboundary = \"periodic\"\n").unwrap();
    let o = g2cyclic(&["solve", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("boundary"));
}

#[test]
fn tol_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("pipeline.toml");
    let o = g2cyclic(&["solve", "--config", cfg.to_str().unwrap(), "--tol", "1e-8"], dir.path());
    assert!(o.status.success());
    assert_eq!(summary(dir.path())["data"]["solve"]["tolerance"], 1e-8);
}
