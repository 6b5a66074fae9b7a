use npp_core::solvers::solve_ldm;
use npp_core::{Instance, Mode};
use serde_json::Value;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_npp-lab"))
        .args(args)
        .env_remove("NPP_LAB_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = lab(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

fn header_value<'a>(csv: &'a str, key: &str) -> Option<&'a str> {
    let prefix = format!("# {key}: ");
    csv.lines().find_map(|l| l.strip_prefix(prefix.as_str()))
}

#[test]
fn solve_is_byte_identical_across_runs() {
    let args = ["solve", "--n", "5", "--seed", "7", "--algo", "ldm", "--mode", "quantized:50"];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    let v: Value = serde_json::from_str(&a).unwrap();
    let want = solve_ldm(&Instance::generate(5, 7, Mode::quantized_default()).unwrap()).unwrap();
    assert_eq!(v["result"]["raw"].as_f64().unwrap(), want.raw);
    assert_eq!(v["result"]["normalized"].as_f64().unwrap(), want.normalized);
    assert_eq!(v["result"]["sigma"]["hex"].as_str().unwrap(), want.sigma.to_hex());
    assert_eq!(v["config"]["params"]["algo"], "ldm");
    assert_eq!(v["config"]["master_seed"], 7);
}

#[test]
fn solve_reads_instance_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.json");
    let x = Instance::generate(9, 3, Mode::quantized_default()).unwrap();
    std::fs::write(&path, x.to_json()).unwrap();
    let v = json(&["solve", "--instance", path.to_str().unwrap(), "--algo", "exact"]);
    let want = npp_core::solvers::solve_exact(&x).unwrap();
    assert_eq!(v["result"]["raw_exact"].as_str().unwrap(), want.raw_exact.unwrap().to_string());
}

#[test]
fn stability_writes_fifty_rows_and_threshold() {
    let csv = stdout(&["stability", "--n", "50", "--rho", "0.5:25:0.5", "--trials", "10", "--algo", "ldm"]);
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 50);
    assert!(csv.contains("\nrho,tau,mean_overlap,stderr,trials\n"));
    let t: f64 = header_value(&csv, "predicted_threshold").unwrap().parse().unwrap();
    assert!((t - 15.91).abs() < 0.03, "threshold {t}");
    for row in rows {
        let q: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!((-1.0..=1.0).contains(&q));
    }
}

#[test]
fn worker_count_does_not_change_output() {
    let base = ["stability", "--n", "30", "--rho", "1,8,20", "--trials", "7", "--seed", "11"];
    let one = stdout(&[&base[..], &["--threads", "1"]].concat());
    let four = stdout(&[&base[..], &["--threads", "4"]].concat());
    assert_eq!(one, four);
    let env = Command::new(env!("CARGO_BIN_EXE_npp-lab"))
        .args(base)
        .env("NPP_LAB_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(env.stdout).unwrap(), one);
    let bad = Command::new(env!("CARGO_BIN_EXE_npp-lab"))
        .args(base)
        .env("NPP_LAB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn plan_json_is_reproducible() {
    let args = ["plan", "--n", "100000", "--en", "2000", "--eps", "0.1", "--L", "1"];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    let v: Value = serde_json::from_str(&a).unwrap();
    let r = &v["result"];
    let eta = r["schedule"]["eta"].as_f64().unwrap();
    let c1 = r["c1_slack"].as_f64().unwrap();
    assert!((c1 - eta * eta / 1600.0).abs() <= 1e-10 * c1);
    assert!(r["log2_log2_t"].as_f64().unwrap().is_finite());
}

#[test]
fn plan_sweep_emits_a_row_per_point() {
    let csv = stdout(&["plan", "--n", "1e5,1e6", "--en", "2000,20000", "--eps", "0.1", "--L", "1"]);
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("100000.0,2000.0,0.1,1.0,"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(lab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lab(&["solve", "--n", "5", "--bogus"]).status.code(), Some(2));
    assert_eq!(lab(&["solve"]).status.code(), Some(2));
    assert_eq!(lab(&["solve", "--n", "5", "--mode", "quantized:0"]).status.code(), Some(2));
    assert_eq!(lab(&["stability", "--n", "10", "--rho", "5,1"]).status.code(), Some(2));
    assert_eq!(lab(&["ogp-pairs", "--n", "10"]).status.code(), Some(2));
    assert_eq!(lab(&["--help"]).status.code(), Some(0));
}

#[test]
fn resource_guards_exit_3_unless_forced() {
    let out = lab(&["solve", "--n", "50", "--algo", "exact"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("limit"));
    assert_eq!(lab(&["local-optima", "--n", "27", "--en", "27", "--trials", "1"]).status.code(), Some(3));
    let forced = lab(&["local-optima", "--n", "27", "--en", "27", "--trials", "1", "--force"]);
    assert!(forced.status.success());
    assert!(String::from_utf8_lossy(&forced.stderr).contains("warning"));
}

#[test]
fn out_is_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let args = ["stability", "--n", "20", "--rho", "2,10", "--trials", "3"];
    let printed = stdout(&args);
    let out = lab(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, vec![std::ffi::OsString::from("curve.csv")]);
    let missing = dir.path().join("no/such/dir/x.csv");
    assert_eq!(lab(&[&args[..], &["--out", missing.to_str().unwrap()]].concat()).status.code(), Some(1));
}

#[test]
fn enumerate_lists_every_state_below_threshold() {
    let csv = stdout(&["landscape-enumerate", "--n", "12", "--en", "2", "--seed", "4"]);
    let count: usize = header_value(&csv, "states").unwrap().parse().unwrap();
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), count);
    let threshold: f64 = header_value(&csv, "threshold").unwrap().parse().unwrap();
    for row in rows {
        let e: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!(e <= threshold);
    }
    let v = json(&["landscape-enumerate", "--n", "12", "--en", "2", "--seed", "4", "--format", "json"]);
    assert_eq!(v["result"]["states"].as_array().unwrap().len(), count);
}

#[test]
fn pair_and_tuple_searches_report_per_trial() {
    let csv = stdout(&["ogp-pairs", "--n", "12", "--en", "2", "--lo", "0", "--hi", "1", "--trials", "4"]);
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 4);
    // Band [0, 1] unsigned with k states holds C(k,2) + k pairs.
    for row in rows {
        let f: Vec<u64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(f[3], f[2] * (f[2] - 1) / 2 + f[2]);
    }
    let v = json(&[
        "ogp-mtuple", "--n", "12", "--en", "1.5", "--m", "3", "--beta", "0.5", "--eta", "0.4", "--trials", "3",
        "--format", "json",
    ]);
    let trials = v["result"].as_array().unwrap();
    assert_eq!(trials.len(), 3);
    for t in trials {
        if let Some(w) = t["witness"].as_object() {
            assert_eq!(w["members"].as_array().unwrap().len(), 3);
        }
    }
}

#[test]
fn gibbs_and_escape_summaries() {
    let v = json(&["gibbs", "--n", "10", "--beta", "3", "--rho", "0.5"]);
    let m = &v["result"]["region_masses"];
    let total: f64 = ["i1", "i2", "i2_bar", "i3", "i3_bar"].iter().map(|k| m[*k].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert_eq!(m["i3"], m["i3_bar"]);

    let csv = stdout(&["mcmc-escape", "--n", "10", "--trials", "5", "--budget", "2000", "--betas", "0,1e6"]);
    assert_eq!(data_rows(&csv).len(), 10);
    let medians = header_value(&csv, "median_escape_time").unwrap();
    assert!(medians.ends_with("\"censored\"]"), "{medians}");

    let csv = stdout(&[
        "mcmc-escape", "--n", "8", "--trials", "2", "--betas", "0,5", "--trace-steps", "50", "--trace-every", "10",
    ]);
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 2 * 2 * 6);
    for row in rows.iter().filter(|r| r.split(',').nth(2) == Some("0")) {
        assert!(row.ends_with(",1.0"), "chains start at the ground state: {row}");
    }

    let csv = stdout(&["local-optima", "--n", "10", "--eps", "0.3", "--trials", "6"]);
    assert_eq!(data_rows(&csv).len(), 6);
    assert!(header_value(&csv, "predicted_exponent").unwrap().starts_with("0.7"));
}
