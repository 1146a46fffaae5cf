use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qes() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qes"));
    cmd.env_remove("QES_THREADS").env("RUST_LOG", "off");
    cmd
}

fn run(args: &[&str]) -> Output {
    qes().args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn solve_reports_energy_and_ladder() {
    let v = json_of(&run(&["solve", "--lambda", "1", "--n", "0", "--degree", "12"]));
    let e = v["energy"].as_f64().unwrap();
    assert!((e - (1.5 - 3f64.sqrt())).abs() < 1e-8, "{e}");
    assert_eq!(v["degree"], 12);
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 7);
    assert_eq!(v["convergence_ladder"].as_array().unwrap().len(), 6);

    let v = json_of(&run(&["solve", "--lambda", "0"]));
    let last = &v["convergence_ladder"][5];
    assert_eq!(last["degree"], 12);
    assert!(last["relative_error"].as_f64().unwrap() <= 1e-10);
    assert_eq!(v["reference"], "algebraic");
}

#[test]
fn invalid_configuration_exits_2() {
    for args in [
        &["solve", "--lambda", "0.2", "--n", "1", "--degree", "0"][..],
        &["solve", "--lambda", "0.2", "--n", "2"],
        &["qes-exact", "-1"],
        &["phasespace", "--lambda", "4", "--kind", "wigner", "--nx", "40"],
        &["entropy", "--lambda", "4:1:5"],
        &["entropy", "--lambda", "0:1:1"],
        &["solve", "--lambda"],
        &["critical", "--tolerance", "0"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    let out = qes().args(["critical", "--n", "0"]).env("QES_THREADS", "0").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn degree_error_names_the_flag() {
    let out = run(&["solve", "--lambda", "0.2", "--n", "1", "--degree", "0"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--degree"));
}

#[test]
fn qes_exact_sectors() {
    let v = json_of(&run(&["qes-exact", "0"]));
    assert_eq!(v["energies"], serde_json::json!([0.5]));
    let v = json_of(&run(&["qes-exact", "1"]));
    let e: Vec<f64> = v["energies"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    let r3 = 3f64.sqrt();
    assert!((e[0] - (1.5 - r3)).abs() < 1e-14);
    assert!((e[1] - (1.5 + r3)).abs() < 1e-14);
    assert_eq!(v["matrix"].as_array().unwrap().len(), 2);
    assert_eq!(v["states"][0]["coefficients"].as_array().unwrap().len(), 2);
}

#[test]
fn wigner_grid_json_metadata() {
    let v = json_of(&run(&["phasespace", "--lambda", "4", "--n", "0", "--kind", "wigner", "--format", "json"]));
    let meta = &v["metadata"];
    assert!((meta["integral"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!(meta["min"].as_f64().unwrap() < 0.0);
    assert!(meta["negativity_volume"].as_f64().unwrap() > 0.0);
    assert_eq!(v["values"].as_array().unwrap().len(), 241);
}

#[test]
fn odd_state_origin_and_husimi_positivity() {
    let v = json_of(&run(&["phasespace", "--lambda", "-0.75", "--n", "1", "--kind", "wigner", "--format", "json"]));
    let w00 = v["values"][120][120].as_f64().unwrap();
    assert!((w00 + std::f64::consts::FRAC_1_PI).abs() < 1e-6, "{w00}");

    let out = run(&["phasespace", "--lambda", "4", "--kind", "husimi"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("x,p,value\n"));
    let min = csv_rows(&text)
        .iter()
        .map(|r| r[2].parse::<f64>().unwrap())
        .fold(f64::INFINITY, f64::min);
    assert!(min >= 0.0);
}

#[test]
fn several_kinds_need_an_output_directory() {
    let out = run(&["phasespace", "--lambda", "1", "--nx", "41", "--np", "41"]);
    assert_eq!(out.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "phasespace", "--lambda", "1", "--nx", "41", "--np", "41", "--output", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    for kind in ["wigner", "abs-wigner", "husimi"] {
        assert!(dir.path().join(format!("{kind}_n0_lambda1.csv")).exists(), "{kind}");
    }
}

#[test]
fn entropy_sweep_rows() {
    let out = run(&["entropy", "--lambda", "0.7329,4", "--n", "0"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "lambda,n,kind,Re_S2d,Im_S2d,Sx,Sp,St,Re_I");
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 6);
    let find = |lambda: &str, kind: &str| rows.iter().find(|r| r[0] == lambda && r[2] == kind).unwrap().clone();
    let sx = |r: &[String]| r[5].parse::<f64>().unwrap();
    assert!((sx(&find("4", "H")) / 1.70738 - 1.0).abs() < 5e-3);
    assert!((sx(&find("0.7329", "W")) / 0.938019 - 1.0).abs() < 5e-3);

    let v = json_of(&run(&["entropy", "--lambda", "-0.75:4:3", "--kind", "husimi,W", "--format", "json"]));
    let items = v.as_array().unwrap();
    assert_eq!(items.len(), 3);
    for item in items {
        let reports = item["reports"].as_array().unwrap();
        assert_eq!(reports.len(), 2);
        for r in reports {
            let (sx, sp, st) = (r["sx"].as_f64().unwrap(), r["sp"].as_f64().unwrap(), r["st"].as_f64().unwrap());
            assert_eq!(st, sx + sp);
        }
    }
}

#[test]
fn strict_mode_turns_ordering_violations_into_failure() {
    // position entropies of W and |W| cross for the ground state at λ = −0.75
    let args = ["entropy", "--lambda", "-0.75", "--kind", "W"];
    let out = qes().args(args).env("RUST_LOG", "warn").output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("violated"));
    let out = run(&[&args[..], &["--strict"]].concat());
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stdout.is_empty(), "rows are written before the verdict");
}

#[test]
fn crj_rows_per_coupling() {
    let out = run(&["crj", "--lambda", "4", "--n", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "lambda,n,space,pair,value");
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 6);
    let hab = rows.iter().find(|r| r[2] == "momentum" && r[3] == "H-AbsW").unwrap();
    let v: f64 = hab[4].parse().unwrap();
    assert!((v - 0.00993).abs() < 5e-4, "{v}");
}

#[test]
fn critical_couplings() {
    let v = json_of(&run(&["critical", "--n", "0"]));
    let l = v[0]["lambda_c"].as_f64().unwrap();
    assert!((l - 0.7329).abs() < 5e-4, "{l}");
}

#[test]
fn marginals_csv() {
    let out = run(&["marginals", "--lambda", "1", "--kind", "H", "--nx", "41", "--np", "61"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "space,kind,coordinate,density");
    assert_eq!(csv_rows(&text).len(), 41 + 61);
}

fn entropy_file(dir: &Path, name: &str, threads: &str) -> Vec<u8> {
    let path = dir.join(name);
    let out = qes()
        .args(["entropy", "--lambda", "-0.75,1,4", "--n", "1", "--nx", "81", "--np", "81", "--output"])
        .arg(&path)
        .env("QES_THREADS", threads)
        .output()
        .unwrap();
    assert!(out.status.success());
    fs::read(path).unwrap()
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = entropy_file(dir.path(), "a.csv", "1");
    let b = entropy_file(dir.path(), "b.csv", "1");
    let c = entropy_file(dir.path(), "c.csv", "3");
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "# ground state at the exact coupling\ncommand = solve\nlambda = 1\ndegree = 4\n").unwrap();
    let conf = conf.to_str().unwrap();

    let v = json_of(&run(&["--config", conf]));
    assert_eq!(v["degree"], 4);
    assert_eq!(v["lambda"], 1.0);

    let v = json_of(&run(&["solve", "--config", conf, "--degree", "12"]));
    assert_eq!(v["degree"], 12);
    assert!((v["energy"].as_f64().unwrap() - (1.5 - 3f64.sqrt())).abs() < 1e-8);

    let out = run(&["solve", "--config", dir.path().join("missing.conf").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
