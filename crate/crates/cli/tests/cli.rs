use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fdmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdmod")).args(args).env_remove("MODEQ_MAX_ORDER").output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn modeq_heat_coefficients() {
    let v = stdout_json(&fdmod(&["modeq", "--catalog", "heat_centered", "-N", "8"]));
    assert_eq!(v["N"], 8);
    let p4 = v["terms"].as_array().unwrap().iter().find(|t| t["p"] == 4).unwrap();
    assert_eq!(p4["coeff"], "(1-6*lambda)/12");
    assert_eq!(p4["grading"], 2);
}

#[test]
fn modeq_verify_passes() {
    for name in ["heat_centered", "upwind_euler", "lax_wendroff"] {
        let out = fdmod(&["modeq", "--catalog", name, "-N", "4", "--verify"]);
        assert_eq!(out.status.code(), Some(0), "{name}");
    }
}

#[test]
fn modeq_rejects_inconsistent_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.scheme");
    fs::write(&path, "scheme broken\nq = 2\npde A[2] = -1\nstencil B[-1] = 1\nstencil B[0] = -2\nstencil B[1] = 2\n")
        .unwrap();
    let out = fdmod(&["modeq", "--file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sum of B_p"));
}

#[test]
fn modeq_reads_scheme_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("heat.scheme");
    fs::write(&path, "scheme my_heat\nq = 2\npde A[2] = -1\nstencil B[-1] = 1\nstencil B[0] = -2\nstencil B[1] = 1\n")
        .unwrap();
    let v = stdout_json(&fdmod(&["modeq", "--file", path.to_str().unwrap(), "-N", "6"]));
    assert_eq!(v["scheme"], "my_heat");
    assert_eq!(v["terms"][5]["coeff"], "(1-30*lambda+120*lambda^2)/360");
}

#[test]
fn order_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_fdmod"))
        .args(["modeq", "--catalog", "heat_centered", "-N", "12"])
        .env("MODEQ_MAX_ORDER", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn source_is_required_and_exclusive() {
    assert_eq!(fdmod(&["modeq"]).status.code(), Some(1));
    assert_eq!(fdmod(&["modeq", "--catalog", "heat_centered", "--file", "x"]).status.code(), Some(1));
    assert_eq!(fdmod(&["modeq", "--catalog", "nope"]).status.code(), Some(1));
}

#[test]
fn regions_report_boundaries() {
    let dir = tempfile::tempdir().unwrap();
    let out = fdmod(&[
        "regions",
        "--catalog",
        "heat_centered",
        "--lambda-range",
        "0:0.6:601",
        "--grid",
        "512",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("heat_centered_regions.json")).unwrap()).unwrap();
    assert!((report["rs_boundary"].as_f64().unwrap() - 0.5).abs() <= 0.001 + 1e-12);
    assert!((report["omega_c_boundary"].as_f64().unwrap() - 0.25).abs() <= 0.001 + 1e-12);
    assert!(dir.path().join("heat_centered_regions.csv").exists());
    assert!(String::from_utf8_lossy(&out.stdout).contains("R_s boundary: 5.0000000000000000e-1"));

    let up =
        stdout_json(&fdmod(&["regions", "--catalog", "upwind_euler", "--lambda-range", "0:1.2:1201", "--grid", "512"]));
    assert!((up["rs_boundary"].as_f64().unwrap() - 1.0).abs() <= 0.001 + 1e-12);
}

#[test]
fn regions_rejects_empty_range() {
    let out = fdmod(&["regions", "--catalog", "heat_centered", "--lambda-range", "0.5:0.5:10"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn radius_values() {
    let v = stdout_json(&fdmod(&["radius", "--catalog", "heat_centered", "--lambdas", "1/2,1/4"]));
    let pi = std::f64::consts::PI;
    for (res, want) in v["results"].as_array().unwrap().iter().zip([pi / 2.0, pi]) {
        assert!((res["zero_search"]["value"].as_f64().unwrap() - want).abs() < 1e-8);
        assert!((res["closed_form"]["value"].as_f64().unwrap() - want).abs() < 1e-12);
        assert!((res["root_test"]["value"].as_f64().unwrap() - want).abs() < 0.05 * want);
    }
    let up = stdout_json(&fdmod(&["radius", "--catalog", "upwind_euler", "--lambdas", "1"]));
    assert_eq!(up["results"][0]["root_test"]["diagnostics"]["infinite"], true);
    assert!(up["results"][0]["root_test"]["value"].is_null());
    assert!(up["results"][0].get("closed_form").is_none());
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> =
        fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    names
}

#[test]
fn figures_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = fdmod(&["figures", "--catalog", "heat_centered", "--lambdas", "0.5,0.25", "-N", "2,8", "--out", d]);
    assert!(out.status.success());
    let names = listing(dir.path());
    assert!(names.contains(&"heat_centered_lambda0.5.csv".to_string()));
    assert!(names.contains(&"heat_centered_lambda0.25.csv".to_string()));
    let text = fs::read_to_string(dir.path().join("heat_centered_lambda0.25.csv")).unwrap();
    assert!(text.starts_with("theta,abs_S,abs_S_N2,abs_S_N8\n"));
    assert_eq!(text.lines().count(), 4098);

    let up = tempfile::tempdir().unwrap();
    let out = fdmod(&[
        "figures",
        "--catalog",
        "upwind_euler",
        "--lambdas",
        "0.25,0.5,0.75,1.0,1.02,1.05",
        "-N",
        "6",
        "--out",
        up.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(listing(up.path()).iter().filter(|n| n.starts_with("upwind_euler_lambda")).count(), 6);
}

#[test]
fn figures_need_lambdas() {
    let dir = tempfile::tempdir().unwrap();
    let out = fdmod(&["figures", "--catalog", "heat_centered", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn outputs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = fdmod(&[
            "regions",
            "--catalog",
            "upwind_euler",
            "--lambda-range",
            "0:1.2:121",
            "-N",
            "2,4",
            "--grid",
            "256",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    for name in listing(a.path()) {
        assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap(), "{name}");
    }
}

#[test]
fn certify_inside_and_outside() {
    let v = stdout_json(&fdmod(&["certify", "--catalog", "heat_centered", "--lambdas", "0.2", "-N", "4"]));
    assert!(v[0]["bound"].as_f64().unwrap() >= 1.0);
    assert_eq!(v[0]["a_is_grid_estimate"], true);
    let out = fdmod(&["certify", "--catalog", "heat_centered", "--lambdas", "0.3", "-N", "4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn symmetry_check() {
    let v = stdout_json(&fdmod(&["symmetry", "--lambdas", "0.1,0.25,0.4", "-N", "12"]));
    for report in v.as_array().unwrap() {
        assert!(report["max_modulus_gap"].as_f64().unwrap() <= 1e-12);
        for pair in report["coefficients"].as_array().unwrap() {
            assert_eq!(pair["below"], pair["above"]);
        }
    }
    assert_eq!(fdmod(&["symmetry", "--lambdas", "0.7"]).status.code(), Some(1));
}
