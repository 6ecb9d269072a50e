use std::process::{Command, Output};

use serde_json::Value;

fn nla(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nla"))
        .args(args)
        .env_remove("NLA_DEFAULT_DIM")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn close(v: &Value, want: f64, tol: f64) {
    let got = v.as_f64().unwrap_or(f64::NAN);
    assert!((got - want).abs() <= tol, "{got} vs {want}");
}

#[test]
fn params_reports_effective_parameters() {
    let v = json(&nla(&["params", "--T", "0.6", "--eps", "0.2", "--g", "1.5"]));
    close(&v["g_in"], 1.3456635, 1e-6);
    close(&v["eta"], 0.8713191, 1e-6);
    close(&v["mu"], 1.0810811, 1e-6);
    close(&v["chi_tot"], 0.4826852, 1e-6);
    close(&v["g_lim"], 4.2031734, 1e-6);
    close(&v["g_max"], 1.7663318, 1e-6);
    assert_eq!(v["reduction"]["kind"], "LOSS");
    close(&v["reduction"]["delta"], 0.335, 1e-9);
}

#[test]
fn params_noiseless_lossless_channel_is_trivial() {
    let v = json(&nla(&["params", "--T", "1", "--eps", "0", "--g", "3"]));
    close(&v["eta"], 1.0, 1e-12);
    close(&v["g_in"], 3.0, 1e-12);
    assert!(v["g_lim"].is_null(), "infinite bound serializes as null");
    assert_eq!(v["reduction"]["kind"], "NOISE_ONLY");
}

#[test]
fn unphysical_gain_is_a_usage_error_naming_the_bound() {
    let out = nla(&["params", "--T", "0.6", "--eps", "0.2", "--g", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("g_lim = 4.2031734"));
}

#[test]
fn bad_flags_exit_two() {
    assert_eq!(nla(&["params", "--T", "1.5"]).status.code(), Some(2));
    assert_eq!(nla(&["params", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        nla(&["verify", "--state", "fock", "--param", "1.5"]).status.code(),
        Some(2)
    );
    assert_eq!(nla(&["verify", "--amp-gain", "3"]).status.code(), Some(2));
}

#[test]
fn verify_defaults_pass() {
    let v = json(&nla(&["verify"]));
    assert_eq!(v["passed"], true);
    close(&v["fidelity"], 1.0, 1e-6);
    close(&v["mu_expected"], 1.0810811, 1e-6);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(
        keys,
        [
            "fidelity",
            "trace_ratio",
            "mu_expected",
            "mu_rel_error",
            "truncation_margin",
            "passed"
        ]
    );
}

#[test]
fn verify_unit_gain_has_unit_fidelity() {
    let v = json(&nla(&["verify", "--g", "1", "--state", "fock", "--param", "2"]));
    assert_eq!(v["passed"], true);
    close(&v["fidelity"], 1.0, 1e-10);
}

#[test]
fn verify_general_reduction() {
    let v = json(&nla(&["verify", "--amp-gain", "1.1", "--state", "thermal"]));
    assert_eq!(v["passed"], true);
}

#[test]
fn verify_small_basis_is_truncation_error() {
    let out = nla(&["verify", "--dim", "10", "--state", "cat", "--param", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_failure_exits_one_after_report() {
    // An impossible fidelity tolerance cannot pass.
    let out = nla(&["verify", "--tol-f=-1"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], false);
}

#[test]
fn dim_default_comes_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_nla"))
        .args(["verify", "--state", "cat", "--param", "1"])
        .env("NLA_DEFAULT_DIM", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn phase_csv_rows() {
    let out = nla(&["phase", "--alpha", "1", "--g", "1.5", "--eps", "0,0.4,1.5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "eps,phi_rad,snr,g_tilde,g_in,chi_tot,lambda_ch_sq"
    );
    let phis: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    let want = [0.6435011088, 0.7101842569, 0.3065840652];
    assert_eq!(phis.len(), 3);
    for (got, want) in phis.iter().zip(want) {
        assert!((got - want).abs() < 1e-8, "{got} vs {want}");
    }
}

#[test]
fn phase_default_grid_and_json() {
    let v = json(&nla(&["phase", "--points", "20", "--format", "json"]));
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 20);
    assert!(rows.last().unwrap()["eps"].as_f64().unwrap() < 1.6);
    let seq = json(&nla(&["phase", "--points", "20", "--format", "json", "--sequential"]));
    assert_eq!(v, seq);
}

#[test]
fn phase_beyond_noise_limit_exits_two() {
    let out = nla(&["phase", "--eps", "0,1.7"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eps_lim = 1.6"));
}

#[test]
fn suppress_restores_pure_loss() {
    let v = json(&nla(&[
        "suppress", "--T", "0.5", "--eps", "0", "--g", "2", "--state", "coherent", "--param", "1",
    ]));
    close(&v["nu"], 0.6324555, 1e-7);
    close(&v["eta"], 0.8, 1e-9);
    assert!(v["fidelity"].as_f64().unwrap() >= 1.0 - 1e-7);
}

#[test]
fn wigner_grid_of_single_photon() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    let out = nla(&[
        "wigner",
        "--state",
        "fock",
        "--param",
        "1",
        "--range",
        "4",
        "--step",
        "0.1",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x,p,w");
    let rows: Vec<[f64; 3]> = lines
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            [f[0], f[1], f[2]]
        })
        .collect();
    assert_eq!(rows.len(), 81 * 81);
    let origin = rows.iter().find(|r| r[0] == 0.0 && r[1] == 0.0).unwrap();
    // Normalized so that W integrates to one over dx dp.
    assert!((origin[2] + 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-6);
    // About 0.3% of the mass lies outside |x|, |p| <= 4.
    let integral: f64 = rows.iter().map(|r| r[2]).sum::<f64>() * 0.01;
    assert!((integral - 1.0).abs() < 1e-2, "{integral}");
}
