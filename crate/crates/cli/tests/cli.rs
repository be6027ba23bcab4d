use std::process::{Command, Output};

fn twinbeam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twinbeam")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr_record(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().unwrap();
    serde_json::from_str(line).unwrap()
}

#[test]
fn crit_reports_value_and_verdict() {
    let out = twinbeam(&["crit", "--family", "E_p", "--k1", "0", "--k2", "0", "--bp", "1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["value"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert_eq!(v["nonclassical"], true);

    let v = json(&twinbeam(&["crit", "--family", "R_p", "--k1", "2", "--k2", "2", "--bp", "0.1", "--t", "0.5"]));
    assert_eq!(v["target"], "R_p1(2,2)");
    assert_eq!(v["nonclassical"], true);

    let v = json(&twinbeam(&["crit", "--target", "negativity", "--bp", "1", "--bs", "1", "--bi", "1"]));
    assert_eq!(v["nonclassical"], false);
}

#[test]
fn boundary_of_e_w_02_along_bp() {
    let out = twinbeam(&["boundary", "--family", "E_W", "--k1", "0", "--k2", "2", "--axis", "bp"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    let x = v["crossings"][0]["x"].as_f64().unwrap();
    assert!((x - 1.0 / 3.0).abs() < 1e-6, "{x}");
    assert_eq!(v["crossings"].as_array().unwrap().len(), 1);
}

#[test]
fn boundary_without_sign_change_is_a_numerical_failure() {
    let out = twinbeam(&["boundary", "--family", "E_W", "--k1", "0", "--k2", "0", "--axis", "bp"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_record(&out)["kind"], "no_sign_change");
}

#[test]
fn empty_scan_is_a_usage_error() {
    let out = twinbeam(&["scan", "--axis", "bp:0:1:5"]);
    assert_eq!(out.status.code(), Some(1));
    let rec = stderr_record(&out);
    assert_eq!(rec["error"], "usage");
    assert_eq!(rec["kind"], "no_targets");
}

#[test]
fn usage_and_numerical_exit_codes() {
    assert_eq!(twinbeam(&["crit", "--family", "Z"]).status.code(), Some(1));
    assert_eq!(twinbeam(&["crit", "--family", "E_p", "--bp", "-1"]).status.code(), Some(1));
    assert_eq!(twinbeam(&["nonsense"]).status.code(), Some(1));
    assert_eq!(twinbeam(&["crit", "--family", "E_W", "--k1", "6", "--k2", "6"]).status.code(), Some(2));
    let out = twinbeam(&["pnd", "--bp", "3000", "--tail-tol", "1e-16"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_record(&out)["kind"], "truncation");
    assert_eq!(twinbeam(&["--help"]).status.code(), Some(0));
}

#[test]
fn pnd_csv() {
    let out = twinbeam(&["pnd", "--bp", "1", "--nmax", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n1,n2,p"));
    let rows: Vec<(usize, usize, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 16);
    for (a, b, p) in rows {
        let expected = if a == b { 0.5f64.powi(a as i32 + 1) } else { 0.0 };
        assert!((p - expected).abs() < 1e-14, "({a},{b}) {p}");
    }
}

#[test]
fn state_dump() {
    let v = json(&twinbeam(&["state", "--bp", "1", "--t", "0.5"]));
    assert_eq!(v["physical"], true);
    assert!((v["b1"].as_f64().unwrap() - 1.0).abs() < 1e-14);
    assert_eq!(v["normal_covariance"].as_array().unwrap().len(), 4);
    let nu = v["partial_transpose_eigenvalues"][0].as_f64().unwrap();
    assert!((nu - 0.5).abs() < 1e-12);
}

#[test]
fn selftest_passes() {
    let out = twinbeam(&["selftest"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 9);
}

#[test]
fn scan_from_config_writes_all_outputs_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scan.toml");
    std::fs::write(
        &cfg,
        r#"
noise_mode = "balanced"
targets = ["negativity", "E_p(0,0)"]

[fixed]
t = 0.9

[[axis]]
name = "bs"
min = 0.0
max = 1.0
count = 31

[[axis]]
name = "bp"
min = 0.0
max = 5.0
count = 31
"#,
    )
    .unwrap();
    let run = |threads: &str, tag: &str| {
        let csv = dir.path().join(format!("{tag}.csv"));
        let json = dir.path().join(format!("{tag}.json"));
        let svg = dir.path().join(format!("{tag}.svg"));
        let out = Command::new(env!("CARGO_BIN_EXE_twinbeam"))
            .env("TWINBEAM_THREADS", threads)
            .args(["scan", "--config", cfg.to_str().unwrap()])
            .args(["--csv", csv.to_str().unwrap(), "--json", json.to_str().unwrap(), "--svg", svg.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        (std::fs::read(csv).unwrap(), std::fs::read(json).unwrap(), std::fs::read(svg).unwrap())
    };
    let a = run("1", "a");
    let b = run("4", "b");
    assert!(a == b, "outputs differ between thread counts");
    let header = String::from_utf8(a.0).unwrap().lines().next().unwrap().to_string();
    assert!(header.starts_with("bs,bp,negativity,negativity:nonclassical,"), "{header}");
    let records: serde_json::Value = serde_json::from_slice(&a.1).unwrap();
    assert!(!records.as_array().unwrap().is_empty());
    assert!(a.2.starts_with(b"<svg"));
}

#[test]
fn scan_flags_override_config_and_default_to_stdout() {
    let out = twinbeam(&["scan", "--axis", "t:0.5:1:11", "--target", "E_p(0,0)", "--bp", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 12);
    let last: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    assert_eq!(last[0], "1.0");
    assert!((last[1].parse::<f64>().unwrap() + 1.0).abs() < 1e-12);
    assert_eq!(last[2], "1");
}
