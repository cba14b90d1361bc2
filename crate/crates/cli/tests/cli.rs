use std::path::Path;
use std::process::{Command, Output};

fn nslab(args: &[&str], out: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nslab"));
    c.args(args);
    if let Some(o) = out {
        c.arg("--out").arg(o);
    }
    c.output().expect("nslab runs")
}

fn results(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("results.json")).unwrap()).unwrap()
}

#[test]
fn list_names_every_scenario() {
    let o = nslab(&["list"], None);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for s in nslab::SCENARIOS {
        assert!(text.contains(s.name));
    }
}

#[test]
fn verify_special_default() {
    let dir = tempfile::tempdir().unwrap();
    let o = nslab(&["run", "verify-special", "default", "--threads", "1"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(0));
    let r = results(dir.path());
    let c2 = r["results"]["c2"].as_f64().unwrap();
    assert!((c2 - 2.404825557695773).abs() <= 1e-12);
    assert_eq!(r["config"]["scenario"], "verify-special");
    assert!(r["conventions"]["far_field"].as_str().unwrap().contains("8 pi lambda"));
    assert!(dir.path().join("bessel.csv").exists());
}

#[test]
fn corner_with_zero_contrast_has_zero_far_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("corner.cfg");
    std::fs::write(&cfg, "scenario = demo-corner\ncontrast.value = 0\ngrid.n = 48\n").unwrap();
    let o = nslab(&["run", "demo-corner", "--config", cfg.to_str().unwrap()], Some(&dir.path().join("out")));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = results(&dir.path().join("out"));
    assert_eq!(r["results"]["far_field_norm"].as_f64(), Some(0.0));
    assert_eq!(r["config"]["contrast.value"], "0");
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(nslab(&["run", "no-such-scenario", "default"], Some(dir.path())).status.code(), Some(2));
    for body in ["grid.nn = 3\n", "grid.n = many\n", "scenario = thickness\n", "contrast.value 3\n"] {
        let cfg = dir.path().join("bad.cfg");
        std::fs::write(&cfg, body).unwrap();
        let o = nslab(&["run", "demo-corner", "--config", cfg.to_str().unwrap()], Some(dir.path()));
        assert_eq!(o.status.code(), Some(2), "{body}");
    }
    let missing = nslab(&["run", "demo-corner", "--config", "/nonexistent/x.cfg"], Some(dir.path()));
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn failed_check_exits_3_but_writes_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.cfg");
    std::fs::write(&cfg, "check.exponent_tol = 0\ncusp.gammas = 2\n").unwrap();
    let out = dir.path().join("out");
    let o = nslab(&["run", "thickness", "--config", cfg.to_str().unwrap()], Some(&out));
    assert_eq!(o.status.code(), Some(3));
    let r = results(&out);
    assert_eq!(r["passed"], false);
    assert_eq!(r["checks"]["cusp_exponents"], false);
}

#[test]
fn solver_errors_map_to_exit_codes() {
    let e = nslab::CliError::from(nonscatter::Error::NonConvergence { iterations: 1, residual: 1.0, history: vec![] });
    assert_eq!(e.exit_code(), 4);
    assert_eq!(nslab::CliError::from(nonscatter::Error::EmptySupport).exit_code(), 3);
    assert_eq!(nslab::CliError::from(nonscatter::Error::InvalidArgument("x".into())).exit_code(), 2);
}
