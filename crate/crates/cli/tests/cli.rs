use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const FIXTURE: &str = r#"{"n": 4, "relators": ["abABcdCD"]}"#;

fn relsep(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_relsep"));
    cmd.args(args).env_remove("RELSEP_SEED");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn small_config(dir: &Path) -> String {
    let pres = write(dir, "surface.json", FIXTURE);
    let cfg = serde_json::json!({
        "presentation": pres,
        "ball_radius": 5,
        "inner_radius": 2,
        "oracle": "exact",
    });
    write(dir, "config.json", &cfg.to_string())
}

#[test]
fn halve_and_certify_the_fixture() {
    let dir = TempDir::new().unwrap();
    let pres = write(dir.path(), "p.json", FIXTURE);
    let halved = dir.path().join("h.json");
    let o = relsep(&["halve", &pres, "--out", halved.to_str().unwrap()], &[]);
    assert_eq!(code(&o), 0);
    let h: serde_json::Value = serde_json::from_str(&fs::read_to_string(&halved).unwrap()).unwrap();
    assert!(h.to_string().contains("abAB") && h.to_string().contains("cdCD"));

    assert_eq!(code(&relsep(&["check-sc", &pres], &[])), 0);
    assert_eq!(code(&relsep(&["aspherical-checks", &pres], &[])), 0);
    // the halves have pieces of length 1 against relators of length 4
    assert_eq!(code(&relsep(&["check-sc", halved.to_str().unwrap(), "--halves"], &[])), 3);
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"ball_radius": 3, "inner_radius": 2, "colour": 1}"#);
    assert_eq!(code(&relsep(&["pipeline", &bad], &[])), 2);
    let none = write(dir.path(), "none.json", r#"{"ball_radius": 3, "inner_radius": 2}"#);
    assert_eq!(code(&relsep(&["pipeline", &none], &[])), 2);
    let wide = write(
        dir.path(),
        "wide.json",
        &serde_json::json!({"presentation": {"n": 4, "relators": ["abABcdCD"]}, "ball_radius": 3, "inner_radius": 2, "margin": 2}).to_string(),
    );
    assert_eq!(code(&relsep(&["pipeline", &wide], &[])), 2);
    let o = relsep(&["sample", "--n", "3", "--l", "8", "--d", "0.2"], &[("RELSEP_SEED", "seven")]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&relsep(&["sample", "--n", "3", "--l", "8", "--d", "1.5", "--seed", "1"], &[])), 2);
}

#[test]
fn seed_variable_overrides_flags() {
    let a = relsep(&["sample", "--model", "density", "--n", "3", "--len", "8", "--d", "0.2", "--seed", "5"], &[]);
    let b = relsep(&["sample", "--n", "3", "--l", "8", "--d", "0.2", "--seed", "1"], &[("RELSEP_SEED", "5")]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = relsep(&["sample", "--n", "3", "--l", "8", "--d", "0.2", "--seed", "6"], &[]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn pipeline_artifacts_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let cfg = small_config(dir.path());
    let runs: Vec<_> = ["one", "two"]
        .iter()
        .map(|name| {
            let out = dir.path().join(name);
            let o = relsep(&["pipeline", &cfg, "--out", out.to_str().unwrap()], &[]);
            assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
            out
        })
        .collect();
    let names = [
        "presentation.json",
        "halved.json",
        "certificates.json",
        "ball.json",
        "cover.json",
        "walls.json",
        "complex.json",
        "report.json",
    ];
    for name in names {
        let a = fs::read(runs[0].join(name)).unwrap_or_else(|_| panic!("{name} missing"));
        assert_eq!(a, fs::read(runs[1].join(name)).unwrap(), "{name} differs");
    }
    let report: serde_json::Value = serde_json::from_slice(&fs::read(runs[0].join("report.json")).unwrap()).unwrap();
    assert_eq!(report["status"], "pass");
}

#[test]
fn uncertified_sample_exits_3() {
    let dir = TempDir::new().unwrap();
    let cfg = serde_json::json!({
        "model": {"family": "density", "n": 3, "l": 18, "d": 0.05, "seed": 20261016},
        "ball_radius": 4,
        "inner_radius": 2,
    });
    let cfg = write(dir.path(), "model.json", &cfg.to_string());
    let o = relsep(&["pipeline", &cfg], &[]);
    assert_eq!(code(&o), 3);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["status"], "uncertified");
}

#[test]
fn stage_commands_print_artifacts() {
    let dir = TempDir::new().unwrap();
    let pres = write(dir.path(), "p.json", FIXTURE);
    let args = ["--ball-radius", "5", "--inner-radius", "2", "--oracle", "exact"];
    let o = relsep(&[&["walls", pres.as_str()][..], &args].concat(), &[]);
    assert_eq!(code(&o), 0);
    let walls: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(walls["walls"].as_array().unwrap().len(), 31);
    let o = relsep(&["ball", &pres, "--radius", "2", "--oracle", "exact", "--format", "dot"], &[]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("digraph") || String::from_utf8_lossy(&o.stdout).starts_with("graph"));
}
