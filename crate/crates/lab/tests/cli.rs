use std::path::Path;
use std::process::Command;

use maxavg_lab::cli::{parse_deltas, parse_point, parse_region, run};
use maxavg_core::exponents::{ExponentPoint, Region};

fn maxavg(args: &[&str], out: &Path) -> (i32, String, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_maxavg"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("MAXAVG_OUT")
        .output()
        .unwrap();
    (
        o.status.code().unwrap(),
        String::from_utf8(o.stdout).unwrap(),
        String::from_utf8(o.stderr).unwrap(),
    )
}

fn in_process(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["maxavg"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap() + &String::from_utf8(err).unwrap())
}

#[test]
fn unknown_commands_print_usage() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = maxavg(&["frobnicate"], dir.path());
    assert_eq!(code, 2);
    assert!(err.contains("Usage"), "{err}");
    let (code, _, _) = maxavg(&["surface", "polish"], dir.path());
    assert_eq!(code, 2);
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for args in [
        vec!["extremizer", "sweep", "--point", "3/5", "--out", d],
        vec!["extremizer", "sweep", "--family", "z", "--out", d],
        vec!["extremizer", "sweep", "--deltas", "1..4", "--budget", "10", "--out", d],
        vec!["plates", "audit", "--point", "1/2,1/2", "--out", d],
        vec!["surface", "check", "--surface", "no/such/file", "--out", d],
        vec!["verify", "all", "--surface", "gamma_one", "--out", d],
        vec!["decoupling", "schedule", "--p", "3", "--out", d],
        vec!["exponent", "map", "--region", "V9", "--out", d],
    ] {
        let (code, text) = in_process(&args);
        assert_eq!(code, 2, "{args:?}: {text}");
    }
}

#[test]
fn gamma_one_fails_the_curvature_check() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = maxavg(&["surface", "check", "--surface", "gamma_one"], dir.path());
    assert_eq!(code, 1);
    assert!(out.contains("margin 0 witness theta=(1,0)"), "{out}");
    let json = std::fs::read_to_string(dir.path().join("surface_check.json")).unwrap();
    assert!(json.contains("\"margin_witness\": \"1,0\""), "{json}");
    let (code, _, _) = maxavg(&["surface", "check"], dir.path());
    assert_eq!(code, 0);
}

#[test]
fn surface_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("cubic.surf");
    std::fs::write(&f, "surface = poly\n[poly]\nphi1 = \"u^2 - v^2 + 1/100 u^3 - 3/100 u v^2\"\nphi2 = \"2 u v + 3/100 u^2 v - 1/100 v^3\"\n").unwrap();
    let (code, out, err) = maxavg(&["surface", "check", "--surface", f.to_str().unwrap()], dir.path());
    assert_eq!(code, 0, "{out}{err}");
    let cfg = std::fs::read_to_string(dir.path().join("run.cfg")).unwrap();
    // The surface is recorded by content, not by path.
    assert!(cfg.contains("poly.phi1") && !cfg.contains("cubic.surf"), "{cfg}");
}

#[test]
fn exponent_map_flags_the_strict_vertex() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = maxavg(&["exponent", "map", "--region", "W2", "--grid", "100"], dir.path());
    assert_eq!(code, 0, "{err}");
    let csv = std::fs::read_to_string(dir.path().join("exponent_map.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("inv_p,inv_q,contains,in_closure,excluded,on_boundary,gamma"));
    let row = csv.lines().find(|l| l.starts_with("0.5,0.25,")).unwrap();
    assert_eq!(row, "0.5,0.25,0,1,1,1,-0.25");
    assert_eq!(csv.lines().count(), 1 + 101 * 101);
    let boundary = std::fs::read_to_string(dir.path().join("region_boundary.csv")).unwrap();
    assert!(boundary.contains("3/5,2/5") && boundary.contains("2/3,2/3"));
}

#[test]
fn schedule_reports_exact_exponents() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = maxavg(&["decoupling", "schedule"], dir.path());
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("schedule.json")).unwrap()).unwrap();
    assert_eq!(v["p4_n_steps"], 18);
    assert_eq!(v["p4_total"], "171/250");
    assert_eq!(v["files"]["schedule.csv"], "maxavg.schedule.csv/1");
    let (code, _, _) = maxavg(&["decoupling", "schedule", "--delta0", "1/10", "--log2-lambda", "8"], dir.path());
    assert_eq!(code, 2);
}

#[test]
fn identical_runs_write_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["extremizer", "sweep", "--family", "c", "--point", "11/20,1/5", "--budget", "2000", "--deltas", "3..6"];
    let (ca, _, _) = maxavg(&args, a.path());
    let (cb, _, _) = maxavg(&args, b.path());
    assert_eq!(ca, cb);
    for f in ["sweep.csv", "sweep.json", "sets.txt", "run.cfg"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
    // The written parameters reproduce the run.
    let c = tempfile::tempdir().unwrap();
    let cfg = a.path().join("run.cfg");
    let (cc, _, err) = maxavg(&["extremizer", "sweep", "--config", cfg.to_str().unwrap()], c.path());
    assert_eq!(cc, ca, "{err}");
    assert_eq!(std::fs::read(a.path().join("sweep.json")).unwrap(), std::fs::read(c.path().join("sweep.json")).unwrap());
}

#[test]
fn output_directory_defaults_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_maxavg"))
        .args(["decoupling", "schedule"])
        .env("MAXAVG_OUT", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("schedule.json").exists());
}

#[test]
fn argument_grammars() {
    assert_eq!(parse_point("3/5,2/5").unwrap(), ExponentPoint::ratio(3, 5, 2, 5));
    assert!(parse_point("3/2,0").is_err());
    assert_eq!(parse_deltas("3..5").unwrap(), vec![0.125, 0.0625, 0.03125]);
    assert_eq!(parse_deltas("1/8, 0.0625").unwrap(), vec![0.125, 0.0625]);
    assert_eq!(parse_region("W2").unwrap(), Region::W2);
    assert_eq!(parse_region("W4").unwrap(), Region::Wn(4));
    assert_eq!(parse_region("Wn2").unwrap(), Region::Wn(2));
}
