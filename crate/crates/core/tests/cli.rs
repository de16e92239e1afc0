use std::path::Path;
use std::process::{Command, Output};

use nlstw::io;

fn nlstw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlstw"))
        .args(args)
        .env("NLSTW_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const SMALL: [&str; 8] = ["--L", "16", "--n", "32", "--tol", "1e-4", "--max-iter", "3000"];

fn solve_small(dir: &Path) -> Output {
    let mut args = vec!["solve", "--problem", "momentum", "--q", "1.0", "--out", dir.to_str().unwrap()];
    args.extend(SMALL);
    nlstw(&args)
}

#[test]
fn solve_writes_wave_and_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let out = solve_small(tmp.path());
    assert!([0, 2, 3].contains(&code(&out)), "{}", String::from_utf8_lossy(&out.stderr));
    let wave = tmp.path().join("wave.nlstw1");
    let side = json(&tmp.path().join("wave.json"));
    assert!(tmp.path().join("diag.jsonl").exists());

    let psi = io::read_complex(&wave).unwrap();
    assert_eq!((psi.grid().n1(), psi.grid().n2()), (32, 32));
    let copy = tmp.path().join("copy.nlstw1");
    io::write_complex(&copy, &psi).unwrap();
    assert_eq!(std::fs::read(&wave).unwrap(), std::fs::read(&copy).unwrap());

    let diag_dir = tmp.path().join("diag");
    let c = side["c"].as_f64().unwrap();
    let c_arg = format!("{c:e}");
    let d = nlstw(&["diagnose", wave.to_str().unwrap(), "--c", &c_arg, "--out", diag_dir.to_str().unwrap()]);
    assert!([0, 3].contains(&code(&d)));
    let summary = json(&diag_dir.join("diagnose.json"));
    for key in ["E", "Q", "kinetic", "potential", "EGL", "tw_residual"] {
        let (a, b) = (summary[key].as_f64().unwrap(), side[key].as_f64().unwrap());
        assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{key}: {a} vs {b}");
    }
}

#[test]
fn wrong_speed_fails_checks() {
    let tmp = tempfile::tempdir().unwrap();
    solve_small(tmp.path());
    let wave = tmp.path().join("wave.nlstw1");
    let d = nlstw(&["diagnose", wave.to_str().unwrap(), "--c", "0.2", "--out", tmp.path().join("d").to_str().unwrap()]);
    assert_eq!(code(&d), 3);
    let report = std::fs::read_to_string(tmp.path().join("d/diag.jsonl")).unwrap();
    assert!(report.lines().all(|l| serde_json::from_str::<serde_json::Value>(l).is_ok()));
    assert!(report.contains("\"pass\":false"));
}

#[test]
fn bad_input_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_str().unwrap();
    for args in [
        vec!["curve", "--qs", "", "--out", dir],
        vec!["curve", "--qs", "2,1", "--out", dir],
        vec!["solve", "--q", "-1", "--out", dir],
        vec!["solve", "--problem", "sideways", "--q", "1", "--out", dir],
        vec!["solve", "--bogus"],
        vec!["frobnicate"],
        vec!["diagnose", "/nonexistent/field.nlstw1"],
    ] {
        assert_eq!(code(&nlstw(&args)), 1, "{args:?}");
    }
    assert_eq!(code(&nlstw(&["--help"])), 0);
}

#[test]
fn negative_potential_needs_sharp_problem() {
    let out = nlstw(&["solve", "--nl", "cubic_quintic", "--alpha5", "3", "--q", "1", "--L", "8", "--n", "16"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("V changes sign; use problem=sharp"));
}

#[test]
fn config_file_and_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    let out_dir = tmp.path().join("out");
    std::fs::write(
        &cfg,
        format!(
            "[grid]\nL = 16.0\nn = 64\n[problem]\nproblem = \"momentum\"\nq = 1.0\n\
             [solver]\ntol = 1e-4\nmax_iter = 3000\n[output]\ndir = \"{}\"\n",
            out_dir.display()
        ),
    )
    .unwrap();
    let out = nlstw(&["solve", "--config", cfg.to_str().unwrap(), "--n", "32"]);
    assert!([0, 2, 3].contains(&code(&out)));
    let psi = io::read_complex(out_dir.join("wave.nlstw1")).unwrap();
    assert_eq!(psi.grid().n1(), 32);
    assert_eq!(psi.grid().l1(), 16.0);

    std::fs::write(&cfg, "[grid]\nL = 16.0\nwidth = 3\n").unwrap();
    assert_eq!(code(&nlstw(&["solve", "--config", cfg.to_str().unwrap(), "--q", "1"])), 1);
}

#[test]
fn curve_csv_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["curve", "--qs", "0.5,1.0,1.5", "--out", tmp.path().to_str().unwrap()];
    args.extend(SMALL);
    let out = nlstw(&args);
    assert!([0, 2, 3].contains(&code(&out)), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("curve.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("abscissa,value,speed,converged"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(!csv.contains('\r'));
    for (row, q) in rows.iter().zip([0.5, 1.0, 1.5]) {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 4);
        assert_eq!(cols[0].parse::<f64>().unwrap(), q);
        assert!(cols[3] == "true" || cols[3] == "false");
    }
    let summary = json(&tmp.path().join("curve.json"));
    assert!(summary.get("threshold").is_some());
}

#[test]
fn kp_lump_on_small_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let out = nlstw(&["kp", "--gamma", "6", "--L", "24", "--n", "64", "--out", tmp.path().to_str().unwrap()]);
    assert!([0, 3].contains(&code(&out)), "{}", String::from_utf8_lossy(&out.stderr));
    let lump = json(&tmp.path().join("lump.json"));
    assert!(lump["S"].as_f64().unwrap() > 0.0);
    for key in ["gamma", "r1", "r2", "r3", "residual"] {
        assert!(lump[key].is_number(), "{key}");
    }
    assert!(matches!(io::read_field(tmp.path().join("lump.nlstw1")).unwrap(), io::Field::Real(_)));
}

#[test]
fn modulation_ansatz_reports_expansion() {
    let tmp = tempfile::tempdir().unwrap();
    let out = nlstw(&[
        "ansatz", "modulation", "--eps", "0.05", "--lambda", "4", "--sigma", "8", "--L", "32", "--n", "64",
        "--out", tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("expansion.csv")).unwrap();
    assert!(csv.starts_with("name,computed,predicted,relative_error\n"));
    assert!(tmp.path().join("ansatz.nlstw1").exists());
}
