use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use thermoforce::cli::{bundled_files, report_kv_value};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn thermoforce(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thermoforce"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn bundled_data_matches_generators() {
    for (name, text) in bundled_files().unwrap() {
        let on_disk = fs::read_to_string(data(name)).unwrap();
        assert!(on_disk == text, "data/{name} is stale; rerun the write_bundled_data example");
    }
}

#[test]
fn diagnose_names_the_door_node() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = thermoforce(&[
        "diagnose",
        "--building",
        arg(&data("door_defect.bld")),
        "--weather",
        arg(&data("weather_5day.csv")),
        "--measurements",
        arg(&data("reference_measurements.csv")),
        "--exhaustive",
        "--out",
        arg(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let kv = fs::read_to_string(out.join("report.kv")).unwrap();
    assert_eq!(report_kv_value(&kv, "best_nodes"), Some("10"));
    assert_eq!(report_kv_value(&kv, "exhaustive_nodes"), Some("10"));
    assert_eq!(report_kv_value(&kv, "samples"), Some("480"));
    let text = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(text.contains("10 (door:inside)"));

    let history = fs::read_to_string(out.join("ga_history.csv")).unwrap();
    assert!(history.starts_with("generation,best_objective,"));
    let air = fs::read_to_string(out.join("air_temperature.csv")).unwrap();
    assert_eq!(air.lines().count(), 481);
    assert!(air.lines().nth(1).unwrap().starts_with("2000-03-01T00:00:00,"));
    let scores = fs::read_to_string(out.join("node_scores.csv")).unwrap();
    assert_eq!(scores.lines().count(), 7);
}

#[test]
fn verify_defaults_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = thermoforce(&["verify", "--out", arg(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(stdout.matches("PASS").count(), 4, "{stdout}");
    let kv = fs::read_to_string(dir.path().join("verify.kv")).unwrap();
    assert_eq!(report_kv_value(&kv, "all_pass"), Some("true"));
    assert_eq!(report_kv_value(&kv, "case.1.best_nodes"), Some("10"));
    assert_eq!(report_kv_value(&kv, "case.3.best_nodes"), Some("14"));
}

#[test]
fn verify_with_bundled_files_and_noise() {
    let o = thermoforce(&[
        "verify",
        "--building",
        arg(&data("test_cell.bld")),
        "--weather",
        arg(&data("weather_5day.csv")),
        "--cases",
        arg(&data("cases.txt")),
        "--noise-sd",
        "0.05",
        "--seed",
        "3",
        "--dt",
        "900",
    ]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    // the noise-free control still passes; the defect cases stay localized
    assert_eq!(o.status.code(), Some(0), "{stdout}{}", stderr(&o));
}

#[test]
fn unlocalizable_case_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let cases = dir.path().join("cases.txt");
    fs::write(
        &cases,
        "[measured]\nnodes = floor:internal1 floor:internal2\n\n[case door]\ntarget = component.door.layer.1.conductivity\nbase = 0.23\nperturbed = 0.78\n",
    )
    .unwrap();
    let o = thermoforce(&["verify", "--cases", arg(&cases)]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(String::from_utf8(o.stdout).unwrap().contains("FAIL"));
}

#[test]
fn corrupted_case_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let cases = dir.path().join("cases.txt");
    fs::write(&cases, "[case 1]\ntarget = component.door.layer.1.conductivity\nbase = 0.23\nperturbed = abc\n").unwrap();
    let o = thermoforce(&["verify", "--cases", arg(&cases)]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains(":4: perturbed:"), "{e}");
}

#[test]
fn invalid_building_reports_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let bld = dir.path().join("bad.bld");
    let text = fs::read_to_string(data("test_cell.bld")).unwrap();
    let bad = text.replacen("alpha = 0.6", "alpha = 1.2", 1);
    assert_ne!(bad, text);
    fs::write(&bld, &bad).unwrap();
    let line = bad.lines().position(|l| l == "alpha = 1.2").unwrap() + 1;
    let o = thermoforce(&["simulate", "--building", arg(&bld), "--weather", arg(&data("weather_5day.csv"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(&format!(":{line}: alpha:")), "{}", stderr(&o));

    fs::write(&bld, "").unwrap();
    let o = thermoforce(&["simulate", "--building", arg(&bld), "--weather", arg(&data("weather_5day.csv"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_air_column_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let meas = dir.path().join("m.csv");
    let text = fs::read_to_string(data("reference_measurements.csv")).unwrap();
    let trimmed: String = text
        .lines()
        .map(|l| {
            let mut cells: Vec<&str> = l.split(',').collect();
            cells.pop();
            cells.join(",") + "\n"
        })
        .collect();
    fs::write(&meas, trimmed).unwrap();
    let o = thermoforce(&[
        "diagnose",
        "--building",
        arg(&data("door_defect.bld")),
        "--weather",
        arg(&data("weather_5day.csv")),
        "--measurements",
        arg(&meas),
        "--out",
        arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("air node 23"), "{}", stderr(&o));
}

#[test]
fn dt_flag_and_step_mismatch() {
    let o = thermoforce(&[
        "simulate",
        "--building",
        arg(&data("test_cell.bld")),
        "--weather",
        arg(&data("weather_5day.csv")),
        "--dt",
        "600",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--dt 600"));

    let dir = tempfile::tempdir().unwrap();
    let meas = dir.path().join("m.csv");
    let text = fs::read_to_string(data("reference_measurements.csv")).unwrap();
    let half: String = text
        .lines()
        .enumerate()
        .filter(|(i, _)| *i == 0 || i % 2 == 1)
        .map(|(_, l)| format!("{l}\n"))
        .collect();
    fs::write(&meas, half).unwrap();
    let o = thermoforce(&[
        "stats",
        "--building",
        arg(&data("test_cell.bld")),
        "--weather",
        arg(&data("weather_5day.csv")),
        "--measurements",
        arg(&meas),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("1800 s differs from weather step 900 s"), "{}", stderr(&o));
}

#[test]
fn singular_model_is_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let bld = dir.path().join("z.bld");
    let text = fs::read_to_string(data("test_cell.bld")).unwrap();
    let zeroed: String = text
        .lines()
        .map(|l| if l.starts_with("h_ri =") { "h_ri = 0\n".to_string() } else { format!("{l}\n") })
        .collect();
    fs::write(&bld, zeroed).unwrap();
    let o = thermoforce(&["simulate", "--building", arg(&bld), "--weather", arg(&data("weather_5day.csv"))]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn missing_file_is_an_io_error() {
    let o = thermoforce(&["simulate", "--building", "/nonexistent/b.bld", "--weather", "w.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/nonexistent/b.bld"));
}

#[test]
fn simulate_writes_a_trajectory() {
    let o = thermoforce(&[
        "simulate",
        "--building",
        arg(&data("test_cell.bld")),
        "--weather",
        arg(&data("weather_5day.csv")),
        "--measurements",
        arg(&data("reference_measurements.csv")),
        "--force",
        "10,14",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = String::from_utf8(o.stdout).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), 24);
    assert_eq!(header[23], "node_23");
    assert_eq!(lines.count(), 480);

    // forced columns reproduce the measurement file text exactly
    let meas = fs::read_to_string(data("reference_measurements.csv")).unwrap();
    let meas_row: Vec<&str> = meas.lines().nth(100).unwrap().split(',').collect();
    let sim_row: Vec<&str> = csv.lines().nth(100).unwrap().split(',').collect();
    assert_eq!(sim_row[10], meas_row[2]);
    assert_eq!(sim_row[14], meas_row[3]);
}

#[test]
fn forcing_the_air_node_is_rejected() {
    let o = thermoforce(&[
        "simulate",
        "--building",
        arg(&data("test_cell.bld")),
        "--weather",
        arg(&data("weather_5day.csv")),
        "--force",
        "23",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("model output"));
}

#[test]
fn stats_lists_every_measurable_node() {
    let dir = tempfile::tempdir().unwrap();
    let o = thermoforce(&[
        "stats",
        "--building",
        arg(&data("door_defect.bld")),
        "--weather",
        arg(&data("weather_5day.csv")),
        "--measurements",
        arg(&data("reference_measurements.csv")),
        "--out",
        arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("stats.csv")).unwrap();
    let nodes: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(nodes, ["none", "2", "10", "14", "16", "17"]);
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(thermoforce(&["diagnose"]).status.code(), Some(2));
    assert_eq!(thermoforce(&["frobnicate"]).status.code(), Some(2));
    let help = thermoforce(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    let text = String::from_utf8(help.stdout).unwrap();
    for cmd in ["simulate", "diagnose", "verify", "stats"] {
        assert!(text.contains(cmd));
    }
}

#[test]
fn ga_overrides_are_validated() {
    let o = thermoforce(&["verify", "--pop-size", "7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("population size"));
    let o = thermoforce(&["verify", "--pc", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
}
