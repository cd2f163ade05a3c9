use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use thermoforce_ffi::*;

fn data(name: &str) -> CString {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name);
    CString::new(p.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(tf_last_error()) }.to_string_lossy().into_owned()
}

fn params() -> TfGaParams {
    let mut p = std::mem::MaybeUninit::<TfGaParams>::uninit();
    unsafe {
        tf_ga_params_default(p.as_mut_ptr());
        p.assume_init()
    }
}

#[test]
fn model_handles_and_labels() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(tf_model_test_cell(&mut m), TfStatus::Ok);
        assert_eq!(tf_model_node_count(m), 23);
        assert_eq!(tf_model_air_node(m), 23);

        let label = CString::new("door:inside").unwrap();
        let mut node = 0;
        assert_eq!(tf_model_find_node(m, label.as_ptr(), &mut node), TfStatus::Ok);
        assert_eq!(node, 10);

        let mut needed = 0;
        let mut small = [0 as std::ffi::c_char; 4];
        assert_eq!(
            tf_model_node_label(m, 10, small.as_mut_ptr(), small.len(), &mut needed),
            TfStatus::InvalidArgument
        );
        assert_eq!(needed, "door:inside".len() + 1);
        let mut buf = vec![0 as std::ffi::c_char; needed];
        assert_eq!(tf_model_node_label(m, 10, buf.as_mut_ptr(), buf.len(), ptr::null_mut()), TfStatus::Ok);
        assert_eq!(CStr::from_ptr(buf.as_ptr()).to_str().unwrap(), "door:inside");

        // the text form parses back into an identical model
        assert_eq!(tf_model_to_str(m, ptr::null_mut(), 0, &mut needed), TfStatus::InvalidArgument);
        let mut text = vec![0 as std::ffi::c_char; needed];
        assert_eq!(tf_model_to_str(m, text.as_mut_ptr(), needed, ptr::null_mut()), TfStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(tf_model_from_str(text.as_ptr(), &mut again), TfStatus::Ok);
        assert_eq!(tf_model_node_count(again), 23);

        tf_model_free(again);
        tf_model_free(m);
        tf_model_free(ptr::null_mut());
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let mut m = ptr::null_mut();
        let missing = CString::new("/nonexistent/cell.bld").unwrap();
        assert_eq!(tf_model_from_file(missing.as_ptr(), &mut m), TfStatus::Io);
        assert!(last_error().contains("/nonexistent/cell.bld"));
        assert!(m.is_null());

        let bad = CString::new("[zone]\ncapacity = -1\n").unwrap();
        assert_eq!(tf_model_from_str(bad.as_ptr(), &mut m), TfStatus::Input);
        assert!(!last_error().is_empty());

        assert_eq!(tf_model_test_cell(ptr::null_mut()), TfStatus::InvalidArgument);
        assert_eq!(tf_model_from_str(ptr::null(), &mut m), TfStatus::InvalidArgument);
        assert_eq!(tf_model_node_count(ptr::null()), 0);

        let mut meas = ptr::null_mut();
        assert_eq!(tf_measurements_new(0.0, &mut meas), TfStatus::InvalidArgument);
        assert!(!CStr::from_ptr(tf_version()).to_bytes().is_empty());
    }
}

#[test]
fn simulation_forces_nodes_exactly() {
    unsafe {
        let (mut m, mut w, mut meas) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(tf_model_from_file(data("test_cell.bld").as_ptr(), &mut m), TfStatus::Ok);
        assert_eq!(tf_weather_from_file(data("weather_5day.csv").as_ptr(), &mut w), TfStatus::Ok);
        assert_eq!(tf_weather_len(w), 480);
        assert_eq!(tf_weather_dt(w), 900.0);

        let steps = tf_weather_len(w);
        let door: Vec<f64> = (0..steps).map(|i| 15.0 + (i as f64 * 0.1).sin()).collect();
        assert_eq!(tf_measurements_new(900.0, &mut meas), TfStatus::Ok);
        assert_eq!(tf_measurements_set(meas, 10, door.as_ptr(), door.len()), TfStatus::Ok);

        let forced = [10usize];
        let mut traj = ptr::null_mut();
        assert_eq!(tf_simulate(m, w, meas, forced.as_ptr(), 1, &mut traj), TfStatus::Ok, "{}", last_error());
        assert_eq!(tf_trajectory_steps(traj), steps);
        let mut out = vec![0.0; steps];
        assert_eq!(tf_trajectory_node(traj, 10, out.as_mut_ptr(), out.len()), TfStatus::Ok);
        assert_eq!(out, door);
        assert_eq!(tf_trajectory_node(traj, 10, out.as_mut_ptr(), 3), TfStatus::InvalidArgument);
        assert_eq!(tf_trajectory_node(traj, 24, out.as_mut_ptr(), out.len()), TfStatus::InvalidArgument);
        tf_trajectory_free(traj);

        // the air node is a model output and cannot be forced
        let air = [23usize];
        assert_eq!(tf_simulate(m, w, meas, air.as_ptr(), 1, &mut traj), TfStatus::Input);

        tf_measurements_free(meas);
        tf_weather_free(w);
        tf_model_free(m);
    }
}

#[test]
fn diagnosis_finds_the_door() {
    unsafe {
        let (mut m, mut w, mut meas) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(tf_model_from_file(data("door_defect.bld").as_ptr(), &mut m), TfStatus::Ok);
        assert_eq!(tf_weather_synthetic(&mut w), TfStatus::Ok);
        assert_eq!(
            tf_measurements_from_file(data("reference_measurements.csv").as_ptr(), &mut meas),
            TfStatus::Ok
        );
        let p = params();
        let mut report = ptr::null_mut();
        assert_eq!(tf_diagnose(m, w, meas, &p, &mut report), TfStatus::Ok, "{}", last_error());
        assert_eq!(tf_report_forced_count(report), 1);
        let mut nodes = [0usize; 1];
        assert_eq!(tf_report_forced_nodes(report, nodes.as_mut_ptr(), 1), TfStatus::Ok);
        assert_eq!(nodes, [10]);
        assert!(tf_report_best_objective(report) < 0.2 * tf_report_unforced_objective(report));
        let kv = CStr::from_ptr(tf_report_kv(report)).to_str().unwrap();
        assert_eq!(thermoforce::cli::report_kv_value(kv, "best_nodes"), Some("10"));
        assert!(CStr::from_ptr(tf_report_text(report)).to_str().unwrap().contains("door:inside"));
        tf_report_free(report);
        tf_measurements_free(meas);
        tf_weather_free(w);
        tf_model_free(m);
    }
}

#[test]
fn default_verification_passes() {
    let p = params();
    let (mut passed, mut total) = (0, 0);
    assert_eq!(unsafe { tf_verify_default(&p, &mut passed, &mut total) }, TfStatus::Ok);
    assert_eq!((passed, total), (4, 4));
}

#[test]
fn header_compiles_as_c() {
    let Some(cc) = ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
    else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let o = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(root.join("include"))
        .arg(root.join("examples/diagnose.c"))
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}
