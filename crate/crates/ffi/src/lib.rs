//! C ABI over the `thermoforce` crate.
//!
//! Objects are opaque handles created by `tf_*_new`/`tf_*_from_*` and
//! released with the matching `tf_*_free`. Fallible calls return a
//! [`TfStatus`]; on failure `tf_last_error` describes the problem. The
//! message belongs to the calling thread and stays valid until that
//! thread's next failing call.
//!
//! Node numbers are 1-based throughout, as in the file formats.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use thermoforce::cli::{self, building_file, report, series_file, GaArgs};
use thermoforce::model::{build_state, NodalModel};
use thermoforce::simulate::{self, ForcingSet, MeasurementSeries, Trajectory, WeatherSeries};
use thermoforce::{cell, verify, BuildingDescription, Error, ErrorKind, NodeId, StateMatrices};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfStatus {
    Ok = 0,
    /// Null pointer, bad UTF-8, buffer too small or out-of-range argument.
    InvalidArgument = 1,
    /// Malformed or inconsistent input data.
    Input = 2,
    /// Singular system or undefined objective.
    Numerical = 3,
    Io = 4,
    /// A Rust panic was caught at the boundary.
    Internal = 5,
}

pub struct TfModel {
    desc: BuildingDescription,
    model: NodalModel,
    sm: StateMatrices,
}

pub struct TfWeather {
    weather: WeatherSeries,
}

/// Measured series keyed by node; assembled into a rectangular series
/// when used.
pub struct TfMeasurements {
    dt: f64,
    series: BTreeMap<NodeId, Vec<f64>>,
}

pub struct TfTrajectory {
    traj: Trajectory,
}

pub struct TfReport {
    run: report::DiagnosisRun,
    kv: CString,
    text: CString,
}

/// GA and objective settings for [`tf_diagnose`] and [`tf_verify_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TfGaParams {
    pub population_size: usize,
    pub crossover_probability: f64,
    pub mutation_probability: f64,
    pub max_generations: usize,
    pub stagnation_generations: usize,
    pub seed: u64,
    pub elitism: bool,
    pub parallel: bool,
    pub exhaustive: bool,
    pub skip_steps: usize,
}

impl From<&TfGaParams> for GaArgs {
    fn from(p: &TfGaParams) -> Self {
        GaArgs {
            pop_size: p.population_size,
            pc: p.crossover_probability,
            pm: p.mutation_probability,
            generations: p.max_generations,
            stagnation: p.stagnation_generations,
            seed: p.seed,
            no_elitism: !p.elitism,
            parallel: p.parallel,
            exhaustive: p.exhaustive,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(TfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.kind() {
            ErrorKind::Input => TfStatus::Input,
            ErrorKind::Numerical => TfStatus::Numerical,
            ErrorKind::Io => TfStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(TfStatus::InvalidArgument, msg.into())
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TfStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal error: panic in thermoforce");
            TfStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(invalid(format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| invalid(format!("{what} is null")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(invalid("output pointer is null"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Copies `text` with a trailing NUL into `buf` when it fits. `needed`
/// (optional) receives the required size including the NUL.
unsafe fn copy_text(text: &CStr, buf: *mut c_char, len: usize, needed: *mut usize) -> Result<(), Failure> {
    let bytes = text.to_bytes_with_nul();
    if !needed.is_null() {
        *needed = bytes.len();
    }
    if buf.is_null() || len < bytes.len() {
        return Err(invalid(format!("buffer of {len} bytes, {} needed", bytes.len())));
    }
    ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, bytes.len());
    Ok(())
}

fn model_from(desc: BuildingDescription) -> Result<TfModel, Failure> {
    let (model, sm) = build_state(&desc)?;
    Ok(TfModel { desc, model, sm })
}

/// Message of the calling thread's last failure; empty if none. Never null.
#[no_mangle]
pub extern "C" fn tf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tf_model_from_file(path: *const c_char, out: *mut *mut TfModel) -> TfStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let desc = building_file::read_building(Path::new(path))?;
        put(out, model_from(desc)?)
    })
}

/// Parses building description text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tf_model_from_str(text: *const c_char, out: *mut *mut TfModel) -> TfStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let desc = building_file::parse_building(text, "<string>")?;
        put(out, model_from(desc)?)
    })
}

/// The bundled 23-node test cell.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tf_model_test_cell(out: *mut *mut TfModel) -> TfStatus {
    guard(|| put(out, model_from(cell::test_cell())?))
}

/// # Safety
/// `model` must come from a `tf_model_*` constructor, or be null.
#[no_mangle]
pub unsafe extern "C" fn tf_model_free(model: *mut TfModel) {
    free(model)
}

/// Number of nodes; 0 for a null handle.
///
/// # Safety
/// `model` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tf_model_node_count(model: *const TfModel) -> usize {
    model.as_ref().map_or(0, |m| m.model.node_count())
}

/// Node number of the indoor air node; 0 for a null handle.
///
/// # Safety
/// `model` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tf_model_air_node(model: *const TfModel) -> usize {
    model.as_ref().map_or(0, |m| m.sm.air.0)
}

/// Looks up a node by label, e.g. `door:inside`.
///
/// # Safety
/// `model` must be a live handle, `label` a NUL-terminated string and
/// `node` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tf_model_find_node(
    model: *const TfModel,
    label: *const c_char,
    node: *mut usize,
) -> TfStatus {
    guard(|| {
        let m = ref_arg(model, "model")?;
        let label = str_arg(label, "label")?;
        if node.is_null() {
            return Err(invalid("node is null"));
        }
        let id = m
            .model
            .find_by_label(label)
            .ok_or_else(|| Failure(TfStatus::Input, format!("no node labelled `{label}`")))?;
        *node = id.0;
        Ok(())
    })
}

/// Copies the label of `node` into `buf`.
///
/// # Safety
/// `model` must be a live handle; `buf` must hold `len` bytes; `needed`
/// may be null.
#[no_mangle]
pub unsafe extern "C" fn tf_model_node_label(
    model: *const TfModel,
    node: usize,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> TfStatus {
    guard(|| {
        let m = ref_arg(model, "model")?;
        if node == 0 || node > m.model.node_count() {
            return Err(invalid(format!("node {node} out of range 1..={}", m.model.node_count())));
        }
        let label = CString::new(m.model.node(NodeId(node)).label.clone()).unwrap_or_default();
        copy_text(&label, buf, len, needed)
    })
}

/// Writes the model back in the building file format.
///
/// # Safety
/// As for [`tf_model_node_label`].
#[no_mangle]
pub unsafe extern "C" fn tf_model_to_str(
    model: *const TfModel,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> TfStatus {
    guard(|| {
        let m = ref_arg(model, "model")?;
        let text = CString::new(building_file::write_building(&m.desc)).unwrap_or_default();
        copy_text(&text, buf, len, needed)
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tf_weather_from_file(path: *const c_char, out: *mut *mut TfWeather) -> TfStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let weather = series_file::read_weather(Path::new(path))?;
        put(out, TfWeather { weather })
    })
}

/// The bundled five-day quarter-hour weather sequence.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tf_weather_synthetic(out: *mut *mut TfWeather) -> TfStatus {
    guard(|| {
        put(
            out,
            TfWeather {
                weather: cell::synthetic_weather(),
            },
        )
    })
}

/// # Safety
/// `weather` must come from a `tf_weather_*` constructor, or be null.
#[no_mangle]
pub unsafe extern "C" fn tf_weather_free(weather: *mut TfWeather) {
    free(weather)
}

/// # Safety
/// `weather` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tf_weather_len(weather: *const TfWeather) -> usize {
    weather.as_ref().map_or(0, |w| w.weather.len())
}

/// Time step in seconds; 0 for a null handle.
///
/// # Safety
/// `weather` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tf_weather_dt(weather: *const TfWeather) -> f64 {
    weather.as_ref().map_or(0.0, |w| w.weather.dt)
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tf_measurements_from_file(
    path: *const c_char,
    out: *mut *mut TfMeasurements,
) -> TfStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let m = series_file::read_measurements(Path::new(path))?.series;
        let series = m.nodes().map(|n| (n, m.get(n).unwrap().to_vec())).collect();
        put(out, TfMeasurements { dt: m.dt, series })
    })
}

/// An empty measurement set with step `dt` seconds, to be filled with
/// [`tf_measurements_set`].
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tf_measurements_new(dt: f64, out: *mut *mut TfMeasurements) -> TfStatus {
    guard(|| {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid(format!("dt must be > 0, got {dt}")));
        }
        put(
            out,
            TfMeasurements {
                dt,
                series: BTreeMap::new(),
            },
        )
    })
}

/// Sets (or replaces) the series of `node`.
///
/// # Safety
/// `meas` must be a live handle and `values` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn tf_measurements_set(
    meas: *mut TfMeasurements,
    node: usize,
    values: *const f64,
    len: usize,
) -> TfStatus {
    guard(|| {
        let m = meas.as_mut().ok_or_else(|| invalid("measurements is null"))?;
        if node == 0 {
            return Err(invalid("node numbers start at 1"));
        }
        if values.is_null() && len > 0 {
            return Err(invalid("values is null"));
        }
        let v = if len == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(values, len).to_vec()
        };
        m.series.insert(NodeId(node), v);
        Ok(())
    })
}

/// # Safety
/// `meas` must come from a `tf_measurements_*` constructor, or be null.
#[no_mangle]
pub unsafe extern "C" fn tf_measurements_free(meas: *mut TfMeasurements) {
    free(meas)
}

fn series_of(m: &TfMeasurements) -> Result<MeasurementSeries, Failure> {
    Ok(MeasurementSeries::new(m.dt, m.series.clone())?)
}

/// Simulates from the forcing-consistent steady start, forcing the
/// `n_forced` nodes in `forced` to their measured values. `meas` may be
/// null when nothing is forced.
///
/// # Safety
/// Handles must be live (or `meas` null); `forced` must point to
/// `n_forced` values; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tf_simulate(
    model: *const TfModel,
    weather: *const TfWeather,
    meas: *const TfMeasurements,
    forced: *const usize,
    n_forced: usize,
    out: *mut *mut TfTrajectory,
) -> TfStatus {
    guard(|| {
        let m = ref_arg(model, "model")?;
        let w = ref_arg(weather, "weather")?;
        let series = match meas.as_ref() {
            Some(x) => Some(series_of(x)?),
            None => None,
        };
        if forced.is_null() && n_forced > 0 {
            return Err(invalid("forced is null"));
        }
        let set: ForcingSet = if n_forced == 0 {
            ForcingSet::empty()
        } else {
            std::slice::from_raw_parts(forced, n_forced)
                .iter()
                .map(|k| NodeId(*k))
                .collect()
        };
        let traj = simulate::simulate_from_rest(&m.sm, &w.weather, &set, series.as_ref())?;
        put(out, TfTrajectory { traj })
    })
}

/// # Safety
/// `traj` must come from [`tf_simulate`], or be null.
#[no_mangle]
pub unsafe extern "C" fn tf_trajectory_free(traj: *mut TfTrajectory) {
    free(traj)
}

/// # Safety
/// `traj` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tf_trajectory_steps(traj: *const TfTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.traj.steps())
}

/// Copies the temperatures of `node` (one per step) into `buf`, which must
/// hold at least `tf_trajectory_steps` values.
///
/// # Safety
/// `traj` must be a live handle and `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn tf_trajectory_node(
    traj: *const TfTrajectory,
    node: usize,
    buf: *mut f64,
    len: usize,
) -> TfStatus {
    guard(|| {
        let t = &ref_arg(traj, "trajectory")?.traj;
        if node == 0 || node > t.node_count() {
            return Err(invalid(format!("node {node} out of range 1..={}", t.node_count())));
        }
        let values = t.node(NodeId(node));
        if buf.is_null() || len < values.len() {
            return Err(invalid(format!("buffer holds {len} values, {} needed", values.len())));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
        Ok(())
    })
}

/// Fills `params` with the default settings.
///
/// # Safety
/// `params` must be a valid pointer or null.
#[no_mangle]
pub unsafe extern "C" fn tf_ga_params_default(params: *mut TfGaParams) {
    if let Some(p) = params.as_mut() {
        let d = GaArgs::default();
        *p = TfGaParams {
            population_size: d.pop_size,
            crossover_probability: d.pc,
            mutation_probability: d.pm,
            max_generations: d.generations,
            stagnation_generations: d.stagnation,
            seed: d.seed,
            elitism: !d.no_elitism,
            parallel: d.parallel,
            exhaustive: d.exhaustive,
            skip_steps: 0,
        };
    }
}

/// Searches for the forcing set that best explains the measured air
/// temperature. `meas` must contain the air node series.
///
/// # Safety
/// Handles and `params` must be live; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tf_diagnose(
    model: *const TfModel,
    weather: *const TfWeather,
    meas: *const TfMeasurements,
    params: *const TfGaParams,
    out: *mut *mut TfReport,
) -> TfStatus {
    guard(|| {
        let m = ref_arg(model, "model")?;
        let w = ref_arg(weather, "weather")?;
        let series = series_of(ref_arg(meas, "measurements")?)?;
        let p = ref_arg(params, "params")?;
        let run = cli::run_diagnosis(&m.desc, w.weather.clone(), series, &GaArgs::from(p), p.skip_steps)?;
        let kv = CString::new(report::report_kv(&run)).unwrap_or_default();
        let text = CString::new(report::report_text(&run)).unwrap_or_default();
        put(out, TfReport { run, kv, text })
    })
}

/// # Safety
/// `report` must come from [`tf_diagnose`], or be null.
#[no_mangle]
pub unsafe extern "C" fn tf_report_free(report: *mut TfReport) {
    free(report)
}

/// Best objective J (°C²); NaN for a null handle.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tf_report_best_objective(report: *const TfReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.run.report.best.objective)
}

/// Objective J without forcing (°C²); NaN for a null handle.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tf_report_unforced_objective(report: *const TfReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.run.report.unforced_objective)
}

/// Number of nodes in the best forcing set.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tf_report_forced_count(report: *const TfReport) -> usize {
    report.as_ref().map_or(0, |r| r.run.report.best_forcing.len())
}

/// Copies the best forcing set, ascending, into `buf`.
///
/// # Safety
/// `report` must be a live handle and `buf` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn tf_report_forced_nodes(report: *const TfReport, buf: *mut usize, len: usize) -> TfStatus {
    guard(|| {
        let r = ref_arg(report, "report")?;
        let nodes: Vec<usize> = r.run.report.best_forcing.iter().map(|n| n.0).collect();
        if nodes.is_empty() {
            return Ok(());
        }
        if buf.is_null() || len < nodes.len() {
            return Err(invalid(format!("buffer holds {len} values, {} needed", nodes.len())));
        }
        ptr::copy_nonoverlapping(nodes.as_ptr(), buf, nodes.len());
        Ok(())
    })
}

/// The report as `key = value` lines, valid while the handle lives.
///
/// # Safety
/// `report` must be a live handle or null (returns null).
#[no_mangle]
pub unsafe extern "C" fn tf_report_kv(report: *const TfReport) -> *const c_char {
    report.as_ref().map_or(ptr::null(), |r| r.kv.as_ptr())
}

/// The human-readable report, valid while the handle lives.
///
/// # Safety
/// `report` must be a live handle or null (returns null).
#[no_mangle]
pub unsafe extern "C" fn tf_report_text(report: *const TfReport) -> *const c_char {
    report.as_ref().map_or(ptr::null(), |r| r.text.as_ptr())
}

/// Runs the bundled verification cases and the control on the test cell.
/// `passed` and `total` receive the case counts.
///
/// # Safety
/// `params` must be live; `passed` and `total` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tf_verify_default(
    params: *const TfGaParams,
    passed: *mut usize,
    total: *mut usize,
) -> TfStatus {
    guard(|| {
        let p = ref_arg(params, "params")?;
        if passed.is_null() || total.is_null() {
            return Err(invalid("passed/total is null"));
        }
        let reference = cell::test_cell();
        let weather = cell::synthetic_weather();
        let (model, _) = build_state(&reference)?;
        let measured = cell::measured_nodes(&model);
        let mut mask = vec![false; model.node_count() - 1];
        for n in &measured {
            mask[n.index()] = true;
        }
        let config = GaArgs::from(p).config(mask)?;
        let options = verify::VerifyOptions {
            noise: None,
            exhaustive: p.exhaustive,
            skip_steps: p.skip_steps,
        };
        let mut outcomes = Vec::new();
        for spec in verify::default_cases() {
            outcomes.push(verify::run_case(&spec, &reference, &weather, &measured, &config, &options)?);
        }
        outcomes.push(verify::run_control(&reference, &weather, &measured, &config, &options)?);
        *passed = outcomes.iter().filter(|o| o.pass).count();
        *total = outcomes.len();
        Ok(())
    })
}
