//! File formats and the `thermoforce` command line.

pub mod building_file;
pub mod cases_file;
pub mod report;
mod sections;
pub mod series_file;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::cell;
use crate::diagnose::{self, residual_stats, DiagnosisContext};
use crate::error::{Error, ErrorKind, Result};
use crate::ga::{self, GaConfig};
use crate::model::{build_state, BuildingDescription, NodalModel, NodeId};
use crate::simulate::{self, ForcingSet, MeasurementSeries, WeatherSeries};
use crate::verify::{self, Noise, VerifyOptions};

use cases_file::NodeRef;
pub use report::{report_kv_value, DiagnosisRun};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_VERIFICATION_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "thermoforce",
    version,
    about = "Nodal building simulation with measurement forcing and GA fault localization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a building, optionally forcing nodes to measured values.
    Simulate(SimulateArgs),
    /// Search for the forcing set that best explains the measured air temperature.
    Diagnose(DiagnoseArgs),
    /// Inject known defects into a reference model and check they are localized.
    Verify(VerifyArgs),
    /// Score the unforced model and every single-node forcing.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Building description file.
    #[arg(long)]
    pub building: PathBuf,
    /// Weather CSV.
    #[arg(long)]
    pub weather: PathBuf,
    /// Expected time step in seconds; input files with another step are rejected.
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct GaArgs {
    #[arg(long, default_value_t = ga::DEFAULT_POPULATION)]
    pub pop_size: usize,
    /// Crossover probability.
    #[arg(long, default_value_t = ga::DEFAULT_CROSSOVER)]
    pub pc: f64,
    /// Per-bit mutation probability.
    #[arg(long, default_value_t = ga::DEFAULT_MUTATION)]
    pub pm: f64,
    /// Maximum number of generations.
    #[arg(long, default_value_t = ga::DEFAULT_GENERATIONS)]
    pub generations: usize,
    /// Generations without improvement before stopping.
    #[arg(long, default_value_t = ga::DEFAULT_STAGNATION)]
    pub stagnation: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub no_elitism: bool,
    /// Evaluate candidates on all cores. Results are identical to serial runs.
    #[arg(long)]
    pub parallel: bool,
    /// Also enumerate every subset of measurable nodes.
    #[arg(long)]
    pub exhaustive: bool,
}

impl Default for GaArgs {
    fn default() -> Self {
        Self {
            pop_size: ga::DEFAULT_POPULATION,
            pc: ga::DEFAULT_CROSSOVER,
            pm: ga::DEFAULT_MUTATION,
            generations: ga::DEFAULT_GENERATIONS,
            stagnation: ga::DEFAULT_STAGNATION,
            seed: 0,
            no_elitism: false,
            parallel: false,
            exhaustive: false,
        }
    }
}

impl GaArgs {
    pub fn config(&self, mask: Vec<bool>) -> Result<GaConfig> {
        let c = GaConfig {
            population_size: self.pop_size,
            crossover_probability: self.pc,
            mutation_probability: self.pm,
            max_generations: self.generations,
            seed: self.seed,
            elitism: !self.no_elitism,
            measurable_mask: mask,
            stagnation_generations: self.stagnation,
            parallel: self.parallel,
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Measurement CSV, required when forcing.
    #[arg(long)]
    pub measurements: Option<PathBuf>,
    /// Nodes to force to their measured values.
    #[arg(long, value_delimiter = ',')]
    pub force: Vec<usize>,
    /// Directory for trajectory.csv; without it the CSV goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub measurements: PathBuf,
    #[command(flatten)]
    pub ga: GaArgs,
    /// Leading samples left out of the objective.
    #[arg(long, default_value_t = 0)]
    pub skip_steps: usize,
    /// Output directory.
    #[arg(long, default_value = "thermoforce-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Reference building; defaults to the bundled test cell.
    #[arg(long)]
    pub building: Option<PathBuf>,
    /// Weather CSV; defaults to the bundled five-day sequence.
    #[arg(long)]
    pub weather: Option<PathBuf>,
    /// Case file; defaults to the three bundled cases.
    #[arg(long)]
    pub cases: Option<PathBuf>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[command(flatten)]
    pub ga: GaArgs,
    /// Standard deviation of Gaussian noise added to the pseudo-measurements, degC.
    #[arg(long, default_value_t = 0.0)]
    pub noise_sd: f64,
    #[arg(long, default_value_t = 0)]
    pub skip_steps: usize,
    /// Directory for verify.txt and verify.kv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub measurements: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub skip_steps: usize,
    /// Directory for stats.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Process exit code for a failed run.
pub fn exit_code(e: &Error) -> i32 {
    match e.kind() {
        ErrorKind::Input => EXIT_INPUT,
        ErrorKind::Numerical => EXIT_NUMERICAL,
        ErrorKind::Io => EXIT_IO,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Diagnostics go to `err`.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match run(&cli.command, out) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFICATION_FAILED,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs one command. `Ok(false)` means a verification case failed.
pub fn run(command: &Command, out: &mut dyn Write) -> Result<bool> {
    match command {
        Command::Simulate(a) => cmd_simulate(a, out).map(|_| true),
        Command::Diagnose(a) => cmd_diagnose(a, out).map(|_| true),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Stats(a) => cmd_stats(a, out).map(|_| true),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn check_dt(expected: Option<f64>, actual: f64, what: &str) -> Result<()> {
    match expected {
        Some(dt) if (dt - actual).abs() > 1e-6 => Err(Error::InvalidConfig(format!(
            "--dt {dt} s but {what} has a {actual} s step"
        ))),
        _ => Ok(()),
    }
}

struct Inputs {
    desc: BuildingDescription,
    model: NodalModel,
    sm: crate::model::StateMatrices,
    weather: WeatherSeries,
}

fn load_model(a: &ModelArgs) -> Result<Inputs> {
    let desc = building_file::read_building(&a.building)?;
    let (model, sm) = build_state(&desc)?;
    let weather = series_file::read_weather(&a.weather)?;
    check_dt(a.dt, weather.dt, "the weather file")?;
    Ok(Inputs {
        desc,
        model,
        sm,
        weather,
    })
}

fn load_measurements(path: &Path, weather: &WeatherSeries, dt: Option<f64>) -> Result<MeasurementSeries> {
    let m = series_file::read_measurements(path)?;
    check_dt(dt, m.series.dt, "the measurement file")?;
    if (m.series.dt - weather.dt).abs() > 1e-6 {
        return Err(Error::InvalidSeries(format!(
            "measurement step {} s differs from weather step {} s",
            m.series.dt, weather.dt
        )));
    }
    if let Some(start) = weather.start {
        if m.start != start {
            return Err(Error::InvalidSeries(format!(
                "measurements start at {} but weather starts at {}",
                series_file::format_timestamp(m.start),
                series_file::format_timestamp(start)
            )));
        }
    }
    if m.series.len() != weather.len() {
        return Err(Error::LengthMismatch {
            what: "measurement rows vs weather rows",
            left: m.series.len(),
            right: weather.len(),
        });
    }
    Ok(m.series)
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let inp = load_model(&a.model)?;
    let meas = match &a.measurements {
        Some(p) => Some(load_measurements(p, &inp.weather, a.model.dt)?),
        None => None,
    };
    let forcing: ForcingSet = a.force.iter().map(|k| NodeId(*k)).collect();
    let traj = simulate::simulate_from_rest(&inp.sm, &inp.weather, &forcing, meas.as_ref())?;

    let mut csv = String::from("timestamp");
    for n in &inp.model.nodes {
        let _ = write!(csv, ",node_{}", n.id);
    }
    csv.push('\n');
    for k in 0..traj.steps() {
        csv.push_str(&series_file::timestamp_at(inp.weather.start, inp.weather.dt, k));
        for v in traj.state_at(k) {
            let _ = write!(csv, ",{v}");
        }
        csv.push('\n');
    }
    match &a.out {
        Some(dir) => {
            let path = write_file(dir, "trajectory.csv", &csv)?;
            let air = traj.node(inp.sm.air);
            let summary = format!(
                "{} nodes, {} steps of {} s, final air temperature {:.3} degC\nwrote {}\n",
                inp.model.node_count(),
                traj.steps(),
                traj.dt,
                air[air.len() - 1],
                path.display()
            );
            emit(out, &summary)
        }
        None => emit(out, &csv),
    }
}

/// Runs a diagnosis and returns everything the report writers need.
pub fn run_diagnosis(
    desc: &BuildingDescription,
    weather: WeatherSeries,
    measurements: MeasurementSeries,
    ga_args: &GaArgs,
    skip_steps: usize,
) -> Result<DiagnosisRun> {
    let (model, sm) = build_state(desc)?;
    let air = sm.air;
    let ctx = DiagnosisContext::new(sm, weather, measurements, skip_steps)?;
    let config = ga_args.config(ctx.measurable_mask())?;
    let report = diagnose::diagnose(&ctx, &config, ga_args.exhaustive)?;
    let air_unforced = ctx.simulate(&ForcingSet::empty())?.node(air).to_vec();
    let air_best = ctx.simulate(&report.best_forcing)?.node(air).to_vec();
    Ok(DiagnosisRun {
        model,
        config: GaConfig {
            measurable_mask: ctx.measurable_mask(),
            ..config
        },
        report,
        skip_steps,
        dt: ctx.weather.dt,
        start: ctx.weather.start,
        measured_air: ctx.measurements.get(air).expect("checked").to_vec(),
        air_unforced,
        air_best,
    })
}

/// Writes the diagnosis artifacts into `dir` and returns their paths.
pub fn write_diagnosis(run: &DiagnosisRun, dir: &Path) -> Result<Vec<PathBuf>> {
    Ok(vec![
        write_file(dir, "report.txt", &report::report_text(run))?,
        write_file(dir, "report.kv", &report::report_kv(run))?,
        write_file(dir, "node_scores.csv", &report::node_scores_csv(run))?,
        write_file(dir, "ga_history.csv", &report::ga_history_csv(&run.report.history))?,
        write_file(dir, "air_temperature.csv", &report::air_temperature_csv(run))?,
    ])
}

fn cmd_diagnose(a: &DiagnoseArgs, out: &mut dyn Write) -> Result<()> {
    let inp = load_model(&a.model)?;
    let meas = load_measurements(&a.measurements, &inp.weather, a.model.dt)?;
    let run = run_diagnosis(&inp.desc, inp.weather, meas, &a.ga, a.skip_steps)?;
    let paths = write_diagnosis(&run, &a.out)?;
    let mut text = report::report_text(&run);
    for p in paths {
        let _ = writeln!(text, "wrote {}", p.display());
    }
    emit(out, &text)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<bool> {
    let reference = match &a.building {
        Some(p) => building_file::read_building(p)?,
        None => cell::test_cell(),
    };
    let weather = match &a.weather {
        Some(p) => series_file::read_weather(p)?,
        None => cell::synthetic_weather(),
    };
    check_dt(a.dt, weather.dt, "the weather")?;
    let case_file = match &a.cases {
        Some(p) => cases_file::read_cases(p)?,
        None => cases_file::CaseFile {
            measured: None,
            cases: verify::default_cases(),
        },
    };
    let (model, _) = build_state(&reference)?;
    let measured_refs = case_file.measured.clone().unwrap_or_else(|| {
        cell::MEASURED_LABELS
            .iter()
            .map(|l| NodeRef::Label(l.to_string()))
            .collect()
    });
    let measured = measured_refs
        .iter()
        .map(|r| r.resolve(&model))
        .collect::<Result<Vec<_>>>()?;

    let mask = {
        let mut m = vec![false; model.node_count() - 1];
        for n in &measured {
            if *n == model.air {
                return Err(Error::ForcedOutputNode(*n));
            }
            m[n.index()] = true;
        }
        m
    };
    let config = a.ga.config(mask)?;
    if !(a.noise_sd.is_finite() && a.noise_sd >= 0.0) {
        return Err(Error::InvalidConfig(format!("--noise-sd must be >= 0, got {}", a.noise_sd)));
    }
    let options = VerifyOptions {
        noise: (a.noise_sd > 0.0).then_some(Noise {
            sd: a.noise_sd,
            seed: a.ga.seed,
        }),
        exhaustive: a.ga.exhaustive,
        skip_steps: a.skip_steps,
    };
    let mut outcomes = Vec::with_capacity(case_file.cases.len() + 1);
    for spec in &case_file.cases {
        outcomes.push(verify::run_case(spec, &reference, &weather, &measured, &config, &options)?);
    }
    outcomes.push(verify::run_control(&reference, &weather, &measured, &config, &options)?);

    let text = report::verify_text(&outcomes, &model);
    if let Some(dir) = &a.out {
        write_file(dir, "verify.txt", &text)?;
        write_file(dir, "verify.kv", &report::verify_kv(&outcomes))?;
    }
    emit(out, &text)?;
    Ok(outcomes.iter().all(|o| o.pass))
}

fn cmd_stats(a: &StatsArgs, out: &mut dyn Write) -> Result<()> {
    let inp = load_model(&a.model)?;
    let meas = load_measurements(&a.measurements, &inp.weather, a.model.dt)?;
    let ctx = DiagnosisContext::new(inp.sm, inp.weather, meas, a.skip_steps)?;
    let mut sets = vec![ForcingSet::empty()];
    sets.extend(ctx.measurable_nodes().into_iter().map(|n| ForcingSet::from_iter([n])));

    let mut table = format!(
        "{:<6} {:<24} {:>14} {:>12} {:>12}\n",
        "forced", "label", "J (degC^2)", "mean (degC)", "s.d. (degC)"
    );
    let mut csv = String::from("node,label,objective,residual_mean,residual_sd\n");
    for set in &sets {
        let sim = ctx.simulated_air(set)?;
        let j = diagnose::objective(&sim, ctx.measured_air())?;
        let s = residual_stats(&sim, ctx.measured_air())?;
        let (node, label) = match set.iter().next() {
            Some(n) => (n.to_string(), inp.model.node(n).label.clone()),
            None => ("none".to_string(), String::new()),
        };
        let _ = writeln!(table, "{node:<6} {label:<24} {j:>14.6e} {:>12.4} {:>12.4}", s.mean, s.sd);
        let _ = writeln!(csv, "{node},{label},{j:e},{:e},{:e}", s.mean, s.sd);
    }
    if let Some(dir) = &a.out {
        write_file(dir, "stats.csv", &csv)?;
    }
    emit(out, &table)
}

/// The files shipped in `data/`, generated from the in-code cell, weather
/// and cases. A demo pair is included: the cell with the door conductivity
/// raised, and noise-free measurements taken from the unperturbed cell.
pub fn bundled_files() -> Result<Vec<(&'static str, String)>> {
    let reference = cell::test_cell();
    let weather = cell::synthetic_weather();
    let cases = verify::default_cases();
    let (model, _) = build_state(&reference)?;
    let measured = cell::measured_nodes(&model);
    let door = verify::inject_defect(&reference, &cases[0])?;
    let meas = verify::generate_pseudo_measurements(&reference, &weather, &measured, None)?;
    let case_file = cases_file::CaseFile {
        measured: Some(
            cell::MEASURED_LABELS
                .iter()
                .map(|l| NodeRef::Label(l.to_string()))
                .collect(),
        ),
        cases,
    };
    Ok(vec![
        ("test_cell.bld", building_file::write_building(&reference)),
        ("weather_5day.csv", series_file::write_weather(&weather)),
        ("cases.txt", cases_file::write_cases(&case_file)),
        ("door_defect.bld", building_file::write_building(&door)),
        (
            "reference_measurements.csv",
            series_file::write_measurements(&meas, weather.start),
        ),
    ])
}
