//! Deterministic report writers. Given the same inputs every writer
//! produces byte-identical output.

use std::fmt::Write as _;

use chrono::NaiveDateTime;

use super::series_file::timestamp_at;
use crate::diagnose::{DiagnosisReport, ResidualStats};
use crate::ga::{GaConfig, GaHistory, StopReason};
use crate::model::{NodalModel, NodeId};
use crate::simulate::ForcingSet;
use crate::verify::VerificationOutcome;

pub const REPORT_FORMAT: &str = "thermoforce-report-1";

/// A finished diagnosis with everything the writers need.
#[derive(Debug, Clone)]
pub struct DiagnosisRun {
    pub model: NodalModel,
    pub config: GaConfig,
    pub report: DiagnosisReport,
    pub skip_steps: usize,
    pub dt: f64,
    pub start: Option<NaiveDateTime>,
    pub measured_air: Vec<f64>,
    pub air_unforced: Vec<f64>,
    pub air_best: Vec<f64>,
}

fn stop_str(s: StopReason) -> &'static str {
    match s {
        StopReason::MaxGenerations => "max-generations",
        StopReason::Stagnation => "stagnation",
    }
}

fn node_list(nodes: impl IntoIterator<Item = NodeId>) -> String {
    let v: Vec<String> = nodes.into_iter().map(|n| n.to_string()).collect();
    v.join(",")
}

fn forcing_words(model: &NodalModel, f: &ForcingSet) -> String {
    if f.is_empty() {
        return "none".into();
    }
    let v: Vec<String> = f
        .iter()
        .map(|n| format!("{n} ({})", model.node(n).label))
        .collect();
    v.join(", ")
}

pub fn report_text(run: &DiagnosisRun) -> String {
    let r = &run.report;
    let c = &run.config;
    let m = &run.model;
    let mut o = String::new();
    let _ = writeln!(o, "thermoforce diagnosis report");
    let _ = writeln!(o);
    let _ = writeln!(o, "nodes              {} (air node {})", m.node_count(), m.air);
    let _ = writeln!(o, "measurable nodes   {}", node_list(r.measurable.iter().copied()));
    let _ = writeln!(
        o,
        "samples            {} (first {} skipped)",
        run.measured_air.len(),
        run.skip_steps
    );
    let _ = writeln!(
        o,
        "GA                 population {}, Pc {}, Pm {}, elitism {}, seed {}",
        c.population_size,
        c.crossover_probability,
        c.mutation_probability,
        if c.elitism { "on" } else { "off" },
        c.seed
    );
    let _ = writeln!(
        o,
        "generations        {} (stopped on {}), {} distinct evaluations",
        r.history.generation_count(),
        stop_str(r.history.stop),
        r.history.evaluations
    );
    let _ = writeln!(o);
    let _ = writeln!(o, "best individual    {}", r.best.chromosome);
    let _ = writeln!(o, "forced nodes       {}", forcing_words(m, &r.best_forcing));
    let _ = writeln!(o, "J best             {:.6e} degC^2", r.best.objective);
    let _ = writeln!(o, "J without forcing  {:.6e} degC^2", r.unforced_objective);
    let _ = writeln!(o, "J ratio            {:.6}", r.improvement_ratio());
    if let Some(ex) = &r.exhaustive {
        let _ = writeln!(
            o,
            "exhaustive best    {} with J {:.6e} degC^2 over {} subsets",
            forcing_words(m, &crate::ga::decode(&ex.best.chromosome)),
            ex.best.objective,
            ex.table.len()
        );
    }
    let _ = writeln!(o);
    let _ = writeln!(o, "J with a single forced node");
    let _ = writeln!(o, "  {:>4}  {:<24} {:>14}", "node", "label", "J (degC^2)");
    for (n, j) in &r.node_scores.single {
        let _ = writeln!(o, "  {:>4}  {:<24} {:>14.6e}", n.0, m.node(*n).label, j);
    }
    let _ = writeln!(o, "  {:>4}  {:<24} {:>14.6e}", "-", "(no forcing)", r.node_scores.unforced);
    let _ = writeln!(o);
    let _ = writeln!(o, "air temperature residuals, measured minus simulated");
    let _ = writeln!(o, "  {:<16} {:>12} {:>12}", "", "mean (degC)", "s.d. (degC)");
    for (name, s) in [("without forcing", &r.residuals_unforced), ("best forcing", &r.residuals_best)] {
        let _ = writeln!(o, "  {:<16} {:>12.4} {:>12.4}", name, s.mean, s.sd);
    }
    o
}

/// `key = value` lines; floats in shortest round-trip exponent form.
pub fn report_kv(run: &DiagnosisRun) -> String {
    let r = &run.report;
    let c = &run.config;
    let mut o = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(o, "{k} = {v}");
    };
    kv("format", REPORT_FORMAT.into());
    kv("node_count", run.model.node_count().to_string());
    kv("air_node", run.model.air.to_string());
    kv("measurable_nodes", node_list(r.measurable.iter().copied()));
    kv("samples", run.measured_air.len().to_string());
    kv("skip_steps", run.skip_steps.to_string());
    kv("dt", format!("{}", run.dt));
    kv("population_size", c.population_size.to_string());
    kv("crossover_probability", format!("{}", c.crossover_probability));
    kv("mutation_probability", format!("{}", c.mutation_probability));
    kv("max_generations", c.max_generations.to_string());
    kv("elitism", c.elitism.to_string());
    kv("seed", c.seed.to_string());
    kv("generations", r.history.generation_count().to_string());
    kv("stop_reason", stop_str(r.history.stop).into());
    kv("evaluations", r.history.evaluations.to_string());
    kv("best_chromosome", r.best.chromosome.bits.iter().map(|b| if *b { '1' } else { '0' }).collect());
    kv("best_nodes", node_list(r.best_forcing.iter()));
    kv("best_objective", format!("{:e}", r.best.objective));
    kv("best_fitness", format!("{:e}", r.best.fitness));
    kv("unforced_objective", format!("{:e}", r.unforced_objective));
    kv("objective_ratio", format!("{:e}", r.improvement_ratio()));
    for (n, j) in &r.node_scores.single {
        kv(&format!("single_objective.node_{n}"), format!("{j:e}"));
    }
    let stats = |o: &ResidualStats| (format!("{:e}", o.mean), format!("{:e}", o.sd));
    let (m0, s0) = stats(&r.residuals_unforced);
    let (m1, s1) = stats(&r.residuals_best);
    kv("residual_mean_unforced", m0);
    kv("residual_sd_unforced", s0);
    kv("residual_mean_best", m1);
    kv("residual_sd_best", s1);
    if let Some(ex) = &r.exhaustive {
        kv("exhaustive_nodes", node_list(crate::ga::decode(&ex.best.chromosome).iter()));
        kv("exhaustive_objective", format!("{:e}", ex.best.objective));
    }
    o
}

pub fn node_scores_csv(run: &DiagnosisRun) -> String {
    let s = &run.report.node_scores;
    let mut o = String::from("node,label,objective\n");
    let _ = writeln!(o, "none,,{:e}", s.unforced);
    for (n, j) in &s.single {
        let _ = writeln!(o, "{n},{},{j:e}", run.model.node(*n).label);
    }
    o
}

pub fn ga_history_csv(h: &GaHistory) -> String {
    let mut o = String::from("generation,best_objective,best_fitness,mean_fitness,best_chromosome\n");
    for g in &h.generations {
        let bits: String = g.best.bits.iter().map(|b| if *b { '1' } else { '0' }).collect();
        let _ = writeln!(
            o,
            "{},{:e},{:e},{:e},{bits}",
            g.generation, g.best_objective, g.best_fitness, g.mean_fitness
        );
    }
    o
}

pub fn air_temperature_csv(run: &DiagnosisRun) -> String {
    let mut o = String::from("timestamp,measured,simulated_unforced,simulated_best\n");
    for (k, ((m, u), b)) in run
        .measured_air
        .iter()
        .zip(&run.air_unforced)
        .zip(&run.air_best)
        .enumerate()
    {
        let _ = writeln!(o, "{},{m},{u},{b}", timestamp_at(run.start, run.dt, k));
    }
    o
}

pub fn verify_text(outcomes: &[VerificationOutcome], model: &NodalModel) -> String {
    let mut o = String::new();
    let _ = writeln!(
        o,
        "{:<10} {:<10} {:<18} {:>13} {:>13} {:>10}  result",
        "case", "expected", "forced nodes", "J unforced", "J best", "ratio"
    );
    for v in outcomes {
        let expected = v.expected.map_or("none".to_string(), |n| n.to_string());
        let forced = if v.best_forcing.is_empty() {
            "none".to_string()
        } else {
            node_list(v.best_forcing.iter())
        };
        let _ = writeln!(
            o,
            "{:<10} {:<10} {:<18} {:>13.4e} {:>13.4e} {:>10.4}  {}",
            v.case_id,
            expected,
            forced,
            v.unforced_objective,
            v.best_objective,
            v.ratio(),
            if v.pass { "PASS" } else { "FAIL" }
        );
    }
    let _ = writeln!(o);
    let _ = writeln!(o, "node labels:");
    let mut seen: Vec<NodeId> = outcomes
        .iter()
        .flat_map(|v| v.best_forcing.iter().chain(v.expected))
        .collect();
    seen.sort();
    seen.dedup();
    for n in seen {
        let _ = writeln!(o, "  {:>3}  {}", n.0, model.node(n).label);
    }
    o
}

pub fn verify_kv(outcomes: &[VerificationOutcome]) -> String {
    let mut o = String::new();
    let _ = writeln!(o, "format = {REPORT_FORMAT}");
    for v in outcomes {
        let p = format!("case.{}", v.case_id);
        let _ = writeln!(o, "{p}.expected = {}", v.expected.map_or(String::new(), |n| n.to_string()));
        let _ = writeln!(o, "{p}.best_nodes = {}", node_list(v.best_forcing.iter()));
        let _ = writeln!(o, "{p}.unforced_objective = {:e}", v.unforced_objective);
        let _ = writeln!(o, "{p}.best_objective = {:e}", v.best_objective);
        if let Some(j) = v.oracle_objective {
            let _ = writeln!(o, "{p}.exhaustive_objective = {j:e}");
        }
        let _ = writeln!(o, "{p}.pass = {}", v.pass);
    }
    let _ = writeln!(o, "all_pass = {}", outcomes.iter().all(|v| v.pass));
    o
}

/// Value of `key` in `key = value` report text.
pub fn report_kv_value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|l| {
        let (k, v) = l.split_once('=')?;
        (k.trim() == key).then(|| v.trim())
    })
}
