//! Verification against a reference model: perturb one sub-model, diagnose
//! it against pseudo-measurements from the unperturbed reference, and check
//! that the GA points at the perturbed component.

use std::fmt;
use std::str::FromStr;

use rand_distr::{Distribution, Normal};

use crate::diagnose::{self, DiagnosisContext, DiagnosisReport};
use crate::error::{Error, Result};
use crate::ga::{self, GaConfig};
use crate::model::{build_state, BuildingDescription, NodeId};
use crate::simulate::{simulate_from_rest, ForcingSet, MeasurementSeries, WeatherSeries};

/// Localization succeeds when forcing brings J below this share of the
/// unforced J.
pub const LOCALIZATION_RATIO: f64 = 0.2;
/// A defect that forcing cannot repair must leave J above this share.
pub const NO_IMPROVEMENT_RATIO: f64 = 0.9;
/// Empty-set J bound when a model is diagnosed against its own output.
pub const CONTROL_OBJECTIVE: f64 = 1e-18;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DefectTarget {
    /// 1-based layer index, outside to inside.
    LayerConductivity { component: String, layer: usize },
    /// `h_ci` of every component.
    InteriorConvection,
    Absorptivity { component: String },
}

impl fmt::Display for DefectTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DefectTarget::LayerConductivity { component, layer } => {
                write!(f, "component.{component}.layer.{layer}.conductivity")
            }
            DefectTarget::InteriorConvection => f.write_str("interior.h_ci"),
            DefectTarget::Absorptivity { component } => write!(f, "component.{component}.alpha"),
        }
    }
}

impl FromStr for DefectTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('.').collect();
        match parts.as_slice() {
            ["interior", "h_ci"] => Ok(DefectTarget::InteriorConvection),
            ["component", name, "alpha"] => Ok(DefectTarget::Absorptivity {
                component: name.to_string(),
            }),
            ["component", name, "layer", k, "conductivity"] => match k.parse::<usize>() {
                Ok(layer) if layer >= 1 => Ok(DefectTarget::LayerConductivity {
                    component: name.to_string(),
                    layer,
                }),
                _ => Err(Error::UnknownTarget(s.to_string())),
            },
            _ => Err(Error::UnknownTarget(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectSpec {
    pub id: String,
    pub target: DefectTarget,
    pub base: f64,
    pub perturbed: f64,
}

impl DefectSpec {
    pub fn new(id: impl Into<String>, target: DefectTarget, base: f64, perturbed: f64) -> Self {
        Self {
            id: id.into(),
            target,
            base,
            perturbed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.base.is_finite() && self.perturbed.is_finite()) {
            return Err(Error::InvalidConfig(format!("case {}: non-finite value", self.id)));
        }
        if self.base == self.perturbed {
            return Err(Error::InvalidConfig(format!(
                "case {}: perturbed value equals base value",
                self.id
            )));
        }
        let in_range = |v: f64| match self.target {
            DefectTarget::LayerConductivity { .. } => v > 0.0,
            DefectTarget::InteriorConvection => v >= 0.0,
            DefectTarget::Absorptivity { .. } => (0.0..=1.0).contains(&v),
        };
        if !in_range(self.base) || !in_range(self.perturbed) {
            return Err(Error::InvalidConfig(format!(
                "case {}: value out of physical range for {}",
                self.id, self.target
            )));
        }
        Ok(())
    }

    /// Inside-surface node expected to be exposed, or `None` when forcing
    /// is not expected to help.
    pub fn expected_node(&self, reference: &BuildingDescription) -> Result<Option<NodeId>> {
        let (model, _) = build_state(reference)?;
        match &self.target {
            DefectTarget::LayerConductivity { component, .. }
            | DefectTarget::Absorptivity { component } => model
                .inside_node_of(reference, component)
                .map(Some)
                .ok_or_else(|| Error::UnknownTarget(self.target.to_string())),
            DefectTarget::InteriorConvection => Ok(None),
        }
    }
}

/// Returns a copy of `desc` with the targeted parameter moved from `base`
/// to `perturbed`. The description must currently hold `base`.
pub fn inject_defect(desc: &BuildingDescription, spec: &DefectSpec) -> Result<BuildingDescription> {
    spec.validate()?;
    let unknown = || Error::UnknownTarget(spec.target.to_string());
    let check_base = |current: f64| {
        if (current - spec.base).abs() <= 1e-9 * spec.base.abs().max(1.0) {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "case {}: {} is {current}, not the stated base {}",
                spec.id, spec.target, spec.base
            )))
        }
    };

    let mut out = desc.clone();
    match &spec.target {
        DefectTarget::LayerConductivity { component, layer } => {
            let c = out.component_mut(component).ok_or_else(unknown)?;
            let l = c.layers.get_mut(layer - 1).ok_or_else(unknown)?;
            check_base(l.conductivity)?;
            l.conductivity = spec.perturbed;
        }
        DefectTarget::Absorptivity { component } => {
            let c = out.component_mut(component).ok_or_else(unknown)?;
            check_base(c.absorptivity)?;
            c.absorptivity = spec.perturbed;
        }
        DefectTarget::InteriorConvection => {
            for c in &mut out.components {
                check_base(c.h_ci)?;
                c.h_ci = spec.perturbed;
            }
        }
    }
    out.validate()?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Noise {
    /// Standard deviation, °C.
    pub sd: f64,
    pub seed: u64,
}

/// Simulates the reference with no forcing and returns the series of
/// `nodes` plus the air node. Optional Gaussian noise is added to every
/// series.
pub fn generate_pseudo_measurements(
    reference: &BuildingDescription,
    weather: &WeatherSeries,
    nodes: &[NodeId],
    noise: Option<Noise>,
) -> Result<MeasurementSeries> {
    let (_, sm) = build_state(reference)?;
    let traj = simulate_from_rest(&sm, weather, &ForcingSet::empty(), None)?;
    let mut wanted: Vec<NodeId> = nodes.to_vec();
    wanted.push(sm.air);
    let mut series = std::collections::BTreeMap::new();
    for node in wanted {
        if node.0 == 0 || node.0 > sm.node_count() {
            return Err(Error::NodeOutOfRange {
                node,
                count: sm.node_count(),
            });
        }
        series.insert(node, traj.node(node).to_vec());
    }
    if let Some(Noise { sd, seed }) = noise.filter(|n| n.sd > 0.0) {
        let normal = Normal::new(0.0, sd)
            .map_err(|e| Error::InvalidConfig(format!("noise sd {sd}: {e}")))?;
        let mut rng = ga::seeded_rng(seed);
        for s in series.values_mut() {
            for v in s.iter_mut() {
                *v += normal.sample(&mut rng);
            }
        }
    }
    MeasurementSeries::new(weather.dt, series)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationOutcome {
    pub case_id: String,
    pub best_forcing: ForcingSet,
    pub expected: Option<NodeId>,
    pub best_objective: f64,
    pub unforced_objective: f64,
    /// Best J found by exhaustive enumeration, when requested.
    pub oracle_objective: Option<f64>,
    pub pass: bool,
}

impl VerificationOutcome {
    pub fn ratio(&self) -> f64 {
        if self.unforced_objective > 0.0 {
            self.best_objective / self.unforced_objective
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub noise: Option<Noise>,
    pub exhaustive: bool,
    pub skip_steps: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            noise: None,
            exhaustive: false,
            skip_steps: 0,
        }
    }
}

/// Runs the diagnosis of `model` against `meas`, returning the full report.
pub fn diagnose_against(
    model: &BuildingDescription,
    weather: &WeatherSeries,
    meas: MeasurementSeries,
    config: &GaConfig,
    options: &VerifyOptions,
) -> Result<DiagnosisReport> {
    let (_, sm) = build_state(model)?;
    let ctx = DiagnosisContext::new(sm, weather.clone(), meas, options.skip_steps)?;
    diagnose::diagnose(&ctx, config, options.exhaustive)
}

pub fn judge(expected: Option<NodeId>, best: &ForcingSet, ratio: f64) -> bool {
    match expected {
        Some(node) => best.contains(node) && ratio < LOCALIZATION_RATIO,
        None => best.is_empty() || ratio > NO_IMPROVEMENT_RATIO,
    }
}

pub fn run_case(
    spec: &DefectSpec,
    reference: &BuildingDescription,
    weather: &WeatherSeries,
    measured: &[NodeId],
    config: &GaConfig,
    options: &VerifyOptions,
) -> Result<VerificationOutcome> {
    let perturbed = inject_defect(reference, spec)?;
    let expected = spec.expected_node(reference)?;
    let meas = generate_pseudo_measurements(reference, weather, measured, options.noise)?;
    let report = diagnose_against(&perturbed, weather, meas, config, options)?;
    let ratio = report.improvement_ratio();
    Ok(VerificationOutcome {
        case_id: spec.id.clone(),
        pass: judge(expected, &report.best_forcing, ratio),
        best_forcing: report.best_forcing,
        expected,
        best_objective: report.best.objective,
        unforced_objective: report.unforced_objective,
        oracle_objective: report.exhaustive.map(|e| e.best.objective),
    })
}

/// The reference diagnosed against its own noise-free output: forcing
/// cannot help, so the GA must return the empty set with J ≈ 0.
pub fn run_control(
    reference: &BuildingDescription,
    weather: &WeatherSeries,
    measured: &[NodeId],
    config: &GaConfig,
    options: &VerifyOptions,
) -> Result<VerificationOutcome> {
    let meas = generate_pseudo_measurements(reference, weather, measured, None)?;
    let report = diagnose_against(reference, weather, meas, config, options)?;
    Ok(VerificationOutcome {
        case_id: "control".into(),
        pass: report.best_forcing.is_empty() && report.unforced_objective < CONTROL_OBJECTIVE,
        best_forcing: report.best_forcing,
        expected: None,
        best_objective: report.best.objective,
        unforced_objective: report.unforced_objective,
        oracle_objective: report.exhaustive.map(|e| e.best.objective),
    })
}

/// The three bundled defect cases for the reference cell.
pub fn default_cases() -> Vec<DefectSpec> {
    vec![
        DefectSpec::new(
            "1",
            DefectTarget::LayerConductivity {
                component: "door".into(),
                layer: 1,
            },
            0.23,
            0.78,
        ),
        DefectSpec::new("2", DefectTarget::InteriorConvection, 5.0, 0.1),
        DefectSpec::new(
            "3",
            DefectTarget::Absorptivity {
                component: "roof".into(),
            },
            0.3,
            0.9,
        ),
    ]
}
