//! Building description text format.
//!
//! ```text
//! [component door]
//! orientation = N            # N S E W horizontal-up horizontal-down
//! area = 1.8                 # m²
//! layer = 0.04 0.23 600 1600 # thickness λ ρ cp, outside to inside
//! internal_nodes = 0
//! h_ci = 5
//! h_ce = 15
//! h_ri = 5
//! h_re = 4
//! alpha = 0.6
//! boundary = ambient         # or null-flux
//! glazed = false
//!
//! [zone]
//! capacity = 30000
//! air_specific_heat = 1006
//! mass_flow = 0.015
//! glazing_transmitted_fraction = 0.7
//! ```
//!
//! `internal_nodes`, `boundary` and `glazed` are optional.

use std::fmt::Write as _;
use std::path::Path;

use super::sections::{Entry, Fields, Section, Source};
use crate::error::{Error, Result};
use crate::model::{
    AirZone, BuildingDescription, EnvelopeComponent, Layer, Orientation, OutsideBoundary,
};

const COMPONENT_KEYS: [&str; 10] = [
    "orientation",
    "area",
    "internal_nodes",
    "h_ci",
    "h_ce",
    "h_ri",
    "h_re",
    "alpha",
    "boundary",
    "glazed",
];

const ZONE_KEYS: [&str; 4] = [
    "capacity",
    "air_specific_heat",
    "mass_flow",
    "glazing_transmitted_fraction",
];

pub fn parse_building(text: &str, path: &str) -> Result<BuildingDescription> {
    let src = Source { path };
    let mut components = Vec::new();
    let mut zone = None;
    for section in src.parse(text)? {
        match section.kind.as_str() {
            "component" => components.push(parse_component(&src, &section)?),
            "zone" => {
                if zone.is_some() {
                    return Err(src.error(section.line, "zone", "duplicate [zone] section"));
                }
                if section.arg.is_some() {
                    return Err(src.error(section.line, "zone", "[zone] takes no name"));
                }
                zone = Some(parse_zone(&src, &section)?);
            }
            other => {
                return Err(src.error(section.line, other, "unknown section"));
            }
        }
    }
    let (zone, tau) = zone.ok_or_else(|| src.error(1, "zone", "missing [zone] section"))?;
    let desc = BuildingDescription {
        components,
        zone,
        glazing_transmitted_fraction: tau,
    };
    desc.validate()?;
    Ok(desc)
}

pub fn read_building(path: &Path) -> Result<BuildingDescription> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_building(&text, &path.display().to_string())
}

fn positive(src: &Source, e: &Entry) -> Result<f64> {
    let v = src.number(e)?;
    if v <= 0.0 {
        return Err(src.error(e.line, &e.key, format!("must be > 0, got {v}")));
    }
    Ok(v)
}

fn non_negative(src: &Source, e: &Entry) -> Result<f64> {
    let v = src.number(e)?;
    if v < 0.0 {
        return Err(src.error(e.line, &e.key, format!("must be >= 0, got {v}")));
    }
    Ok(v)
}

fn fraction(src: &Source, e: &Entry) -> Result<f64> {
    let v = src.number(e)?;
    if !(0.0..=1.0).contains(&v) {
        return Err(src.error(e.line, &e.key, format!("must be in [0, 1], got {v}")));
    }
    Ok(v)
}

fn parse_layer(src: &Source, e: &Entry) -> Result<Layer> {
    let fields: Vec<&str> = e.value.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(src.error(
            e.line,
            "layer",
            "expected `thickness conductivity density specific_heat`",
        ));
    }
    let mut v = [0.0; 4];
    for ((slot, text), name) in v
        .iter_mut()
        .zip(&fields)
        .zip(["thickness", "conductivity", "density", "specific_heat"])
    {
        let x: f64 = text
            .parse()
            .map_err(|err| src.error(e.line, "layer", format!("{name} `{text}`: {err}")))?;
        if !(x.is_finite() && x > 0.0) {
            return Err(src.error(e.line, "layer", format!("{name} must be > 0, got {text}")));
        }
        *slot = x;
    }
    Ok(Layer::new(v[0], v[1], v[2], v[3]))
}

fn parse_component(src: &Source, section: &Section) -> Result<EnvelopeComponent> {
    let name = section
        .arg
        .clone()
        .ok_or_else(|| src.error(section.line, "component", "component needs a name"))?;
    let (f, layer_entries) = Fields::collect(src, section, &COMPONENT_KEYS, &["layer"])?;
    if layer_entries.is_empty() {
        return Err(src.error(section.line, "layer", format!("component {name} has no layer")));
    }
    let layers = layer_entries
        .iter()
        .map(|e| parse_layer(src, e))
        .collect::<Result<Vec<_>>>()?;

    let orientation: Orientation = src.value(f.require(src, "orientation")?)?;
    let outside_boundary = match f.get("boundary") {
        Some(e) => src.value::<OutsideBoundary>(e)?,
        None => OutsideBoundary::Ambient,
    };
    let glazed = match f.get("glazed") {
        Some(e) => src.value::<bool>(e)?,
        None => false,
    };
    let internal_node_count = match f.get("internal_nodes") {
        Some(e) => src.value::<usize>(e)?,
        None => 0,
    };
    let c = EnvelopeComponent {
        name,
        orientation,
        area: positive(src, f.require(src, "area")?)?,
        layers,
        internal_node_count,
        h_ci: non_negative(src, f.require(src, "h_ci")?)?,
        h_ce: non_negative(src, f.require(src, "h_ce")?)?,
        h_ri: non_negative(src, f.require(src, "h_ri")?)?,
        h_re: non_negative(src, f.require(src, "h_re")?)?,
        absorptivity: fraction(src, f.require(src, "alpha")?)?,
        outside_boundary,
        glazed,
    };
    c.validate()
        .map_err(|e| src.error(section.line, "component", e.to_string()))?;
    Ok(c)
}

fn parse_zone(src: &Source, section: &Section) -> Result<(AirZone, f64)> {
    let (f, _) = Fields::collect(src, section, &ZONE_KEYS, &[])?;
    let zone = AirZone {
        capacity: positive(src, f.require(src, "capacity")?)?,
        air_specific_heat: positive(src, f.require(src, "air_specific_heat")?)?,
        mass_flow: non_negative(src, f.require(src, "mass_flow")?)?,
    };
    let tau = fraction(src, f.require(src, "glazing_transmitted_fraction")?)?;
    Ok((zone, tau))
}

/// Writes a description that [`parse_building`] reads back unchanged.
pub fn write_building(desc: &BuildingDescription) -> String {
    let mut out = String::new();
    for c in &desc.components {
        let _ = writeln!(out, "[component {}]", c.name);
        let _ = writeln!(out, "orientation = {}", c.orientation);
        let _ = writeln!(out, "area = {}", c.area);
        for l in &c.layers {
            let _ = writeln!(
                out,
                "layer = {} {} {} {}",
                l.thickness, l.conductivity, l.density, l.specific_heat
            );
        }
        let _ = writeln!(out, "internal_nodes = {}", c.internal_node_count);
        let _ = writeln!(out, "h_ci = {}", c.h_ci);
        let _ = writeln!(out, "h_ce = {}", c.h_ce);
        let _ = writeln!(out, "h_ri = {}", c.h_ri);
        let _ = writeln!(out, "h_re = {}", c.h_re);
        let _ = writeln!(out, "alpha = {}", c.absorptivity);
        let _ = writeln!(out, "boundary = {}", c.outside_boundary.as_str());
        let _ = writeln!(out, "glazed = {}", c.glazed);
        out.push('\n');
    }
    let z = &desc.zone;
    let _ = writeln!(out, "[zone]");
    let _ = writeln!(out, "capacity = {}", z.capacity);
    let _ = writeln!(out, "air_specific_heat = {}", z.air_specific_heat);
    let _ = writeln!(out, "mass_flow = {}", z.mass_flow);
    let _ = writeln!(
        out,
        "glazing_transmitted_fraction = {}",
        desc.glazing_transmitted_fraction
    );
    out
}
