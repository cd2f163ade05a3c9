//! Declarative building description, nodal mesh, and state-space assembly.
//!
//! A building is a single air zone enclosed by envelope components. Each
//! component becomes a ladder of conduction nodes (outside surface,
//! optional internal nodes, inside surface). The zone adds one air node and
//! one zero-capacity mean-radiant node. All exchange terms are entered
//! extensively (W/K, already multiplied by area), which makes `A` symmetric:
//!
//! ```text
//! C·dT/dt = A·T + B·U
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// 1-based node number, dense over `1..=node_count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 - 1
    }

    pub fn from_index(i: usize) -> Self {
        NodeId(i + 1)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    /// m
    pub thickness: f64,
    /// W/(m·K)
    pub conductivity: f64,
    /// kg/m³
    pub density: f64,
    /// J/(kg·K)
    pub specific_heat: f64,
}

impl Layer {
    pub fn new(thickness: f64, conductivity: f64, density: f64, specific_heat: f64) -> Self {
        Self {
            thickness,
            conductivity,
            density,
            specific_heat,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("thickness", self.thickness),
            ("conductivity", self.conductivity),
            ("density", self.density),
            ("specific_heat", self.specific_heat),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidDescription(format!(
                    "layer {name} must be strictly positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    North,
    South,
    East,
    West,
    HorizontalUp,
    HorizontalDown,
}

impl Orientation {
    pub const ALL: [Orientation; 6] = [
        Orientation::North,
        Orientation::South,
        Orientation::East,
        Orientation::West,
        Orientation::HorizontalUp,
        Orientation::HorizontalDown,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::North => "N",
            Orientation::South => "S",
            Orientation::East => "E",
            Orientation::West => "W",
            Orientation::HorizontalUp => "horizontal-up",
            Orientation::HorizontalDown => "horizontal-down",
        }
    }

    /// Solar channel receiving the incident flux for this face; downward
    /// facing surfaces see none.
    pub fn solar_channel(self) -> Option<InputChannel> {
        let face = match self {
            Orientation::North => SolarFace::North,
            Orientation::South => SolarFace::South,
            Orientation::East => SolarFace::East,
            Orientation::West => SolarFace::West,
            Orientation::HorizontalUp => SolarFace::Horizontal,
            Orientation::HorizontalDown => return None,
        };
        Some(InputChannel::Solar(face))
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Orientation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Orientation::ALL
            .into_iter()
            .find(|o| o.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                format!("expected one of N, S, E, W, horizontal-up, horizontal-down; got `{s}`")
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutsideBoundary {
    Ambient,
    /// No heat flux through the outer face (floor on an insulated slab).
    NullFlux,
}

impl OutsideBoundary {
    pub fn as_str(self) -> &'static str {
        match self {
            OutsideBoundary::Ambient => "ambient",
            OutsideBoundary::NullFlux => "null-flux",
        }
    }
}

impl FromStr for OutsideBoundary {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ambient" => Ok(OutsideBoundary::Ambient),
            "null-flux" => Ok(OutsideBoundary::NullFlux),
            _ => Err(format!("expected `ambient` or `null-flux`, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeComponent {
    pub name: String,
    pub orientation: Orientation,
    /// m²
    pub area: f64,
    /// Outside to inside.
    pub layers: Vec<Layer>,
    pub internal_node_count: usize,
    /// Convective and linearized radiative film coefficients, W/(m²·K).
    pub h_ci: f64,
    pub h_ce: f64,
    pub h_ri: f64,
    pub h_re: f64,
    /// Shortwave absorptivity of the outer face.
    pub absorptivity: f64,
    pub outside_boundary: OutsideBoundary,
    /// Glazed components transmit solar into the zone.
    pub glazed: bool,
}

impl EnvelopeComponent {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDescription(format!("{}: {msg}", self.name)));
        if self.name.is_empty() || self.name.chars().any(char::is_whitespace) {
            return bad("name must be a non-empty identifier".into());
        }
        if !(self.area.is_finite() && self.area > 0.0) {
            return bad(format!("area must be > 0, got {}", self.area));
        }
        if self.layers.is_empty() {
            return bad("at least one layer is required".into());
        }
        for layer in &self.layers {
            layer.validate().or_else(|e| bad(e.to_string()))?;
        }
        for (field, h) in [
            ("h_ci", self.h_ci),
            ("h_ce", self.h_ce),
            ("h_ri", self.h_ri),
            ("h_re", self.h_re),
        ] {
            if !(h.is_finite() && h >= 0.0) {
                return bad(format!("{field} must be >= 0, got {h}"));
            }
        }
        if !(0.0..=1.0).contains(&self.absorptivity) {
            return bad(format!("absorptivity must be in [0, 1], got {}", self.absorptivity));
        }
        if self.outside_boundary == OutsideBoundary::NullFlux
            && self.orientation != Orientation::HorizontalDown
        {
            return bad("null-flux boundary is only allowed on a floor (horizontal-down)".into());
        }
        if self.glazed && self.outside_boundary == OutsideBoundary::NullFlux {
            return bad("a glazed component cannot have a null-flux boundary".into());
        }
        Ok(())
    }

    pub fn total_thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AirZone {
    /// J/K
    pub capacity: f64,
    /// J/(kg·K)
    pub air_specific_heat: f64,
    /// Ventilation mass flow, kg/s.
    pub mass_flow: f64,
}

impl AirZone {
    pub fn ventilation_conductance(&self) -> f64 {
        self.air_specific_heat * self.mass_flow
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildingDescription {
    pub components: Vec<EnvelopeComponent>,
    pub zone: AirZone,
    /// Fraction of solar incident on glazing that reaches the zone.
    pub glazing_transmitted_fraction: f64,
}

impl BuildingDescription {
    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::InvalidDescription("no envelope components".into()));
        }
        let mut seen = HashSet::new();
        for c in &self.components {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::InvalidDescription(format!(
                    "duplicate component name `{}`",
                    c.name
                )));
            }
            c.validate()?;
        }
        let null_flux = self
            .components
            .iter()
            .filter(|c| c.outside_boundary == OutsideBoundary::NullFlux)
            .count();
        if null_flux > 1 {
            return Err(Error::InvalidDescription(format!(
                "at most one null-flux component allowed, found {null_flux}"
            )));
        }
        let z = &self.zone;
        if !(z.capacity.is_finite() && z.capacity > 0.0) {
            return Err(Error::InvalidDescription(format!(
                "zone capacity must be > 0, got {}",
                z.capacity
            )));
        }
        if !(z.air_specific_heat.is_finite() && z.air_specific_heat > 0.0) {
            return Err(Error::InvalidDescription(format!(
                "air specific heat must be > 0, got {}",
                z.air_specific_heat
            )));
        }
        if !(z.mass_flow.is_finite() && z.mass_flow >= 0.0) {
            return Err(Error::InvalidDescription(format!(
                "ventilation mass flow must be >= 0, got {}",
                z.mass_flow
            )));
        }
        if !(0.0..=1.0).contains(&self.glazing_transmitted_fraction) {
            return Err(Error::InvalidDescription(format!(
                "glazing transmitted fraction must be in [0, 1], got {}",
                self.glazing_transmitted_fraction
            )));
        }
        Ok(())
    }

    pub fn component(&self, name: &str) -> Option<&EnvelopeComponent> {
        self.components.iter().find(|c| c.name == name)
    }

    pub fn component_mut(&mut self, name: &str) -> Option<&mut EnvelopeComponent> {
        self.components.iter_mut().find(|c| c.name == name)
    }

    pub fn node_count(&self) -> usize {
        self.components
            .iter()
            .map(|c| c.internal_node_count + 2)
            .sum::<usize>()
            + 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    OutsideSurface,
    Internal,
    InsideSurface,
    Air,
    MeanRadiant,
}

impl NodeRole {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeRole::OutsideSurface => "outside-surface",
            NodeRole::Internal => "internal",
            NodeRole::InsideSurface => "inside-surface",
            NodeRole::Air => "air",
            NodeRole::MeanRadiant => "mean-radiant",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub role: NodeRole,
    /// Index into `BuildingDescription::components`.
    pub owner: Option<usize>,
    /// Distance from the outer face of the owning component, m.
    pub depth: Option<f64>,
    pub label: String,
}

/// Node ids of one component's conduction ladder, outside to inside.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentNodes {
    pub ladder: Vec<NodeId>,
}

impl ComponentNodes {
    pub fn outer(&self) -> NodeId {
        self.ladder[0]
    }

    pub fn inner(&self) -> NodeId {
        *self.ladder.last().expect("ladder has at least two nodes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodalModel {
    pub nodes: Vec<Node>,
    /// J/K per node; zero only for the mean-radiant node.
    pub capacities: Vec<f64>,
    /// Conduction links keyed by `(lo, hi)` with `lo < hi`; see
    /// [`NodalModel::conductance`] for symmetric lookup.
    pub conductances: BTreeMap<(NodeId, NodeId), f64>,
    pub components: Vec<ComponentNodes>,
    pub air: NodeId,
    pub mean_radiant: NodeId,
}

impl NodalModel {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn conductance(&self, a: NodeId, b: NodeId) -> f64 {
        let key = if a < b { (a, b) } else { (b, a) };
        self.conductances.get(&key).copied().unwrap_or(0.0)
    }

    fn add_conductance(&mut self, a: NodeId, b: NodeId, g: f64) {
        assert_ne!(a, b);
        let key = if a < b { (a, b) } else { (b, a) };
        *self.conductances.entry(key).or_insert(0.0) += g;
    }

    /// Inside-surface node of the named component.
    pub fn inside_node_of(&self, desc: &BuildingDescription, name: &str) -> Option<NodeId> {
        let idx = desc.components.iter().position(|c| c.name == name)?;
        Some(self.components[idx].inner())
    }

    pub fn find_by_label(&self, label: &str) -> Option<NodeId> {
        self.nodes.iter().find(|n| n.label == label).map(|n| n.id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolarFace {
    North,
    South,
    East,
    West,
    Horizontal,
}

/// One entry of the input vector `U(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InputChannel {
    /// Outdoor dry-bulb temperature, °C.
    OutdoorAir,
    /// Equivalent sky temperature, °C.
    Sky,
    /// Incident shortwave flux on a face orientation, W/m².
    Solar(SolarFace),
}

impl InputChannel {
    /// Fixed channel order of `U`: T_ae, T_sky, I_N, I_S, I_E, I_W, I_H.
    pub const ORDER: [InputChannel; 7] = [
        InputChannel::OutdoorAir,
        InputChannel::Sky,
        InputChannel::Solar(SolarFace::North),
        InputChannel::Solar(SolarFace::South),
        InputChannel::Solar(SolarFace::East),
        InputChannel::Solar(SolarFace::West),
        InputChannel::Solar(SolarFace::Horizontal),
    ];

    pub fn index(self) -> usize {
        Self::ORDER
            .iter()
            .position(|c| *c == self)
            .expect("every channel is in ORDER")
    }

    pub fn label(self) -> &'static str {
        match self {
            InputChannel::OutdoorAir => "T_ae",
            InputChannel::Sky => "T_sky",
            InputChannel::Solar(SolarFace::North) => "I_N",
            InputChannel::Solar(SolarFace::South) => "I_S",
            InputChannel::Solar(SolarFace::East) => "I_E",
            InputChannel::Solar(SolarFace::West) => "I_W",
            InputChannel::Solar(SolarFace::Horizontal) => "I_H",
        }
    }

    /// Temperature channels carry conductances in `B`; flux channels carry
    /// absorbing areas.
    pub fn is_temperature(self) -> bool {
        matches!(self, InputChannel::OutdoorAir | InputChannel::Sky)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateMatrices {
    /// Diagonal of `C`, J/K.
    pub capacity: Vec<f64>,
    /// W/K
    pub a: DenseMatrix,
    /// N×M, columns follow `channels`.
    pub b: DenseMatrix,
    pub channels: Vec<InputChannel>,
    pub air: NodeId,
    pub mean_radiant: NodeId,
}

impl StateMatrices {
    pub fn node_count(&self) -> usize {
        self.capacity.len()
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn channel_labels(&self) -> Vec<&'static str> {
        self.channels.iter().map(|c| c.label()).collect()
    }
}

/// Discretizes a layer stack into `internal_node_count + 1` slices of equal
/// thickness. Returns the slice conductances (outside to inside) and the
/// node capacities (`internal_node_count + 2` values, half of each adjacent
/// slice lumped onto a node).
pub fn layer_stack_to_rc(
    layers: &[Layer],
    area: f64,
    internal_node_count: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if layers.is_empty() {
        return Err(Error::InvalidDescription("empty layer stack".into()));
    }
    for l in layers {
        l.validate()?;
    }
    if !(area.is_finite() && area > 0.0) {
        return Err(Error::InvalidDescription(format!("area must be > 0, got {area}")));
    }

    let slices = internal_node_count + 1;
    if slices == 1 {
        let resistance: f64 = layers.iter().map(|l| l.thickness / l.conductivity).sum();
        let capacity: f64 = layers
            .iter()
            .map(|l| l.thickness * l.density * l.specific_heat)
            .sum::<f64>()
            * area;
        return Ok((vec![area / resistance], vec![capacity / 2.0, capacity / 2.0]));
    }

    // Layer boundaries measured from the outer face.
    let mut bounds = Vec::with_capacity(layers.len());
    let mut x = 0.0;
    for l in layers {
        bounds.push((x, x + l.thickness, l));
        x += l.thickness;
    }
    let total = x;
    let width = total / slices as f64;

    let mut conductances = Vec::with_capacity(slices);
    let mut slice_caps = Vec::with_capacity(slices);
    for s in 0..slices {
        let lo = width * s as f64;
        let hi = if s + 1 == slices { total } else { width * (s + 1) as f64 };
        let mut resistance = 0.0;
        let mut capacity = 0.0;
        for &(a, b, layer) in &bounds {
            let overlap = (hi.min(b) - lo.max(a)).max(0.0);
            resistance += overlap / layer.conductivity;
            capacity += overlap * layer.density * layer.specific_heat;
        }
        conductances.push(area / resistance);
        slice_caps.push(capacity * area);
    }

    let mut node_caps = vec![0.0; slices + 1];
    for (s, c) in slice_caps.iter().enumerate() {
        node_caps[s] += c / 2.0;
        node_caps[s + 1] += c / 2.0;
    }
    Ok((conductances, node_caps))
}

/// Builds the node list, wall conduction ladders, and node capacities.
///
/// Numbering: components in declaration order, each outside to inside, then
/// the mean-radiant node, then the air node (always last). A null-flux
/// component keeps its outermost node as a zero-flux deep node with role
/// `Internal`.
pub fn build_mesh(desc: &BuildingDescription) -> Result<NodalModel> {
    desc.validate()?;
    let total = desc.node_count();
    let mut model = NodalModel {
        nodes: Vec::with_capacity(total),
        capacities: Vec::with_capacity(total),
        conductances: BTreeMap::new(),
        components: Vec::with_capacity(desc.components.len()),
        air: NodeId(total),
        mean_radiant: NodeId(total - 1),
    };

    for (ci, comp) in desc.components.iter().enumerate() {
        let (links, caps) = layer_stack_to_rc(&comp.layers, comp.area, comp.internal_node_count)?;
        let slice = comp.total_thickness() / (comp.internal_node_count + 1) as f64;
        let mut ladder = Vec::with_capacity(caps.len());
        for (k, cap) in caps.iter().enumerate() {
            let id = NodeId(model.nodes.len() + 1);
            let last = k + 1 == caps.len();
            let (role, suffix) = if last {
                (NodeRole::InsideSurface, "inside".to_string())
            } else if k == 0 {
                match comp.outside_boundary {
                    OutsideBoundary::Ambient => (NodeRole::OutsideSurface, "outside".to_string()),
                    OutsideBoundary::NullFlux => (NodeRole::Internal, "deep".to_string()),
                }
            } else {
                (NodeRole::Internal, format!("internal{k}"))
            };
            model.nodes.push(Node {
                id,
                role,
                owner: Some(ci),
                depth: Some(slice * k as f64),
                label: format!("{}:{}", comp.name, suffix),
            });
            model.capacities.push(*cap);
            ladder.push(id);
        }
        for (k, g) in links.iter().enumerate() {
            model.add_conductance(ladder[k], ladder[k + 1], *g);
        }
        model.components.push(ComponentNodes { ladder });
    }

    model.nodes.push(Node {
        id: model.mean_radiant,
        role: NodeRole::MeanRadiant,
        owner: None,
        depth: None,
        label: "mean-radiant".into(),
    });
    model.capacities.push(0.0);
    model.nodes.push(Node {
        id: model.air,
        role: NodeRole::Air,
        owner: None,
        depth: None,
        label: "air".into(),
    });
    model.capacities.push(desc.zone.capacity);
    debug_assert_eq!(model.nodes.len(), total);
    Ok(model)
}

/// Adds the surface exchange, ventilation, and solar terms to the mesh and
/// produces `C`, `A`, `B`.
pub fn assemble(model: &NodalModel, desc: &BuildingDescription) -> Result<StateMatrices> {
    let n = model.node_count();
    if desc.components.len() != model.components.len() || desc.node_count() != n {
        return Err(Error::InvalidDescription(
            "nodal model was not built from this description".into(),
        ));
    }
    let channels = InputChannel::ORDER.to_vec();
    let mut a = DenseMatrix::zeros(n, n);
    let mut b = DenseMatrix::zeros(n, channels.len());
    let air = model.air.index();
    let mrt = model.mean_radiant.index();

    let couple = |a: &mut DenseMatrix, i: usize, j: usize, g: f64| {
        a[(i, j)] += g;
        a[(j, i)] += g;
    };

    for (&(p, q), &g) in &model.conductances {
        couple(&mut a, p.index(), q.index(), g);
    }

    let inside_area: f64 = desc.components.iter().map(|c| c.area).sum();
    let transmitted: Vec<(InputChannel, f64)> = desc
        .components
        .iter()
        .filter(|c| c.glazed)
        .filter_map(|c| {
            c.orientation
                .solar_channel()
                .map(|ch| (ch, desc.glazing_transmitted_fraction * c.area))
        })
        .collect();

    for (comp, nodes) in desc.components.iter().zip(&model.components) {
        let si = nodes.inner().index();
        couple(&mut a, si, air, comp.h_ci * comp.area);
        couple(&mut a, si, mrt, comp.h_ri * comp.area);
        for &(ch, glazed_area) in &transmitted {
            b[(si, ch.index())] += glazed_area * comp.area / inside_area;
        }

        if comp.outside_boundary == OutsideBoundary::Ambient {
            let se = nodes.outer().index();
            b[(se, InputChannel::OutdoorAir.index())] += comp.h_ce * comp.area;
            b[(se, InputChannel::Sky.index())] += comp.h_re * comp.area;
            if let Some(ch) = comp.orientation.solar_channel() {
                b[(se, ch.index())] += comp.absorptivity * comp.area;
            }
        }
    }

    b[(air, InputChannel::OutdoorAir.index())] += desc.zone.ventilation_conductance();

    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)]).sum();
        let boundary: f64 = channels
            .iter()
            .filter(|c| c.is_temperature())
            .map(|c| b[(i, c.index())])
            .sum();
        a[(i, i)] = -(off + boundary);
    }

    Ok(StateMatrices {
        capacity: model.capacities.clone(),
        a,
        b,
        channels,
        air: model.air,
        mean_radiant: model.mean_radiant,
    })
}

/// Mesh and assemble in one go.
pub fn build_state(desc: &BuildingDescription) -> Result<(NodalModel, StateMatrices)> {
    let model = build_mesh(desc)?;
    let sm = assemble(&model, desc)?;
    Ok((model, sm))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layer(thickness: f64, conductivity: f64) -> Layer {
        Layer::new(thickness, conductivity, 1000.0, 1000.0)
    }

    fn component(name: &str, internal: usize) -> EnvelopeComponent {
        EnvelopeComponent {
            name: name.into(),
            orientation: Orientation::South,
            area: 2.0,
            layers: vec![layer(0.1, 0.23)],
            internal_node_count: internal,
            h_ci: 5.0,
            h_ce: 15.0,
            h_ri: 5.0,
            h_re: 4.0,
            absorptivity: 0.5,
            outside_boundary: OutsideBoundary::Ambient,
            glazed: false,
        }
    }

    fn single(internal: usize) -> BuildingDescription {
        BuildingDescription {
            components: vec![component("wall", internal)],
            zone: AirZone {
                capacity: 30_000.0,
                air_specific_heat: 1006.0,
                mass_flow: 0.01,
            },
            glazing_transmitted_fraction: 0.0,
        }
    }

    #[test]
    fn r2c_single_layer_conductance() {
        let (g, c) = layer_stack_to_rc(&[layer(0.1, 0.23)], 2.0, 0).unwrap();
        assert_eq!(g.len(), 1);
        assert!((g[0] - 4.6).abs() < 1e-12);
        assert_eq!(c, vec![1e5, 1e5]);
    }

    #[test]
    fn r2c_two_layers_series() {
        let layers = [layer(0.1, 0.5), layer(0.05, 0.025)];
        let (g, _) = layer_stack_to_rc(&layers, 3.0, 0).unwrap();
        let g1 = 3.0 * 0.5 / 0.1;
        let g2 = 3.0 * 0.025 / 0.05;
        assert!((g[0] - 1.0 / (1.0 / g1 + 1.0 / g2)).abs() < 1e-12);
    }

    #[test]
    fn ladder_preserves_totals() {
        let layers = [
            Layer::new(0.15, 1.4, 2300.0, 900.0),
            Layer::new(0.05, 0.04, 25.0, 1400.0),
            Layer::new(0.10, 1.4, 2300.0, 900.0),
        ];
        let area = 9.0;
        let r_total: f64 = layers.iter().map(|l| l.thickness / (l.conductivity * area)).sum();
        let c_total: f64 = layers
            .iter()
            .map(|l| l.thickness * area * l.density * l.specific_heat)
            .sum();
        for k in 0..8 {
            let (g, c) = layer_stack_to_rc(&layers, area, k).unwrap();
            assert_eq!(g.len(), k + 1);
            assert_eq!(c.len(), k + 2);
            let r: f64 = g.iter().map(|g| 1.0 / g).sum();
            assert!((r - r_total).abs() <= 1e-12 * r_total, "k={k}");
            let cap: f64 = c.iter().sum();
            assert!((cap - c_total).abs() <= 1e-9 * c_total, "k={k}");
        }
    }

    #[test]
    fn rejects_non_positive_layer() {
        assert!(layer_stack_to_rc(&[layer(0.0, 1.0)], 1.0, 0).is_err());
        assert!(layer_stack_to_rc(&[layer(0.1, -1.0)], 1.0, 0).is_err());
        assert!(layer_stack_to_rc(&[], 1.0, 0).is_err());
    }

    #[test]
    fn minimal_mesh_has_four_nodes() {
        let desc = single(0);
        let m = build_mesh(&desc).unwrap();
        let roles: Vec<_> = m.nodes.iter().map(|n| n.role).collect();
        assert_eq!(
            roles,
            [
                NodeRole::OutsideSurface,
                NodeRole::InsideSurface,
                NodeRole::MeanRadiant,
                NodeRole::Air
            ]
        );
        assert_eq!(m.air, NodeId(4));
        assert_eq!(m.mean_radiant, NodeId(3));
    }

    #[test]
    fn internal_nodes_counted() {
        let m = build_mesh(&single(3)).unwrap();
        assert_eq!(m.components[0].ladder.len(), 5);
        assert_eq!(m.node_count(), 7);
    }

    #[test]
    fn minimal_mesh_structure() {
        let desc = single(0);
        let (_, sm) = build_state(&desc).unwrap();
        let a = &sm.a;
        assert!(a.is_symmetric(0.0));
        let k = 2.0 * 0.23 / 0.1;
        // outside(0) - inside(1) via K; inside - air(3) via h_ci S; inside - mrt(2) via h_ri S
        assert!((a[(0, 1)] - k).abs() < 1e-12);
        assert!((a[(1, 3)] - 10.0).abs() < 1e-12);
        assert!((a[(1, 2)] - 10.0).abs() < 1e-12);
        assert_eq!(a[(0, 2)], 0.0);
        assert_eq!(a[(0, 3)], 0.0);
        assert_eq!(a[(2, 3)], 0.0);
    }

    #[test]
    fn ventilation_in_b_and_folded_into_a() {
        let desc = single(0);
        let (_, sm) = build_state(&desc).unwrap();
        let cq = 1006.0 * 0.01;
        let air = sm.air.index();
        assert!((sm.b[(air, 0)] - cq).abs() < 1e-12);
        assert!((sm.a[(air, air)] + (10.0 + cq)).abs() < 1e-12);
    }

    #[test]
    fn outside_row_couplings() {
        let desc = single(0);
        let (_, sm) = build_state(&desc).unwrap();
        assert_eq!(sm.b[(0, InputChannel::OutdoorAir.index())], 30.0);
        assert_eq!(sm.b[(0, InputChannel::Sky.index())], 8.0);
        assert_eq!(sm.b[(0, InputChannel::Solar(SolarFace::South).index())], 1.0);
    }

    #[test]
    fn duplicate_names_rejected() {
        let mut desc = single(0);
        desc.components.push(component("wall", 0));
        assert!(matches!(build_mesh(&desc), Err(Error::InvalidDescription(_))));
    }

    #[test]
    fn zero_area_rejected() {
        let mut desc = single(0);
        desc.components[0].area = 0.0;
        assert!(build_mesh(&desc).is_err());
    }

    #[test]
    fn null_flux_only_on_floor() {
        let mut desc = single(0);
        desc.components[0].outside_boundary = OutsideBoundary::NullFlux;
        assert!(build_mesh(&desc).is_err());
        desc.components[0].orientation = Orientation::HorizontalDown;
        let m = build_mesh(&desc).unwrap();
        assert_eq!(m.nodes[0].role, NodeRole::Internal);
        assert_eq!(m.nodes[0].label, "wall:deep");
    }

    #[test]
    fn null_flux_node_has_no_boundary_coupling() {
        let mut desc = single(2);
        desc.components[0].outside_boundary = OutsideBoundary::NullFlux;
        desc.components[0].orientation = Orientation::HorizontalDown;
        let (_, sm) = build_state(&desc).unwrap();
        assert!(sm.b.row(0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mean_radiant_is_area_weighted_mean() {
        let mut desc = single(0);
        let mut other = component("roof", 0);
        other.area = 6.0;
        desc.components.push(other);
        let (m, sm) = build_state(&desc).unwrap();
        let r = m.mean_radiant.index();
        // the algebraic row: sum_j A[r][j] T_j = 0 with inside temps 10 and 30
        let t1 = 10.0;
        let t2 = 30.0;
        let i1 = m.components[0].inner().index();
        let i2 = m.components[1].inner().index();
        let t_rm = -(sm.a[(r, i1)] * t1 + sm.a[(r, i2)] * t2) / sm.a[(r, r)];
        assert!((t_rm - (2.0 * t1 + 6.0 * t2) / 8.0).abs() < 1e-12);
        assert_eq!(sm.capacity[r], 0.0);
    }

    #[test]
    fn transmitted_solar_split_by_area() {
        let mut desc = single(0);
        let mut win = component("window", 0);
        win.glazed = true;
        win.area = 1.0;
        desc.components.push(win);
        desc.glazing_transmitted_fraction = 0.6;
        let (m, sm) = build_state(&desc).unwrap();
        let s = InputChannel::Solar(SolarFace::South).index();
        let total: f64 = m.components.iter().map(|c| sm.b[(c.inner().index(), s)]).sum();
        assert!((total - 0.6).abs() < 1e-12);
        let wall_share = sm.b[(m.components[0].inner().index(), s)];
        assert!((wall_share - 0.6 * 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn row_conservation_and_signs() {
        let mut desc = single(2);
        desc.components.push(component("roof", 0));
        let (_, sm) = build_state(&desc).unwrap();
        let n = sm.node_count();
        for i in 0..n {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| sm.a[(i, j)]).sum();
            let bnd = sm.b[(i, 0)] + sm.b[(i, 1)];
            assert!((-sm.a[(i, i)] - off - bnd).abs() < 1e-9);
            assert!(sm.a[(i, i)] < 0.0);
            for j in 0..n {
                if j != i {
                    assert!(sm.a[(i, j)] >= 0.0);
                }
            }
        }
    }
}
