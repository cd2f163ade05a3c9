//! Backward-Euler time marching of `C·dT/dt = A·T + B·U` with Dirichlet
//! forcing of measured nodes.
//!
//! Each step solves `M·T⁺ = V` with `M = C/dt − A` and
//! `V = (C/dt)·T + B·U⁺`. A forced node has its row of `M` replaced by the
//! unit row and its entry of `V` by the measurement; the other rows keep
//! their couplings to it.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDateTime;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, LuFactors};
use crate::model::{InputChannel, NodeId, SolarFace, StateMatrices};

/// Default simulation step: quarter-hour averaged weather.
pub const DEFAULT_DT: f64 = 900.0;

/// Two sampling intervals are considered equal within this many seconds.
const DT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeatherRecord {
    /// Outdoor air temperature, °C.
    pub t_ae: f64,
    /// Sky temperature, °C.
    pub t_sky: f64,
    /// Incident shortwave flux, W/m², on N, S, E, W and horizontal faces.
    pub solar: [f64; 5],
}

impl WeatherRecord {
    pub fn constant(t: f64) -> Self {
        Self {
            t_ae: t,
            t_sky: t,
            solar: [0.0; 5],
        }
    }

    pub fn channel(&self, ch: InputChannel) -> f64 {
        match ch {
            InputChannel::OutdoorAir => self.t_ae,
            InputChannel::Sky => self.t_sky,
            InputChannel::Solar(face) => self.solar[solar_slot(face)],
        }
    }
}

fn solar_slot(face: SolarFace) -> usize {
    match face {
        SolarFace::North => 0,
        SolarFace::South => 1,
        SolarFace::East => 2,
        SolarFace::West => 3,
        SolarFace::Horizontal => 4,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeatherSeries {
    /// s
    pub dt: f64,
    pub start: Option<NaiveDateTime>,
    pub records: Vec<WeatherRecord>,
}

impl WeatherSeries {
    pub fn new(dt: f64, records: Vec<WeatherRecord>) -> Result<Self> {
        let w = Self {
            dt,
            start: None,
            records,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn with_start(mut self, start: NaiveDateTime) -> Self {
        self.start = Some(start);
        self
    }

    pub fn constant(dt: f64, len: usize, record: WeatherRecord) -> Result<Self> {
        Self::new(dt, vec![record; len])
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidSeries(format!("time step must be > 0, got {}", self.dt)));
        }
        if self.records.len() < 2 {
            return Err(Error::InvalidSeries(format!(
                "weather needs at least 2 records, got {}",
                self.records.len()
            )));
        }
        for (i, r) in self.records.iter().enumerate() {
            if !(r.t_ae.is_finite() && r.t_sky.is_finite()) {
                return Err(Error::InvalidSeries(format!("non-finite temperature at record {i}")));
            }
            if r.solar.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
                return Err(Error::InvalidSeries(format!(
                    "solar flux must be finite and >= 0 at record {i}"
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn timestamp(&self, n: usize) -> Option<NaiveDateTime> {
        self.start
            .map(|s| s + chrono::Duration::milliseconds((self.dt * 1000.0).round() as i64 * n as i64))
    }

    /// Input vector `U` at step `n`, in the channel order of `sm`.
    pub fn input_vector(&self, sm: &StateMatrices, n: usize) -> Vec<f64> {
        let r = &self.records[n];
        sm.channels.iter().map(|&ch| r.channel(ch)).collect()
    }
}

/// Measured node temperatures sampled on the simulation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSeries {
    pub dt: f64,
    pub series: BTreeMap<NodeId, Vec<f64>>,
    len: usize,
}

impl MeasurementSeries {
    pub fn new(dt: f64, series: BTreeMap<NodeId, Vec<f64>>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidSeries(format!("time step must be > 0, got {dt}")));
        }
        let len = series.values().next().map_or(0, Vec::len);
        for (node, s) in &series {
            if s.len() != len {
                return Err(Error::LengthMismatch {
                    what: "measurement series",
                    left: len,
                    right: s.len(),
                });
            }
            if let Some(i) = s.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidSeries(format!(
                    "non-finite measurement for node {node} at step {i}"
                )));
            }
        }
        Ok(Self { dt, series, len })
    }

    pub fn empty(dt: f64) -> Self {
        Self {
            dt,
            series: BTreeMap::new(),
            len: 0,
        }
    }

    /// Number of samples per series.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.series.keys().copied()
    }

    pub fn get(&self, node: NodeId) -> Option<&[f64]> {
        self.series.get(&node).map(Vec::as_slice)
    }

    pub fn value(&self, node: NodeId, step: usize) -> Option<f64> {
        self.series.get(&node).and_then(|s| s.get(step)).copied()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ForcingSet(pub BTreeSet<NodeId>);

impl ForcingSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.0.contains(&node)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.0.iter().copied()
    }

    /// Checks node range, the output-node exclusion, and that every forced
    /// node has a full measurement series of length `steps`.
    pub fn validate(
        &self,
        sm: &StateMatrices,
        meas: Option<&MeasurementSeries>,
        steps: usize,
    ) -> Result<()> {
        let count = sm.node_count();
        for node in self.iter() {
            if node.0 == 0 || node.0 > count {
                return Err(Error::NodeOutOfRange { node, count });
            }
            if node == sm.air {
                return Err(Error::ForcedOutputNode(node));
            }
            let series = meas.and_then(|m| m.get(node));
            match series {
                None => return Err(Error::MissingMeasurement { node, step: 0 }),
                Some(s) if s.len() < steps => {
                    return Err(Error::MissingMeasurement {
                        node,
                        step: s.len(),
                    })
                }
                Some(_) => {}
            }
        }
        Ok(())
    }
}

impl FromIterator<NodeId> for ForcingSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        ForcingSet(iter.into_iter().collect())
    }
}

/// Node temperatures over time, stored node-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    values: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn node_count(&self) -> usize {
        self.values.len()
    }

    pub fn steps(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn node(&self, id: NodeId) -> &[f64] {
        &self.values[id.index()]
    }

    pub fn state_at(&self, step: usize) -> Vec<f64> {
        self.values.iter().map(|s| s[step]).collect()
    }

    pub fn final_state(&self) -> Vec<f64> {
        self.state_at(self.steps() - 1)
    }
}

pub fn step_matrix(sm: &StateMatrices, dt: f64) -> Result<DenseMatrix> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidConfig(format!("time step must be > 0, got {dt}")));
    }
    let n = sm.node_count();
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = -sm.a[(i, j)];
        }
        m[(i, i)] += sm.capacity[i] / dt;
    }
    Ok(m)
}

pub fn step_rhs(sm: &StateMatrices, dt: f64, t_prev: &[f64], u_next: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = sm
        .capacity
        .iter()
        .zip(t_prev)
        .map(|(c, t)| c / dt * t)
        .collect();
    sm.b.mul_vec_add(u_next, &mut v);
    v
}

/// `M = C/dt − A`, `V = (C/dt)·T_prev + B·U_next`.
pub fn build_step_system(
    sm: &StateMatrices,
    dt: f64,
    t_prev: &[f64],
    u_next: &[f64],
) -> Result<(DenseMatrix, Vec<f64>)> {
    if t_prev.len() != sm.node_count() {
        return Err(Error::LengthMismatch {
            what: "state vector",
            left: t_prev.len(),
            right: sm.node_count(),
        });
    }
    if u_next.len() != sm.channel_count() {
        return Err(Error::LengthMismatch {
            what: "input vector",
            left: u_next.len(),
            right: sm.channel_count(),
        });
    }
    let m = step_matrix(sm, dt)?;
    Ok((m, step_rhs(sm, dt, t_prev, u_next)))
}

/// Replaces row `node` of `M` by the unit row and sets `V[node] = value`.
pub fn apply_forcing(m: &mut DenseMatrix, v: &mut [f64], node: NodeId, value: f64) {
    let i = node.index();
    m.row_mut(i).fill(0.0);
    m[(i, i)] = 1.0;
    v[i] = value;
}

fn forced_values(
    forcing: &ForcingSet,
    meas: Option<&MeasurementSeries>,
    step: usize,
) -> Result<Vec<(NodeId, f64)>> {
    forcing
        .iter()
        .map(|node| {
            meas.and_then(|m| m.value(node, step))
                .map(|v| (node, v))
                .ok_or(Error::MissingMeasurement { node, step })
        })
        .collect()
}

/// One implicit step with forcing, solved by a dense LU.
///
/// `step` is the time index of `u_next`, used to look up measurements.
pub fn step(
    sm: &StateMatrices,
    dt: f64,
    t_prev: &[f64],
    u_next: &[f64],
    forcing: &ForcingSet,
    meas: Option<&MeasurementSeries>,
    step: usize,
) -> Result<Vec<f64>> {
    let values = forced_values(forcing, meas, step)?;
    let (mut m, mut v) = build_step_system(sm, dt, t_prev, u_next)?;
    for &(node, value) in &values {
        apply_forcing(&mut m, &mut v, node, value);
    }
    let mut t = m.solve(&v)?;
    for (node, value) in values {
        t[node.index()] = value;
    }
    Ok(t)
}

/// Steady state `A·T = −B·U₀` with forced nodes pinned. Falls back to a
/// uniform `T_ae(0)` field when the system is singular.
pub fn initial_state_forced(
    sm: &StateMatrices,
    u0: &[f64],
    forced: &[(NodeId, f64)],
) -> Vec<f64> {
    let n = sm.node_count();
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = -sm.a[(i, j)];
        }
    }
    let mut v = sm.b.mul_vec(u0);
    for &(node, value) in forced {
        apply_forcing(&mut m, &mut v, node, value);
    }
    let mut t = match m.solve(&v) {
        Ok(t) => t,
        Err(_) => {
            let t_ae = sm
                .channels
                .iter()
                .position(|c| *c == InputChannel::OutdoorAir)
                .map_or(0.0, |k| u0[k]);
            vec![t_ae; n]
        }
    };
    for &(node, value) in forced {
        t[node.index()] = value;
    }
    t
}

/// Warm start: steady state under the first input vector.
pub fn initial_state(sm: &StateMatrices, u0: &[f64]) -> Vec<f64> {
    initial_state_forced(sm, u0, &[])
}

/// Steady-state start consistent with a forcing set at step 0.
pub fn initial_state_for(
    sm: &StateMatrices,
    weather: &WeatherSeries,
    forcing: &ForcingSet,
    meas: Option<&MeasurementSeries>,
) -> Result<Vec<f64>> {
    let values = forced_values(forcing, meas, 0)?;
    Ok(initial_state_forced(sm, &weather.input_vector(sm, 0), &values))
}

/// Runs the whole horizon. `t0` is the state at the first weather record;
/// each following record drives one implicit step.
pub fn simulate(
    sm: &StateMatrices,
    weather: &WeatherSeries,
    forcing: &ForcingSet,
    meas: Option<&MeasurementSeries>,
    t0: &[f64],
) -> Result<Trajectory> {
    weather.validate()?;
    let n = sm.node_count();
    let steps = weather.len();
    if t0.len() != n {
        return Err(Error::LengthMismatch {
            what: "initial state",
            left: t0.len(),
            right: n,
        });
    }
    forcing.validate(sm, meas, steps)?;
    if let Some(m) = meas {
        if !forcing.is_empty() && (m.dt - weather.dt).abs() > DT_TOL {
            return Err(Error::InvalidSeries(format!(
                "measurement step {} s differs from simulation step {} s",
                m.dt, weather.dt
            )));
        }
    }

    let dt = weather.dt;
    let forced: Vec<(NodeId, &[f64])> = forcing
        .iter()
        .map(|node| (node, meas.and_then(|m| m.get(node)).expect("validated")))
        .collect();

    let mut m = step_matrix(sm, dt)?;
    let mut scratch = vec![0.0; n];
    for &(node, _) in &forced {
        apply_forcing(&mut m, &mut scratch, node, 0.0);
    }
    let lu = LuFactors::factor(&m)?;

    let mut values = vec![Vec::with_capacity(steps); n];
    let mut t = t0.to_vec();
    for &(node, series) in &forced {
        t[node.index()] = series[0];
    }
    for (row, ti) in values.iter_mut().zip(&t) {
        row.push(*ti);
    }

    let mut u = vec![0.0; sm.channel_count()];
    for k in 1..steps {
        let rec = &weather.records[k];
        for (slot, &ch) in u.iter_mut().zip(&sm.channels) {
            *slot = rec.channel(ch);
        }
        let mut v = step_rhs(sm, dt, &t, &u);
        for &(node, series) in &forced {
            v[node.index()] = series[k];
        }
        t = lu.solve(&v);
        for &(node, series) in &forced {
            t[node.index()] = series[k];
        }
        if let Some(i) = t.iter().position(|x| !x.is_finite()) {
            return Err(Error::Singular {
                column: i,
                pivot: f64::NAN,
            });
        }
        for (row, ti) in values.iter_mut().zip(&t) {
            row.push(*ti);
        }
    }
    Ok(Trajectory { dt, values })
}

/// Simulation from the forcing-consistent steady-state start.
pub fn simulate_from_rest(
    sm: &StateMatrices,
    weather: &WeatherSeries,
    forcing: &ForcingSet,
    meas: Option<&MeasurementSeries>,
) -> Result<Trajectory> {
    forcing.validate(sm, meas, weather.len())?;
    let t0 = initial_state_for(sm, weather, forcing, meas)?;
    simulate(sm, weather, forcing, meas, &t0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm_inf;
    use crate::model::{
        build_state, AirZone, BuildingDescription, EnvelopeComponent, Layer, Orientation,
        OutsideBoundary,
    };

    fn one_wall() -> BuildingDescription {
        BuildingDescription {
            components: vec![EnvelopeComponent {
                name: "wall".into(),
                orientation: Orientation::South,
                area: 10.0,
                layers: vec![Layer::new(0.1, 0.5, 1200.0, 900.0)],
                internal_node_count: 1,
                h_ci: 5.0,
                h_ce: 15.0,
                h_ri: 5.0,
                h_re: 5.0,
                absorptivity: 0.6,
                outside_boundary: OutsideBoundary::Ambient,
                glazed: false,
            }],
            zone: AirZone {
                capacity: 30_000.0,
                air_specific_heat: 1006.0,
                mass_flow: 0.005,
            },
            glazing_transmitted_fraction: 0.0,
        }
    }

    fn sunny(t: f64) -> WeatherRecord {
        WeatherRecord {
            t_ae: t,
            t_sky: t - 8.0,
            solar: [50.0, 400.0, 100.0, 100.0, 600.0],
        }
    }

    #[test]
    fn zero_exchange_is_identity_step() {
        let (_, mut sm) = build_state(&one_wall()).unwrap();
        let n = sm.node_count();
        sm.a = DenseMatrix::zeros(n, n);
        sm.b = DenseMatrix::zeros(n, sm.channel_count());
        // give the radiant node some capacity so M stays regular
        sm.capacity.iter_mut().for_each(|c| *c = c.max(1.0));
        let t_prev: Vec<f64> = (0..n).map(|i| 10.0 + i as f64).collect();
        let u = vec![0.0; sm.channel_count()];
        let (m, v) = build_step_system(&sm, 900.0, &t_prev, &u).unwrap();
        let t = m.solve(&v).unwrap();
        for (a, b) in t.iter().zip(&t_prev) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn radiant_row_has_no_capacity_term() {
        let (_, sm) = build_state(&one_wall()).unwrap();
        let m = step_matrix(&sm, 900.0).unwrap();
        let r = sm.mean_radiant.index();
        assert_eq!(m[(r, r)], -sm.a[(r, r)]);
    }

    #[test]
    fn non_positive_dt_rejected() {
        let (_, sm) = build_state(&one_wall()).unwrap();
        assert!(step_matrix(&sm, 0.0).is_err());
    }

    #[test]
    fn forced_node_takes_value_exactly() {
        let (_, sm) = build_state(&one_wall()).unwrap();
        let n = sm.node_count();
        let t_prev = vec![20.0; n];
        let u = WeatherSeries::constant(900.0, 2, sunny(25.0))
            .unwrap()
            .input_vector(&sm, 1);
        let (mut m, mut v) = build_step_system(&sm, 900.0, &t_prev, &u).unwrap();
        apply_forcing(&mut m, &mut v, NodeId(2), 31.25);
        assert_eq!(m.row(1)[1], 1.0);
        assert!(m.row(1).iter().enumerate().all(|(j, x)| j == 1 || *x == 0.0));
        assert_eq!(v[1], 31.25);
        let t = m.solve(&v).unwrap();
        assert!((t[1] - 31.25).abs() < 1e-12);
        let res: Vec<f64> = m.mul_vec(&t).iter().zip(&v).map(|(a, b)| a - b).collect();
        assert!(norm_inf(&res) <= 1e-9 * norm_inf(&v));
    }

    #[test]
    fn reinjecting_free_solution_changes_nothing() {
        let (_, sm) = build_state(&one_wall()).unwrap();
        let n = sm.node_count();
        let t_prev: Vec<f64> = (0..n).map(|i| 18.0 + 0.5 * i as f64).collect();
        let u = WeatherSeries::constant(900.0, 2, sunny(28.0))
            .unwrap()
            .input_vector(&sm, 1);
        let (m, v) = build_step_system(&sm, 900.0, &t_prev, &u).unwrap();
        let free = m.solve(&v).unwrap();
        for k in 0..n - 1 {
            let (mut mf, mut vf) = (m.clone(), v.clone());
            apply_forcing(&mut mf, &mut vf, NodeId::from_index(k), free[k]);
            let forced = mf.solve(&vf).unwrap();
            for (a, b) in forced.iter().zip(&free) {
                assert!((a - b).abs() < 1e-10, "node {}", k + 1);
            }
        }
    }

    #[test]
    fn step_requires_measurement() {
        let (_, sm) = build_state(&one_wall()).unwrap();
        let n = sm.node_count();
        let forcing: ForcingSet = [NodeId(1)].into_iter().collect();
        let u = vec![20.0, 20.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let err = step(&sm, 900.0, &vec![20.0; n], &u, &forcing, None, 3).unwrap_err();
        assert!(matches!(err, Error::MissingMeasurement { node: NodeId(1), step: 3 }));
    }

    #[test]
    fn air_node_cannot_be_forced() {
        let (_, sm) = build_state(&one_wall()).unwrap();
        let weather = WeatherSeries::constant(900.0, 4, sunny(20.0)).unwrap();
        let meas = MeasurementSeries::new(900.0, [(sm.air, vec![20.0; 4])].into()).unwrap();
        let forcing: ForcingSet = [sm.air].into_iter().collect();
        let t0 = vec![20.0; sm.node_count()];
        assert!(matches!(
            simulate(&sm, &weather, &forcing, Some(&meas), &t0),
            Err(Error::ForcedOutputNode(_))
        ));
    }

    #[test]
    fn initial_state_is_fixed_point() {
        let (_, sm) = build_state(&one_wall()).unwrap();
        let w = WeatherSeries::constant(900.0, 2, sunny(26.0)).unwrap();
        let u = w.input_vector(&sm, 0);
        let t0 = initial_state(&sm, &u);
        let t1 = step(&sm, 900.0, &t0, &u, &ForcingSet::empty(), None, 1).unwrap();
        for (a, b) in t0.iter().zip(&t1) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_input_falls_back_to_outdoor_temperature() {
        let (_, mut sm) = build_state(&one_wall()).unwrap();
        let n = sm.node_count();
        sm.a = DenseMatrix::zeros(n, n);
        sm.b = DenseMatrix::zeros(n, sm.channel_count());
        let u = vec![17.5, 10.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(initial_state(&sm, &u), vec![17.5; n]);
    }

    #[test]
    fn simulate_matches_stepwise_solution() {
        let (_, sm) = build_state(&one_wall()).unwrap();
        let records: Vec<_> = (0..30).map(|k| sunny(20.0 + (k as f64 * 0.3).sin() * 5.0)).collect();
        let weather = WeatherSeries::new(900.0, records).unwrap();
        let meas =
            MeasurementSeries::new(900.0, [(NodeId(2), (0..30).map(|k| 22.0 + 0.1 * k as f64).collect())].into())
                .unwrap();
        let forcing: ForcingSet = [NodeId(2)].into_iter().collect();
        let t0 = initial_state_for(&sm, &weather, &forcing, Some(&meas)).unwrap();
        let traj = simulate(&sm, &weather, &forcing, Some(&meas), &t0).unwrap();
        let mut t = t0.clone();
        for k in 1..30 {
            t = step(&sm, 900.0, &t, &weather.input_vector(&sm, k), &forcing, Some(&meas), k).unwrap();
            for (a, b) in traj.state_at(k).iter().zip(&t) {
                assert!((a - b).abs() < 1e-9);
            }
        }
        assert_eq!(traj.node(NodeId(2)), meas.get(NodeId(2)).unwrap());
    }

    #[test]
    fn empty_forcing_needs_no_measurements() {
        let (_, sm) = build_state(&one_wall()).unwrap();
        let weather = WeatherSeries::constant(900.0, 5, sunny(20.0)).unwrap();
        let traj = simulate_from_rest(&sm, &weather, &ForcingSet::empty(), None).unwrap();
        assert_eq!(traj.steps(), 5);
        assert_eq!(traj.node_count(), sm.node_count());
    }

    #[test]
    fn measurement_dt_mismatch_rejected() {
        let (_, sm) = build_state(&one_wall()).unwrap();
        let weather = WeatherSeries::constant(900.0, 4, sunny(20.0)).unwrap();
        let meas = MeasurementSeries::new(600.0, [(NodeId(1), vec![20.0; 4])].into()).unwrap();
        let forcing: ForcingSet = [NodeId(1)].into_iter().collect();
        let t0 = vec![20.0; sm.node_count()];
        assert!(simulate(&sm, &weather, &forcing, Some(&meas), &t0).is_err());
    }

    #[test]
    fn weather_validation() {
        assert!(WeatherSeries::new(900.0, vec![WeatherRecord::constant(1.0)]).is_err());
        let mut r = WeatherRecord::constant(1.0);
        r.solar[2] = -1.0;
        assert!(WeatherSeries::new(900.0, vec![r, r]).is_err());
        assert!(WeatherSeries::new(0.0, vec![WeatherRecord::constant(1.0); 2]).is_err());
    }
}
