//! Bundled reference test cell and synthetic five-day weather sequence.
//!
//! The cell is a 3 m × 3 m × 2.5 m box: four fibre-cement/polyurethane
//! walls, a wooden door in the north wall, a window in the south wall, a
//! steel/polyurethane/fibre-cement roof and a floor slab insulated from the
//! supporting concrete. The floor is discretized so that two of its nodes
//! sit 5 cm and 10 cm deep in the supporting concrete.

use std::f64::consts::PI;

use chrono::{NaiveDate, NaiveDateTime};

use crate::model::{
    AirZone, BuildingDescription, EnvelopeComponent, Layer, NodalModel, NodeId, Orientation,
    OutsideBoundary,
};
use crate::simulate::{WeatherRecord, WeatherSeries, DEFAULT_DT};

/// Labels of the measured nodes, in the order of the available sensors.
pub const MEASURED_LABELS: [&str; 5] = [
    "east_wall:inside",
    "door:inside",
    "roof:inside",
    // 5 cm below the top of the supporting concrete
    "floor:internal2",
    // 10 cm below the top of the supporting concrete
    "floor:internal1",
];

fn fibre_cement(thickness: f64) -> Layer {
    Layer::new(thickness, 0.35, 1400.0, 1000.0)
}

fn polyurethane(thickness: f64) -> Layer {
    Layer::new(thickness, 0.03, 35.0, 1400.0)
}

fn component(name: &str, orientation: Orientation, area: f64, layers: Vec<Layer>) -> EnvelopeComponent {
    EnvelopeComponent {
        name: name.into(),
        orientation,
        area,
        layers,
        internal_node_count: 0,
        h_ci: 5.0,
        h_ce: 15.0,
        h_ri: 5.0,
        h_re: 4.0,
        absorptivity: 0.4,
        outside_boundary: OutsideBoundary::Ambient,
        glazed: false,
    }
}

pub fn test_cell() -> BuildingDescription {
    let wall = || vec![fibre_cement(0.005), polyurethane(0.06), fibre_cement(0.005)];

    let east = component("east_wall", Orientation::East, 7.5, wall());
    let west = component("west_wall", Orientation::West, 7.5, wall());
    let south = component("south_wall", Orientation::South, 6.7, wall());
    let north = component("north_wall", Orientation::North, 5.7, wall());

    let mut door = component(
        "door",
        Orientation::North,
        1.8,
        vec![Layer::new(0.04, 0.23, 600.0, 1600.0)],
    );
    door.absorptivity = 0.6;

    let mut window = component(
        "window",
        Orientation::South,
        0.8,
        vec![Layer::new(0.004, 1.0, 2500.0, 840.0)],
    );
    window.absorptivity = 0.1;
    window.glazed = true;

    let mut roof = component(
        "roof",
        Orientation::HorizontalUp,
        9.0,
        vec![
            Layer::new(0.001, 50.0, 7800.0, 460.0),
            polyurethane(0.04),
            fibre_cement(0.005),
        ],
    );
    roof.absorptivity = 0.3;
    roof.h_ce = 17.0;
    roof.h_re = 5.0;

    let mut floor = component(
        "floor",
        Orientation::HorizontalDown,
        9.0,
        vec![
            // supporting concrete, polystyrene, concrete slab (outside to inside)
            Layer::new(0.15, 1.4, 2200.0, 900.0),
            Layer::new(0.05, 0.04, 25.0, 1400.0),
            Layer::new(0.10, 1.75, 2300.0, 920.0),
        ],
    );
    floor.internal_node_count = 5;
    floor.h_ce = 0.0;
    floor.h_re = 0.0;
    floor.absorptivity = 0.0;
    floor.outside_boundary = OutsideBoundary::NullFlux;

    BuildingDescription {
        components: vec![east, west, south, north, door, window, roof, floor],
        zone: AirZone {
            capacity: 30_000.0,
            air_specific_heat: 1006.0,
            mass_flow: 0.015,
        },
        glazing_transmitted_fraction: 0.7,
    }
}

/// Node ids of [`MEASURED_LABELS`] in `model`.
pub fn measured_nodes(model: &NodalModel) -> Vec<NodeId> {
    MEASURED_LABELS
        .iter()
        .map(|l| model.find_by_label(l).unwrap_or_else(|| panic!("cell has no node `{l}`")))
        .collect()
}

const LATITUDE_DEG: f64 = -20.9;
const FIRST_DAY_OF_YEAR: f64 = 61.0;
const DAYS: usize = 5;
const CLEARNESS: [f64; DAYS] = [1.0, 0.85, 0.6, 0.95, 0.75];
const MEAN_OFFSET: [f64; DAYS] = [0.0, 0.8, -0.5, 0.3, 1.0];

pub fn weather_start() -> NaiveDateTime {
    NaiveDate::from_ymd_opt(2000, 3, 1)
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .expect("valid date")
}

fn record_at(seconds: f64) -> WeatherRecord {
    let day = (seconds / 86_400.0).floor() as usize;
    let hour = (seconds % 86_400.0) / 3600.0;
    let clear = CLEARNESS[day.min(DAYS - 1)];

    let t_ae = 25.0 + MEAN_OFFSET[day.min(DAYS - 1)] + 4.0 * clear * (2.0 * PI * (hour - 14.0) / 24.0).cos();
    let t_sky = t_ae - (4.0 + 8.0 * clear);

    let lat = LATITUDE_DEG.to_radians();
    let doy = FIRST_DAY_OF_YEAR + day as f64;
    let decl = (23.45f64).to_radians() * (2.0 * PI * (284.0 + doy) / 365.0).sin();
    let h = (15.0 * (hour - 12.0)).to_radians();
    let east = -decl.cos() * h.sin();
    let north = lat.cos() * decl.sin() - lat.sin() * decl.cos() * h.cos();
    let up = lat.sin() * decl.sin() + lat.cos() * decl.cos() * h.cos();

    let solar = if up <= 0.0 {
        [0.0; 5]
    } else {
        let dni = clear * 950.0 * (-0.17 / up.max(0.05)).exp();
        let diffuse = 60.0 + 80.0 * (1.0 - clear) * up.sqrt() + 40.0 * up;
        let ghi = dni * up + diffuse;
        let vertical = |cos_inc: f64| dni * cos_inc.max(0.0) + 0.5 * diffuse + 0.5 * 0.2 * ghi;
        [vertical(north), vertical(-north), vertical(east), vertical(-east), ghi]
    };
    WeatherRecord { t_ae, t_sky, solar }
}

/// Five days of quarter-hour weather (480 records) starting 2000-03-01.
pub fn synthetic_weather() -> WeatherSeries {
    let steps = DAYS * 86_400 / DEFAULT_DT as usize;
    let records = (0..steps).map(|n| record_at(n as f64 * DEFAULT_DT)).collect();
    WeatherSeries::new(DEFAULT_DT, records)
        .expect("synthetic weather is valid")
        .with_start(weather_start())
}
