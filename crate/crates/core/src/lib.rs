//! Nodal building thermal simulation with measurement forcing, and a
//! genetic-algorithm search for the sub-models responsible for
//! disagreement between measured and simulated indoor air temperature.
//!
//! The pieces, bottom up:
//!
//! * [`model`] turns a [`BuildingDescription`] into a nodal RC network and
//!   the state-space matrices `C·dT/dt = A·T + B·U`.
//! * [`simulate`] marches the network with backward Euler and imposes
//!   measured temperatures on selected nodes (Dirichlet forcing).
//! * [`ga`] is a binary GA whose chromosome selects the nodes to force.
//! * [`diagnose`] scores a forcing set by the squared air-temperature
//!   residuals and runs the search, plus an exhaustive oracle.
//! * [`verify`] perturbs a reference model and checks that the search
//!   localizes the perturbation.
//! * [`cli`] reads and writes the file formats and drives the commands.

pub mod cell;
pub mod cli;
pub mod diagnose;
pub mod error;
pub mod ga;
pub mod linalg;
pub mod model;
pub mod simulate;
pub mod verify;

pub use error::{Error, ErrorKind, Result};
pub use model::{BuildingDescription, NodeId, StateMatrices};
