//! Deterministic macrospin simulator for frustrated nanomagnet arrays with a
//! reservoir-computing pipeline on top: spin-torque input encoding, coupled
//! Landau-Lifshitz-Gilbert dynamics, m_z readout, and a closed-form ridge
//! output layer, plus benchmark task generators, a tapped-delay linear
//! baseline, and an area-energy-delay efficiency model.

pub mod baseline;
pub mod eca;
pub mod efficiency;
pub mod error;
pub mod field;
pub mod io;
pub mod llg;
pub mod magnet;
pub mod readout;
pub mod reservoir;
pub mod rng;
pub mod tasks;
pub mod vec3;

pub use error::{Error, Result};
pub use vec3::Vec3;
