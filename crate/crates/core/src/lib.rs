//! Simulation and measurement of reaction-diffusion fronts `u_t = Δu + f(t, u)`
//! in the plane, started from compactly supported data.
//!
//! * [`fields`]: grids, fields, bilinear sampling and bump data.
//! * [`reactions`]: reaction terms and sampling checks of their hypotheses.
//! * [`solver`]: monotone explicit stepping (Cartesian and radial) and comparison helpers.
//! * [`geometry`]: inscribed and enclosing balls, ray scans and polar profiles of level sets.
//! * [`experiments`]: scenarios that turn runs into verdicts.
//! * [`cli`]: configuration files, CSV reports and the command implementations.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod fields;
pub mod geometry;
pub mod reactions;
pub mod solver;

pub use error::{Error, Result};
