//! Steady-state 2D heat transfer through window-frame cross-sections with
//! smoothed particle hydrodynamics.
//!
//! A profile document describes materials, air cavities and boundary faces.
//! The pipeline resolves ventilated cavities, zones reentrant corners, fills
//! the section with a particle lattice, integrates to steady state and reports
//! heat flow, thermal conductance and frame transmittance.

pub mod cavity;
pub mod cli;
mod error;
pub mod export;
pub mod geometry;
pub mod particles;
pub mod pipeline;
pub mod report;
pub mod solver;

pub use error::Error;
