//! A numerical laboratory for vortex stretching in 2.5-dimensional Euler and
//! Navier-Stokes flows on the torus (R/2Z)^2.
//!
//! The large-scale vorticity evolves by the planar vorticity equation while
//! the vertical velocity is passively transported by the same flow; the
//! stretched horizontal vorticity is recovered as its curl. Around this
//! solver sit Lagrangian deformation tracking, Gaussian coarse-graining
//! diagnostics, and a Monte-Carlo model of the self-similar cascade.

pub mod cascade_mc;
pub mod coarse_grain;
pub mod error;
pub mod evolve;
pub mod experiments;
pub mod fields;
pub mod initial_data;
pub mod lagrangian;
pub mod threads;

pub use error::{Error, Result};
