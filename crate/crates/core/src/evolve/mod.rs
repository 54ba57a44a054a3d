//! Time evolution of the 2.5D decoupled system: planar Euler or
//! Navier-Stokes for the large-scale vorticity, passive transport of the
//! small-scale vertical velocity, and the curl that recovers the stretched
//! horizontal vorticity.

mod run;
mod state;
mod stepper;

pub use run::{run, run_observed, InitialCondition, RunConfig, RunOutput, SmallScaleSpec};
pub use state::{expected_spectrum, small_scale_vorticity, Diagnostics, SimState};
pub use stepper::{advance, advance_with, origin_gradient, NoObserver, StageVelocity, StepObserver, StepSize, Stepper};
