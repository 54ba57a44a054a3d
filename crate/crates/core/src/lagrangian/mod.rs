//! Lagrangian diagnostics: flow-map markers, the key integral near the
//! hyperbolic point and shape checks for transported bubbles.

mod checks;
mod key_integral;
mod markers;

pub use checks::{
    bubble_shape_check, bubble_tracers, yudovich_check, yudovich_fit, BubbleShape, YudovichReport, SHAPE_TOLERANCE,
};
pub use key_integral::{
    key_integral, key_integral_sample, key_integral_with, polar_rates, strain_at_origin, KeyIntegralSample, PolarRates,
};
pub use markers::{
    det, operator_norm, sample_stage, seed_markers, FlowMarker, KeySample, MarkerInterpolation, MarkerObserver,
    MarkerSample, MarkerSeed, MarkerSet, Mat2, Sample, DETERMINANT_TOLERANCE, IDENTITY,
};
