//! Doubly periodic grid fields on the torus (R/2Z)^2: spectral transforms,
//! Biot-Savart inversion, calculus operators and interpolation.

pub mod fft;
mod grid;
mod interp;
mod ops;
mod scalar;
mod snapshot;
mod vector;

pub use grid::{wrap, Grid2D, PERIOD};
pub use interp::{
    interpolate, interpolate_vector, interpolate_with, Interpolation, PointBasis, Stencil, SPECTRAL_POINT_LIMIT,
};
pub use ops::{
    biot_savart_2d, biot_savart_coefficients, curl_2p5d, energy, enstrophy, stream_function, vector_enstrophy,
    MEAN_TOLERANCE,
};
pub use scalar::ScalarField2D;
pub use snapshot::{Snapshot, MAGIC};
pub use vector::VectorField2D;
