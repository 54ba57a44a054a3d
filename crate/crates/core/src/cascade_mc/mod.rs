//! Monte-Carlo model of a self-similar hierarchy of rotated, shifted copies
//! of one snapshot, and the spectral exponent it produces.
//!
//! Fields live on a lattice of wavevectors in the scaled variable
//! `xi = xi_phys / k`, where the unit shell pair holds the snapshot.

mod mc;
mod shell;
mod snapshot;
mod synth;
mod wave;

pub use mc::{
    alpha_solve, fit_slope, mean_zero_check, monte_carlo, sample_rng, McConfig, McReport, MeanZeroReport, ShellStats,
    Welford,
};
pub use shell::{HatField, Lattice, ShellSpec};
pub use snapshot::{
    build_snapshot, build_snapshot_on, default_density, octahedral_group, quarter, rot_apply, rot_apply_transpose,
    rot_mul, rot_z, RadialTransform, Rot3, SeedProfile, SnapshotU, ROT_IDENTITY,
};
pub use synth::{
    default_alpha, ensemble_term, resonant_flux, shell_energy, shell_flux, synthesize, term_count, AngleMode,
    EnsembleOptions, EnsembleSample, EnsembleTerm, RotationMode, ShiftMode, SynthField,
};
pub use wave::{shell_energy_lattice, shell_mass, three_wave, three_wave_complex, LatticeFft, ThreeWave};
