//! Level sweeps behind the stretching, deformation and cascade results,
//! plus the configuration, CSV and manifest plumbing shared with the CLI.

mod cascade;
mod config;
mod deform;
mod driver;
mod flux;
mod inviscid;
mod mc;
mod output;

pub use cascade::{
    check_level, resolvable_viscosity, run_cascade, run_zeroth_law, small_scale_for, CascadeRow, CascadeTable,
    ZerothLawRow, ZerothLawTable,
};
pub use config::{ExperimentConfig, ExperimentKind, FluxOptions, McOptions, ProfileChoice, MAX_LEVEL};
pub use deform::{
    ball_markers, bubble_grid, bubble_shapes, deform_markers, frobenius, marker_table, run_deform_bc,
    run_deform_bubbles, BubbleReport, BubbleRow, DeformData, DeformReport, DeformRow, NORM_NOTE,
};
pub use flux::{
    band_wavenumbers, budget_table, flux_rows, flux_table, model_table, run_flux_report, FluxReport, FluxRow,
};
pub use inviscid::{difference_norms, ols, run_inviscid_limit, DifferenceNorms, InviscidReport, InviscidRow};
pub use mc::{mc_config, mc_table, run_cascade_mc};
pub use output::{fmt, ExperimentOutput, Manifest, Table};

use crate::error::Result;

/// Run the experiment named by `cfg.kind` and collect its outputs.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    match cfg.kind {
        ExperimentKind::Cascade => cascade::cascade_output(cfg),
        ExperimentKind::ZerothLaw => cascade::zeroth_law_output(cfg),
        ExperimentKind::DeformBc => deform::deform_bc_output(cfg),
        ExperimentKind::DeformBubbles => deform::deform_bubbles_output(cfg),
        ExperimentKind::InviscidLimit => inviscid::inviscid_output(cfg),
        ExperimentKind::FluxReport => flux::flux_output(cfg),
        ExperimentKind::CascadeMc => mc::mc_output(cfg),
    }
}
