//! Distance between viscous and inviscid runs from the same data as the
//! viscosity goes to zero.

use vortexlab::experiments::{run_inviscid_limit, ExperimentConfig, ExperimentKind};

fn main() -> vortexlab::Result<()> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::InviscidLimit);
    if std::env::args().all(|a| a != "--full") {
        cfg.grid = Some(256);
        cfg.delta = 0.05;
        cfg.nu_ladder = vec![1e-3, 1e-4];
    }
    let r = run_inviscid_limit(&cfg)?;
    print!("{}", r.to_table().to_csv());
    Ok(())
}
