//! Monte-Carlo shell energies and fluxes of the self-similar random ensemble.
//!
//! `cargo run --example cascade_mc -- [samples] [seed]`

use vortexlab::experiments::{mc_table, run_cascade_mc, ExperimentConfig, ExperimentKind};

fn main() -> vortexlab::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut cfg = ExperimentConfig::new(ExperimentKind::CascadeMc);
    cfg.mc.samples = args.next().and_then(|s| s.parse().ok()).unwrap_or(200);
    cfg.seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);
    cfg.mc.mean_zero_samples = 100;
    let (report, zero) = run_cascade_mc(&cfg)?;
    print!("{}", mc_table(&report).to_csv());
    if let Some(z) = zero {
        println!("ensemble mean norm {:.3e} (bound {:.3e}) pass={}", z.mean_norm, z.bound, z.pass);
    }
    Ok(())
}
