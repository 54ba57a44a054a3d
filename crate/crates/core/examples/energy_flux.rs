//! Point-wise coarse-grained flux `Pi_K` of an evolved field, the filtered
//! energy budget, and the vortex-tube model where the flux is known.

use vortexlab::coarse_grain::{model_flow_report, FilterSpec};
use vortexlab::experiments::{budget_table, flux_table, run_flux_report, ExperimentConfig, ExperimentKind};

fn main() -> vortexlab::Result<()> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::FluxReport);
    if std::env::args().all(|a| a != "--full") {
        cfg.levels = Some([3, 3]);
        cfg.grid = Some(128);
        cfg.flux.t_end = 0.05;
    }
    let r = run_flux_report(&cfg)?;
    print!("{}", flux_table(&r.points).to_csv());
    print!("{}", budget_table(&r.budget).to_csv());
    println!("worst budget closure {:.2e}", r.worst_closure());

    let m = model_flow_report(8.0, FilterSpec::new(8.0)?, 32);
    println!("model flow: C_K={:.6} all_positive={} max_rel_error={:.2e}", m.c_k, m.all_positive, m.max_rel_error);
    Ok(())
}
