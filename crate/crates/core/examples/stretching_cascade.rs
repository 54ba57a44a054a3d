//! Growth of the small-scale vorticity norm across Bahouri-Chemin levels.
//!
//! The default is a quick coarse sweep; `--full` runs levels 4..6 at their
//! natural grids (about a minute).

use vortexlab::experiments::{run_cascade, ExperimentConfig, ExperimentKind};

fn main() -> vortexlab::Result<()> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Cascade);
    if std::env::args().all(|a| a != "--full") {
        cfg.levels = Some([2, 3]);
        cfg.grid = Some(128);
    }
    let (table, _) = run_cascade(&cfg)?;
    print!("{}", table.to_table().to_csv());
    println!("monotone={} min_increase={:.3} rate={:.3}", table.monotone, table.min_increase, table.rate);
    Ok(())
}
