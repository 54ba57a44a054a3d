//! Flow-map deformation near the hyperbolic point for Bahouri-Chemin data,
//! compared with the exponential of the time-integrated key integral.

use vortexlab::experiments::{run_deform_bc, ExperimentConfig, ExperimentKind, NORM_NOTE};

fn main() -> vortexlab::Result<()> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::DeformBc);
    if std::env::args().all(|a| a != "--full") {
        cfg.levels = Some([2, 3]);
        cfg.grid = Some(128);
        cfg.delta = 0.1;
    }
    let (report, markers) = run_deform_bc(&cfg)?;
    print!("{}", report.to_table().to_csv());
    println!("# {NORM_NOTE}");
    if let Some((n, t)) = markers.first() {
        println!("first rows of the marker table at n={n}:");
        for line in t.to_csv().lines().take(4) {
            println!("  {line}");
        }
    }
    Ok(())
}
