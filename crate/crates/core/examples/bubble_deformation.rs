//! Deformation at the origin for `n` unit dyadic bubbles up to `S_n^(-1/2)`,
//! plus the shape check on transported bubble tracers.

use vortexlab::experiments::{run_deform_bubbles, ExperimentConfig, ExperimentKind};

fn main() -> vortexlab::Result<()> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::DeformBubbles);
    if std::env::args().all(|a| a != "--full") {
        cfg.levels = Some([2, 3]);
        cfg.shape_grid = 256;
        cfg.shape_bubbles = 2;
    }
    let r = run_deform_bubbles(&cfg)?;
    print!("{}", r.to_table().to_csv());
    print!("{}", r.shape_table().to_csv());
    println!("monotone={} slope={:.4} shapes_pass={}", r.monotone, r.slope, r.shapes_pass());
    Ok(())
}
