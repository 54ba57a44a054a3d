//! Build the initial fields used by the experiments and save them as snapshots.
//!
//! `cargo run --example initial_data -- [out_dir]`

use vortexlab::fields::{Grid2D, Snapshot};
use vortexlab::initial_data::{
    bourgain_li_bubbles, single_bubble, small_scale_profile, smoothed_bahouri_chemin, BubbleCoefficients,
    SmallScaleMode,
};

fn main() -> vortexlab::Result<()> {
    let dir = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("vortexlab-initial"));
    std::fs::create_dir_all(&dir)?;
    let n = 4;
    let g = Grid2D::new(256)?;

    let bc = smoothed_bahouri_chemin(g, n)?;
    let bubbles = bourgain_li_bubbles(Grid2D::new(128)?, &BubbleCoefficients::ones(4))?;
    let bubble = single_bubble(g, 0.125)?;
    let u_s = small_scale_profile(g, n, SmallScaleMode::LinearThm2)?;

    for (name, f) in [("bc", &bc), ("bubbles", &bubbles), ("bubble", &bubble), ("u_s", &u_s)] {
        let path = dir.join(format!("{name}.vcl"));
        Snapshot::new(name, 0.0, 0.0, f.clone()).save(&path)?;
        println!(
            "{name:>8}: N={:4} mean={:+.2e} max|f|={:.4} L2={:.4} -> {}",
            f.grid().n(),
            f.mean(),
            f.max_abs(),
            f.l2_norm(),
            path.display()
        );
    }
    Ok(())
}
