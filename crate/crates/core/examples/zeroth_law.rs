//! Time-averaged enstrophy `D_n` with `nu_n = 2^(-2Mn)`, falling back to the
//! inviscid run when the grid cannot resolve `nu_n`.

use vortexlab::experiments::{run_zeroth_law, ExperimentConfig, ExperimentKind};

fn main() -> vortexlab::Result<()> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::ZerothLaw);
    if std::env::args().all(|a| a != "--full") {
        cfg.levels = Some([4, 5]);
        cfg.grid = Some(512);
        cfg.delta = 0.02;
    }
    let t = run_zeroth_law(&cfg)?;
    print!("{}", t.to_table().to_csv());
    println!("a0={:.4} c0={:.4} monotone={}", t.a0, t.c0, t.monotone);
    Ok(())
}
