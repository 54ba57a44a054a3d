//! The key integral at the origin against the strain it controls, for a
//! single bubble and for Bahouri-Chemin data.

use vortexlab::fields::Grid2D;
use vortexlab::initial_data::{single_bubble, smoothed_bahouri_chemin};
use vortexlab::lagrangian::{key_integral, strain_at_origin};

fn main() -> vortexlab::Result<()> {
    let g = Grid2D::new(128)?;
    for (name, omega) in [("bubble", single_bubble(g, 0.125)?), ("bc n=3", smoothed_bahouri_chemin(g, 3)?)] {
        let [s11, s12, _] = strain_at_origin(&omega);
        for r in [0.0, 0.05, 0.1] {
            println!("{name:>7}: r={r:.2} I={:+.6} du1/dx1={s11:+.6} du1/dx2={s12:+.6}", key_integral(&omega, r));
        }
    }
    Ok(())
}
