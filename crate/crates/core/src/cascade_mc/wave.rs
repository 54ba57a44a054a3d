//! Three-wave interaction `J` and the shell energy spectrum.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::shell::{HatField, Lattice, ShellSpec};

/// In-place multidimensional FFT on a flat lattice array.
pub struct LatticeFft {
    lattice: Lattice,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl LatticeFft {
    pub fn new(lattice: Lattice) -> Self {
        let mut planner = FftPlanner::new();
        LatticeFft {
            lattice,
            forward: planner.plan_fft_forward(lattice.m),
            inverse: planner.plan_fft_inverse(lattice.m),
        }
    }

    fn run(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let m = self.lattice.m;
        let d = self.lattice.d;
        let total = data.len();
        let mut line = vec![Complex64::new(0.0, 0.0); m];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for axis in 0..d {
            let stride = m.pow((d - 1 - axis) as u32);
            let block = stride * m;
            for base in (0..total).step_by(block) {
                for off in 0..stride {
                    let start = base + off;
                    for (i, v) in line.iter_mut().enumerate() {
                        *v = data[start + i * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (i, v) in line.iter().enumerate() {
                        data[start + i * stride] = *v;
                    }
                }
            }
        }
    }

    /// `sum_m F(m) e^{+2 pi i m x / M}`, unnormalized.
    pub fn to_physical(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
    }

    /// `M^-d sum_x f(x) e^{-2 pi i m x / M}`.
    pub fn to_spectral(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
        let s = 1.0 / self.lattice.len() as f64;
        for v in data.iter_mut() {
            *v *= s;
        }
    }
}

/// Reusable evaluator of `J` on one lattice and shell pair.
pub struct ThreeWave {
    shell: ShellSpec,
    fft: LatticeFft,
    large: Vec<usize>,
}

impl ThreeWave {
    pub fn new(lattice: Lattice, shell: ShellSpec) -> Self {
        let large = (0..lattice.len()).filter(|&i| shell.lattice_large(lattice.norm_sq(i), lattice.q)).collect();
        ThreeWave { shell, fft: LatticeFft::new(lattice), large }
    }

    fn physical_small(&self, f: &HatField) -> Vec<Vec<Complex64>> {
        let l = f.lattice();
        (0..l.d)
            .map(|a| {
                let mut c: Vec<Complex64> = f
                    .component(a)
                    .iter()
                    .enumerate()
                    .map(
                        |(i, &z)| {
                            if self.shell.lattice_small(l.norm_sq(i), l.q) {
                                z
                            } else {
                                Complex64::new(0.0, 0.0)
                            }
                        },
                    )
                    .collect();
                self.fft.to_physical(&mut c);
                c
            })
            .collect()
    }

    /// `J(u, v, w)` as a complex number; real for real fields.
    pub fn eval_complex(&self, u: &HatField, v: &HatField, w: &HatField) -> Complex64 {
        let l = u.lattice();
        let pu = self.physical_small(u);
        let pv = if std::ptr::eq(u, v) { pu.clone() } else { self.physical_small(v) };
        let i = Complex64::new(0.0, 1.0);
        let mut total = Complex64::new(0.0, 0.0);
        let mut prod = vec![Complex64::new(0.0, 0.0); l.len()];
        for (j, uj) in pu.iter().enumerate() {
            for (c, vc) in pv.iter().enumerate() {
                for ((p, a), b) in prod.iter_mut().zip(uj).zip(vc) {
                    *p = a * b;
                }
                self.fft.to_spectral(&mut prod);
                let wc = w.component(c);
                for &idx in &self.large {
                    let m = l.modes(idx);
                    let neg = l.index([-m[0], -m[1], -m[2]]).expect("large shell lies inside the lattice");
                    let xi_j = m[j] as f64 * l.spacing();
                    total += i * xi_j * prod[idx] * wc[neg];
                }
            }
        }
        total * l.cell() * l.cell()
    }

    pub fn eval(&self, u: &HatField, v: &HatField, w: &HatField) -> f64 {
        self.eval_complex(u, v, w).re
    }
}

/// `J(u, v, w) = int int (chi_S u(xi - eta) . i xi)(chi_S v(eta) . chi_L w(-xi))`
/// on the lattice, as a complex number.
pub fn three_wave_complex(u: &HatField, v: &HatField, w: &HatField, shell: &ShellSpec) -> Complex64 {
    ThreeWave::new(u.lattice(), *shell).eval_complex(u, v, w)
}

/// Real part of [`three_wave_complex`].
pub fn three_wave(u: &HatField, v: &HatField, w: &HatField, shell: &ShellSpec) -> f64 {
    three_wave_complex(u, v, w, shell).re
}

/// `int chi_{A^S u A^L} |u|^2` over lattice coefficients.
pub fn shell_mass(u: &HatField, shell: &ShellSpec) -> f64 {
    let l = u.lattice();
    (0..l.len())
        .filter(|&i| shell.lattice_union(l.norm_sq(i), l.q))
        .map(|i| u.get(i)[..l.d].iter().map(|z| z.norm_sqr()).sum::<f64>())
        .sum::<f64>()
        * l.cell()
}

/// Energy spectrum `E(k) = k^-1 int chi |u|^2` of a field stored on the
/// lattice in physical wavenumbers.
pub fn shell_energy_lattice(u: &HatField, shell: &ShellSpec) -> f64 {
    shell_mass(u, shell) / shell.k as f64
}
