//! The snapshot `U`: a band-limited, divergence-free velocity that changes
//! sign under the quarter turn, evaluated analytically in Fourier space.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::shell::{HatField, Lattice, ShellSpec};
use super::wave::three_wave_complex;
use crate::error::{Error, Result};
use crate::initial_data::BubbleProfile;

/// 3x3 rotation; planar rotations act on the first two axes.
pub type Rot3 = [[f64; 3]; 3];

pub const ROT_IDENTITY: Rot3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// Rotation by `theta` about the third axis.
pub fn rot_z(theta: f64) -> Rot3 {
    let (s, c) = theta.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

/// Rotation by `times` quarter turns, with exact entries.
pub fn quarter(times: u32) -> Rot3 {
    match times % 4 {
        0 => ROT_IDENTITY,
        1 => [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
        2 => [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]],
        _ => [[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
    }
}

pub fn rot_mul(a: &Rot3, b: &Rot3) -> Rot3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

pub fn rot_apply(r: &Rot3, v: [f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2];
    }
    out
}

pub fn rot_apply_transpose(r: &Rot3, v: [f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = r[0][i] * v[0] + r[1][i] * v[1] + r[2][i] * v[2];
    }
    out
}

fn rot_apply_c(r: &Rot3, v: [Complex64; 3]) -> [Complex64; 3] {
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = v[0] * r[i][0] + v[1] * r[i][1] + v[2] * r[i][2];
    }
    out
}

/// The 24 rotations mapping the cubic lattice to itself.
pub fn octahedral_group() -> Vec<Rot3> {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(24);
    for p in perms {
        for signs in 0..8u32 {
            let mut r = [[0.0; 3]; 3];
            for (i, &pi) in p.iter().enumerate() {
                r[i][pi] = if signs >> i & 1 == 1 { -1.0 } else { 1.0 };
            }
            if det3(&r) > 0.0 {
                out.push(r);
            }
        }
    }
    out
}

fn det3(r: &Rot3) -> f64 {
    r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
        + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
}

/// Seed velocity from which the snapshot is cut out.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeedProfile {
    /// Velocity of the odd-odd bubble `zeta(x / ell)`.
    SingleBubble { ell: f64 },
    /// The same bubble moved by `offset`; no longer odd under the quarter
    /// turn, so the antisymmetrizing projection is not a no-op.
    OffsetBubble { ell: f64, offset: [f64; 2] },
}

impl Default for SeedProfile {
    fn default() -> Self {
        SeedProfile::SingleBubble { ell: 0.5 }
    }
}

impl SeedProfile {
    fn ell(&self) -> f64 {
        match *self {
            SeedProfile::SingleBubble { ell } | SeedProfile::OffsetBubble { ell, .. } => ell,
        }
    }
}

const GAUSS8: [(f64, f64); 4] = [
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];

fn gauss(a: f64, b: f64, panels: usize, f: &impl Fn(f64) -> f64) -> f64 {
    let w = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * w;
        for &(x, wt) in &GAUSS8 {
            total += wt * (f(mid - 0.5 * w * x) + f(mid + 0.5 * w * x));
        }
    }
    0.5 * w * total
}

/// Two-dimensional Fourier transform of the radial profile `h(|x|)`,
/// `2 pi int_0^2 h(r) J0(rho r) r dr`, tabulated and interpolated.
#[derive(Clone, Debug)]
pub struct RadialTransform {
    step: f64,
    values: Vec<f64>,
}

impl RadialTransform {
    pub fn new(profile: BubbleProfile, rho_max: f64) -> Self {
        let step = 1.0 / 64.0;
        let count = (rho_max / step).ceil() as usize + 6;
        let a = profile.plateau();
        let w = profile.ramp;
        let s = BubbleProfile::SUPPORT;
        let breaks = [0.0, a, a + w, s - w, s];
        let values = (0..count)
            .map(|i| {
                let rho = i as f64 * step;
                let f = |r: f64| profile.h(r) * libm::j0(rho * r) * r;
                2.0 * PI * breaks.windows(2).map(|ab| gauss(ab[0], ab[1], 16, &f)).sum::<f64>()
            })
            .collect();
        RadialTransform { step, values }
    }

    pub fn eval(&self, rho: f64) -> f64 {
        let s = rho.abs() / self.step;
        let i0 = (s.floor() as usize).clamp(2, self.values.len() - 4);
        let frac = s - i0 as f64;
        let mut total = 0.0;
        for k in 0..6 {
            let xk = k as f64 - 2.0;
            let mut p = 1.0;
            for l in 0..6 {
                if l != k {
                    let xl = l as f64 - 2.0;
                    p *= (frac - xl) / (xk - xl);
                }
            }
            total += p * self.values[i0 + k - 2];
        }
        total
    }
}

/// Snapshot `U` with its energy and three-wave flux.
#[derive(Clone, Debug)]
pub struct SnapshotU {
    shell: ShellSpec,
    lattice: Lattice,
    seed: SeedProfile,
    radial: RadialTransform,
    antisymmetrize: bool,
    coeffs: HatField,
    support: Vec<usize>,
    e_u: f64,
    pi_u: f64,
    pi_u_imag: f64,
}

/// Default lattice density: points per unit wavenumber.
pub fn default_density(d: usize) -> u64 {
    if d == 2 {
        8
    } else {
        4
    }
}

/// Build `U` on the unit shell pair for dimension `d` and locality factor `b`.
pub fn build_snapshot(d: usize, b: u32, seed: SeedProfile) -> Result<SnapshotU> {
    build_snapshot_on(ShellSpec::unit(b, d)?, default_density(d), seed)
}

pub fn build_snapshot_on(shell: ShellSpec, q: u64, seed: SeedProfile) -> Result<SnapshotU> {
    if shell.k != 1 {
        return Err(Error::ShellMismatch(format!("snapshot lives on the unit shell, got k = {}", shell.k)));
    }
    let ell = seed.ell();
    if !(ell > 0.0) {
        return Err(Error::Config(format!("seed scale {ell} must be positive")));
    }
    let lattice = Lattice::for_shell(&shell, q);
    let radial = RadialTransform::new(BubbleProfile::default(), ell * shell.outer_radius() + 0.5);
    let support = lattice.support(&shell);
    let mut snap = SnapshotU {
        shell,
        lattice,
        seed,
        radial,
        antisymmetrize: true,
        coeffs: HatField::zeros(lattice),
        support,
        e_u: 0.0,
        pi_u: 0.0,
        pi_u_imag: 0.0,
    };
    let raw = snap.sample_seed();
    snap.antisymmetrize = raw.add(&raw.quarter_turn(1)).norm_sq().sqrt() > 1e-12 * raw.norm_sq().sqrt();
    let mut coeffs = HatField::zeros(lattice);
    for &idx in &snap.support {
        coeffs.set(idx, snap.eval_unmasked(lattice.xi(idx)));
    }
    snap.e_u = coeffs.norm_sq();
    if !(snap.e_u >= 1e-8) {
        return Err(Error::DegenerateSnapshot(format!("E^U = {:e} below 1e-8", snap.e_u)));
    }
    let j = three_wave_complex(&coeffs, &coeffs, &coeffs, &shell);
    snap.pi_u = j.re;
    snap.pi_u_imag = j.im;
    snap.coeffs = coeffs;
    Ok(snap)
}

impl SnapshotU {
    fn sample_seed(&self) -> HatField {
        let mut f = HatField::zeros(self.lattice);
        for &idx in &self.support {
            let v = self.seed_velocity(self.lattice.xi(idx));
            f.set(idx, v);
        }
        f
    }

    /// Unprojected seed velocity at `xi`.
    pub fn seed_velocity(&self, xi: [f64; 3]) -> [Complex64; 3] {
        let zero = Complex64::new(0.0, 0.0);
        let kh2 = xi[0] * xi[0] + xi[1] * xi[1];
        if kh2 == 0.0 {
            return [zero; 3];
        }
        let (ell, offset) = match self.seed {
            SeedProfile::SingleBubble { ell } => (ell, [0.0, 0.0]),
            SeedProfile::OffsetBubble { ell, offset } => (ell, offset),
        };
        // zeta = sum e1 e2 h(|x - 2e|)  =>  zeta^ = -4 sin(2 xi1) sin(2 xi2) h^(|xi|)
        let s1 = (2.0 * ell * xi[0]).sin();
        let s2 = (2.0 * ell * xi[1]).sin();
        let w = -4.0 * s1 * s2 * ell * ell * self.radial.eval(ell * kh2.sqrt());
        let phase = Complex64::from_polar(1.0, -(xi[0] * offset[0] + xi[1] * offset[1]));
        let mut omega = phase * w;
        if self.shell.d == 3 {
            omega *= (-0.5 * (ell * xi[2]).powi(2)).exp();
        }
        // u^ = i xi_perp / |xi_h|^2 omega^, xi_perp = (-xi2, xi1)
        let i = Complex64::new(0.0, 1.0);
        [-i * xi[1] / kh2 * omega, i * xi[0] / kh2 * omega, zero]
    }

    /// `U^(xi)` before the shell mask.
    pub fn eval_unmasked(&self, xi: [f64; 3]) -> [Complex64; 3] {
        let v = if self.antisymmetrize {
            // (1/4) sum_m (-1)^m R^m u(R^-m xi)
            let mut acc = [Complex64::new(0.0, 0.0); 3];
            for m in 0..4u32 {
                let r = quarter(m);
                let w = rot_apply_c(&r, self.seed_velocity(rot_apply_transpose(&r, xi)));
                let sign = if m % 2 == 0 { 0.25 } else { -0.25 };
                for (a, wa) in acc.iter_mut().zip(w) {
                    *a += wa * sign;
                }
            }
            acc
        } else {
            self.seed_velocity(xi)
        };
        leray(xi, v, self.shell.d)
    }

    /// `U^(xi)` including the shell mask.
    pub fn eval(&self, xi: [f64; 3]) -> [Complex64; 3] {
        if self.shell.in_union(&xi[..self.shell.d]) {
            self.eval_unmasked(xi)
        } else {
            [Complex64::new(0.0, 0.0); 3]
        }
    }

    /// `(R o U)(xi) = R U(R^-1 xi)` at the lattice points of the support,
    /// evaluated from the closed form. The lattice sum of `|R o U|^2` then
    /// differs from `E^U` by a boundary term of relative size ~1e-3.
    pub fn rotate_hat_raw(&self, r: &Rot3) -> HatField {
        let mut f = HatField::zeros(self.lattice);
        for &idx in &self.support {
            let xi = self.lattice.xi(idx);
            f.set(idx, self.rotated_at(r, xi));
        }
        f
    }

    /// [`Self::rotate_hat_raw`] rescaled so that its energy is exactly `E^U`.
    pub fn rotate_hat(&self, r: &Rot3) -> HatField {
        let f = self.rotate_hat_raw(r);
        let e = f.norm_sq();
        f.scaled((self.e_u / e).sqrt())
    }

    /// `R U(R^-1 xi)` without the shell mask.
    pub fn rotated_at(&self, r: &Rot3, xi: [f64; 3]) -> [Complex64; 3] {
        rot_apply_c(r, self.eval_unmasked(rot_apply_transpose(r, xi)))
    }

    pub fn coefficients(&self) -> &HatField {
        &self.coeffs
    }

    pub fn shell(&self) -> ShellSpec {
        self.shell
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    /// Flat lattice indices inside the unit shell pair.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn seed(&self) -> SeedProfile {
        self.seed
    }

    /// Whether the seed needed the quarter-turn projection.
    pub fn was_antisymmetrized(&self) -> bool {
        self.antisymmetrize
    }

    /// `E^U = int chi |U^|^2`.
    pub fn energy(&self) -> f64 {
        self.e_u
    }

    /// `Pi^U = J(U^, U^, U^)`.
    pub fn flux(&self) -> f64 {
        self.pi_u
    }

    /// Imaginary part left over in `J(U^, U^, U^)`.
    pub fn flux_imag(&self) -> f64 {
        self.pi_u_imag
    }

    /// The quarter-turn sign change forces `J(U, U, U) = -J(U, U, U)`, so the
    /// flux vanishes up to rounding for every admissible snapshot.
    pub fn flux_degenerate(&self) -> bool {
        !(self.pi_u > 1e-9 * self.e_u.powf(1.5))
    }

    /// Error unless `Pi^U > 0`.
    pub fn require_positive_flux(self) -> Result<Self> {
        if self.flux_degenerate() {
            return Err(Error::DegenerateSnapshot(format!(
                "Pi^U = {:e} is not positive (E^U = {:e})",
                self.pi_u, self.e_u
            )));
        }
        Ok(self)
    }

    /// `E^U / (Pi^U)^(2/3)`, defined only for a positive flux.
    pub fn kolmogorov_ratio(&self) -> Option<f64> {
        (!self.flux_degenerate()).then(|| self.e_u / self.pi_u.powf(2.0 / 3.0))
    }

    /// `max |U + R_{pi/2} o U|` on the lattice.
    pub fn symmetry_residual(&self) -> f64 {
        let r = self.coeffs.quarter_turn(1);
        let l = self.lattice;
        (0..l.len())
            .map(|idx| {
                let a = self.coeffs.get(idx);
                let b = r.get(idx);
                (0..l.d).map(|c| (a[c] + b[c]).norm()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

fn leray(xi: [f64; 3], v: [Complex64; 3], d: usize) -> [Complex64; 3] {
    let k2: f64 = xi[..d].iter().map(|x| x * x).sum();
    if k2 == 0.0 {
        return [Complex64::new(0.0, 0.0); 3];
    }
    let dot: Complex64 = (0..d).map(|a| v[a] * xi[a]).sum();
    let mut out = v;
    for a in 0..d {
        out[a] -= dot * (xi[a] / k2);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn octahedral_group_has_24_proper_rotations() {
        let g = octahedral_group();
        assert_eq!(g.len(), 24);
        assert!(g.iter().all(|r| (det3(r) - 1.0).abs() < 1e-15));
    }

    #[test]
    fn radial_transform_at_zero_is_the_mass() {
        let p = BubbleProfile::default();
        let t = RadialTransform::new(p, 2.0);
        // 2 pi int h r dr by a plain midpoint sum
        let n = 200_000;
        let dr = 2.0 / n as f64;
        let mass: f64 = (0..n)
            .map(|i| {
                let r = (i as f64 + 0.5) * dr;
                p.h(r) * r
            })
            .sum::<f64>()
            * dr
            * 2.0
            * PI;
        assert!((t.eval(0.0) - mass).abs() < 1e-8 * mass, "{} {}", t.eval(0.0), mass);
        assert!((t.eval(0.013) - t.eval(-0.013)).abs() < 1e-12);
    }
}
