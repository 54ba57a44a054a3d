//! Random ensembles and the hierarchical fields they generate.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::shell::{HatField, ShellSpec};
use super::snapshot::{octahedral_group, quarter, rot_mul, rot_z, Rot3, SnapshotU, ROT_IDENTITY};
use super::wave::{shell_mass, ThreeWave};
use crate::error::{Error, Result};

/// Distribution of the outer rotations `Q_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationMode {
    Identity,
    /// Uniform over the rotations that map the lattice to itself.
    QuarterTurns,
    /// Uniform over all rotations (planar angle or random axis in 3D).
    Continuous,
}

/// Distribution `mu` of the planar angles `theta(j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleMode {
    Zero,
    /// Uniform on `[0, 2 pi)`.
    Uniform,
    /// Uniform on `{0, pi/2, pi, 3 pi/2}`; exact on the lattice.
    QuarterTurns,
}

/// Distribution of the shifts `y(j)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShiftMode {
    Zero,
    /// Uniform over the periodic cell: space-filling eddies.
    Uniform,
    /// Uniform in `[0, spread)^d`, so that `|y(j) - y(j')| <~ spread`.
    Clustered {
        spread: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleOptions {
    pub rotations: RotationMode,
    pub angles: AngleMode,
    pub shifts: ShiftMode,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        EnsembleOptions {
            rotations: RotationMode::QuarterTurns,
            angles: AngleMode::Uniform,
            shifts: ShiftMode::Uniform,
        }
    }
}

impl EnsembleOptions {
    /// Every draw is the identity with zero shift.
    pub fn frozen() -> Self {
        EnsembleOptions { rotations: RotationMode::Identity, angles: AngleMode::Zero, shifts: ShiftMode::Zero }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleTerm {
    pub q: Rot3,
    pub theta: f64,
    /// `y(j)` in the units of the scaling assumption, entering as `exp(i y . xi / k)`.
    pub shift: [f64; 3],
}

impl EnsembleTerm {
    pub fn identity() -> Self {
        EnsembleTerm { q: ROT_IDENTITY, theta: 0.0, shift: [0.0; 3] }
    }

    /// `Q_j R_theta(j)`.
    pub fn rotation(&self) -> Rot3 {
        rot_mul(&self.q, &rot_z(self.theta))
    }
}

/// One draw `Theta = ({Q_j}, {theta(j)}, {y(j)})` at hierarchy depth `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSample {
    pub n: u32,
    pub b: u32,
    pub d: usize,
    pub terms: Vec<EnsembleTerm>,
}

/// `b^(n d)` summands at depth `n`.
pub fn term_count(b: u32, n: u32, d: usize) -> usize {
    (b as usize).pow(n * d as u32)
}

impl EnsembleSample {
    pub fn identity(b: u32, n: u32, d: usize) -> Self {
        EnsembleSample { n, b, d, terms: vec![EnsembleTerm::identity(); term_count(b, n, d)] }
    }

    /// Draw a sample; `period` is the side of the periodic cell of the
    /// scaled field (`2 pi q` on a lattice of density `q`).
    pub fn draw<R: Rng>(rng: &mut R, b: u32, n: u32, d: usize, opts: &EnsembleOptions, period: f64) -> Self {
        let k = (b as f64).powi(n as i32);
        let group =
            if d == 3 && opts.rotations == RotationMode::QuarterTurns { octahedral_group() } else { Vec::new() };
        let terms = (0..term_count(b, n, d))
            .map(|_| {
                let q = match opts.rotations {
                    RotationMode::Identity => ROT_IDENTITY,
                    RotationMode::QuarterTurns if d == 2 => quarter(rng.gen_range(0..4)),
                    RotationMode::QuarterTurns => group[rng.gen_range(0..group.len())],
                    RotationMode::Continuous if d == 2 => rot_z(rng.gen_range(0.0..2.0 * PI)),
                    RotationMode::Continuous => random_rotation(rng),
                };
                let theta = match opts.angles {
                    AngleMode::Zero => 0.0,
                    AngleMode::Uniform => rng.gen_range(0.0..2.0 * PI),
                    AngleMode::QuarterTurns => FRAC_PI_2 * rng.gen_range(0..4) as f64,
                };
                let mut shift = [0.0; 3];
                for s in shift.iter_mut().take(d) {
                    *s = match opts.shifts {
                        ShiftMode::Zero => 0.0,
                        ShiftMode::Uniform => k * rng.gen_range(0.0..period),
                        ShiftMode::Clustered { spread } => rng.gen_range(0.0..spread.max(f64::MIN_POSITIVE)),
                    };
                }
                EnsembleTerm { q, theta, shift }
            })
            .collect();
        EnsembleSample { n, b, d, terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Uniform rotation from a normalized Gaussian quaternion.
fn random_rotation<R: Rng>(rng: &mut R) -> Rot3 {
    let mut q = [0.0f64; 4];
    loop {
        for v in q.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        let n2: f64 = q.iter().map(|v| v * v).sum();
        if n2 > 1e-6 && n2 <= 1.0 {
            let n = n2.sqrt();
            for v in q.iter_mut() {
                *v /= n;
            }
            break;
        }
    }
    let [w, x, y, z] = q;
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

/// The spectrum-scaling exponent fixed by scale-independent flux.
pub fn default_alpha(d: usize) -> f64 {
    -(1.0 + 3.0 * d as f64) / 3.0
}

/// Synthesized field at shell `k`, stored through `coeffs(xi) = u^(k xi)` on
/// the snapshot lattice.
#[derive(Clone, Debug)]
pub struct SynthField {
    pub k: f64,
    pub alpha: f64,
    pub coeffs: HatField,
    /// `sum_j L(T_j, T_j)` over the unscaled summands.
    pub diagonal_mass: f64,
}

/// One summand `Q_j R_theta(j) U^(xi) exp(i y(j) . xi / k)` on the lattice.
pub fn ensemble_term(snap: &SnapshotU, term: &EnsembleTerm, k: f64) -> HatField {
    let mut f = HatField::zeros(snap.lattice());
    add_term(snap, term, k, &mut f);
    f
}

fn add_term(snap: &SnapshotU, term: &EnsembleTerm, k: f64, out: &mut HatField) -> f64 {
    let l = snap.lattice();
    let r = term.rotation();
    let y = [term.shift[0] / k, term.shift[1] / k, term.shift[2] / k];
    let mut mass = 0.0;
    let values: Vec<[Complex64; 3]> = snap
        .support()
        .iter()
        .map(|&idx| {
            let xi = l.xi(idx);
            let v = snap.rotated_at(&r, xi);
            mass += v.iter().map(|z| z.norm_sqr()).sum::<f64>();
            v
        })
        .collect();
    mass *= l.cell();
    // same energy correction as `rotate_hat`
    let s = (snap.energy() / mass).sqrt();
    for (&idx, v) in snap.support().iter().zip(values) {
        let xi = l.xi(idx);
        let phase = Complex64::from_polar(s, y[0] * xi[0] + y[1] * xi[1] + y[2] * xi[2]);
        out.add_at(idx, [v[0] * phase, v[1] * phase, v[2] * phase]);
    }
    snap.energy()
}

fn check_level(snap: &SnapshotU, sample: &EnsembleSample, k: u64) -> Result<()> {
    let sh = snap.shell();
    if sample.b != sh.b || sample.d != sh.d {
        return Err(Error::ShellMismatch(format!(
            "sample (b = {}, d = {}) does not match snapshot (b = {}, d = {})",
            sample.b, sample.d, sh.b, sh.d
        )));
    }
    let want = (sh.b as u64).checked_pow(sample.n);
    if want != Some(k) {
        return Err(Error::ShellMismatch(format!("k = {k} is not b^n = {}^{}", sh.b, sample.n)));
    }
    if sample.terms.len() != term_count(sh.b, sample.n, sh.d) {
        return Err(Error::ShellMismatch(format!(
            "{} terms at depth {}, expected b^(n d) = {}",
            sample.terms.len(),
            sample.n,
            term_count(sh.b, sample.n, sh.d)
        )));
    }
    Ok(())
}

/// `u^(k xi) = sum_j k^alpha Q_j o R_theta(j) o U^(xi) e^{i y(j) . xi / k}`.
pub fn synthesize(snap: &SnapshotU, sample: &EnsembleSample, k: u64, alpha: Option<f64>) -> Result<SynthField> {
    check_level(snap, sample, k)?;
    let alpha = alpha.unwrap_or_else(|| default_alpha(sample.d));
    let kf = k as f64;
    let mut f = HatField::zeros(snap.lattice());
    let mut diagonal = 0.0;
    for term in &sample.terms {
        diagonal += add_term(snap, term, kf, &mut f);
    }
    Ok(SynthField { k: kf, alpha, coeffs: f.scaled(kf.powf(alpha)), diagonal_mass: diagonal })
}

impl SynthField {
    fn check_shell(&self, shell: &ShellSpec) -> Result<()> {
        if shell.k as f64 != self.k {
            return Err(Error::ShellMismatch(format!("field at k = {}, shell at k = {}", self.k, shell.k)));
        }
        Ok(())
    }

    fn unit(shell: &ShellSpec) -> ShellSpec {
        ShellSpec { k: 1, ..*shell }
    }
}

/// `E(k) = k^-1 int chi_{A^S_k u A^L_k} |u^|^2 = k^(d-1) int chi_1 |u^(k xi)|^2`.
pub fn shell_energy(field: &SynthField, shell: &ShellSpec) -> Result<f64> {
    field.check_shell(shell)?;
    let d = field.coeffs.lattice().d as i32;
    Ok(field.k.powi(d - 1) * shell_mass(&field.coeffs, &SynthField::unit(shell)))
}

/// `Pi_k = k^(2d+1) J_1(u^(k .), u^(k .), u^(k .))`.
pub fn shell_flux(field: &SynthField, shell: &ShellSpec) -> Result<f64> {
    field.check_shell(shell)?;
    let tw = ThreeWave::new(field.coeffs.lattice(), SynthField::unit(shell));
    Ok(flux_with(&tw, field))
}

pub(crate) fn flux_with(tw: &ThreeWave, field: &SynthField) -> f64 {
    let d = field.coeffs.lattice().d as i32;
    field.k.powi(2 * d + 1) * tw.eval(&field.coeffs, &field.coeffs, &field.coeffs)
}

/// Resonant part of the flux: `k^(2d+1+3 alpha) sum_j J(T_j, T_j, T_j)`.
pub fn resonant_flux(snap: &SnapshotU, sample: &EnsembleSample, k: u64, alpha: Option<f64>) -> Result<f64> {
    check_level(snap, sample, k)?;
    let alpha = alpha.unwrap_or_else(|| default_alpha(sample.d));
    let tw = ThreeWave::new(snap.lattice(), snap.shell());
    let kf = k as f64;
    let d = sample.d as f64;
    let total: f64 = sample
        .terms
        .iter()
        .map(|t| {
            let f = ensemble_term(snap, t, kf);
            tw.eval(&f, &f, &f)
        })
        .sum();
    Ok(kf.powf(2.0 * d + 1.0 + 3.0 * alpha) * total)
}
