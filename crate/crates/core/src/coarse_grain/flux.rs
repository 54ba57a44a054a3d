//! Subfilter stress, resolved strain and the energy flux between them.

use serde::Serialize;

use super::filter::{filter, shell_projection_vector, FilterSpec};
use super::tensor::TensorField2D;
use crate::error::{Error, Result};
use crate::evolve::{SimState, StepSize, Stepper};
use crate::fields::{biot_savart_2d, ScalarField2D, VectorField2D};

/// `tau_K = bar(u (x) u) - bar(u) (x) bar(u)`.
///
/// Products are formed on the grid, so `tau_K` is the exact discrete
/// convolution of the periodic kernel against the sampled field.
pub fn stress_tensor(u: &VectorField2D, spec: FilterSpec) -> TensorField2D {
    let ub = filter(u, spec);
    let f = |a: &ScalarField2D, b: &ScalarField2D| spec.apply(&a.mul(b));
    let t11 = f(&u.u1, &u.u1).sub(&ub.u1.mul(&ub.u1));
    let t12 = f(&u.u1, &u.u2).sub(&ub.u1.mul(&ub.u2));
    let t22 = f(&u.u2, &u.u2).sub(&ub.u2.mul(&ub.u2));
    TensorField2D::symmetric(t11, t12, t22)
}

/// `S = (grad u + grad u^T) / 2`.
pub fn deformation_tensor(u: &VectorField2D) -> TensorField2D {
    let (a11, a12) = u.u1.gradient();
    let (a21, a22) = u.u2.gradient();
    TensorField2D::symmetric(a11, a12.add(&a21).scaled(0.5), a22)
}

#[derive(Clone, Debug)]
pub struct EnergyFlux {
    pub k: f64,
    /// Pointwise `Pi_K = -S_bar_K : tau_K`; positive means transfer to small scales.
    pub pi: ScalarField2D,
    pub integral: f64,
}

impl EnergyFlux {
    pub fn min(&self) -> f64 {
        self.pi.values().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.pi.values().iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Fraction of nodes with `Pi_K > 0`.
    pub fn positive_fraction(&self) -> f64 {
        let v = self.pi.values();
        v.iter().filter(|&&x| x > 0.0).count() as f64 / v.len() as f64
    }
}

fn integral(f: &ScalarField2D) -> f64 {
    f.mean() * f.grid().area()
}

pub fn energy_flux(u: &VectorField2D, spec: FilterSpec) -> EnergyFlux {
    let s = deformation_tensor(&filter(u, spec));
    let tau = stress_tensor(u, spec);
    let pi = s.contract(&tau).scaled(-1.0);
    let integral = integral(&pi);
    EnergyFlux { k: spec.k, pi, integral }
}

/// `tau^(k,1)_ij = C_K sum_h d_h u_i d_h u_j` with `C_K` the kernel's
/// per-axis second moment.
pub fn first_order_stress(u_band: &VectorField2D, spec: FilterSpec) -> TensorField2D {
    let c = spec.second_moment();
    let (a11, a12) = u_band.u1.gradient();
    let (a21, a22) = u_band.u2.gradient();
    let t11 = a11.mul(&a11).add(&a12.mul(&a12)).scaled(c);
    let t12 = a11.mul(&a21).add(&a12.mul(&a22)).scaled(c);
    let t22 = a21.mul(&a21).add(&a22.mul(&a22)).scaled(c);
    TensorField2D::symmetric(t11, t12, t22)
}

/// Dyadic decomposition with `K_n = 2^n`.
#[derive(Clone, Debug)]
pub struct Bands {
    pub k: Vec<f64>,
    pub bands: Vec<VectorField2D>,
    /// `u - sum of bands`.
    pub residual: VectorField2D,
    pub residual_norm: f64,
}

fn check_depth(u: &VectorField2D, n_max: usize) -> Result<()> {
    let limit = (u.grid().n() as f64 / 3.0).log2();
    if n_max == 0 || n_max as f64 > limit {
        return Err(Error::Config(format!(
            "band depth {n_max} must lie in 1..={} for N = {}",
            limit.floor(),
            u.grid().n()
        )));
    }
    Ok(())
}

/// `u^[1] = u_bar_{K_1}`, `u^[n] = u_bar_{K_n} - u_bar_{K_{n-1}}`.
pub fn band_decompose(u: &VectorField2D, n_max: usize) -> Result<Bands> {
    check_depth(u, n_max)?;
    let mut k = Vec::with_capacity(n_max);
    let mut bands = Vec::with_capacity(n_max);
    let mut prev: Option<VectorField2D> = None;
    for n in 1..=n_max {
        let kn = (1u64 << n) as f64;
        let cur = filter(u, FilterSpec::new(kn)?);
        bands.push(match &prev {
            Some(p) => cur.sub(p),
            None => cur.clone(),
        });
        k.push(kn);
        prev = Some(cur);
    }
    let residual = u.sub(prev.as_ref().expect("n_max >= 1"));
    let residual_norm = residual.l2_norm_sq().sqrt();
    Ok(Bands { k, bands, residual, residual_norm })
}

/// Littlewood-Paley variant: sharp shells `K_{n-1} < |xi| <= K_n` with `K_0 = 0`
/// (the mean joins the first shell).
pub fn sharp_band_decompose(u: &VectorField2D, n_max: usize) -> Result<Bands> {
    check_depth(u, n_max)?;
    let mut k = Vec::with_capacity(n_max);
    let mut bands = Vec::with_capacity(n_max);
    let mut lo = -1.0;
    let mut sum = VectorField2D::zeros(u.grid());
    for n in 1..=n_max {
        let kn = (1u64 << n) as f64;
        let b = shell_projection_vector(u, lo, kn);
        sum = sum.add(&b);
        bands.push(b);
        k.push(kn);
        lo = kn;
    }
    let residual = u.sub(&sum);
    let residual_norm = residual.l2_norm_sq().sqrt();
    Ok(Bands { k, bands, residual, residual_norm })
}

/// Share of `int Pi_K` carried by the subfilter stress of the scales with
/// `lo K <= |xi| <= hi K`.
pub fn scale_locality(u: &VectorField2D, spec: FilterSpec, lo: f64, hi: f64) -> (f64, f64) {
    let total = energy_flux(u, spec).integral;
    let mid = shell_projection_vector(u, lo * spec.k - 1e-12, hi * spec.k);
    let s = deformation_tensor(&filter(u, spec));
    let part = integral(&s.contract(&stress_tensor(&mid, spec)).scaled(-1.0));
    let frac = if total != 0.0 { part / total } else { 0.0 };
    (part, frac)
}

/// One row of the filtered energy budget
/// `d/dt 1/2 |u_bar|^2 = -int Pi_K - nu |grad u_bar|^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BudgetRow {
    pub k: f64,
    pub t: f64,
    pub d_dt_energy: f64,
    pub flux: f64,
    pub dissipation: f64,
    pub residual: f64,
    /// Enstrophy `int omega^2`, the scale residuals are compared with.
    pub scale: f64,
}

fn filtered_energy(u: &VectorField2D, spec: FilterSpec) -> f64 {
    0.5 * filter(u, spec).l2_norm_sq()
}

/// Close the budget at `t + dt` by a central difference over two fixed steps.
pub fn flux_budget(state: &SimState, ks: &[f64], dt: f64) -> Result<Vec<BudgetRow>> {
    let mut stepper = Stepper::new(state.grid(), state.nu);
    let s1 = stepper.step(state, StepSize::Fixed(dt))?;
    let s2 = stepper.step(&s1, StepSize::Fixed(dt))?;
    let u0 = biot_savart_2d(&state.omega_l)?;
    let u1 = biot_savart_2d(&s1.omega_l)?;
    let u2 = biot_savart_2d(&s2.omega_l)?;
    let scale = s1.omega_l.l2_norm_sq();
    ks.iter()
        .map(|&k| {
            let spec = FilterSpec::new(k)?;
            let d_dt_energy = (filtered_energy(&u2, spec) - filtered_energy(&u0, spec)) / (2.0 * dt);
            let flux = energy_flux(&u1, spec).integral;
            let ub = filter(&u1, spec);
            let (a, b) = ub.u1.gradient();
            let (c, d) = ub.u2.gradient();
            let dissipation = state.nu * (a.l2_norm_sq() + b.l2_norm_sq() + c.l2_norm_sq() + d.l2_norm_sq());
            let residual = d_dt_energy + flux + dissipation;
            Ok(BudgetRow { k, t: s1.t, d_dt_energy, flux, dissipation, residual, scale })
        })
        .collect()
}
