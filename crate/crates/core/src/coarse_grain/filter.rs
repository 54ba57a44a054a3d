//! Gaussian coarse-graining.

use std::f64::consts::PI;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Grid2D, ScalarField2D, VectorField2D};

/// Gaussian filter `G_K(r) = K^2 / pi * exp(-|K r|^2)` in two dimensions.
///
/// On the torus it acts on the mode of wavevector `xi` by
/// `exp(-|xi|^2 / (4 K^2))`, so discrete mass is exactly one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub k: f64,
}

impl FilterSpec {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Config(format!("filter wavenumber must be positive, got {k}")));
        }
        Ok(FilterSpec { k })
    }

    /// Kernel value at separation `|r|`.
    pub fn kernel(&self, r: f64) -> f64 {
        self.k * self.k / PI * (-(self.k * r).powi(2)).exp()
    }

    /// Transfer function at wavevector magnitude `|xi|`.
    pub fn transfer(&self, xi: f64) -> f64 {
        (-(xi * xi) / (4.0 * self.k * self.k)).exp()
    }

    /// `int r_1^2 G_K(r) dr`, the per-axis second moment.
    pub fn second_moment(&self) -> f64 {
        0.5 / (self.k * self.k)
    }

    fn multiplier(&self, grid: Grid2D) -> Array2<f64> {
        let n = grid.n();
        Array2::from_shape_fn((n, n), |(i, j)| {
            self.transfer((grid.wavenumber(i).powi(2) + grid.wavenumber(j).powi(2)).sqrt())
        })
    }

    /// Grid values of the periodic discrete kernel (weights summing to one).
    pub fn discrete_kernel(&self, grid: Grid2D) -> ScalarField2D {
        let m = self.multiplier(grid).mapv(|v| num_complex::Complex64::new(v, 0.0));
        let n = grid.n();
        // Weights centred on the origin node: the basis carries a (-1)^(m1+m2)
        // phase at x = 0.
        let c = Array2::from_shape_fn((n, n), |(i, j)| {
            let s = if (grid.mode(i) + grid.mode(j)) % 2 == 0 { 1.0 } else { -1.0 };
            m[[i, j]] * (s / (n * n) as f64)
        });
        ScalarField2D::from_coefficients(grid, c)
    }

    pub fn apply(&self, f: &ScalarField2D) -> ScalarField2D {
        let m = self.multiplier(f.grid());
        ScalarField2D::from_coefficients(f.grid(), f.coefficients() * &m)
    }

    pub fn apply_vector(&self, u: &VectorField2D) -> VectorField2D {
        let m = self.multiplier(u.grid());
        let one = |f: &ScalarField2D| ScalarField2D::from_coefficients(f.grid(), f.coefficients() * &m);
        VectorField2D::new(one(&u.u1), one(&u.u2))
    }
}

/// `u_bar_K = G_K * u`.
pub fn filter(u: &VectorField2D, spec: FilterSpec) -> VectorField2D {
    spec.apply_vector(u)
}

/// Sharp spectral projection onto `lo < |xi| <= hi`.
pub fn shell_projection(f: &ScalarField2D, lo: f64, hi: f64) -> ScalarField2D {
    let g = f.grid();
    let c = f.coefficients();
    let out = Array2::from_shape_fn(c.dim(), |(i, j)| {
        let xi = (g.wavenumber(i).powi(2) + g.wavenumber(j).powi(2)).sqrt();
        if xi > lo && xi <= hi {
            c[[i, j]]
        } else {
            num_complex::Complex64::new(0.0, 0.0)
        }
    });
    ScalarField2D::from_coefficients(g, out)
}

pub fn shell_projection_vector(u: &VectorField2D, lo: f64, hi: f64) -> VectorField2D {
    VectorField2D::new(shell_projection(&u.u1, lo, hi), shell_projection(&u.u2, lo, hi))
}
