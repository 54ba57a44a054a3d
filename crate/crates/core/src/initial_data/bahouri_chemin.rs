//! Mollified Bahouri-Chemin data `phi_{2^{-n-1}} * (sgn x1 sgn x2 1_{2^{-n} < |x1|,|x2| < 1 - 2^{-n}})`.

use ndarray::Array2;
use num_complex::Complex64;

use super::profiles::mollifier_shape;
use crate::error::{Error, Result};
use crate::fields::{fft, Grid2D, ScalarField2D};

/// Cut-off sign pattern before mollification. Nodes lying exactly on a cut
/// edge take half weight.
pub fn cut_sign_pattern(grid: Grid2D, n: u32) -> ScalarField2D {
    let lo = 0.5f64.powi(n as i32);
    let hi = 1.0 - lo;
    let tol = 1e-12;
    let weight = |x: f64| {
        let a = x.abs();
        if a > lo + tol && a < hi - tol {
            1.0
        } else if (a - lo).abs() <= tol || (a - hi).abs() <= tol {
            0.5
        } else {
            0.0
        }
    };
    ScalarField2D::from_fn(grid, |x1, x2| {
        x1.signum() * x2.signum() * weight(x1) * weight(x2) * nonzero(x1) * nonzero(x2)
    })
}

fn nonzero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        1.0
    }
}

/// Periodic discrete convolution with a radial mollifier of radius `radius`,
/// normalized to unit discrete mass.
pub fn mollify(field: &ScalarField2D, radius: f64) -> ScalarField2D {
    let grid = field.grid();
    let n = grid.n();
    let h = grid.spacing();
    let mut kernel = Array2::from_shape_fn((n, n), |(i, j)| {
        let d1 = grid.mode(i) as f64 * h;
        let d2 = grid.mode(j) as f64 * h;
        Complex64::new(mollifier_shape((d1 * d1 + d2 * d2).sqrt() / radius), 0.0)
    });
    let mass: f64 = kernel.iter().map(|z| z.re).sum();
    let plan = fft::plan(n);
    plan.forward(&mut kernel);
    let mut data = field.values().mapv(|v| Complex64::new(v, 0.0));
    plan.forward(&mut data);
    let scale = 1.0 / (mass * (n * n) as f64);
    ndarray::Zip::from(&mut data).and(&kernel).for_each(|a, &b| *a = *a * b * scale);
    plan.inverse(&mut data);
    ScalarField2D::from_values(grid, data.mapv(|z| z.re))
}

/// Smoothed Bahouri-Chemin vorticity at level `n`.
pub fn smoothed_bahouri_chemin(grid: Grid2D, n: u32) -> Result<ScalarField2D> {
    if n < 2 {
        return Err(Error::Config(format!("Bahouri-Chemin level must be at least 2, got {n}")));
    }
    let radius = 0.5f64.powi(n as i32 + 1);
    if radius < 4.0 * grid.spacing() - 1e-15 {
        return Err(Error::UnderResolved(format!(
            "mollifier radius {radius} is below four cells at N = {} (need N >= 2^{})",
            grid.n(),
            n + 4
        )));
    }
    Ok(mollify(&cut_sign_pattern(grid, n), radius))
}
