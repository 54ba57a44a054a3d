//! Biot-Savart inversion and the L2 diagnostics shared by every module.

use ndarray::Array2;
use num_complex::Complex64;

use super::scalar::ScalarField2D;
use super::vector::VectorField2D;
use crate::error::{Error, Result};

/// Relative tolerance on the mean of a vorticity before inversion.
pub const MEAN_TOLERANCE: f64 = 1e-12;

/// Spectral Biot-Savart coefficients `(u1_hat, u2_hat)` of a vorticity
/// spectrum; `u = grad_perp (Laplacian)^{-1} omega` with the zero mode dropped.
pub fn biot_savart_coefficients(
    grid: crate::fields::Grid2D,
    omega_hat: &Array2<Complex64>,
) -> (Array2<Complex64>, Array2<Complex64>) {
    let k = grid.derivative_wavenumbers();
    let n = grid.n();
    let mut u1 = Array2::zeros((n, n));
    let mut u2 = Array2::zeros((n, n));
    for i in 0..n {
        let kx = grid.wavenumber(i);
        for j in 0..n {
            let ky = grid.wavenumber(j);
            let k2 = kx * kx + ky * ky;
            if k2 == 0.0 {
                continue;
            }
            let w = omega_hat[[i, j]] / k2;
            u1[[i, j]] = w * Complex64::new(0.0, k[j]);
            u2[[i, j]] = w * Complex64::new(0.0, -k[i]);
        }
    }
    (u1, u2)
}

/// Velocity of a mean-zero planar vorticity.
pub fn biot_savart_2d(omega: &ScalarField2D) -> Result<VectorField2D> {
    let sup = omega.max_abs();
    let mean = omega.mean();
    if mean.abs() > MEAN_TOLERANCE * sup {
        return Err(Error::NonZeroMean { mean, sup });
    }
    let grid = omega.grid();
    let (u1, u2) = biot_savart_coefficients(grid, omega.coefficients());
    Ok(VectorField2D::new(ScalarField2D::from_coefficients(grid, u1), ScalarField2D::from_coefficients(grid, u2)))
}

/// Stream function `psi` with `Laplacian psi = omega` and zero mean.
pub fn stream_function(omega: &ScalarField2D) -> ScalarField2D {
    let grid = omega.grid();
    let c = omega.coefficients();
    let out = Array2::from_shape_fn(c.dim(), |(i, j)| {
        let kx = grid.wavenumber(i);
        let ky = grid.wavenumber(j);
        let k2 = kx * kx + ky * ky;
        if k2 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            -c[[i, j]] / k2
        }
    });
    ScalarField2D::from_coefficients(grid, out)
}

/// Horizontal vorticity `curl (0, 0, rho) = (d2 rho, -d1 rho)` of a vertical
/// velocity that depends only on the horizontal variables.
pub fn curl_2p5d(u_s: &ScalarField2D) -> VectorField2D {
    let (d1, d2) = u_s.gradient();
    VectorField2D::new(d2, d1.scaled(-1.0))
}

/// Kinetic energy `1/2 int |u|^2`.
pub fn energy(u: &VectorField2D) -> f64 {
    0.5 * u.l2_norm_sq()
}

/// Squared L2 norm `int omega^2` of a scalar vorticity.
pub fn enstrophy(omega: &ScalarField2D) -> f64 {
    omega.l2_norm_sq()
}

/// Squared L2 norm of a planar vorticity vector.
pub fn vector_enstrophy(omega: &VectorField2D) -> f64 {
    omega.l2_norm_sq()
}
