//! The key integral `I(t, r)` and the polar form of the velocity near the origin.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolve::origin_gradient;
use crate::fields::{biot_savart_coefficients, PointBasis, ScalarField2D, Stencil};

/// `I(r) = (4/pi) int_0^{pi/2} int_{2r}^1 sin(2 th) / s * omega(s, th) ds dth`.
///
/// Midpoint rule on `4N` angles and `2N` radii, with `omega` read off the
/// grid by the local stencil. Returns 0 once `2r >= 1`.
pub fn key_integral(omega: &ScalarField2D, r: f64) -> f64 {
    let g = omega.grid();
    let n = g.n();
    key_integral_with(omega, r, 4 * n, 2 * n)
}

/// As [`key_integral`] with explicit node counts.
pub fn key_integral_with(omega: &ScalarField2D, r: f64, angles: usize, radii: usize) -> f64 {
    let lo = 2.0 * r.max(0.0);
    if lo >= 1.0 {
        return 0.0;
    }
    let g = omega.grid();
    let v = omega.values();
    let dth = FRAC_PI_2 / angles as f64;
    let ds = (1.0 - lo) / radii as f64;
    let total: f64 = (0..angles)
        .into_par_iter()
        .map(|a| {
            let th = (a as f64 + 0.5) * dth;
            let (sn, cs) = th.sin_cos();
            let mut acc = 0.0;
            for b in 0..radii {
                let s = lo + (b as f64 + 0.5) * ds;
                acc += Stencil::new(g, [s * cs, s * sn]).apply(v) / s;
            }
            (2.0 * th).sin() * acc
        })
        .sum();
    4.0 / PI * total * dth * ds
}

/// Key integral at radius `r` together with the size of the remainder
/// `B = u / r - (cos th, -sin th) I / 2` over sampled angles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyIntegralSample {
    pub t: f64,
    pub r: f64,
    pub i: f64,
    pub b_sup: f64,
}

pub fn key_integral_sample(omega: &ScalarField2D, t: f64, r: f64, angles: usize) -> Result<KeyIntegralSample> {
    let g = omega.grid();
    let min = 4.0 * g.spacing();
    if r <= min {
        return Err(Error::TooCloseToOrigin { radius: r, min });
    }
    let i = key_integral(omega, r);
    let (u1, u2) = biot_savart_coefficients(g, omega.coefficients());
    let mut b_sup: f64 = 0.0;
    for a in 0..angles {
        let th = (a as f64 + 0.5) * FRAC_PI_2 / angles as f64;
        let (sn, cs) = th.sin_cos();
        let basis = PointBasis::new(g, [r * cs, r * sn]);
        let b1 = basis.eval(&u1) / r - cs * 0.5 * i;
        let b2 = basis.eval(&u2) / r + sn * 0.5 * i;
        b_sup = b_sup.max(b1.hypot(b2));
    }
    Ok(KeyIntegralSample { t, r, i, b_sup })
}

/// `(d1 u1, d2 u1, d1 u2)` at the origin by spectral differentiation.
pub fn strain_at_origin(omega: &ScalarField2D) -> [f64; 3] {
    let g = omega.grid();
    let (a, b) = biot_savart_coefficients(g, omega.coefficients());
    origin_gradient(g, &a, &b)
}

/// Polar rates of a trajectory, computed directly and from the
/// main term of the key-integral split.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarRates {
    pub radius: f64,
    pub theta: f64,
    /// `u . e_r`
    pub radial: f64,
    /// `u . e_theta / |eta|`
    pub angular: f64,
    /// `|eta| cos(2 th) I / 2`
    pub radial_main: f64,
    /// `-sin(2 th) I / 2`
    pub angular_main: f64,
    /// `max(|radial - radial_main| / |eta|, |angular - angular_main|)`, a lower
    /// bound for `|B|` at the point.
    pub discrepancy: f64,
}

impl PolarRates {
    pub fn from_velocity(eta: [f64; 2], u: [f64; 2], key: f64) -> Self {
        let radius = eta[0].hypot(eta[1]);
        let theta = eta[1].atan2(eta[0]);
        let (sn, cs) = theta.sin_cos();
        let radial = u[0] * cs + u[1] * sn;
        let angular = (-u[0] * sn + u[1] * cs) / radius;
        let radial_main = radius * (2.0 * theta).cos() * 0.5 * key;
        let angular_main = -(2.0 * theta).sin() * 0.5 * key;
        let discrepancy = ((radial - radial_main) / radius).abs().max((angular - angular_main).abs());
        PolarRates { radius, theta, radial, angular, radial_main, angular_main, discrepancy }
    }
}

/// Polar rates at `eta` in the flow of `omega`.
pub fn polar_rates(eta: [f64; 2], omega: &ScalarField2D) -> Result<PolarRates> {
    let g = omega.grid();
    let radius = eta[0].hypot(eta[1]);
    let min = 4.0 * g.spacing();
    if radius <= min {
        return Err(Error::TooCloseToOrigin { radius, min });
    }
    let (u1, u2) = biot_savart_coefficients(g, omega.coefficients());
    let basis = PointBasis::new(g, eta);
    let u = [basis.eval(&u1), basis.eval(&u2)];
    Ok(PolarRates::from_velocity(eta, u, key_integral(omega, radius)))
}
