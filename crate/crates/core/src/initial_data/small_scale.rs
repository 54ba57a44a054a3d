//! Small-scale vertical-velocity profiles `rho_n`.

use serde::{Deserialize, Serialize};

use super::profiles::{mollifier_shape, smoothstep7, smoothstep7_int};
use crate::error::{Error, Result};
use crate::fields::{wrap, Grid2D, ScalarField2D};

/// Shape of a custom profile before normalization, in coordinates scaled by
/// the support radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileShape {
    /// `y2 * bump(|y|)`: a vertical velocity whose curl points along x1.
    Dipole,
    /// Radial bump.
    Bump,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum SmallScaleMode {
    /// `rho_n = 2^{n/2} x2` on `B(0, 2^{-n/2})`, zero outside `B(0, 2^{2-n/2})`.
    LinearThm2,
    /// Profile supported in `B(center, radius)` rescaled to unit gradient L2 norm.
    Custom { center: [f64; 2], radius: f64, shape: ProfileShape },
}

/// Radial factor `chi(r)` of the linear profile, written through
/// `f(r) = r chi(r)` whose slope descends from 1 to -3/4, holds, and returns
/// to 0 over three transition widths. This keeps `|grad rho| <= 2^{n/2}`.
pub fn linear_cutoff(r: f64, r_in: f64) -> f64 {
    if r <= r_in {
        return 1.0;
    }
    if r >= 4.0 * r_in {
        return 0.0;
    }
    let s = (r - r_in) / r_in;
    let big_f = if s <= 1.0 {
        s - 1.75 * smoothstep7_int(s)
    } else if s <= 2.0 {
        0.125 - 0.75 * (s - 1.0)
    } else {
        let t = s - 2.0;
        -0.625 - 0.75 * (t - smoothstep7_int(t))
    };
    r_in * (1.0 + big_f) / r
}

/// Slope `f'(r)` of `r chi(r)`; bounded by 1 in modulus.
pub fn linear_cutoff_slope(r: f64, r_in: f64) -> f64 {
    if r <= r_in {
        return 1.0;
    }
    if r >= 4.0 * r_in {
        return 0.0;
    }
    let s = (r - r_in) / r_in;
    if s <= 1.0 {
        1.0 - 1.75 * smoothstep7(s)
    } else if s <= 2.0 {
        -0.75
    } else {
        -0.75 * (1.0 - smoothstep7(s - 2.0))
    }
}

fn shape_value(shape: ProfileShape, y1: f64, y2: f64) -> f64 {
    let r = (y1 * y1 + y2 * y2).sqrt();
    match shape {
        ProfileShape::Dipole => y2 * mollifier_shape(r),
        ProfileShape::Bump => mollifier_shape(r),
    }
}

pub fn small_scale_profile(grid: Grid2D, n: u32, mode: SmallScaleMode) -> Result<ScalarField2D> {
    let h = grid.spacing();
    match mode {
        SmallScaleMode::LinearThm2 => {
            let r_in = 0.5f64.powf(n as f64 / 2.0);
            if 4.0 * r_in > 1.0 + 1e-12 {
                return Err(Error::Config(format!(
                    "level {n}: support radius {} exceeds the fundamental cell",
                    4.0 * r_in
                )));
            }
            if 3.0 * r_in < 8.0 * h {
                return Err(Error::UnderResolved(format!(
                    "transition layer of rho_{n} spans fewer than 8 cells at N = {}",
                    grid.n()
                )));
            }
            let amp = 2f64.powf(n as f64 / 2.0);
            Ok(ScalarField2D::from_fn(grid, |x1, x2| amp * x2 * linear_cutoff((x1 * x1 + x2 * x2).sqrt(), r_in)))
        }
        SmallScaleMode::Custom { center, radius, shape } => {
            if radius < 8.0 * h {
                return Err(Error::UnderResolved(format!(
                    "support radius {radius} spans fewer than 8 cells at N = {}",
                    grid.n()
                )));
            }
            if radius >= 1.0 {
                return Err(Error::Config(format!("support radius {radius} must be below 1")));
            }
            let raw = ScalarField2D::from_fn(grid, |x1, x2| {
                shape_value(shape, wrap(x1 - center[0]) / radius, wrap(x2 - center[1]) / radius)
            })
            .dealiased();
            let (d1, d2) = raw.gradient();
            let g = (d1.l2_norm_sq() + d2.l2_norm_sq()).sqrt();
            if g == 0.0 {
                return Err(Error::ZeroSmallScale);
            }
            let out = raw.scaled(1.0 / g);
            if out.l2_norm() > 1.0 {
                return Err(Error::Config(format!(
                    "normalized profile has L2 norm {} > 1; shrink the support radius",
                    out.l2_norm()
                )));
            }
            Ok(out)
        }
    }
}
