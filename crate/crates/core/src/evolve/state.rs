use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{
    biot_savart_coefficients, curl_2p5d, energy, Grid2D, ScalarField2D, VectorField2D, MEAN_TOLERANCE,
};

/// Large-scale vorticity, small-scale vertical velocity and any number of
/// extra passive tracers advected by the same planar flow.
#[derive(Clone, Debug)]
pub struct SimState {
    pub t: f64,
    pub omega_l: ScalarField2D,
    pub u_s: ScalarField2D,
    pub tracers: Vec<ScalarField2D>,
    pub nu: f64,
}

impl SimState {
    /// Initial data are projected onto the dealiased band so that the
    /// truncated system conserves its quadratic invariants exactly.
    pub fn new(omega_l: &ScalarField2D, u_s: &ScalarField2D, nu: f64) -> Result<Self> {
        if omega_l.grid() != u_s.grid() {
            return Err(Error::InvalidGrid("vorticity and small-scale field live on different grids".into()));
        }
        if !(nu >= 0.0) || !nu.is_finite() {
            return Err(Error::Config(format!("viscosity must be a non-negative number, got {nu}")));
        }
        let sup = omega_l.max_abs();
        let mean = omega_l.mean();
        if mean.abs() > MEAN_TOLERANCE * sup {
            return Err(Error::NonZeroMean { mean, sup });
        }
        Ok(SimState { t: 0.0, omega_l: omega_l.dealiased(), u_s: u_s.dealiased(), tracers: Vec::new(), nu })
    }

    pub fn with_tracers(mut self, tracers: &[ScalarField2D]) -> Result<Self> {
        for tr in tracers {
            if tr.grid() != self.grid() {
                return Err(Error::InvalidGrid("tracer grid differs from the state grid".into()));
            }
            self.tracers.push(tr.dealiased());
        }
        Ok(self)
    }

    pub fn grid(&self) -> Grid2D {
        self.omega_l.grid()
    }

    /// Planar velocity; the zero mode, which the dynamics preserve, is dropped.
    pub fn velocity(&self) -> VectorField2D {
        let g = self.grid();
        let (u1, u2) = biot_savart_coefficients(g, self.omega_l.coefficients());
        VectorField2D::new(ScalarField2D::from_coefficients(g, u1), ScalarField2D::from_coefficients(g, u2))
    }

    /// Largest stable step `0.5 h / |u|_inf`.
    pub fn cfl_limit(&self) -> f64 {
        cfl_limit(self.grid(), self.velocity().max_abs())
    }

    pub fn diagnostics(&self) -> Diagnostics {
        let u = self.velocity();
        let e_l = energy(&u);
        let us2 = self.u_s.l2_norm_sq();
        let z_s = small_scale_vorticity(self).l2_norm_sq();
        Diagnostics {
            t: self.t,
            energy: e_l + 0.5 * us2,
            energy_l: e_l,
            enstrophy_l: self.omega_l.l2_norm_sq(),
            enstrophy_s: z_s,
            expected_spectrum: if us2 > 0.0 { z_s / us2 } else { f64::NAN },
            us_l2: us2.sqrt(),
            omega_max: self.omega_l.max_abs(),
        }
    }
}

pub(crate) fn cfl_limit(grid: Grid2D, umax: f64) -> f64 {
    if umax > 0.0 {
        0.5 * grid.spacing() / umax
    } else {
        f64::INFINITY
    }
}

/// One row of the time-series output.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub t: f64,
    /// `1/2 int |u^L|^2 + 1/2 int |u^S|^2`.
    pub energy: f64,
    pub energy_l: f64,
    pub enstrophy_l: f64,
    pub enstrophy_s: f64,
    pub expected_spectrum: f64,
    pub us_l2: f64,
    pub omega_max: f64,
}

impl Diagnostics {
    pub const CSV_HEADER: &'static str = "t,energy,energy_l,enstrophy_l,enstrophy_s,expected_spectrum,us_l2,omega_max";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            self.t,
            self.energy,
            self.energy_l,
            self.enstrophy_l,
            self.enstrophy_s,
            self.expected_spectrum,
            self.us_l2,
            self.omega_max
        )
    }
}

/// Horizontal small-scale vorticity `curl (0, 0, u^S)`.
pub fn small_scale_vorticity(state: &SimState) -> VectorField2D {
    curl_2p5d(&state.u_s)
}

/// `|omega^S|^2 / |u^S|^2`, the mean squared wavenumber of the small scales.
pub fn expected_spectrum(state: &SimState) -> Result<f64> {
    let us2 = state.u_s.l2_norm_sq();
    if us2 == 0.0 {
        return Err(Error::ZeroSmallScale);
    }
    Ok(small_scale_vorticity(state).l2_norm_sq() / us2)
}
