//! Flow-map markers and their deformation gradients.
//!
//! Each marker carries `eta(t, x0)` and the full 2x2 matrix `D = D eta`,
//! integrated with the classical RK4 tableau in lock step with the field
//! solver: stage `s` of a step is evaluated in the velocity of stage `s`.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::key_integral::key_integral;
use crate::error::{Error, Result};
use crate::evolve::{SimState, StageVelocity, StepObserver};
use crate::fields::{Grid2D, Interpolation, PointBasis, Stencil};

pub type Mat2 = [[f64; 2]; 2];

pub const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

/// Largest tolerated `|det D - 1|` before a run is declared under-resolved.
pub const DETERMINANT_TOLERANCE: f64 = 1e-2;

pub fn det(d: &Mat2) -> f64 {
    d[0][0] * d[1][1] - d[0][1] * d[1][0]
}

fn matmul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Spectral norm of a 2x2 matrix.
pub fn operator_norm(d: &Mat2) -> f64 {
    let [[a, b], [c, e]] = *d;
    let s = a * a + b * b + c * c + e * e;
    let q = ((a * a + b * b - c * c - e * e).powi(2) + 4.0 * (a * c + b * e).powi(2)).sqrt();
    (0.5 * (s + q)).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkerSample {
    pub t: f64,
    pub eta: [f64; 2],
    pub d: Mat2,
    pub det: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowMarker {
    pub id: usize,
    pub x0: [f64; 2],
    pub eta: [f64; 2],
    pub d: Mat2,
    pub history: Vec<MarkerSample>,
}

impl FlowMarker {
    pub fn new(id: usize, x0: [f64; 2]) -> Self {
        FlowMarker { id, x0, eta: x0, d: IDENTITY, history: Vec::new() }
    }

    pub fn det(&self) -> f64 {
        det(&self.d)
    }

    fn record(&mut self, t: f64) {
        self.history.push(MarkerSample { t, eta: self.eta, d: self.d, det: det(&self.d) });
    }
}

/// Where markers start.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MarkerSeed {
    Origin,
    /// `count` log-spaced radii in `[r_min, r_max]` along each angle.
    Fan {
        r_min: f64,
        r_max: f64,
        count: usize,
        angles: Vec<f64>,
    },
    Points {
        points: Vec<[f64; 2]>,
    },
}

impl MarkerSeed {
    /// Default fan: radii from `2^-6` to `1/2` on the diagonal and at `pi/8`.
    pub fn default_fan() -> Self {
        MarkerSeed::Fan {
            r_min: 1.0 / 64.0,
            r_max: 0.5,
            count: 6,
            angles: vec![std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_8],
        }
    }

    pub fn points(&self) -> Vec<[f64; 2]> {
        match self {
            MarkerSeed::Origin => vec![[0.0, 0.0]],
            MarkerSeed::Fan { r_min, r_max, count, angles } => {
                let mut out = Vec::with_capacity(count * angles.len());
                for &th in angles {
                    for i in 0..*count {
                        let s = if *count > 1 { i as f64 / (*count - 1) as f64 } else { 0.0 };
                        let r = r_min * (r_max / r_min).powf(s);
                        out.push([r * th.cos(), r * th.sin()]);
                    }
                }
                out
            }
            MarkerSeed::Points { points } => points.clone(),
        }
    }
}

pub fn seed_markers(seeds: &[MarkerSeed]) -> Vec<FlowMarker> {
    seeds.iter().flat_map(|s| s.points()).enumerate().map(|(id, x)| FlowMarker::new(id, x)).collect()
}

/// Velocity and gradient `G[i][j] = d_j u_i` at one point.
pub type Sample = ([f64; 2], Mat2);

#[derive(Clone, Copy, Debug, Default)]
struct Slope {
    eta: [f64; 2],
    d: Mat2,
}

/// A set of markers plus the scratch state of the step in progress.
#[derive(Clone, Debug)]
pub struct MarkerSet {
    pub markers: Vec<FlowMarker>,
    start: Vec<([f64; 2], Mat2)>,
    acc: Vec<Slope>,
}

impl MarkerSet {
    pub fn new(markers: Vec<FlowMarker>) -> Self {
        MarkerSet { markers, start: Vec::new(), acc: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.markers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.markers.is_empty()
    }

    pub fn record(&mut self, t: f64) {
        for m in &mut self.markers {
            m.record(t);
        }
    }

    /// Apply RK4 stage `stage` (0..4) of a step of length `dt`, with
    /// `sample` giving velocity and gradient at a position.
    pub fn stage<F>(&mut self, stage: usize, dt: f64, sample: F)
    where
        F: Fn([f64; 2]) -> Sample + Sync,
    {
        if stage == 0 {
            self.start = self.markers.iter().map(|m| (m.eta, m.d)).collect();
            self.acc = vec![Slope::default(); self.markers.len()];
        }
        let slopes: Vec<Slope> = self
            .markers
            .par_iter()
            .map(|m| {
                let (u, g) = sample(m.eta);
                Slope { eta: u, d: matmul(&g, &m.d) }
            })
            .collect();
        let (weight, next) = match stage {
            0 => (1.0, 0.5 * dt),
            1 => (2.0, 0.5 * dt),
            2 => (2.0, dt),
            _ => (1.0, 0.0),
        };
        for ((m, k), (acc, &(eta0, d0))) in
            self.markers.iter_mut().zip(&slopes).zip(self.acc.iter_mut().zip(&self.start))
        {
            for i in 0..2 {
                acc.eta[i] += weight * k.eta[i];
                for j in 0..2 {
                    acc.d[i][j] += weight * k.d[i][j];
                }
            }
            let (step, slope) = if stage >= 3 { (dt / 6.0, &*acc) } else { (next, k) };
            for i in 0..2 {
                m.eta[i] = eta0[i] + step * slope.eta[i];
                for j in 0..2 {
                    m.d[i][j] = d0[i][j] + step * slope.d[i][j];
                }
            }
        }
    }

    /// Integrate in a prescribed velocity `f(t, x)` with `steps` RK4 steps.
    pub fn advance_prescribed<F>(&mut self, t0: f64, t1: f64, steps: usize, f: F)
    where
        F: Fn(f64, [f64; 2]) -> Sample + Sync,
    {
        let dt = (t1 - t0) / steps as f64;
        for s in 0..steps {
            let t = t0 + s as f64 * dt;
            for (stage, tau) in [0.0, 0.5, 0.5, 1.0].into_iter().enumerate() {
                self.stage(stage, dt, |x| f(t + tau * dt, x));
            }
        }
    }

    /// Largest `|det D - 1|` over the set.
    pub fn worst_determinant_drift(&self) -> f64 {
        self.markers.iter().map(|m| (m.det() - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// How stage velocities are sampled at marker positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MarkerInterpolation {
    /// Spectral for small problems, local stencil otherwise.
    Auto,
    Fixed(Interpolation),
}

impl MarkerInterpolation {
    /// Budget of `markers * N^2` mode evaluations per stage for spectral sampling.
    const SPECTRAL_BUDGET: usize = 1 << 22;

    pub fn resolve(self, grid: Grid2D, markers: usize) -> Interpolation {
        match self {
            MarkerInterpolation::Fixed(m) => m,
            MarkerInterpolation::Auto => {
                if markers.max(1) * grid.n() * grid.n() <= Self::SPECTRAL_BUDGET {
                    Interpolation::Spectral
                } else {
                    Interpolation::LocalPolynomial
                }
            }
        }
    }
}

fn spectral_sampler(grid: Grid2D, u1: &Array2<Complex64>, u2: &Array2<Complex64>, x: [f64; 2]) -> Sample {
    let b = PointBasis::new(grid, x);
    let [a, a1, a2] = b.eval_with_gradient(grid, u1);
    let [c, c1, c2] = b.eval_with_gradient(grid, u2);
    ([a, c], [[a1, a2], [c1, c2]])
}

fn local_sampler(grid: Grid2D, packed: &Array2<Complex64>, grad: &[Array2<f64>; 4], x: [f64; 2]) -> Sample {
    let s = Stencil::new(grid, x);
    let u = s.apply_complex(packed);
    let g: Vec<f64> = grad.iter().map(|a| s.apply(a)).collect();
    ([u.re, u.im], [[g[0], g[1]], [g[2], g[3]]])
}

/// Sample `(u, grad u)` of a stage at `x`.
pub fn sample_stage(velocity: &StageVelocity, method: Interpolation, x: [f64; 2]) -> Sample {
    match method {
        Interpolation::Spectral => {
            let (a, b) = velocity.velocity_hat();
            spectral_sampler(velocity.grid, &a, &b, x)
        }
        Interpolation::LocalPolynomial => local_sampler(velocity.grid, velocity.packed(), velocity.gradient(), x),
    }
}

/// Time series of `I(t, 0)` recorded alongside the markers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeySample {
    pub t: f64,
    pub i0: f64,
}

/// Step observer that carries markers through a simulation.
pub struct MarkerObserver {
    pub set: MarkerSet,
    pub interpolation: MarkerInterpolation,
    /// Record `I(t, 0)` every this many steps (0 disables).
    pub key_integral_every: usize,
    pub key_series: Vec<KeySample>,
    pub determinant_tolerance: f64,
    steps: usize,
}

impl MarkerObserver {
    /// Record the initial configuration of `markers` at the state's time.
    pub fn new(markers: Vec<FlowMarker>, state: &SimState) -> Self {
        let mut obs = MarkerObserver {
            set: MarkerSet::new(markers),
            interpolation: MarkerInterpolation::Auto,
            key_integral_every: 1,
            key_series: Vec::new(),
            determinant_tolerance: DETERMINANT_TOLERANCE,
            steps: 0,
        };
        obs.set.record(state.t);
        obs.key_series.push(KeySample { t: state.t, i0: key_integral(&state.omega_l, 0.0) });
        obs
    }

    pub fn without_key_integral(mut self) -> Self {
        self.key_integral_every = 0;
        self.key_series.clear();
        self
    }

    pub fn markers(&self) -> &[FlowMarker] {
        &self.set.markers
    }

    /// Trapezoidal `int_0^t I(s, 0) ds` at each recorded key sample.
    pub fn integrated_key(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.key_series.len());
        let mut acc = 0.0;
        for (i, s) in self.key_series.iter().enumerate() {
            if i > 0 {
                let p = self.key_series[i - 1];
                acc += 0.5 * (s.t - p.t) * (s.i0 + p.i0);
            }
            out.push((s.t, acc));
        }
        out
    }
}

impl StepObserver for MarkerObserver {
    fn on_stage(&mut self, stage: usize, dt: f64, velocity: &StageVelocity) -> Result<()> {
        let method = self.interpolation.resolve(velocity.grid, self.set.len());
        match method {
            Interpolation::Spectral => {
                let (a, b) = velocity.velocity_hat();
                let g = velocity.grid;
                self.set.stage(stage, dt, |x| spectral_sampler(g, &a, &b, x));
            }
            Interpolation::LocalPolynomial => {
                let g = velocity.grid;
                let packed = velocity.packed();
                let grad = velocity.gradient();
                self.set.stage(stage, dt, |x| local_sampler(g, packed, grad, x));
            }
        }
        Ok(())
    }

    fn on_step_end(&mut self, state: &SimState) -> Result<()> {
        self.steps += 1;
        self.set.record(state.t);
        if self.key_integral_every > 0 && self.steps % self.key_integral_every == 0 {
            self.key_series.push(KeySample { t: state.t, i0: key_integral(&state.omega_l, 0.0) });
        }
        for m in &self.set.markers {
            let d = m.det();
            if (d - 1.0).abs() > self.determinant_tolerance {
                return Err(Error::DeterminantDrift { det: d });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_norm_of_diagonal_and_rotation() {
        assert!((operator_norm(&[[3.0, 0.0], [0.0, -0.5]]) - 3.0).abs() < 1e-14);
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        assert!((operator_norm(&[[c, -s], [s, c]]) - 1.0).abs() < 1e-14);
        // shear [[1, 2], [0, 1]] has norm 1 + sqrt 2
        assert!((operator_norm(&[[1.0, 2.0], [0.0, 1.0]]) - (1.0 + 2f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn fan_is_log_spaced() {
        let pts = MarkerSeed::Fan { r_min: 0.01, r_max: 1.0, count: 3, angles: vec![0.0] }.points();
        assert!((pts[1][0] - 0.1).abs() < 1e-14);
        assert_eq!(seed_markers(&[MarkerSeed::Origin, MarkerSeed::default_fan()]).len(), 13);
    }

    #[test]
    fn frozen_shear_closed_form() {
        let a = 0.7;
        let mut set = MarkerSet::new(vec![FlowMarker::new(0, [0.2, 0.3])]);
        set.advance_prescribed(0.0, 1.0, 200, |_, x| ([a * x[0], -a * x[1]], [[a, 0.0], [0.0, -a]]));
        let m = &set.markers[0];
        let e = (a * 1.0f64).exp();
        assert!((m.eta[0] / (0.2 * e) - 1.0).abs() < 1e-6);
        assert!((m.eta[1] / (0.3 / e) - 1.0).abs() < 1e-6);
        assert!((m.d[0][0] / e - 1.0).abs() < 1e-6 && (m.d[1][1] * e - 1.0).abs() < 1e-6);
        assert!(m.d[0][1].abs() < 1e-12 && m.d[1][0].abs() < 1e-12);
    }

    #[test]
    fn still_flow_keeps_identity() {
        let mut set = MarkerSet::new(vec![FlowMarker::new(0, [0.5, -0.1])]);
        set.advance_prescribed(0.0, 1.0, 10, |_, _| ([0.0; 2], [[0.0; 2]; 2]));
        assert_eq!(set.markers[0].eta, [0.5, -0.1]);
        assert_eq!(set.markers[0].d, IDENTITY);
    }
}
