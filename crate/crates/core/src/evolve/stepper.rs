//! Integrating-factor RK4 for the planar vorticity and its passive scalars.

use std::cell::OnceCell;

use ndarray::{Array2, Zip};
use num_complex::Complex64;

use super::state::{cfl_limit, SimState};
use crate::error::{Error, Result};
use crate::fields::{biot_savart_coefficients, fft, Grid2D, ScalarField2D, VectorField2D};

/// Velocity of one Runge-Kutta stage, handed to [`StepObserver`]s.
pub struct StageVelocity<'a> {
    pub grid: Grid2D,
    /// Time the stage represents: `t`, `t + dt/2`, `t + dt/2`, `t + dt`.
    pub time: f64,
    pub omega_hat: &'a Array2<Complex64>,
    /// Physical `u1 + i u2`.
    packed: &'a Array2<Complex64>,
    velocity_multiplier: &'a Array2<Complex64>,
    gradient: OnceCell<[Array2<f64>; 4]>,
}

impl<'a> StageVelocity<'a> {
    /// Physical velocity packed as `u1 + i u2`.
    pub fn packed(&self) -> &Array2<Complex64> {
        self.packed
    }

    /// Physical `[d1 u1, d2 u1, d1 u2, d2 u2]`, computed on first request.
    pub fn gradient(&self) -> &[Array2<f64>; 4] {
        self.gradient.get_or_init(|| {
            let k = self.grid.derivative_wavenumbers();
            let n = self.grid.n();
            let plan = fft::plan(n);
            let mut out = Vec::with_capacity(2);
            for axis in 0..2 {
                let mut buf = Array2::zeros((n, n));
                Zip::indexed(&mut buf).and(self.omega_hat).and(self.velocity_multiplier).for_each(
                    |(i, j), b, &w, &m| {
                        let kk = if axis == 0 { k[i] } else { k[j] };
                        *b = w * m * Complex64::new(0.0, kk);
                    },
                );
                plan.inverse(&mut buf);
                out.push(buf);
            }
            let re = |a: &Array2<Complex64>| a.mapv(|z| z.re);
            let im = |a: &Array2<Complex64>| a.mapv(|z| z.im);
            [re(&out[0]), re(&out[1]), im(&out[0]), im(&out[1])]
        })
    }

    pub fn velocity_field(&self) -> VectorField2D {
        VectorField2D::new(
            ScalarField2D::from_values(self.grid, self.packed.mapv(|z| z.re)),
            ScalarField2D::from_values(self.grid, self.packed.mapv(|z| z.im)),
        )
    }

    /// Spectral velocity coefficients `(u1_hat, u2_hat)`.
    pub fn velocity_hat(&self) -> (Array2<Complex64>, Array2<Complex64>) {
        biot_savart_coefficients(self.grid, self.omega_hat)
    }

    /// `(d1 u1, d2 u1, d1 u2)` at the origin from the spectral coefficients.
    pub fn strain_at_origin(&self) -> [f64; 3] {
        let (a, b) = self.velocity_hat();
        origin_gradient(self.grid, &a, &b)
    }
}

/// Velocity gradient entries `(d1 u1, d2 u1, d1 u2)` at `x = 0`.
pub fn origin_gradient(grid: Grid2D, u1_hat: &Array2<Complex64>, u2_hat: &Array2<Complex64>) -> [f64; 3] {
    let k = grid.derivative_wavenumbers();
    let mut acc = [0.0; 3];
    for i in 0..grid.n() {
        let si = if grid.mode(i) % 2 == 0 { 1.0 } else { -1.0 };
        for j in 0..grid.n() {
            let s = if grid.mode(j) % 2 == 0 { si } else { -si };
            let a = u1_hat[[i, j]];
            let b = u2_hat[[i, j]];
            // Re(i k c) = -k Im(c)
            acc[0] -= s * k[i] * a.im;
            acc[1] -= s * k[j] * a.im;
            acc[2] -= s * k[i] * b.im;
        }
    }
    acc
}

/// Hook into the four stages of a step; used for Lagrangian markers.
pub trait StepObserver {
    fn wants_stages(&self) -> bool {
        true
    }
    /// Called for stages 0..4 in order.
    fn on_stage(&mut self, stage: usize, dt: f64, velocity: &StageVelocity) -> Result<()>;
    fn on_step_end(&mut self, _state: &SimState) -> Result<()> {
        Ok(())
    }
}

/// Observer that does nothing.
pub struct NoObserver;

impl StepObserver for NoObserver {
    fn wants_stages(&self) -> bool {
        false
    }
    fn on_stage(&mut self, _: usize, _: f64, _: &StageVelocity) -> Result<()> {
        Ok(())
    }
}

/// How the step size is chosen.
#[derive(Clone, Copy, Debug)]
pub enum StepSize {
    Fixed(f64),
    /// Largest `dt <= cfl h / |u|_inf` that also lands exactly on `t_end`.
    Cfl {
        cfl: f64,
        t_end: f64,
    },
}

/// Reusable stepper with cached integrating factors.
pub struct Stepper {
    grid: Grid2D,
    nu: f64,
    k: Vec<f64>,
    mask: Vec<bool>,
    /// `(k1 + i k2) / |k|^2`: maps the vorticity spectrum to that of `u1 + i u2`.
    velocity_multiplier: Array2<Complex64>,
    pool: Vec<Array2<Complex64>>,
    factor_dt: f64,
    half: Array2<f64>,
}

type Spectra = Vec<Array2<Complex64>>;

impl Stepper {
    pub fn new(grid: Grid2D, nu: f64) -> Self {
        let n = grid.n();
        Stepper {
            grid,
            nu,
            k: grid.derivative_wavenumbers(),
            mask: (0..n).map(|i| grid.is_retained(i)).collect(),
            velocity_multiplier: velocity_multiplier(grid),
            pool: Vec::new(),
            factor_dt: f64::NAN,
            half: Array2::zeros((0, 0)),
        }
    }

    fn factors(&mut self, dt: f64) {
        if self.nu == 0.0 || self.factor_dt == dt {
            return;
        }
        let g = self.grid;
        let nu = self.nu;
        self.half = Array2::from_shape_fn((g.n(), g.n()), |(i, j)| {
            let k2 = g.wavenumber(i).powi(2) + g.wavenumber(j).powi(2);
            (-nu * k2 * dt * 0.5).exp()
        });
        self.factor_dt = dt;
    }

    /// Advance one step.
    pub fn step(&mut self, state: &SimState, size: StepSize) -> Result<SimState> {
        self.step_observed(state, size, &mut NoObserver)
    }

    pub fn step_observed(
        &mut self,
        state: &SimState,
        size: StepSize,
        observer: &mut dyn StepObserver,
    ) -> Result<SimState> {
        if state.grid() != self.grid || state.nu != self.nu {
            return Err(Error::Config("stepper built for a different grid or viscosity".into()));
        }
        let t = state.t;
        let grid = self.grid;
        let mut w: Spectra = Vec::with_capacity(2 + state.tracers.len());
        for f in std::iter::once(&state.omega_l).chain(std::iter::once(&state.u_s)).chain(&state.tracers) {
            let mut buf = self.take();
            buf.assign(f.coefficients());
            w.push(buf);
        }

        // Stage 0 decides the step size from the current velocity.
        let a = self.rhs(&w, t, 0, observer, |umax| {
            let limit = cfl_limit(grid, umax);
            let dt = match size {
                StepSize::Fixed(dt) => dt,
                StepSize::Cfl { cfl, t_end } => {
                    let target = cfl / 0.5 * limit;
                    let remaining = t_end - t;
                    if remaining <= 0.0 {
                        0.0
                    } else {
                        remaining / (remaining / target).ceil().max(1.0)
                    }
                }
            };
            if dt > limit * (1.0 + 1e-12) {
                Err(Error::CflViolation { dt, limit })
            } else if !(dt > 0.0) {
                Err(Error::Config(format!("non-positive time step {dt}")))
            } else {
                Ok(dt)
            }
        });
        let (a, dt) = match a {
            Ok(v) => v,
            Err(e) => {
                self.give(w);
                return Err(e);
            }
        };
        self.factors(dt);
        let viscous = self.nu > 0.0;
        let half = std::mem::take(&mut self.half);

        let mut acc: Spectra = Vec::with_capacity(w.len());
        let mut stage: Spectra = Vec::with_capacity(w.len());
        for (wf, af) in w.iter().zip(&a) {
            let mut s = self.take();
            let mut ac = self.take();
            if viscous {
                // stage = E (w + dt/2 a) ; acc = E^2 (w + dt/6 a)
                Zip::from(&mut s).and(&mut ac).and(wf).and(af).and(&half).for_each(|s, ac, &x, &y, &e| {
                    *s = (x + y * (0.5 * dt)) * e;
                    *ac = (x + y * (dt / 6.0)) * (e * e);
                });
            } else {
                Zip::from(&mut s).and(&mut ac).and(wf).and(af).for_each(|s, ac, &x, &y| {
                    *s = x + y * (0.5 * dt);
                    *ac = x + y * (dt / 6.0);
                });
            }
            stage.push(s);
            acc.push(ac);
        }
        self.give(a);

        let result = (|| -> Result<()> {
            let (b, _) = self.rhs(&stage, t + 0.5 * dt, 1, observer, |_| Ok(dt))?;
            for ((s, wf), (bf, ac)) in stage.iter_mut().zip(&w).zip(b.iter().zip(acc.iter_mut())) {
                // acc += dt/3 E b ; stage = E w + dt/2 b
                if viscous {
                    Zip::from(ac).and(&mut *s).and(wf).and(bf).and(&half).for_each(|ac, s, &x, &y, &e| {
                        *ac += y * (e * dt / 3.0);
                        *s = x * e + y * (0.5 * dt);
                    });
                } else {
                    Zip::from(ac).and(&mut *s).and(wf).and(bf).for_each(|ac, s, &x, &y| {
                        *ac += y * (dt / 3.0);
                        *s = x + y * (0.5 * dt);
                    });
                }
            }
            self.give(b);

            let (c, _) = self.rhs(&stage, t + 0.5 * dt, 2, observer, |_| Ok(dt))?;
            for ((s, wf), (cf, ac)) in stage.iter_mut().zip(&w).zip(c.iter().zip(acc.iter_mut())) {
                // acc += dt/3 E c ; stage = E^2 w + dt E c
                if viscous {
                    Zip::from(ac).and(&mut *s).and(wf).and(cf).and(&half).for_each(|ac, s, &x, &y, &e| {
                        *ac += y * (e * dt / 3.0);
                        *s = x * (e * e) + y * (e * dt);
                    });
                } else {
                    Zip::from(ac).and(&mut *s).and(wf).and(cf).for_each(|ac, s, &x, &y| {
                        *ac += y * (dt / 3.0);
                        *s = x + y * dt;
                    });
                }
            }
            self.give(c);

            let (d, _) = self.rhs(&stage, t + dt, 3, observer, |_| Ok(dt))?;
            for (ac, df) in acc.iter_mut().zip(&d) {
                Zip::from(ac).and(df).for_each(|x, &y| *x += y * (dt / 6.0));
            }
            self.give(d);
            Ok(())
        })();
        self.half = half;
        self.give(stage);
        self.give(w);
        if let Err(e) = result {
            self.give(acc);
            return Err(e);
        }

        let mut fields = acc.into_iter().map(|c| ScalarField2D::from_coefficients(grid, c));
        let omega_l = fields.next().expect("vorticity");
        let u_s = fields.next().expect("small scale");
        let next = SimState { t: t + dt, omega_l, u_s, tracers: fields.collect(), nu: self.nu };
        observer.on_step_end(&next)?;
        Ok(next)
    }

    fn take(&mut self) -> Array2<Complex64> {
        let n = self.grid.n();
        self.pool.pop().unwrap_or_else(|| Array2::zeros((n, n)))
    }

    fn give(&mut self, bufs: Spectra) {
        self.pool.extend(bufs);
    }

    /// `-P(u . grad f)` for every field, with `u` from the first one. Also
    /// returns the step size accepted by `check`.
    fn rhs(
        &mut self,
        w: &Spectra,
        time: f64,
        stage: usize,
        observer: &mut dyn StepObserver,
        check: impl FnOnce(f64) -> Result<f64>,
    ) -> Result<(Spectra, f64)> {
        let g = self.grid;
        let n = g.n();
        let plan = fft::plan(n);

        let mut vel = self.take();
        let mut grad = self.take();
        let mut packed = self.take();
        Zip::from(&mut vel).and(&w[0]).and(&self.velocity_multiplier).for_each(|v, &a, &m| *v = a * m);
        plan.inverse_band(&mut vel, &self.mask);
        let umax = vel.iter().fold(0.0f64, |m, z| m.max(z.re.abs()).max(z.im.abs()));
        let dt = match check(umax) {
            Ok(dt) => dt,
            Err(e) => {
                self.give(vec![vel, grad, packed]);
                return Err(e);
            }
        };
        if observer.wants_stages() {
            let sv = StageVelocity {
                grid: g,
                time,
                omega_hat: &w[0],
                packed: &vel,
                velocity_multiplier: &self.velocity_multiplier,
                gradient: OnceCell::new(),
            };
            if let Err(e) = observer.on_stage(stage, dt, &sv) {
                self.give(vec![vel, grad, packed]);
                return Err(e);
            }
        }

        let mut out = Vec::with_capacity(w.len());
        for pair in w.chunks(2) {
            for (slot, f) in pair.iter().enumerate() {
                let keep = &self.mask;
                let k = &self.k;
                // d1 f + i d2 f has spectrum (i k1 - k2) f_hat.
                let src = f.as_slice().expect("standard layout");
                let dst = grad.as_slice_mut().expect("standard layout");
                for i in 0..n {
                    let row = &mut dst[i * n..(i + 1) * n];
                    if keep[i] {
                        let k1 = k[i];
                        for ((gz, &c), &k2) in row.iter_mut().zip(&src[i * n..(i + 1) * n]).zip(k) {
                            *gz = Complex64::new(-k2 * c.re - k1 * c.im, k1 * c.re - k2 * c.im);
                        }
                    } else {
                        row.fill(Complex64::new(0.0, 0.0));
                    }
                }
                plan.inverse_band(&mut grad, keep);
                // -(u . grad f) = -Re(conj(u1 + i u2) (d1 f + i d2 f))
                if slot == 0 {
                    Zip::from(&mut packed).and(&vel).and(&grad).for_each(|p, &u, &gz| {
                        *p = Complex64::new(-(u.conj() * gz).re, 0.0);
                    });
                } else {
                    Zip::from(&mut packed).and(&vel).and(&grad).for_each(|p, &u, &gz| {
                        p.im = -(u.conj() * gz).re;
                    });
                }
            }
            plan.forward_band(&mut packed, &self.mask);
            let mut a = self.take();
            let mut b = self.take();
            self.split_retained(&packed, &mut a, &mut b);
            out.push(a);
            if pair.len() == 2 {
                out.push(b);
            } else {
                self.pool.push(b);
            }
        }
        self.give(vec![vel, grad, packed]);
        Ok((out, dt))
    }

    /// Normalized, truncated spectra of the real and imaginary parts of a
    /// packed physical field, given its forward transform.
    fn split_retained(&self, c: &Array2<Complex64>, a: &mut Array2<Complex64>, b: &mut Array2<Complex64>) {
        let n = self.grid.n();
        let norm = 1.0 / (n * n) as f64;
        let keep = &self.mask;
        let zero = Complex64::new(0.0, 0.0);
        let src = c.as_slice().expect("standard layout");
        let (sa, sb) = (a.as_slice_mut().unwrap(), b.as_slice_mut().unwrap());
        for i in 0..n {
            let mi = (n - i) % n;
            for j in 0..n {
                let idx = i * n + j;
                if keep[i] && keep[j] {
                    let z = src[idx];
                    let zc = src[mi * n + (n - j) % n].conj();
                    sa[idx] = (z + zc) * (0.5 * norm);
                    sb[idx] = (z - zc) * Complex64::new(0.0, -0.5 * norm);
                } else {
                    sa[idx] = zero;
                    sb[idx] = zero;
                }
            }
        }
    }
}

fn velocity_multiplier(grid: Grid2D) -> Array2<Complex64> {
    let k = grid.derivative_wavenumbers();
    Array2::from_shape_fn((grid.n(), grid.n()), |(i, j)| {
        let k2 = grid.wavenumber(i).powi(2) + grid.wavenumber(j).powi(2);
        if k2 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(k[i], k[j]) / k2
        }
    })
}

/// Advance `state` to `t_end` with CFL-limited steps.
pub fn advance(state: SimState, t_end: f64, cfl: f64, observer: &mut dyn StepObserver) -> Result<SimState> {
    let mut stepper = Stepper::new(state.grid(), state.nu);
    advance_with(&mut stepper, state, t_end, cfl, observer)
}

pub fn advance_with(
    stepper: &mut Stepper,
    mut state: SimState,
    t_end: f64,
    cfl: f64,
    observer: &mut dyn StepObserver,
) -> Result<SimState> {
    if !(cfl > 0.0 && cfl <= 0.5) {
        return Err(Error::Config(format!("CFL number {cfl} must lie in (0, 0.5]")));
    }
    let tol = 1e-12 * t_end.abs().max(1.0);
    while state.t < t_end - tol {
        state = stepper.step_observed(&state, StepSize::Cfl { cfl, t_end }, observer)?;
    }
    Ok(state)
}
