//! Shared driver: one evolved level with optional markers, tracked key
//! integral and time-integrated enstrophy.

use crate::error::Result;
use crate::evolve::{advance_with, Diagnostics, SimState, StageVelocity, StepObserver, Stepper};
use crate::fields::ScalarField2D;
use crate::lagrangian::{key_integral_with, FlowMarker, MarkerObserver};

/// Quadrature of `I(t, 0)` used along runs: `N` angles and `N/2` radii.
pub(crate) fn key_at_origin(omega: &ScalarField2D) -> f64 {
    let n = omega.grid().n();
    key_integral_with(omega, 0.0, n, n / 2)
}

pub(crate) struct LevelJob {
    pub omega: ScalarField2D,
    pub u_s: ScalarField2D,
    pub tracers: Vec<ScalarField2D>,
    pub nu: f64,
    pub t_end: f64,
    pub cfl: f64,
    pub markers: Option<Vec<FlowMarker>>,
    pub track_enstrophy: bool,
    pub track_key: bool,
    /// Intermediate times at which the whole state is kept.
    pub stops: Vec<f64>,
}

impl LevelJob {
    pub fn new(omega: ScalarField2D, u_s: ScalarField2D, nu: f64, t_end: f64, cfl: f64) -> Self {
        LevelJob {
            omega,
            u_s,
            tracers: Vec::new(),
            nu,
            t_end,
            cfl,
            markers: None,
            track_enstrophy: false,
            track_key: false,
            stops: Vec::new(),
        }
    }
}

pub(crate) struct LevelOutcome {
    pub initial: Diagnostics,
    pub last: Diagnostics,
    /// `int_0^T (|omega^L|^2 + |omega^S|^2) dt`, trapezoidal over steps.
    pub enstrophy_integral: f64,
    /// `(t, I(t, 0))` at every step.
    pub key: Vec<(f64, f64)>,
    pub markers: Option<MarkerObserver>,
    pub captured: Vec<SimState>,
    pub final_state: SimState,
    pub steps: usize,
}

impl LevelOutcome {
    /// Trapezoidal `int_0^t I(s, 0) ds` at each key sample.
    pub fn integrated_key(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.key.len());
        for (i, &(t, v)) in self.key.iter().enumerate() {
            if i > 0 {
                let (tp, vp) = self.key[i - 1];
                acc += 0.5 * (t - tp) * (v + vp);
            }
            out.push(acc);
        }
        out
    }
}

struct Tracker {
    markers: Option<MarkerObserver>,
    track_enstrophy: bool,
    track_key: bool,
    last: (f64, f64),
    integral: f64,
    key: Vec<(f64, f64)>,
    steps: usize,
}

fn total_enstrophy(state: &SimState) -> f64 {
    let d = state.diagnostics();
    d.enstrophy_l + d.enstrophy_s
}

impl StepObserver for Tracker {
    fn wants_stages(&self) -> bool {
        self.markers.is_some()
    }

    fn on_stage(&mut self, stage: usize, dt: f64, velocity: &StageVelocity) -> Result<()> {
        match &mut self.markers {
            Some(m) => m.on_stage(stage, dt, velocity),
            None => Ok(()),
        }
    }

    fn on_step_end(&mut self, state: &SimState) -> Result<()> {
        self.steps += 1;
        if let Some(m) = &mut self.markers {
            m.on_step_end(state)?;
        }
        if self.track_enstrophy {
            let z = total_enstrophy(state);
            let (tp, zp) = self.last;
            self.integral += 0.5 * (state.t - tp) * (z + zp);
            self.last = (state.t, z);
        }
        if self.track_key {
            self.key.push((state.t, key_at_origin(&state.omega_l)));
        }
        Ok(())
    }
}

pub(crate) fn run_level(job: LevelJob) -> Result<LevelOutcome> {
    let state = SimState::new(&job.omega, &job.u_s, job.nu)?.with_tracers(&job.tracers)?;
    let initial = state.diagnostics();
    let mut tracker = Tracker {
        markers: job.markers.map(|m| MarkerObserver::new(m, &state).without_key_integral()),
        track_enstrophy: job.track_enstrophy,
        track_key: job.track_key,
        last: (0.0, initial.enstrophy_l + initial.enstrophy_s),
        integral: 0.0,
        key: Vec::new(),
        steps: 0,
    };
    if job.track_key {
        tracker.key.push((0.0, key_at_origin(&state.omega_l)));
    }
    let mut stepper = Stepper::new(state.grid(), job.nu);
    let mut stops: Vec<f64> = job.stops.iter().copied().filter(|&t| t > 0.0 && t < job.t_end).collect();
    stops.sort_by(f64::total_cmp);
    stops.dedup();
    let mut captured = Vec::new();
    let mut state = state;
    for &t in &stops {
        state = advance_with(&mut stepper, state, t, job.cfl, &mut tracker)?;
        captured.push(state.clone());
    }
    state = advance_with(&mut stepper, state, job.t_end, job.cfl, &mut tracker)?;
    Ok(LevelOutcome {
        initial,
        last: state.diagnostics(),
        enstrophy_integral: tracker.integral,
        key: tracker.key,
        markers: tracker.markers,
        captured,
        final_state: state,
        steps: tracker.steps,
    })
}
