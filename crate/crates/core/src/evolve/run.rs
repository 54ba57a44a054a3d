//! Config-driven simulation runs with a diagnostics time series.

use serde::{Deserialize, Serialize};

use super::state::{Diagnostics, SimState};
use super::stepper::{NoObserver, StepObserver, StepSize, Stepper};
use crate::error::{Error, Result};
use crate::fields::{Grid2D, ScalarField2D, Snapshot};
use crate::initial_data::{
    bourgain_li_bubbles, single_bubble, small_scale_profile, smoothed_bahouri_chemin, BubbleCoefficients,
    SmallScaleMode,
};

/// Large-scale initial vorticity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum InitialCondition {
    /// Smoothed Bahouri-Chemin data at level `n`.
    Bc {
        n: u32,
    },
    /// Dyadic bubbles; `weights` defaults to all ones.
    Bubbles {
        n: usize,
        weights: Option<Vec<f64>>,
    },
    Bubble {
        ell: f64,
    },
    /// `sin(pi x1) sin(pi x2)`, a steady Euler solution.
    Eigenmode,
    Zero,
}

impl InitialCondition {
    pub fn build(&self, grid: Grid2D) -> Result<ScalarField2D> {
        use std::f64::consts::PI;
        match self {
            InitialCondition::Bc { n } => smoothed_bahouri_chemin(grid, *n),
            InitialCondition::Bubbles { n, weights } => {
                let coeffs = match weights {
                    Some(w) if w.len() != *n => {
                        return Err(Error::Config(format!("{} weights given for {n} bubbles", w.len())))
                    }
                    Some(w) => BubbleCoefficients::new(w.clone())?,
                    None => BubbleCoefficients::ones(*n),
                };
                bourgain_li_bubbles(grid, &coeffs)
            }
            InitialCondition::Bubble { ell } => single_bubble(grid, *ell),
            InitialCondition::Eigenmode => Ok(ScalarField2D::from_fn(grid, |x, y| (PI * x).sin() * (PI * y).sin())),
            InitialCondition::Zero => Ok(ScalarField2D::zeros(grid)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallScaleSpec {
    pub n: u32,
    #[serde(flatten)]
    pub mode: SmallScaleMode,
}

fn default_cfl() -> f64 {
    0.4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Grid points per axis.
    pub grid: usize,
    pub initial: InitialCondition,
    #[serde(default)]
    pub small_scale: Option<SmallScaleSpec>,
    #[serde(default)]
    pub nu: f64,
    pub t_end: f64,
    /// Fixed step; when absent the step follows the CFL number.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    /// Steps between diagnostic rows; defaults to `max(1, steps / 200)`.
    #[serde(default)]
    pub diag_every: Option<usize>,
    /// Times at which the large-scale vorticity is captured.
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<Grid2D> {
        let grid = Grid2D::new(self.grid)?;
        if !(self.t_end >= 0.0) {
            return Err(Error::Config(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        if !(self.cfl > 0.0 && self.cfl <= 0.5) {
            return Err(Error::Config(format!("cfl must lie in (0, 0.5], got {}", self.cfl)));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return Err(Error::Config(format!("dt must be positive, got {dt}")));
            }
        }
        if self.diag_every == Some(0) {
            return Err(Error::Config("diag_every must be at least 1".into()));
        }
        Ok(grid)
    }

    pub fn initial_state(&self) -> Result<SimState> {
        let grid = self.validate()?;
        let omega = self.initial.build(grid)?;
        let u_s = match &self.small_scale {
            Some(spec) => small_scale_profile(grid, spec.n, spec.mode)?,
            None => ScalarField2D::zeros(grid),
        };
        SimState::new(&omega, &u_s, self.nu)
    }
}

pub struct RunOutput {
    pub rows: Vec<Diagnostics>,
    pub snapshots: Vec<Snapshot>,
    pub final_state: SimState,
    pub steps: usize,
}

impl RunOutput {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(Diagnostics::CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.csv_row());
            s.push('\n');
        }
        s
    }
}

/// Run a configuration to `t_end`, sampling diagnostics along the way.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    run_observed(config, &mut NoObserver)
}

pub fn run_observed(config: &RunConfig, observer: &mut dyn StepObserver) -> Result<RunOutput> {
    let mut state = config.initial_state()?;
    let grid = state.grid();
    let mut stepper = Stepper::new(grid, state.nu);
    let t_end = config.t_end;

    let step_estimate = match config.dt {
        Some(dt) => (t_end / dt).ceil(),
        None => (t_end / (config.cfl / 0.5 * state.cfl_limit())).ceil(),
    };
    let every = config.diag_every.unwrap_or_else(|| ((step_estimate / 200.0).floor() as usize).max(1));

    let mut stops: Vec<f64> = config.snapshot_times.iter().copied().filter(|&t| t > 0.0 && t < t_end).collect();
    stops.sort_by(f64::total_cmp);
    stops.dedup();
    stops.push(t_end);

    let mut rows = vec![state.diagnostics()];
    let mut snapshots = Vec::new();
    if config.snapshot_times.iter().any(|&t| t == 0.0) {
        snapshots.push(Snapshot::new("omega_l", 0.0, state.nu, state.omega_l.clone()));
    }
    let mut steps = 0usize;
    let tol = 1e-12 * t_end.max(1.0);
    for &stop in &stops {
        while state.t < stop - tol {
            let size = match config.dt {
                Some(dt) if state.t + dt <= stop + tol => StepSize::Fixed(dt),
                Some(_) => StepSize::Fixed(stop - state.t),
                None => StepSize::Cfl { cfl: config.cfl, t_end: stop },
            };
            state = stepper.step_observed(&state, size, observer)?;
            steps += 1;
            if steps % every == 0 && state.t < t_end - tol {
                rows.push(state.diagnostics());
            }
        }
        if stop < t_end || config.snapshot_times.contains(&t_end) {
            snapshots.push(Snapshot::new("omega_l", state.t, state.nu, state.omega_l.clone()));
        }
    }
    if rows.last().map(|r| r.t) != Some(state.t) {
        rows.push(state.diagnostics());
    }
    Ok(RunOutput { rows, snapshots, final_state: state, steps })
}
