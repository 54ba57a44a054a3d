//! Paired viscous and inviscid runs at a fixed level.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cascade::{check_level, small_scale_for};
use super::config::ExperimentConfig;
use super::driver::{run_level, LevelJob};
use super::output::{fmt, ExperimentOutput, Manifest, Table};
use crate::error::Result;
use crate::evolve::{small_scale_vorticity, SimState};
use crate::initial_data::smoothed_bahouri_chemin;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifferenceNorms {
    pub u_l: f64,
    pub u_s: f64,
    /// `|grad (u^L - u^L')|`, equal to the vorticity difference.
    pub grad_u_l: f64,
    pub omega_s: f64,
}

pub fn difference_norms(a: &SimState, b: &SimState) -> DifferenceNorms {
    let u = a.velocity().sub(&b.velocity());
    let ws = small_scale_vorticity(a).sub(&small_scale_vorticity(b));
    DifferenceNorms {
        u_l: u.l2_norm_sq().sqrt(),
        u_s: a.u_s.sub(&b.u_s).l2_norm(),
        grad_u_l: a.omega_l.sub(&b.omega_l).l2_norm(),
        omega_s: ws.l2_norm_sq().sqrt(),
    }
}

/// Ordinary least squares slope and its standard error.
pub fn ols(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum();
    let se = if x.len() > 2 { (rss / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    (slope, se)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InviscidRow {
    pub nu: f64,
    pub diff: DifferenceNorms,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InviscidReport {
    pub n: u32,
    pub grid: usize,
    pub t: f64,
    pub rows: Vec<InviscidRow>,
    /// `(slope, stderr)` of each log difference against `log nu`.
    pub slope_u_l: (f64, f64),
    pub slope_u_s: (f64, f64),
    pub slope_grad_u_l: (f64, f64),
    pub slope_omega_s: (f64, f64),
}

impl InviscidReport {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["nu", "u_l", "u_s", "grad_u_l", "omega_s"]);
        for r in &self.rows {
            t.push(vec![fmt(r.nu), fmt(r.diff.u_l), fmt(r.diff.u_s), fmt(r.diff.grad_u_l), fmt(r.diff.omega_s)]);
        }
        for (name, (s, e)) in [
            ("u_l", self.slope_u_l),
            ("u_s", self.slope_u_s),
            ("grad_u_l", self.slope_grad_u_l),
            ("omega_s", self.slope_omega_s),
        ] {
            t.note(format!("slope {name}={} stderr={}", fmt(s), fmt(e)));
        }
        t
    }
}

/// Differences between runs at each `nu` of the ladder and the inviscid run,
/// at the first level of the range and time `delta`.
pub fn run_inviscid_limit(cfg: &ExperimentConfig) -> Result<InviscidReport> {
    cfg.validate()?;
    let [n, _] = cfg.levels();
    let g = check_level(n, cfg.grid_for(n))?;
    let omega = smoothed_bahouri_chemin(g, n)?;
    let u_s = small_scale_for(cfg.profile(), g, n)?;
    let mut nus = vec![0.0];
    nus.extend(&cfg.nu_ladder);
    let states: Vec<SimState> = crate::threads::install(|| {
        nus.par_iter()
            .map(|&nu| Ok(run_level(LevelJob::new(omega.clone(), u_s.clone(), nu, cfg.delta, cfg.cfl))?.final_state))
            .collect::<Result<Vec<_>>>()
    })?;
    let rows: Vec<InviscidRow> = cfg
        .nu_ladder
        .iter()
        .zip(&states[1..])
        .map(|(&nu, s)| InviscidRow { nu, diff: difference_norms(s, &states[0]) })
        .collect();
    let x: Vec<f64> = rows.iter().map(|r| r.nu.ln()).collect();
    let fit = |f: fn(&DifferenceNorms) -> f64| ols(&x, &rows.iter().map(|r| f(&r.diff).ln()).collect::<Vec<_>>());
    Ok(InviscidReport {
        n,
        grid: g.n(),
        t: states[0].t,
        slope_u_l: fit(|d| d.u_l),
        slope_u_s: fit(|d| d.u_s),
        slope_grad_u_l: fit(|d| d.grad_u_l),
        slope_omega_s: fit(|d| d.omega_s),
        rows,
    })
}

pub(crate) fn inviscid_output(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let report = run_inviscid_limit(cfg)?;
    let mut m = Manifest::new(cfg);
    m.grid(report.grid);
    m.constant("slope_u_l", report.slope_u_l.0);
    m.constant("slope_u_l_stderr", report.slope_u_l.1);
    m.constant("slope_u_s", report.slope_u_s.0);
    m.constant("slope_grad_u_l", report.slope_grad_u_l.0);
    m.constant("slope_omega_s", report.slope_omega_s.0);
    m.constant("max_omega_s_difference", report.rows.iter().map(|r| r.diff.omega_s).fold(0.0, f64::max));
    let mut out = ExperimentOutput::new(m);
    out.add_table("inviscid_limit.csv", report.to_table());
    Ok(out)
}
