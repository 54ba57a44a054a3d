//! Coarse-grained flux statistics, the filtered energy budget of a run and
//! the vortex-tube model flow.

use serde::{Deserialize, Serialize};

use super::cascade::check_level;
use super::config::ExperimentConfig;
use super::driver::{run_level, LevelJob};
use super::output::{fmt, ExperimentOutput, Manifest, Table};
use crate::coarse_grain::{energy_flux, flux_budget, model_flow_report, scale_locality, BudgetRow, FilterSpec};
use crate::error::{Error, Result};
use crate::fields::{biot_savart_2d, ScalarField2D};
use crate::initial_data::smoothed_bahouri_chemin;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluxRow {
    pub k: f64,
    pub integral: f64,
    pub min: f64,
    pub max: f64,
    pub positive_fraction: f64,
    /// Share of `int Pi_K` carried by scales with `K/2 <= |xi| <= 2K`.
    pub local_share: f64,
}

/// Point-wise flux statistics of a vorticity field at each filter wavenumber.
pub fn flux_rows(omega: &ScalarField2D, ks: &[f64]) -> Result<Vec<FluxRow>> {
    let u = biot_savart_2d(omega)?;
    ks.iter()
        .map(|&k| {
            let spec = FilterSpec::new(k)?;
            let f = energy_flux(&u, spec);
            let (_, local_share) = scale_locality(&u, spec, 0.5, 2.0);
            Ok(FluxRow {
                k,
                integral: f.integral,
                min: f.min(),
                max: f.max(),
                positive_fraction: f.positive_fraction(),
                local_share,
            })
        })
        .collect()
}

/// `K` followed by the dyadic `2^lo, ..., 2^hi`, without repeats.
pub fn band_wavenumbers(k: Option<f64>, bands: Option<(u32, u32)>) -> Result<Vec<f64>> {
    let mut ks: Vec<f64> = k.into_iter().collect();
    if let Some((lo, hi)) = bands {
        if lo > hi || hi > 30 {
            return Err(Error::Config(format!("band range {lo}:{hi} is empty or too deep")));
        }
        for n in lo..=hi {
            let v = (1u64 << n) as f64;
            if !ks.contains(&v) {
                ks.push(v);
            }
        }
    }
    if ks.is_empty() {
        return Err(Error::Config("no filter wavenumber requested".into()));
    }
    Ok(ks)
}

pub fn flux_table(rows: &[FluxRow]) -> Table {
    let mut t = Table::new(&["k", "integral", "min", "max", "positive_fraction", "local_share"]);
    for r in rows {
        t.push(vec![fmt(r.k), fmt(r.integral), fmt(r.min), fmt(r.max), fmt(r.positive_fraction), fmt(r.local_share)]);
    }
    t
}

pub fn budget_table(rows: &[BudgetRow]) -> Table {
    let mut t = Table::new(&["k", "t", "d_dt_energy", "flux", "dissipation", "residual", "scale", "relative"]);
    for r in rows {
        t.push(vec![
            fmt(r.k),
            fmt(r.t),
            fmt(r.d_dt_energy),
            fmt(r.flux),
            fmt(r.dissipation),
            fmt(r.residual),
            fmt(r.scale),
            fmt(r.residual.abs() / r.scale),
        ]);
    }
    t
}

pub struct FluxReport {
    pub grid: usize,
    pub budget: Vec<BudgetRow>,
    pub points: Vec<FluxRow>,
    pub model: crate::coarse_grain::ModelFlowReport,
}

impl FluxReport {
    /// Largest `|residual| / scale` of the budget.
    pub fn worst_closure(&self) -> f64 {
        self.budget.iter().map(|r| r.residual.abs() / r.scale).fold(0.0, f64::max)
    }
}

/// Evolve Bahouri-Chemin data at the first level to `flux.t_end`, then close
/// the filtered budget and tabulate the point-wise flux.
pub fn run_flux_report(cfg: &ExperimentConfig) -> Result<FluxReport> {
    cfg.validate()?;
    let [n, _] = cfg.levels();
    let g = check_level(n, cfg.grid_for(n))?;
    let omega = smoothed_bahouri_chemin(g, n)?;
    let nu = cfg.nu.unwrap_or(0.0);
    let state = run_level(LevelJob::new(omega, ScalarField2D::zeros(g), nu, cfg.flux.t_end, cfg.cfl))?.final_state;
    let budget = flux_budget(&state, &cfg.flux.ks, cfg.flux.dt)?;
    let points = flux_rows(&state.omega_l, &cfg.flux.ks)?;
    let model = model_flow_report(cfg.flux.model_k, FilterSpec::new(cfg.flux.model_k)?, cfg.flux.model_points);
    Ok(FluxReport { grid: g.n(), budget, points, model })
}

pub fn model_table(m: &crate::coarse_grain::ModelFlowReport) -> Table {
    let mut t = Table::new(&["r", "pi", "expected"]);
    for r in &m.rows {
        t.push(vec![fmt(r.r), fmt(r.pi), fmt(r.expected)]);
    }
    t.note(format!(
        "k={} c_k={} points={} min_pi={} all_positive={} max_rel_error={}",
        fmt(m.k),
        fmt(m.c_k),
        m.points,
        fmt(m.min_pi),
        m.all_positive,
        fmt(m.max_rel_error)
    ));
    t
}

pub(crate) fn flux_output(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let report = run_flux_report(cfg)?;
    let mut m = Manifest::new(cfg);
    m.grid(report.grid);
    m.constant("worst_closure", report.worst_closure());
    m.constant("model_c_k", report.model.c_k);
    m.constant("model_max_rel_error", report.model.max_rel_error);
    m.flag("model_all_positive", report.model.all_positive);
    let mut out = ExperimentOutput::new(m);
    out.add_table("flux_budget.csv", budget_table(&report.budget));
    out.add_table("flux_points.csv", flux_table(&report.points));
    out.add_table("model_flow.csv", model_table(&report.model));
    Ok(out)
}
