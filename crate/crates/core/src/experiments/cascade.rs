//! Small-scale cascade on Bahouri-Chemin data and the time-averaged
//! enstrophy behind the modified zeroth law.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ProfileChoice};
use super::driver::{run_level, LevelJob};
use super::output::{fmt, ExperimentOutput, Manifest, Table};
use crate::cascade_mc::fit_slope;
use crate::error::{Error, Result};
use crate::fields::{Grid2D, ScalarField2D, Snapshot};
use crate::initial_data::{small_scale_profile, smoothed_bahouri_chemin, ProfileShape, SmallScaleMode};
use crate::lagrangian::strain_at_origin;

/// Levels must satisfy `n <= log2 N - 4`.
pub fn check_level(n: u32, grid: usize) -> Result<Grid2D> {
    let g = Grid2D::new(grid)?;
    if (n as usize) + 4 > grid.trailing_zeros() as usize {
        return Err(Error::UnderResolved(format!("level {n} needs N >= 2^{} (got {grid})", n as u64 + 4)));
    }
    Ok(g)
}

pub fn small_scale_for(profile: ProfileChoice, grid: Grid2D, n: u32) -> Result<ScalarField2D> {
    let mode = match profile {
        ProfileChoice::Dipole => {
            SmallScaleMode::Custom { center: [0.0, 0.0], radius: 0.5f64.powi(n as i32), shape: ProfileShape::Dipole }
        }
        ProfileChoice::Linear => SmallScaleMode::LinearThm2,
    };
    small_scale_profile(grid, n, mode)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CascadeRow {
    pub n: u32,
    pub grid: usize,
    pub t: f64,
    pub omega_s_l2_0: f64,
    pub omega_s_l2_t: f64,
    /// `| |u^S(t)| / |u^S(0)| - 1 |`.
    pub us_l2_drift: f64,
    /// `E[u^S(t)] / E[u^S(0)]`.
    pub ratio: f64,
    /// Fitted stretching factor `|omega^S(t)| / |omega^S(0)|`.
    pub m_n: f64,
    /// `d_1 u_1(0, 0)` at `t = 0`.
    pub strain_0: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CascadeTable {
    pub rows: Vec<CascadeRow>,
    pub monotone: bool,
    /// Smallest `ratio_{n+1} / ratio_n - 1`.
    pub min_increase: f64,
    /// Slope of `ln ratio` against `n`.
    pub rate: f64,
}

impl CascadeTable {
    pub const HEADER: [&'static str; 10] =
        ["n", "grid", "t", "omega_s_l2_0", "omega_s_l2_t", "us_l2_drift", "ratio", "m_n", "strain_0", "steps"];

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&Self::HEADER);
        for r in &self.rows {
            t.push(vec![
                r.n.to_string(),
                r.grid.to_string(),
                fmt(r.t),
                fmt(r.omega_s_l2_0),
                fmt(r.omega_s_l2_t),
                fmt(r.us_l2_drift),
                fmt(r.ratio),
                fmt(r.m_n),
                fmt(r.strain_0),
                r.steps.to_string(),
            ]);
        }
        t.note(format!("monotone={} min_increase={} rate={}", self.monotone, fmt(self.min_increase), fmt(self.rate)));
        t
    }
}

fn increases(values: &[f64]) -> (bool, f64) {
    let min = values.windows(2).map(|w| w[1] / w[0] - 1.0).fold(f64::INFINITY, f64::min);
    (values.windows(2).all(|w| w[1] > w[0]), min)
}

fn level_slope(levels: &[f64], values: &[f64]) -> f64 {
    if levels.len() < 2 {
        return f64::NAN;
    }
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    fit_slope(levels, &y, &vec![0.0; y.len()]).0
}

/// Evolve each level inviscidly to `t_n = delta` and record the growth of the
/// expected wavenumber of `u^S`.
pub fn run_cascade(cfg: &ExperimentConfig) -> Result<(CascadeTable, Vec<Snapshot>)> {
    cfg.validate()?;
    let levels: Vec<u32> = cfg.level_range().collect();
    for &n in &levels {
        check_level(n, cfg.grid_for(n))?;
    }
    let job = |&n: &u32| -> Result<(CascadeRow, Snapshot)> {
        let g = check_level(n, cfg.grid_for(n))?;
        let omega = smoothed_bahouri_chemin(g, n)?;
        let u_s = small_scale_for(cfg.profile(), g, n)?;
        let strain_0 = strain_at_origin(&omega)[0];
        let out = run_level(LevelJob::new(omega, u_s, cfg.nu.unwrap_or(0.0), cfg.delta, cfg.cfl))?;
        let (a, b) = (out.initial, out.last);
        let row = CascadeRow {
            n,
            grid: g.n(),
            t: b.t,
            omega_s_l2_0: a.enstrophy_s.sqrt(),
            omega_s_l2_t: b.enstrophy_s.sqrt(),
            us_l2_drift: (b.us_l2 / a.us_l2 - 1.0).abs(),
            ratio: b.expected_spectrum / a.expected_spectrum,
            m_n: (b.enstrophy_s / a.enstrophy_s).sqrt(),
            strain_0,
            steps: out.steps,
        };
        let snap = Snapshot::new(format!("omega_l_n{n}"), b.t, out.final_state.nu, out.final_state.omega_l);
        Ok((row, snap))
    };
    let results: Vec<(CascadeRow, Snapshot)> =
        crate::threads::install(|| levels.par_iter().map(job).collect::<Result<Vec<_>>>())?;
    let (rows, snaps): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let (monotone, min_increase) = increases(&ratios);
    let ns: Vec<f64> = levels.iter().map(|&n| n as f64).collect();
    let rate = level_slope(&ns, &ratios);
    Ok((CascadeTable { rows, monotone, min_increase, rate }, snaps))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZerothLawRow {
    pub n: u32,
    pub grid: usize,
    pub nu_n: f64,
    /// Viscosity actually simulated; 0 when `nu_n` is under-resolved.
    pub nu_run: f64,
    pub underresolved: bool,
    /// `(1/delta) int_0^delta |omega|^2 dt`.
    pub d_n: f64,
    /// Same average for the inviscid run.
    pub d_n_inviscid: f64,
    /// `ln D_n / (-ln nu_n)`: the largest `a` with `nu_n^a D_n >= 1` at this level.
    pub exponent: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZerothLawTable {
    pub rows: Vec<ZerothLawRow>,
    /// Largest exponent with `nu_n^a0 D_n >= 1` at every level.
    pub a0: f64,
    /// Slope of `log2 D_n` against `n`.
    pub c0: f64,
    pub monotone: bool,
    /// Largest `|D_n(nu) / D_n(0) - 1|` over resolved levels.
    pub max_viscous_change: f64,
}

impl ZerothLawTable {
    pub const HEADER: [&'static str; 8] =
        ["n", "grid", "nu_n", "nu_run", "underresolved", "d_n", "d_n_inviscid", "exponent"];

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&Self::HEADER);
        for r in &self.rows {
            t.push(vec![
                r.n.to_string(),
                r.grid.to_string(),
                fmt(r.nu_n),
                fmt(r.nu_run),
                (r.underresolved as u8).to_string(),
                fmt(r.d_n),
                fmt(r.d_n_inviscid),
                fmt(r.exponent),
            ]);
        }
        t.note(format!(
            "a0={} c0={} monotone={} max_viscous_change={}",
            fmt(self.a0),
            fmt(self.c0),
            self.monotone,
            fmt(self.max_viscous_change)
        ));
        t
    }
}

/// Smallest viscosity whose diffusion length over the horizon reaches one cell.
pub fn resolvable_viscosity(grid: Grid2D, delta: f64) -> f64 {
    grid.spacing().powi(2) / delta
}

pub fn run_zeroth_law(cfg: &ExperimentConfig) -> Result<ZerothLawTable> {
    cfg.validate()?;
    let levels: Vec<u32> = cfg.level_range().collect();
    for &n in &levels {
        check_level(n, cfg.grid_for(n))?;
    }
    // one job per (level, viscosity) pair
    let mut jobs: Vec<(u32, f64)> = Vec::new();
    let mut plan = Vec::new();
    for &n in &levels {
        let g = Grid2D::new(cfg.grid_for(n))?;
        let nu_n = cfg.nu_for(n);
        let underresolved = nu_n > 0.0 && nu_n < resolvable_viscosity(g, cfg.delta);
        let nu_run = if underresolved { 0.0 } else { nu_n };
        jobs.push((n, nu_run));
        if nu_run != 0.0 {
            jobs.push((n, 0.0));
        }
        plan.push((n, g, nu_n, nu_run, underresolved));
    }
    let run = |&(n, nu): &(u32, f64)| -> Result<f64> {
        let g = Grid2D::new(cfg.grid_for(n))?;
        let omega = smoothed_bahouri_chemin(g, n)?;
        let u_s = small_scale_for(cfg.profile(), g, n)?;
        let mut job = LevelJob::new(omega, u_s, nu, cfg.delta, cfg.cfl);
        job.track_enstrophy = true;
        Ok(run_level(job)?.enstrophy_integral / cfg.delta)
    };
    let values: Vec<f64> = crate::threads::install(|| jobs.par_iter().map(run).collect::<Result<Vec<_>>>())?;
    let lookup = |n: u32, nu: f64| {
        jobs.iter().position(|&(m, v)| m == n && v == nu).map(|i| values[i]).expect("job was scheduled")
    };
    let rows: Vec<ZerothLawRow> = plan
        .into_iter()
        .map(|(n, g, nu_n, nu_run, underresolved)| {
            let d_n = lookup(n, nu_run);
            ZerothLawRow {
                n,
                grid: g.n(),
                nu_n,
                nu_run,
                underresolved,
                d_n,
                d_n_inviscid: lookup(n, 0.0),
                exponent: d_n.ln() / -nu_n.ln(),
            }
        })
        .collect();
    let d: Vec<f64> = rows.iter().map(|r| r.d_n).collect();
    let (monotone, _) = increases(&d);
    let ns: Vec<f64> = levels.iter().map(|&n| n as f64).collect();
    let c0 = level_slope(&ns, &d) / std::f64::consts::LN_2;
    let a0 = rows.iter().map(|r| r.exponent).fold(f64::INFINITY, f64::min);
    let max_viscous_change = rows.iter().map(|r| (r.d_n / r.d_n_inviscid - 1.0).abs()).fold(0.0, f64::max);
    Ok(ZerothLawTable { rows, a0, c0, monotone, max_viscous_change })
}

pub(crate) fn cascade_output(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let (table, snaps) = run_cascade(cfg)?;
    let mut m = Manifest::new(cfg);
    for r in &table.rows {
        m.grid(r.grid);
        m.constant(&format!("m_{}", r.n), r.m_n);
        m.constant(&format!("ratio_{}", r.n), r.ratio);
    }
    m.constant("rate", table.rate);
    m.constant("min_increase", table.min_increase);
    m.flag("monotone", table.monotone);
    let mut out = ExperimentOutput::new(m);
    out.add_table("cascade.csv", table.to_table());
    if cfg.write_snapshots {
        for s in snaps {
            out.add_snapshot(format!("{}.vcl", s.name), s);
        }
    }
    Ok(out)
}

pub(crate) fn zeroth_law_output(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let table = run_zeroth_law(cfg)?;
    let mut m = Manifest::new(cfg);
    for r in &table.rows {
        m.grid(r.grid);
        if r.underresolved {
            m.notes.push(format!(
                "level {}: nu_n = {:e} is below the resolvable viscosity; the inviscid run stands in",
                r.n, r.nu_n
            ));
        }
    }
    m.constant("a0", table.a0);
    m.constant("c0", table.c0);
    m.constant("max_viscous_change", table.max_viscous_change);
    m.flag("monotone", table.monotone);
    m.flag("viscosity_underresolved", table.rows.iter().any(|r| r.underresolved));
    let mut out = ExperimentOutput::new(m);
    out.add_table("zeroth_law.csv", table.to_table());
    Ok(out)
}
