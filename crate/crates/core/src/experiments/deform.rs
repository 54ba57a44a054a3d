//! Lagrangian deformation on Bahouri-Chemin data and on dyadic bubbles.
//!
//! `|D eta|` is the Frobenius norm throughout, so the identity map has
//! `|D eta| = sqrt 2`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cascade::check_level;
use super::config::{ExperimentConfig, MAX_LEVEL};
use super::driver::{run_level, LevelJob, LevelOutcome};
use super::output::{fmt, ExperimentOutput, Manifest, Table};
use crate::cascade_mc::fit_slope;
use crate::error::{Error, Result};
use crate::fields::{Grid2D, ScalarField2D};
use crate::initial_data::{bourgain_li_bubbles, smoothed_bahouri_chemin, BubbleCoefficients, RectangleLadder};
use crate::lagrangian::{
    bubble_shape_check, bubble_tracers, operator_norm, seed_markers, strain_at_origin, BubbleShape, FlowMarker,
    MarkerSeed, Mat2,
};

pub const NORM_NOTE: &str = "|D eta| is the Frobenius norm";

pub fn frobenius(d: &Mat2) -> f64 {
    (d[0][0].powi(2) + d[0][1].powi(2) + d[1][0].powi(2) + d[1][1].powi(2)).sqrt()
}

/// Markers: the origin, then two rings of eight on the ball of radius `r`.
pub fn ball_markers(r: f64) -> Vec<[f64; 2]> {
    let mut pts = vec![[0.0, 0.0]];
    for rad in [0.5 * r, r] {
        for a in 0..8 {
            let th = (a as f64 + 0.5) * std::f64::consts::FRAC_PI_4;
            pts.push([rad * th.cos(), rad * th.sin()]);
        }
    }
    pts
}

/// Marker rows `t, marker-id, eta1, eta2, D11, D12, D21, D22, detD, I(t,0)`.
pub fn marker_table(markers: &[FlowMarker], key: &[(f64, f64)]) -> Table {
    let mut t = Table::new(&["t", "marker-id", "eta1", "eta2", "D11", "D12", "D21", "D22", "detD", "I(t,0)"]);
    let steps = markers.iter().map(|m| m.history.len()).max().unwrap_or(0);
    for s in 0..steps {
        for m in markers {
            let Some(h) = m.history.get(s) else { continue };
            let i0 = key.get(s).filter(|(tk, _)| (tk - h.t).abs() < 1e-12).map_or(f64::NAN, |k| k.1);
            t.push(vec![
                fmt(h.t),
                m.id.to_string(),
                fmt(h.eta[0]),
                fmt(h.eta[1]),
                fmt(h.d[0][0]),
                fmt(h.d[0][1]),
                fmt(h.d[1][0]),
                fmt(h.d[1][1]),
                fmt(h.det),
                fmt(i0),
            ]);
        }
    }
    t.note(NORM_NOTE);
    t
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformRow {
    pub n: u32,
    pub grid: usize,
    pub t: f64,
    pub ball_radius: f64,
    /// Smallest `|D eta(t, x)|` over the ball markers.
    pub inf_ball: f64,
    pub frob_origin: f64,
    /// `int_0^t I(s, 0) ds`.
    pub key_integral: f64,
    /// Diagonal-dominance constant `d_1 u_1(0, 0) / I(0, 0)` at `t = 0`.
    pub c: f64,
    /// `|D eta(t, 0)| / exp(c int_0^t I)`.
    pub key_ratio: f64,
    /// Same ratio, extremal over the run.
    pub key_ratio_min: f64,
    pub key_ratio_max: f64,
    pub det_drift: f64,
    /// `max_t ln |D eta(t, .)|_op / (n t)` over the markers.
    pub upper_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformReport {
    pub rows: Vec<DeformRow>,
    /// Slope of `ln inf_ball` against `n`.
    pub slope: f64,
}

impl DeformReport {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&[
            "n",
            "grid",
            "t",
            "ball_radius",
            "inf_ball",
            "frob_origin",
            "key_integral",
            "c",
            "key_ratio",
            "key_ratio_min",
            "key_ratio_max",
            "det_drift",
            "upper_rate",
        ]);
        for r in &self.rows {
            t.push(vec![
                r.n.to_string(),
                r.grid.to_string(),
                fmt(r.t),
                fmt(r.ball_radius),
                fmt(r.inf_ball),
                fmt(r.frob_origin),
                fmt(r.key_integral),
                fmt(r.c),
                fmt(r.key_ratio),
                fmt(r.key_ratio_min),
                fmt(r.key_ratio_max),
                fmt(r.det_drift),
                fmt(r.upper_rate),
            ]);
        }
        t.note(format!("slope={}", fmt(self.slope)));
        t.note(NORM_NOTE);
        t
    }
}

fn det_drift(markers: &[FlowMarker]) -> f64 {
    markers.iter().flat_map(|m| &m.history).map(|h| (h.det - 1.0).abs()).fold(0.0, f64::max)
}

fn upper_rate(markers: &[FlowMarker], n: u32) -> f64 {
    markers
        .iter()
        .flat_map(|m| &m.history)
        .filter(|h| h.t > 0.0)
        .map(|h| operator_norm(&h.d).ln() / (n as f64 * h.t))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn deform_row(n: u32, grid: usize, radius: f64, ball: usize, strain_0: f64, out: &LevelOutcome) -> DeformRow {
    let markers = out.markers.as_ref().expect("markers were attached").markers();
    let origin = &markers[0];
    let last = origin.history.last().expect("history is recorded");
    let integ = out.integrated_key();
    let c = strain_0 / out.key[0].1;
    let ratios: Vec<f64> = origin.history.iter().zip(&integ).map(|(h, ik)| frobenius(&h.d) / (c * ik).exp()).collect();
    let key_integral = *integ.last().unwrap_or(&0.0);
    DeformRow {
        n,
        grid,
        t: last.t,
        ball_radius: radius,
        inf_ball: markers[..ball].iter().map(|m| frobenius(&m.d)).fold(f64::INFINITY, f64::min),
        frob_origin: frobenius(&last.d),
        key_integral,
        c,
        key_ratio: frobenius(&last.d) / (c * key_integral).exp(),
        key_ratio_min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        key_ratio_max: ratios.iter().copied().fold(0.0, f64::max),
        det_drift: det_drift(markers),
        upper_rate: upper_rate(markers, n),
    }
}

/// Markers on `B(0, 2^-n)` in Bahouri-Chemin flow up to `delta`.
pub fn run_deform_bc(cfg: &ExperimentConfig) -> Result<(DeformReport, Vec<(u32, Table)>)> {
    cfg.validate()?;
    let levels: Vec<u32> = cfg.level_range().collect();
    for &n in &levels {
        check_level(n, cfg.grid_for(n))?;
    }
    let job = |&n: &u32| -> Result<(DeformRow, Table)> {
        let g = check_level(n, cfg.grid_for(n))?;
        let omega = smoothed_bahouri_chemin(g, n)?;
        let radius = 0.5f64.powi(n as i32);
        let mut pts = ball_markers(radius);
        let ball = pts.len();
        pts.extend(cfg.markers.iter().flat_map(|s| s.points()));
        let markers = seed_markers(&[MarkerSeed::Points { points: pts }]);
        let strain_0 = strain_at_origin(&omega.dealiased())[0];
        let mut job = LevelJob::new(omega, ScalarField2D::zeros(g), cfg.nu.unwrap_or(0.0), cfg.delta, cfg.cfl);
        job.markers = Some(markers);
        job.track_key = true;
        let out = run_level(job)?;
        let row = deform_row(n, g.n(), radius, ball, strain_0, &out);
        let table = marker_table(out.markers.as_ref().expect("markers").markers(), &out.key);
        Ok((row, table))
    };
    let results: Vec<(DeformRow, Table)> =
        crate::threads::install(|| levels.par_iter().map(job).collect::<Result<Vec<_>>>())?;
    let (rows, tables): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let slope = if rows.len() >= 2 {
        let x: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.inf_ball.ln()).collect();
        fit_slope(&x, &y, &vec![0.0; x.len()]).0
    } else {
        f64::NAN
    };
    Ok((DeformReport { rows, slope }, levels.into_iter().zip(tables).collect()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BubbleRow {
    pub n: usize,
    pub grid: usize,
    pub s_n: f64,
    /// `S_n^(-1/2)`.
    pub t: f64,
    pub frob_origin: f64,
    pub op_origin: f64,
    pub key_integral: f64,
    pub det_drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BubbleReport {
    pub rows: Vec<BubbleRow>,
    /// Slope of `ln |D eta(t_n, 0)|` against `ln S_n`.
    pub slope: f64,
    pub monotone: bool,
    pub shapes: Vec<BubbleShape>,
    /// The same checks on the projected tracers at `t = 0`: the part of any
    /// failure owed to the grid rather than to the flow.
    pub baseline: Vec<BubbleShape>,
    pub shape_grid: usize,
}

impl BubbleReport {
    pub fn shapes_pass(&self) -> bool {
        !self.shapes.is_empty() && self.shapes.iter().all(|s| s.core_ok && s.support_ok)
    }

    /// Largest loss of core value or gain of leakage since `t = 0`.
    pub fn dynamic_deviation(&self) -> f64 {
        self.shapes
            .iter()
            .zip(&self.baseline)
            .map(|(s, b)| (b.core_min - s.core_min).max(s.leak_max - b.leak_max))
            .fold(0.0, f64::max)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["n", "grid", "s_n", "t", "frob_origin", "op_origin", "key_integral", "det_drift"]);
        for r in &self.rows {
            t.push(vec![
                r.n.to_string(),
                r.grid.to_string(),
                fmt(r.s_n),
                fmt(r.t),
                fmt(r.frob_origin),
                fmt(r.op_origin),
                fmt(r.key_integral),
                fmt(r.det_drift),
            ]);
        }
        t.note(format!("slope={} monotone={}", fmt(self.slope), self.monotone));
        t.note(NORM_NOTE);
        t
    }

    pub fn shape_table(&self) -> Table {
        let mut t =
            Table::new(&["k", "t", "core_ok", "support_ok", "core_min", "leak_max", "core_min_0", "leak_max_0"]);
        for (s, b) in self.shapes.iter().zip(&self.baseline) {
            t.push(vec![
                s.k.to_string(),
                fmt(s.t),
                (s.core_ok as u8).to_string(),
                (s.support_ok as u8).to_string(),
                fmt(s.core_min),
                fmt(s.leak_max),
                fmt(b.core_min),
                fmt(b.leak_max),
            ]);
        }
        t.note(format!(
            "grid={} pass={} dynamic_deviation={}",
            self.shape_grid,
            self.shapes_pass(),
            fmt(self.dynamic_deviation())
        ));
        t
    }
}

/// Grid of `n` bubbles: `2^(n+3)` unless overridden.
pub fn bubble_grid(cfg: &ExperimentConfig, n: u32) -> usize {
    cfg.grid.unwrap_or(1usize << (n + 3))
}

/// Bubbles with `a_k = 1`: deformation at the origin at `t = S_n^(-1/2)`,
/// plus shape checks of the first bubbles at `t = c1 / S_k`.
pub fn run_deform_bubbles(cfg: &ExperimentConfig) -> Result<BubbleReport> {
    cfg.validate()?;
    let levels: Vec<u32> = cfg.level_range().collect();
    let job = |&n: &u32| -> Result<BubbleRow> {
        let g = Grid2D::new(bubble_grid(cfg, n))?;
        let coeffs = BubbleCoefficients::ones(n as usize);
        let omega = bourgain_li_bubbles(g, &coeffs)?;
        let s_n = coeffs.partial_sum(n as usize);
        let t = s_n.powf(-0.5);
        let markers = seed_markers(&[MarkerSeed::Origin]);
        let mut job = LevelJob::new(omega, ScalarField2D::zeros(g), cfg.nu.unwrap_or(0.0), t, cfg.cfl);
        job.markers = Some(markers);
        job.track_key = true;
        let out = run_level(job)?;
        let ms = out.markers.as_ref().expect("markers").markers();
        Ok(BubbleRow {
            n: n as usize,
            grid: g.n(),
            s_n,
            t,
            frob_origin: frobenius(&ms[0].d),
            op_origin: operator_norm(&ms[0].d),
            key_integral: *out.integrated_key().last().unwrap_or(&0.0),
            det_drift: det_drift(ms),
        })
    };
    let mut rows: Vec<BubbleRow> = crate::threads::install(|| levels.par_iter().map(job).collect::<Result<Vec<_>>>())?;
    rows.sort_by_key(|r| r.n);
    let monotone = rows.windows(2).all(|w| w[1].frob_origin > w[0].frob_origin);
    let slope = if rows.len() >= 2 {
        let x: Vec<f64> = rows.iter().map(|r| r.s_n.ln()).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.frob_origin.ln()).collect();
        fit_slope(&x, &y, &vec![0.0; x.len()]).0
    } else {
        f64::NAN
    };
    let (shapes, baseline) = if cfg.shape_bubbles > 0 { bubble_shapes(cfg)? } else { Default::default() };
    Ok(BubbleReport { rows, slope, monotone, shapes, baseline, shape_grid: cfg.shape_grid })
}

/// Transport the first `shape_bubbles` bubbles as tracers and check each at
/// `t = c1 / S_k`; also returns the checks of the projected tracers at `t = 0`.
pub fn bubble_shapes(cfg: &ExperimentConfig) -> Result<(Vec<BubbleShape>, Vec<BubbleShape>)> {
    let g = Grid2D::new(cfg.shape_grid)?;
    let fit = (g.n().trailing_zeros() as usize).saturating_sub(3);
    let [_, n_max] = cfg.levels();
    let n = (n_max as usize).min(fit).max(cfg.shape_bubbles);
    if n > fit {
        return Err(Error::UnderResolved(format!("{n} bubbles do not fit on N = {}", g.n())));
    }
    let coeffs = BubbleCoefficients::ones(n);
    let omega = bourgain_li_bubbles(g, &coeffs)?;
    let tracers: Vec<ScalarField2D> = bubble_tracers(g, &coeffs)?.into_iter().take(cfg.shape_bubbles).collect();
    let mut when: Vec<(f64, usize)> =
        (1..=cfg.shape_bubbles).map(|k| (cfg.shape_c1 / coeffs.partial_sum(k), k)).collect();
    when.sort_by(|a, b| a.0.total_cmp(&b.0));
    let t_end = when.last().map_or(0.0, |w| w.0);
    let ladder = RectangleLadder::default();
    let baseline: Vec<BubbleShape> = tracers
        .iter()
        .enumerate()
        .map(|(i, tr)| bubble_shape_check(&tr.dealiased(), coeffs.a(i + 1), &ladder, i + 1, 0.0))
        .collect();
    let mut job = LevelJob::new(omega, ScalarField2D::zeros(g), 0.0, t_end, cfg.cfl);
    job.tracers = tracers;
    job.stops = when.iter().map(|w| w.0).collect();
    let out = run_level(job)?;
    let mut states: Vec<&crate::evolve::SimState> = out.captured.iter().collect();
    states.push(&out.final_state);
    let mut shapes: Vec<BubbleShape> = when
        .iter()
        .zip(states)
        .map(|(&(t, k), s)| bubble_shape_check(&s.tracers[k - 1], coeffs.a(k), &ladder, k, t))
        .collect();
    shapes.sort_by_key(|s| s.k);
    Ok((shapes, baseline))
}

pub(crate) fn deform_bc_output(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let (report, tables) = run_deform_bc(cfg)?;
    let mut m = Manifest::new(cfg);
    for r in &report.rows {
        m.grid(r.grid);
        m.constant(&format!("c_{}", r.n), r.c);
        m.constant(&format!("inf_ball_{}", r.n), r.inf_ball);
        m.constant(&format!("upper_rate_{}", r.n), r.upper_rate);
    }
    m.constant("slope", report.slope);
    m.notes.push(NORM_NOTE.into());
    let mut out = ExperimentOutput::new(m);
    out.add_table("deform_bc.csv", report.to_table());
    for (n, t) in tables {
        out.add_table(format!("deform_bc_n{n}.csv"), t);
    }
    Ok(out)
}

pub(crate) fn deform_bubbles_output(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let report = run_deform_bubbles(cfg)?;
    let mut m = Manifest::new(cfg);
    for r in &report.rows {
        m.grid(r.grid);
    }
    if !report.shapes.is_empty() {
        m.grid(report.shape_grid);
    }
    m.constant("slope", report.slope);
    m.constant("shape_c1", cfg.shape_c1);
    m.flag("monotone", report.monotone);
    m.flag("shapes_pass", report.shapes_pass());
    m.constant("shape_dynamic_deviation", report.dynamic_deviation());
    m.notes.push(NORM_NOTE.into());
    let mut out = ExperimentOutput::new(m);
    out.add_table("deform_bubbles.csv", report.to_table());
    if !report.shapes.is_empty() {
        out.add_table("bubble_shapes.csv", report.shape_table());
    }
    Ok(out)
}

/// Large-scale data of a single deformation run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeformData {
    Bc,
    Bubbles,
}

/// One deformation run with caller-chosen markers: Bahouri-Chemin data up to
/// `t_end`, or `n` unit bubbles up to `S_n^(-1/2)` when `t_end` is `None`.
pub fn deform_markers(
    data: DeformData,
    n: u32,
    grid: Option<usize>,
    t_end: Option<f64>,
    cfl: f64,
    seeds: &[MarkerSeed],
) -> Result<Table> {
    if n == 0 || n > MAX_LEVEL {
        return Err(Error::Config(format!("level must lie in [1, {MAX_LEVEL}], got {n}")));
    }
    let (g, omega, horizon) = match data {
        DeformData::Bc => {
            let g = check_level(n, grid.unwrap_or(1usize << (n + 4)))?;
            (g, smoothed_bahouri_chemin(g, n)?, t_end.unwrap_or(0.25))
        }
        DeformData::Bubbles => {
            let g = Grid2D::new(grid.unwrap_or(1usize << (n + 3)))?;
            let coeffs = BubbleCoefficients::ones(n as usize);
            let t = t_end.unwrap_or_else(|| coeffs.partial_sum(n as usize).powf(-0.5));
            (g, bourgain_li_bubbles(g, &coeffs)?, t)
        }
    };
    if seeds.is_empty() {
        return Err(Error::Config("no markers requested".into()));
    }
    let mut job = LevelJob::new(omega, ScalarField2D::zeros(g), 0.0, horizon, cfl);
    job.markers = Some(seed_markers(seeds));
    job.track_key = true;
    let out = run_level(job)?;
    Ok(marker_table(out.markers.as_ref().expect("markers").markers(), &out.key))
}
