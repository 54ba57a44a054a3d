//! Hölder and bubble-shape checks on evolved data.

use serde::{Deserialize, Serialize};

use super::markers::FlowMarker;
use crate::error::Result;
use crate::fields::{interpolate_with, Interpolation, ScalarField2D};
use crate::initial_data::{bubble_term, BubbleCoefficients, RectangleLadder};

/// Smallest `c` per pair with
/// `|x - x'|^(1 + c t W) <= |eta - eta'| <= |x - x'|^(1 - c t W)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YudovichReport {
    pub t: f64,
    pub c: Vec<f64>,
    pub c_max: f64,
    /// Pairs further apart than 1/2 at time 0, left out.
    pub skipped: usize,
}

/// Fit the Hölder exponent constant for separated pairs. `omega_sup` is
/// `|omega_0|_inf` (the `W` above).
pub fn yudovich_fit(pairs: &[([f64; 2], [f64; 2], [f64; 2], [f64; 2])], t: f64, omega_sup: f64) -> YudovichReport {
    let mut c = Vec::with_capacity(pairs.len());
    let mut skipped = 0;
    for &(x, xp, e, ep) in pairs {
        let d0 = (x[0] - xp[0]).hypot(x[1] - xp[1]);
        let d1 = (e[0] - ep[0]).hypot(e[1] - ep[1]);
        if !(d0 > 0.0 && d0 <= 0.5) {
            skipped += 1;
            continue;
        }
        let scale = t * omega_sup;
        let l0 = d0.ln();
        let v = if scale > 0.0 { (d1.ln() - l0).abs() / (scale * l0.abs()) } else { 0.0 };
        c.push(v);
    }
    let c_max = c.iter().copied().fold(0.0, f64::max);
    YudovichReport { t, c, c_max, skipped }
}

/// [`yudovich_fit`] on pairs of markers given by index.
pub fn yudovich_check(markers: &[FlowMarker], pairs: &[(usize, usize)], t: f64, omega_sup: f64) -> YudovichReport {
    let data: Vec<_> =
        pairs.iter().map(|&(a, b)| (markers[a].x0, markers[b].x0, markers[a].eta, markers[b].eta)).collect();
    yudovich_fit(&data, t, omega_sup)
}

/// The `k`-th bubble `a_k phi_0(2^k x)` as a separate field, for use as a
/// passive tracer.
pub fn bubble_tracers(grid: crate::fields::Grid2D, coeffs: &BubbleCoefficients) -> Result<Vec<ScalarField2D>> {
    (1..=coeffs.len()).map(|k| Ok(bubble_term(grid, k)?.scaled(coeffs.a(k)))).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BubbleShape {
    pub k: usize,
    pub t: f64,
    pub core_ok: bool,
    pub support_ok: bool,
    /// `min omega / a_k` over the core samples.
    pub core_min: f64,
    /// `max |omega| / a_k` on first-quadrant nodes outside the annulus.
    pub leak_max: f64,
}

/// Relative tolerance of both shape tests.
pub const SHAPE_TOLERANCE: f64 = 1e-3;

/// Check the `k`-th bubble field (a tracer started from `a_k phi_k`).
///
/// The core test uses grid nodes inside the shrunken inner rectangle plus a
/// 9x9 spectral sample of it; the support test scans first-quadrant nodes.
pub fn bubble_shape_check(bubble: &ScalarField2D, a_k: f64, ladder: &RectangleLadder, k: usize, t: f64) -> BubbleShape {
    let g = bubble.grid();
    let core = ladder.core_k(k);
    let annulus = ladder.annulus_k(k);
    let mut core_min = f64::INFINITY;
    let mut leak: f64 = 0.0;
    let v = bubble.values();
    let o = g.origin_index();
    for i in o + 1..g.n() {
        let x1 = g.coord(i);
        for j in o + 1..g.n() {
            let p = [x1, g.coord(j)];
            let w = v[[i, j]];
            if core.contains(p) {
                core_min = core_min.min(w);
            }
            let r = x1.hypot(p[1]);
            if !(r > annulus.r1 && r < annulus.r2) {
                leak = leak.max(w.abs());
            }
        }
    }
    for w in interpolate_with(bubble, &core.sample_points(9), Interpolation::Spectral) {
        core_min = core_min.min(w);
    }
    let core_min = core_min / a_k;
    let leak_max = leak / a_k;
    BubbleShape {
        k,
        t,
        core_ok: core_min >= 1.0 - SHAPE_TOLERANCE,
        support_ok: leak_max <= SHAPE_TOLERANCE,
        core_min,
        leak_max,
    }
}
