//! The classical vortex-tube-in-strain picture of the forward cascade.
//!
//! Small scales: a Rankine-like tube along `x3`, rigid inside `r <= 1/k`
//! and irrotational outside. Large scales: the strain `(0, -x2, x3)`.
//! Gradients are taken by complex-step differentiation of the closed forms,
//! so each branch is differentiated exactly even next to `r = 1/k`.

use num_complex::Complex64;
use serde::Serialize;

use super::filter::FilterSpec;

pub type Mat3 = [[f64; 3]; 3];

const STEP: f64 = 1e-30;

fn small_scale(x: [Complex64; 3], k: f64, r: f64) -> [Complex64; 3] {
    let z = Complex64::new(0.0, 0.0);
    let v = [x[1], -x[0], z];
    if r <= 1.0 / k {
        v
    } else {
        let s = (x[0] * x[0] + x[1] * x[1]) * (k * k);
        [v[0] / s, v[1] / s, z]
    }
}

fn large_scale(x: [Complex64; 3]) -> [Complex64; 3] {
    [Complex64::new(0.0, 0.0), -x[1], x[2]]
}

/// `J[i][h] = d_h f_i` at a real point.
fn jacobian(f: impl Fn([Complex64; 3]) -> [Complex64; 3], x: [f64; 3]) -> Mat3 {
    let mut j = [[0.0; 3]; 3];
    for h in 0..3 {
        let mut z = x.map(|v| Complex64::new(v, 0.0));
        z[h].im = STEP;
        let v = f(z);
        for i in 0..3 {
            j[i][h] = v[i].im / STEP;
        }
    }
    j
}

/// First-order stress of the small-scale tube at `(x1, x2, 0)`.
pub fn model_stress(x: [f64; 2], k: f64, c_k: f64) -> Mat3 {
    let r = x[0].hypot(x[1]);
    let g = jacobian(|z| small_scale(z, k, r), [x[0], x[1], 0.0]);
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = c_k * (0..3).map(|h| g[i][h] * g[j][h]).sum::<f64>();
        }
    }
    t
}

/// Symmetric gradient of the large-scale strain.
pub fn model_strain(x: [f64; 2]) -> Mat3 {
    let g = jacobian(large_scale, [x[0], x[1], 0.0]);
    let mut s = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            s[i][j] = 0.5 * (g[i][j] + g[j][i]);
        }
    }
    s
}

pub fn contract3(a: &Mat3, b: &Mat3) -> f64 {
    (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| a[i][j] * b[i][j]).sum()
}

/// `Pi_K = -tau : S_bar` of the model pair.
pub fn model_flux(x: [f64; 2], k: f64, c_k: f64) -> f64 {
    -contract3(&model_stress(x, k, c_k), &model_strain(x))
}

/// The profile `C_K` or `C_K / (r k)^4` predicted for the flux.
pub fn model_flux_expected(r: f64, k: f64, c_k: f64) -> f64 {
    if r <= 1.0 / k {
        c_k
    } else {
        c_k / (r * k).powi(4)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelRow {
    pub r: f64,
    pub pi: f64,
    pub expected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelFlowReport {
    pub k: f64,
    pub filter_k: f64,
    pub c_k: f64,
    pub points: usize,
    pub min_pi: f64,
    pub all_positive: bool,
    /// Largest `|Pi - expected| / expected` over the grid.
    pub max_rel_error: f64,
    /// Samples on the diagonal at `r k` in {1/4, 1/2, 1, 2, 4}.
    pub rows: Vec<ModelRow>,
}

/// Evaluate the model on an `m x m` grid covering `[-4/k, 4/k]^2`.
pub fn model_flow_report(k: f64, spec: FilterSpec, m: usize) -> ModelFlowReport {
    let c_k = spec.second_moment();
    let extent = 4.0 / k;
    let mut min_pi = f64::INFINITY;
    let mut max_rel: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            let x = [
                -extent + 2.0 * extent * (a as f64 + 0.5) / m as f64,
                -extent + 2.0 * extent * (b as f64 + 0.5) / m as f64,
            ];
            let pi = model_flux(x, k, c_k);
            let want = model_flux_expected(x[0].hypot(x[1]), k, c_k);
            min_pi = min_pi.min(pi);
            max_rel = max_rel.max(((pi - want) / want).abs());
        }
    }
    let rows = [0.25, 0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|&rk| {
            let r = rk / k;
            let x = [r / 2f64.sqrt(), r / 2f64.sqrt()];
            ModelRow { r, pi: model_flux(x, k, c_k), expected: model_flux_expected(r, k, c_k) }
        })
        .collect();
    ModelFlowReport {
        k,
        filter_k: spec.k,
        c_k,
        points: m * m,
        min_pi,
        all_positive: min_pi > 0.0,
        max_rel_error: max_rel,
        rows,
    }
}
