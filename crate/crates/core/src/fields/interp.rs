//! Off-grid evaluation of periodic fields.
//!
//! Small point sets use exact trigonometric summation; large sets fall back
//! to a separable six-point Lagrange stencil (fifth degree).

use num_complex::Complex64;

use super::grid::{wrap, Grid2D};
use super::scalar::ScalarField2D;
use super::vector::VectorField2D;

/// Point counts up to this size are evaluated by direct spectral summation.
pub const SPECTRAL_POINT_LIMIT: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interpolation {
    Spectral,
    LocalPolynomial,
}

impl Interpolation {
    pub fn for_point_count(count: usize) -> Self {
        if count <= SPECTRAL_POINT_LIMIT {
            Interpolation::Spectral
        } else {
            Interpolation::LocalPolynomial
        }
    }
}

/// Fourier basis values at one physical point; reusable across fields that
/// share the grid.
pub struct PointBasis {
    e1: Vec<Complex64>,
    e2: Vec<Complex64>,
}

impl PointBasis {
    pub fn new(grid: Grid2D, x: [f64; 2]) -> Self {
        let n = grid.n();
        let phase = |xc: f64| -> Vec<Complex64> {
            let s = wrap(xc) + 1.0;
            (0..n)
                .map(|i| {
                    let a = grid.wavenumber(i) * s;
                    Complex64::new(a.cos(), a.sin())
                })
                .collect()
        };
        PointBasis { e1: phase(x[0]), e2: phase(x[1]) }
    }

    /// Evaluate a field given by its normalized spectrum.
    pub fn eval(&self, coeffs: &ndarray::Array2<Complex64>) -> f64 {
        let mut total = Complex64::new(0.0, 0.0);
        for (i, row) in coeffs.outer_iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, e) in row.iter().zip(self.e2.iter()) {
                acc += c * e;
            }
            total += acc * self.e1[i];
        }
        total.re
    }

    /// Value and both partial derivatives of a field given by its spectrum.
    pub fn eval_with_gradient(&self, grid: Grid2D, coeffs: &ndarray::Array2<Complex64>) -> [f64; 3] {
        let k = grid.derivative_wavenumbers();
        let mut v = Complex64::new(0.0, 0.0);
        let mut d1 = Complex64::new(0.0, 0.0);
        let mut d2 = Complex64::new(0.0, 0.0);
        for (i, row) in coeffs.outer_iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut acc2 = Complex64::new(0.0, 0.0);
            for ((c, e), &kj) in row.iter().zip(self.e2.iter()).zip(&k) {
                let t = c * e;
                acc += t;
                acc2 += t * kj;
            }
            v += acc * self.e1[i];
            d1 += acc * self.e1[i] * k[i];
            d2 += acc2 * self.e1[i];
        }
        // d/dx of c e^{ikx} is i k c e^{ikx}: real part of i z is -Im z
        [v.re, -d1.im, -d2.im]
    }
}

/// Separable six-point Lagrange stencil around one physical point.
#[derive(Clone, Copy, Debug)]
pub struct Stencil {
    rows: [usize; 6],
    cols: [usize; 6],
    wr: [f64; 6],
    wc: [f64; 6],
}

impl Stencil {
    pub fn new(grid: Grid2D, x: [f64; 2]) -> Self {
        let n = grid.n() as i64;
        let h = grid.spacing();
        let locate = |xc: f64| {
            let s = (wrap(xc) + 1.0) / h;
            let i0 = s.floor();
            let w = lagrange_weights(s - i0);
            let mut idx = [0usize; 6];
            for (a, slot) in idx.iter_mut().enumerate() {
                *slot = (i0 as i64 + a as i64 - 2).rem_euclid(n) as usize;
            }
            (idx, w)
        };
        let (rows, wr) = locate(x[0]);
        let (cols, wc) = locate(x[1]);
        Stencil { rows, cols, wr, wc }
    }

    pub fn apply(&self, v: &ndarray::Array2<f64>) -> f64 {
        let mut total = 0.0;
        for (&i, wa) in self.rows.iter().zip(&self.wr) {
            let mut row = 0.0;
            for (&j, wb) in self.cols.iter().zip(&self.wc) {
                row += wb * v[[i, j]];
            }
            total += wa * row;
        }
        total
    }

    pub fn apply_complex(&self, v: &ndarray::Array2<Complex64>) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for (&i, wa) in self.rows.iter().zip(&self.wr) {
            let mut row = Complex64::new(0.0, 0.0);
            for (&j, wb) in self.cols.iter().zip(&self.wc) {
                row += v[[i, j]] * *wb;
            }
            total += row * *wa;
        }
        total
    }
}

fn lagrange_weights(frac: f64) -> [f64; 6] {
    let mut w = [0.0; 6];
    for (k, wk) in w.iter_mut().enumerate() {
        let xk = k as f64 - 2.0;
        let mut p = 1.0;
        for l in 0..6 {
            if l != k {
                let xl = l as f64 - 2.0;
                p *= (frac - xl) / (xk - xl);
            }
        }
        *wk = p;
    }
    w
}

fn local_eval(field: &ScalarField2D, x: [f64; 2]) -> f64 {
    Stencil::new(field.grid(), x).apply(field.values())
}

pub fn interpolate_with(field: &ScalarField2D, points: &[[f64; 2]], method: Interpolation) -> Vec<f64> {
    match method {
        Interpolation::Spectral => {
            let c = field.coefficients();
            points.iter().map(|&p| PointBasis::new(field.grid(), p).eval(c)).collect()
        }
        Interpolation::LocalPolynomial => points.iter().map(|&p| local_eval(field, p)).collect(),
    }
}

/// Evaluate a scalar field at arbitrary points (coordinates reduced mod 2).
pub fn interpolate(field: &ScalarField2D, points: &[[f64; 2]]) -> Vec<f64> {
    interpolate_with(field, points, Interpolation::for_point_count(points.len()))
}

pub fn interpolate_vector(field: &VectorField2D, points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let a = interpolate(&field.u1, points);
    let b = interpolate(&field.u2, points);
    a.into_iter().zip(b).map(|(x, y)| [x, y]).collect()
}
