use std::sync::OnceLock;

use ndarray::{Array2, Zip};
use num_complex::Complex64;

use super::fft;
use super::grid::Grid2D;

/// Real grid function on the torus with a lazily synchronized spectral view.
///
/// Spectral coefficients are normalized so that
/// `f(x) = sum_m c_m exp(i pi m . (x + 1))`; the `+1` is the offset of
/// node 0 from the origin. Either view may be supplied at construction,
/// the other is computed on first use.
#[derive(Clone, Debug)]
pub struct ScalarField2D {
    grid: Grid2D,
    values: OnceLock<Array2<f64>>,
    coeffs: OnceLock<Array2<Complex64>>,
}

impl ScalarField2D {
    pub fn from_values(grid: Grid2D, values: Array2<f64>) -> Self {
        assert_eq!(values.dim(), (grid.n(), grid.n()), "field shape must match grid");
        let cell = OnceLock::new();
        let _ = cell.set(values.as_standard_layout().into_owned());
        ScalarField2D { grid, values: cell, coeffs: OnceLock::new() }
    }

    /// Build from Hermitian spectral coefficients; any anti-Hermitian residue
    /// is discarded when the physical view is produced.
    pub fn from_coefficients(grid: Grid2D, coeffs: Array2<Complex64>) -> Self {
        assert_eq!(coeffs.dim(), (grid.n(), grid.n()), "spectrum shape must match grid");
        let cell = OnceLock::new();
        let _ = cell.set(coeffs.as_standard_layout().into_owned());
        ScalarField2D { grid, values: OnceLock::new(), coeffs: cell }
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let values = Array2::from_shape_fn((n, n), |(i, j)| f(grid.coord(i), grid.coord(j)));
        Self::from_values(grid, values)
    }

    pub fn zeros(grid: Grid2D) -> Self {
        Self::from_values(grid, Array2::zeros((grid.n(), grid.n())))
    }

    pub fn constant(grid: Grid2D, c: f64) -> Self {
        Self::from_values(grid, Array2::from_elem((grid.n(), grid.n()), c))
    }

    #[inline]
    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        self.values.get_or_init(|| {
            let c = self.coeffs.get().expect("field has neither view");
            let mut buf = c.clone();
            fft::plan(self.grid.n()).inverse(&mut buf);
            buf.mapv(|z| z.re)
        })
    }

    pub fn coefficients(&self) -> &Array2<Complex64> {
        self.coeffs.get_or_init(|| {
            let v = self.values.get().expect("field has neither view");
            let n = self.grid.n();
            let mut buf = v.mapv(|x| Complex64::new(x, 0.0));
            fft::plan(n).forward(&mut buf);
            let norm = 1.0 / (n * n) as f64;
            buf.mapv_inplace(|z| z * norm);
            buf
        })
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values();
        self.values.into_inner().expect("values just computed")
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values()[[i, j]]
    }

    /// Spatial mean over the torus (the zero Fourier mode).
    pub fn mean(&self) -> f64 {
        match self.coeffs.get() {
            Some(c) => c[[0, 0]].re,
            None => self.values().mean().unwrap_or(0.0),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `int |f|^2` over the torus via Parseval.
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.area() * self.coefficients().iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// `int f g` over the torus.
    pub fn inner(&self, other: &ScalarField2D) -> f64 {
        let h = self.grid.spacing();
        h * h * Zip::from(self.values()).and(other.values()).fold(0.0, |acc, a, b| acc + a * b)
    }

    /// Spectral partial derivative along axis 0 (x1) or 1 (x2).
    pub fn derivative(&self, axis: usize) -> ScalarField2D {
        let k = self.grid.derivative_wavenumbers();
        let c = self.coefficients();
        let out = Array2::from_shape_fn(c.dim(), |(i, j)| {
            let kk = if axis == 0 { k[i] } else { k[j] };
            c[[i, j]] * Complex64::new(0.0, kk)
        });
        ScalarField2D::from_coefficients(self.grid, out)
    }

    pub fn gradient(&self) -> (ScalarField2D, ScalarField2D) {
        (self.derivative(0), self.derivative(1))
    }

    /// Project onto the modes retained by the 2/3 rule.
    pub fn dealiased(&self) -> ScalarField2D {
        let g = self.grid;
        let c = self.coefficients();
        let out = Array2::from_shape_fn(c.dim(), |(i, j)| {
            if g.is_retained(i) && g.is_retained(j) {
                c[[i, j]]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        ScalarField2D::from_coefficients(g, out)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField2D {
        ScalarField2D::from_values(self.grid, self.values().mapv(f))
    }

    pub fn scaled(&self, s: f64) -> ScalarField2D {
        match self.coeffs.get() {
            Some(c) if self.values.get().is_none() => ScalarField2D::from_coefficients(self.grid, c.mapv(|z| z * s)),
            _ => self.map(|v| v * s),
        }
    }

    pub fn zip_with(&self, other: &ScalarField2D, f: impl Fn(f64, f64) -> f64) -> ScalarField2D {
        let mut out = self.values().clone();
        Zip::from(&mut out).and(other.values()).for_each(|a, &b| *a = f(*a, b));
        ScalarField2D::from_values(self.grid, out)
    }

    pub fn add(&self, other: &ScalarField2D) -> ScalarField2D {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ScalarField2D) -> ScalarField2D {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &ScalarField2D) -> ScalarField2D {
        self.zip_with(other, |a, b| a * b)
    }

    /// Largest |f(x) + f(R x)| over the grid, where R reflects the given axis
    /// through the origin. Zero for fields odd in that axis.
    pub fn odd_residual(&self, axis: usize) -> f64 {
        let n = self.grid.n();
        let v = self.values();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let (ri, rj) = if axis == 0 { ((n - i) % n, j) } else { (i, (n - j) % n) };
                worst = worst.max((v[[i, j]] + v[[ri, rj]]).abs());
            }
        }
        worst
    }
}
