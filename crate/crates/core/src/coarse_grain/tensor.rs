use serde::Serialize;

use crate::fields::{Grid2D, ScalarField2D};

/// 2x2 tensor field on the torus, stored by component.
#[derive(Clone, Debug)]
pub struct TensorField2D {
    pub t11: ScalarField2D,
    pub t12: ScalarField2D,
    pub t21: ScalarField2D,
    pub t22: ScalarField2D,
    pub symmetric: bool,
}

/// Pointwise extremes of a tensor field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenRange {
    pub min: f64,
    pub max: f64,
}

impl TensorField2D {
    pub fn new(t11: ScalarField2D, t12: ScalarField2D, t21: ScalarField2D, t22: ScalarField2D) -> Self {
        TensorField2D { t11, t12, t21, t22, symmetric: false }
    }

    pub fn symmetric(t11: ScalarField2D, t12: ScalarField2D, t22: ScalarField2D) -> Self {
        TensorField2D { t21: t12.clone(), t11, t12, t22, symmetric: true }
    }

    pub fn zeros(grid: Grid2D) -> Self {
        let z = ScalarField2D::zeros(grid);
        Self::symmetric(z.clone(), z.clone(), z)
    }

    pub fn grid(&self) -> Grid2D {
        self.t11.grid()
    }

    pub fn component(&self, i: usize, j: usize) -> &ScalarField2D {
        match (i, j) {
            (0, 0) => &self.t11,
            (0, 1) => &self.t12,
            (1, 0) => &self.t21,
            (1, 1) => &self.t22,
            _ => panic!("tensor index ({i}, {j}) out of range"),
        }
    }

    /// `max |t12 - t21|`.
    pub fn asymmetry(&self) -> f64 {
        self.t12.sub(&self.t21).max_abs()
    }

    pub fn trace(&self) -> ScalarField2D {
        self.t11.add(&self.t22)
    }

    /// Pointwise `A : B = sum_ij A_ij B_ij`.
    pub fn contract(&self, other: &TensorField2D) -> ScalarField2D {
        let mut acc = self.t11.mul(&other.t11);
        for (a, b) in [(&self.t12, &other.t12), (&self.t21, &other.t21), (&self.t22, &other.t22)] {
            acc = acc.add(&a.mul(b));
        }
        acc
    }

    pub fn scaled(&self, s: f64) -> TensorField2D {
        TensorField2D {
            t11: self.t11.scaled(s),
            t12: self.t12.scaled(s),
            t21: self.t21.scaled(s),
            t22: self.t22.scaled(s),
            symmetric: self.symmetric,
        }
    }

    pub fn sub(&self, o: &TensorField2D) -> TensorField2D {
        TensorField2D {
            t11: self.t11.sub(&o.t11),
            t12: self.t12.sub(&o.t12),
            t21: self.t21.sub(&o.t21),
            t22: self.t22.sub(&o.t22),
            symmetric: self.symmetric && o.symmetric,
        }
    }

    /// Range of the eigenvalues of the symmetric part over all nodes.
    pub fn eigenvalue_range(&self) -> EigenRange {
        let (a, b, c, d) = (self.t11.values(), self.t12.values(), self.t21.values(), self.t22.values());
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for (((&p, &q), &r), &s) in a.iter().zip(b.iter()).zip(c.iter()).zip(d.iter()) {
            let off = 0.5 * (q + r);
            let mean = 0.5 * (p + s);
            let rad = (0.25 * (p - s).powi(2) + off * off).sqrt();
            min = min.min(mean - rad);
            max = max.max(mean + rad);
        }
        EigenRange { min, max }
    }

    pub fn max_abs(&self) -> f64 {
        [&self.t11, &self.t12, &self.t21, &self.t22].iter().map(|f| f.max_abs()).fold(0.0, f64::max)
    }
}
