use super::grid::Grid2D;
use super::scalar::ScalarField2D;

/// Planar vector field `(u1, u2)`.
#[derive(Clone, Debug)]
pub struct VectorField2D {
    pub u1: ScalarField2D,
    pub u2: ScalarField2D,
}

impl VectorField2D {
    pub fn new(u1: ScalarField2D, u2: ScalarField2D) -> Self {
        assert_eq!(u1.grid(), u2.grid());
        VectorField2D { u1, u2 }
    }

    pub fn zeros(grid: Grid2D) -> Self {
        VectorField2D::new(ScalarField2D::zeros(grid), ScalarField2D::zeros(grid))
    }

    pub fn grid(&self) -> Grid2D {
        self.u1.grid()
    }

    pub fn component(&self, k: usize) -> &ScalarField2D {
        match k {
            0 => &self.u1,
            1 => &self.u2,
            _ => panic!("planar vector field has two components"),
        }
    }

    /// Pointwise sup of |u|.
    pub fn max_abs(&self) -> f64 {
        self.u1.values().iter().zip(self.u2.values().iter()).fold(0.0f64, |m, (a, b)| m.max(a.hypot(*b)))
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.u1.l2_norm_sq() + self.u2.l2_norm_sq()
    }

    /// Spectral divergence `d1 u1 + d2 u2`.
    pub fn divergence(&self) -> ScalarField2D {
        self.u1.derivative(0).add(&self.u2.derivative(1))
    }

    /// Scalar curl `d1 u2 - d2 u1`.
    pub fn curl(&self) -> ScalarField2D {
        self.u2.derivative(0).sub(&self.u1.derivative(1))
    }

    pub fn sub(&self, other: &VectorField2D) -> VectorField2D {
        VectorField2D::new(self.u1.sub(&other.u1), self.u2.sub(&other.u2))
    }

    pub fn add(&self, other: &VectorField2D) -> VectorField2D {
        VectorField2D::new(self.u1.add(&other.u1), self.u2.add(&other.u2))
    }

    pub fn scaled(&self, s: f64) -> VectorField2D {
        VectorField2D::new(self.u1.scaled(s), self.u2.scaled(s))
    }
}
