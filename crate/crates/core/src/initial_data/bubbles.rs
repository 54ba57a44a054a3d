//! The single odd-odd bubble and the dyadic bubble sums.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use super::profiles::{plateau_bump, BubbleProfile};
use crate::error::{Error, Result};
use crate::fields::{Grid2D, ScalarField2D};

/// Bubble of length scale `ell`: `omega(x) = zeta(x / ell)`.
pub fn single_bubble(grid: Grid2D, ell: f64) -> Result<ScalarField2D> {
    single_bubble_with(grid, ell, BubbleProfile::default())
}

pub fn single_bubble_with(grid: Grid2D, ell: f64, profile: BubbleProfile) -> Result<ScalarField2D> {
    if !(ell > 0.0) || 4.0 * ell >= 1.0 {
        return Err(Error::ScaleTooLarge { ell });
    }
    if ell < 2.0 * grid.spacing() {
        return Err(Error::UnderResolved(format!("bubble scale {ell} spans fewer than two cells at N = {}", grid.n())));
    }
    Ok(ScalarField2D::from_fn(grid, |x1, x2| profile.zeta(x1 / ell, x2 / ell)))
}

/// Non-negative dyadic bubble weights `a_1..a_n` with `sup a_k <= 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BubbleCoefficients {
    a: Vec<f64>,
}

impl BubbleCoefficients {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if let Some(bad) = a.iter().find(|&&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::Config(format!("bubble weight {bad} outside [0, 1]")));
        }
        Ok(BubbleCoefficients { a })
    }

    /// The L-infinity normalized choice `a_k = 1`.
    pub fn ones(n: usize) -> Self {
        BubbleCoefficients { a: vec![1.0; n] }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Weight of bubble `k` (1-based).
    pub fn a(&self, k: usize) -> f64 {
        self.a[k - 1]
    }

    pub fn weights(&self) -> &[f64] {
        &self.a
    }

    /// `S_k = 1 + a_1 + ... + a_k`, so `S_0 = 1`.
    pub fn partial_sum(&self, k: usize) -> f64 {
        1.0 + self.a[..k].iter().sum::<f64>()
    }

    pub fn partial_sums(&self) -> Vec<f64> {
        (0..=self.a.len()).map(|k| self.partial_sum(k)).collect()
    }
}

/// The unscaled odd-odd bump `phi_0`: signed copies of `bump` at `(+-1, +-1)`.
pub fn phi0(x1: f64, x2: f64, bump: &impl Fn(f64) -> f64) -> f64 {
    let mut s = 0.0;
    for e1 in [-1.0, 1.0] {
        for e2 in [-1.0, 1.0] {
            let r = ((x1 - e1).powi(2) + (x2 - e2).powi(2)).sqrt();
            if r < 0.25 {
                s += e1 * e2 * bump(r);
            }
        }
    }
    s
}

fn check_bubble_resolution(grid: Grid2D, n: usize) -> Result<()> {
    let limit = (grid.n() as f64).log2() as usize - 3;
    if n > limit {
        return Err(Error::UnderResolved(format!("{n} bubble levels need N >= 2^{} (have N = {})", n + 3, grid.n())));
    }
    Ok(())
}

/// `phi_k(x) = phi_0(2^k x)` on the grid.
pub fn bubble_term(grid: Grid2D, k: usize) -> Result<ScalarField2D> {
    check_bubble_resolution(grid, k)?;
    let s = (1u64 << k) as f64;
    Ok(ScalarField2D::from_fn(grid, |x1, x2| phi0(s * x1, s * x2, &plateau_bump)))
}

/// `sum_k a_k phi_0(2^k x)` with the default plateau bump.
pub fn bourgain_li_bubbles(grid: Grid2D, coeffs: &BubbleCoefficients) -> Result<ScalarField2D> {
    bourgain_li_bubbles_with(grid, coeffs, plateau_bump)
}

/// As [`bourgain_li_bubbles`] with a caller-supplied radial bump, which must
/// vanish for `r >= 1/4`.
pub fn bourgain_li_bubbles_with(
    grid: Grid2D,
    coeffs: &BubbleCoefficients,
    bump: impl Fn(f64) -> f64,
) -> Result<ScalarField2D> {
    check_bubble_resolution(grid, coeffs.len())?;
    Ok(ScalarField2D::from_fn(grid, |x1, x2| {
        let mut v = 0.0;
        for (i, &a) in coeffs.weights().iter().enumerate() {
            if a != 0.0 {
                let s = (1u64 << (i + 1)) as f64;
                v += a * phi0(s * x1, s * x2, &bump);
            }
        }
        v
    }))
}

/// Polar rectangle `{r1 < r < r2, th1 < theta < th2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarRect {
    pub r1: f64,
    pub r2: f64,
    pub th1: f64,
    pub th2: f64,
}

impl PolarRect {
    pub fn scaled(&self, s: f64) -> PolarRect {
        PolarRect { r1: self.r1 * s, r2: self.r2 * s, ..*self }
    }

    /// Middle third in both polar directions.
    pub fn inner_third(&self) -> PolarRect {
        let dr = (self.r2 - self.r1) / 3.0;
        let dt = (self.th2 - self.th1) / 3.0;
        PolarRect { r1: self.r1 + dr, r2: self.r2 - dr, th1: self.th1 + dt, th2: self.th2 - dt }
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        let r = x[0].hypot(x[1]);
        let th = x[1].atan2(x[0]);
        r > self.r1 && r < self.r2 && th > self.th1 && th < self.th2
    }

    pub fn contains_rect(&self, other: &PolarRect) -> bool {
        self.r1 <= other.r1 && other.r2 <= self.r2 && self.th1 <= other.th1 && other.th2 <= self.th2
    }

    /// `m x m` tensor grid of sample points including the edges.
    pub fn sample_points(&self, m: usize) -> Vec<[f64; 2]> {
        let mut pts = Vec::with_capacity(m * m);
        for i in 0..m {
            let r = self.r1 + (self.r2 - self.r1) * i as f64 / (m - 1) as f64;
            for j in 0..m {
                let th = self.th1 + (self.th2 - self.th1) * j as f64 / (m - 1) as f64;
                pts.push([r * th.cos(), r * th.sin()]);
            }
        }
        pts
    }
}

/// Nested polar rectangles around the first-quadrant bubble of `phi_0` and
/// their dyadic rescalings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectangleLadder {
    pub outer: PolarRect,
    pub inner: PolarRect,
}

impl Default for RectangleLadder {
    fn default() -> Self {
        RectangleLadder {
            outer: PolarRect { r1: 0.55, r2: 1.75, th1: 0.55, th2: 1.00 },
            inner: PolarRect { r1: 1.34, r2: 1.49, th1: 0.745, th2: 0.825 },
        }
    }
}

impl RectangleLadder {
    pub fn outer_k(&self, k: usize) -> PolarRect {
        self.outer.scaled(0.5f64.powi(k as i32))
    }

    pub fn inner_k(&self, k: usize) -> PolarRect {
        self.inner.scaled(0.5f64.powi(k as i32))
    }

    pub fn core_k(&self, k: usize) -> PolarRect {
        self.inner_k(k).inner_third()
    }

    /// The first-quadrant annulus `2^{-k-1} < r < 2^{1-k}`.
    pub fn annulus_k(&self, k: usize) -> PolarRect {
        let s = 0.5f64.powi(k as i32);
        PolarRect { r1: 0.5 * s, r2: 2.0 * s, th1: 0.0, th2: FRAC_PI_2 }
    }

    /// Ordering constraints of the ladder.
    pub fn validate(&self) -> Result<()> {
        let (o, i) = (self.outer, self.inner);
        let pi6 = std::f64::consts::PI / 6.0;
        let pi3 = std::f64::consts::PI / 3.0;
        let radial = 0.5 < o.r1 && o.r1 < i.r1 && i.r1 < i.r2 && i.r2 < o.r2 && o.r2 < 2.0;
        let angular = pi6 < o.th1 && o.th1 < i.th1 && i.th1 < i.th2 && i.th2 < o.th2 && o.th2 < pi3;
        if radial && angular {
            Ok(())
        } else {
            Err(Error::Config(format!("rectangle ladder out of order: {self:?}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bubble_values() {
        let g = Grid2D::new(256).unwrap();
        let ell = 0.125;
        let w = single_bubble(g, ell).unwrap();
        let c = g.origin_index();
        let off = (2.0 * ell / g.spacing()) as usize;
        assert!((w.at(c + off, c + off) - 1.0).abs() < 1e-15);
        assert!((w.at(c - off, c + off) + 1.0).abs() < 1e-15);
        assert!(w.mean().abs() < 1e-14);
        assert!(w.odd_residual(0) < 1e-14 && w.odd_residual(1) < 1e-14);
    }

    #[test]
    fn bubble_scale_limits() {
        let g = Grid2D::new(64).unwrap();
        assert!(matches!(single_bubble(g, 0.25), Err(Error::ScaleTooLarge { .. })));
        assert!(matches!(single_bubble(g, 0.01), Err(Error::UnderResolved(_))));
    }

    #[test]
    fn coefficient_sums() {
        let c = BubbleCoefficients::new(vec![1.0, 0.5, 0.0]).unwrap();
        assert_eq!(c.partial_sums(), vec![1.0, 2.0, 2.5, 2.5]);
        assert!(BubbleCoefficients::new(vec![1.5]).is_err());
        assert!(BubbleCoefficients::new(vec![-0.1]).is_err());
    }

    #[test]
    fn bubble_core_and_zero() {
        let g = Grid2D::new(128).unwrap();
        let w = bourgain_li_bubbles(g, &BubbleCoefficients::ones(3)).unwrap();
        let c = g.origin_index();
        let q = g.n() / 8;
        assert!((w.at(c + q, c + q) - 1.0).abs() < 1e-15);
        let z = bourgain_li_bubbles(g, &BubbleCoefficients::new(vec![0.0; 3]).unwrap()).unwrap();
        assert_eq!(z.max_abs(), 0.0);
        assert!(matches!(bourgain_li_bubbles(g, &BubbleCoefficients::ones(5)), Err(Error::UnderResolved(_))));
    }

    #[test]
    fn ladder_is_ordered_and_nested() {
        let l = RectangleLadder::default();
        l.validate().unwrap();
        for k in 0..4 {
            assert!(l.outer_k(k).contains_rect(&l.inner_k(k)));
            assert!(l.inner_k(k).contains_rect(&l.core_k(k)));
            assert!(l.annulus_k(k).contains_rect(&l.outer_k(k)));
        }
    }

    #[test]
    fn inner_rectangle_sits_on_the_plateau() {
        let l = RectangleLadder::default();
        for p in l.inner.sample_points(9) {
            assert_eq!(phi0(p[0], p[1], &plateau_bump), 1.0, "{p:?}");
        }
        let m = 400;
        for i in 0..m {
            for j in 0..m {
                let x = [0.5 + 1.5 * i as f64 / m as f64, 0.5 + 1.5 * j as f64 / m as f64];
                if phi0(x[0], x[1], &plateau_bump) != 0.0 && x[0] > 0.0 && x[1] > 0.0 {
                    assert!(l.outer.contains(x), "{x:?}");
                }
            }
        }
    }
}
