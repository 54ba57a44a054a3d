use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Side length of the periodic box; the torus is (R/2Z)^2 and every
/// wavenumber is an integer multiple of pi.
pub const PERIOD: f64 = 2.0;

/// Uniform N x N grid on the torus, with nodes at `-1 + j * 2/N`.
///
/// Node `N/2` sits on the origin, so odd-odd data vanish on the axes
/// exactly on the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid2D {
    n: usize,
}

impl Grid2D {
    /// Largest supported points per axis (one field is then 512 MiB).
    pub const MAX_POINTS: usize = 8192;

    pub fn new(n: usize) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() || n > Self::MAX_POINTS {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two in [16, {}], got {n}",
                Self::MAX_POINTS
            )));
        }
        Ok(Grid2D { n })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        PERIOD / self.n as f64
    }

    #[inline]
    pub fn area(&self) -> f64 {
        PERIOD * PERIOD
    }

    /// Physical coordinate of node `i` along either axis.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -1.0 + i as f64 * self.spacing()
    }

    /// Index of the grid node at the origin.
    #[inline]
    pub fn origin_index(&self) -> usize {
        self.n / 2
    }

    /// Signed integer mode number stored at FFT index `i`.
    #[inline]
    pub fn mode(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Angular wavenumber at FFT index `i`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> f64 {
        PI * self.mode(i) as f64
    }

    /// Largest retained mode number under the 2/3 rule (3 m_max < N).
    #[inline]
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n as i64 - 1) / 3
    }

    #[inline]
    pub fn is_retained(&self, i: usize) -> bool {
        self.mode(i).abs() <= self.dealias_cutoff()
    }

    #[inline]
    pub fn is_nyquist(&self, i: usize) -> bool {
        i == self.n / 2
    }

    /// Wavenumbers of every FFT index, with the Nyquist entry zeroed so that
    /// spectral derivatives of real fields stay real.
    pub fn derivative_wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|i| if self.is_nyquist(i) { 0.0 } else { self.wavenumber(i) }).collect()
    }
}

/// Reduce a coordinate into the fundamental cell [-1, 1).
#[inline]
pub fn wrap(x: f64) -> f64 {
    let y = (x + 1.0).rem_euclid(PERIOD) - 1.0;
    if y >= 1.0 {
        -1.0
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_or_odd_sizes() {
        assert!(Grid2D::new(8).is_err());
        assert!(Grid2D::new(48).is_err());
        assert!(Grid2D::new(16).is_ok());
    }

    #[test]
    fn spacing_times_n_is_period() {
        let g = Grid2D::new(64).unwrap();
        assert_eq!(g.spacing() * 64.0, PERIOD);
        assert_eq!(g.coord(g.origin_index()), 0.0);
        assert_eq!(g.mode(63), -1);
        assert_eq!(g.dealias_cutoff(), 21);
    }

    #[test]
    fn wrap_into_cell() {
        assert!((wrap(1.25) + 0.75).abs() < 1e-15);
        assert!((wrap(-3.5) - 0.5).abs() < 1e-15);
        assert_eq!(wrap(1.0), -1.0);
    }
}
