//! Radial building blocks: the bubble profile `h`, the compact bump used by
//! the dyadic bubbles, and the mollifier.

/// Quintic smoothstep `6t^5 - 15t^4 + 10t^3`, clamped to [0, 1].
pub fn smoothstep5(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
}

fn smoothstep5_d(t: f64) -> f64 {
    if !(0.0..=1.0).contains(&t) {
        return 0.0;
    }
    30.0 * t * t * (1.0 - t) * (1.0 - t)
}

/// Antiderivative of [`smoothstep5`] vanishing at 0.
fn smoothstep5_int(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t.powi(4) * (2.5 + t * (-3.0 + t))
}

/// Septic smoothstep `35t^4 - 84t^5 + 70t^6 - 20t^7` (three vanishing
/// derivatives at both ends), clamped to [0, 1].
pub fn smoothstep7(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t.powi(4) * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)))
}

/// Antiderivative of [`smoothstep7`] on [0, 1] vanishing at 0; integral 1/2.
pub fn smoothstep7_int(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t.powi(5) * (7.0 + t * (-14.0 + t * (10.0 - 2.5 * t)))
}

/// Smoothed version of the piecewise-linear radial profile
/// `h = 1 (r <= 1), 2 - r (1 <= r <= 2), 0 (r >= 2)`.
///
/// The corners are rounded by quintic ramps in `h'` of width `ramp`, with
/// the slope capped at `slope`. The plateau edge is fixed by requiring the
/// drop from 1 to 0 to finish exactly at `r = 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BubbleProfile {
    pub slope: f64,
    pub ramp: f64,
}

impl Default for BubbleProfile {
    fn default() -> Self {
        BubbleProfile { slope: 1.1, ramp: 0.21 }
    }
}

impl BubbleProfile {
    pub const SUPPORT: f64 = 2.0;

    /// Radius up to which `h = 1`.
    pub fn plateau(&self) -> f64 {
        Self::SUPPORT - self.ramp - 1.0 / self.slope
    }

    pub fn h(&self, r: f64) -> f64 {
        let (p, w, a) = (self.slope, self.ramp, self.plateau());
        if r <= a {
            1.0
        } else if r <= a + w {
            1.0 - p * w * smoothstep5_int((r - a) / w)
        } else if r <= Self::SUPPORT - w {
            1.0 - 0.5 * p * w - p * (r - a - w)
        } else if r < Self::SUPPORT {
            p * w * smoothstep5_int((Self::SUPPORT - r) / w)
        } else {
            0.0
        }
    }

    pub fn dh(&self, r: f64) -> f64 {
        let (p, w, a) = (self.slope, self.ramp, self.plateau());
        if r <= a || r >= Self::SUPPORT {
            0.0
        } else if r <= a + w {
            -p * smoothstep5((r - a) / w)
        } else if r <= Self::SUPPORT - w {
            -p
        } else {
            -p * smoothstep5((Self::SUPPORT - r) / w)
        }
    }

    pub fn d2h(&self, r: f64) -> f64 {
        let (p, w, a) = (self.slope, self.ramp, self.plateau());
        if r <= a || r >= Self::SUPPORT {
            0.0
        } else if r <= a + w {
            -p / w * smoothstep5_d((r - a) / w)
        } else if r <= Self::SUPPORT - w {
            0.0
        } else {
            p / w * smoothstep5_d((Self::SUPPORT - r) / w)
        }
    }

    /// Odd-odd arrangement of four copies of `h` centred at `(2e1, 2e2)`,
    /// each carrying the sign `e1 e2`.
    pub fn zeta(&self, x1: f64, x2: f64) -> f64 {
        let mut s = 0.0;
        for e1 in [-1.0, 1.0] {
            for e2 in [-1.0, 1.0] {
                s += e1 * e2 * self.h(((x1 - 2.0 * e1).powi(2) + (x2 - 2.0 * e2).powi(2)).sqrt());
            }
        }
        s
    }
}

fn psi(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// C-infinity step: 1 for `t <= 0`, 0 for `t >= 1`.
pub fn smooth_step_down(t: f64) -> f64 {
    let a = psi(1.0 - t);
    let b = psi(t);
    a / (a + b)
}

/// Radial bump for the dyadic bubbles: 1 on `r <= 1/8`, 0 on `r >= 1/4`.
pub fn plateau_bump(r: f64) -> f64 {
    smooth_step_down((r - 0.125) / 0.125)
}

/// Unnormalized radial mollifier `exp(1 - 1/(1 - s^2))` on `s < 1`.
pub fn mollifier_shape(s: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_bounds() {
        let h = BubbleProfile::default();
        let mut max_d: f64 = 0.0;
        let mut max_d2: f64 = 0.0;
        let m = 20_000;
        for i in 0..=m {
            let r = 2.2 * i as f64 / m as f64;
            assert!((0.0..=1.0).contains(&h.h(r)));
            max_d = max_d.max(h.dh(r).abs());
            max_d2 = max_d2.max(h.d2h(r).abs());
        }
        assert!(max_d <= 1.1 + 1e-12);
        assert!(max_d2 <= 10.0);
        assert_eq!(h.h(h.plateau()), 1.0);
        assert!(h.h(2.0).abs() < 1e-15);
        assert!(h.plateau() > 0.85);
    }

    #[test]
    fn profile_is_continuous() {
        let h = BubbleProfile::default();
        let e = 1e-9;
        for r in [h.plateau(), h.plateau() + h.ramp, 2.0 - h.ramp] {
            assert!((h.h(r - e) - h.h(r + e)).abs() < 1e-8);
        }
    }

    #[test]
    fn derivative_matches_difference() {
        let h = BubbleProfile::default();
        let e = 1e-6;
        for r in [0.9, 1.0, 1.5, 1.85, 1.95] {
            let fd = (h.h(r + e) - h.h(r - e)) / (2.0 * e);
            assert!((fd - h.dh(r)).abs() < 1e-6, "r={r}");
        }
    }

    #[test]
    fn smoothstep7_integral() {
        assert!((smoothstep7_int(1.0) - 0.5).abs() < 1e-15);
        assert_eq!(smoothstep7(1.0), 1.0);
    }

    #[test]
    fn bump_plateau() {
        assert_eq!(plateau_bump(0.1), 1.0);
        assert_eq!(plateau_bump(0.25), 0.0);
        assert!(plateau_bump(0.2) > 0.0 && plateau_bump(0.2) < 1.0);
    }
}
