use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vortexlab::error::Error;
use vortexlab::evolve::*;
use vortexlab::fields::{Grid2D, Interpolation, ScalarField2D};
use vortexlab::initial_data::profiles::plateau_bump;
use vortexlab::initial_data::*;
use vortexlab::lagrangian::*;

fn grid(n: usize) -> Grid2D {
    Grid2D::new(n).unwrap()
}

/// Adaptive Simpson on [a, b].
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 40)
}

#[test]
fn key_integral_of_one_bubble_matches_quadrature_oracle() {
    // phi_1 = phi_0(2x) is the bump at (1/2, 1/2) of radius 1/8 in the first quadrant.
    let omega = |y1: f64, y2: f64| plateau_bump(((2.0 * y1 - 1.0).powi(2) + (2.0 * y2 - 1.0).powi(2)).sqrt());
    let integrand =
        |y1: f64| simpson(&|y2: f64| 2.0 * y1 * y2 / (y1 * y1 + y2 * y2).powi(2) * omega(y1, y2), 0.375, 0.625, 1e-12);
    let oracle = 4.0 / PI * simpson(&integrand, 0.375, 0.625, 1e-11);
    let g = grid(512);
    let w = bourgain_li_bubbles(g, &BubbleCoefficients::new(vec![1.0]).unwrap()).unwrap();
    let got = key_integral(&w, 0.0);
    assert!(oracle > 0.0);
    assert!((got - oracle).abs() < 1e-4 * oracle, "{got} vs {oracle}");
}

#[test]
fn key_integral_is_additive_over_bubbles() {
    let g = grid(256);
    let coeffs = BubbleCoefficients::new(vec![0.3, 1.0, 0.6]).unwrap();
    let total = key_integral(&bourgain_li_bubbles(g, &coeffs).unwrap(), 0.0);
    let parts: f64 = bubble_tracers(g, &coeffs).unwrap().iter().map(|b| key_integral(b, 0.0)).sum();
    assert!((total - parts).abs() < 1e-10);
}

#[test]
fn bahouri_chemin_strain_is_diagonal_and_positive() {
    let g = grid(256);
    let w = smoothed_bahouri_chemin(g, 4).unwrap();
    let [a, b, c] = strain_at_origin(&w);
    assert!(a > 0.0);
    assert!(b.abs() < 1e-10 && c.abs() < 1e-10);
    assert!(key_integral(&w, 0.0) > 0.0);
}

#[test]
fn markers_stay_put_without_flow() {
    let g = grid(32);
    // u = 0 has no CFL limit, so take fixed steps.
    let s0 = SimState::new(&ScalarField2D::zeros(g), &ScalarField2D::zeros(g), 0.0).unwrap();
    let mut obs = MarkerObserver::new(seed_markers(&[MarkerSeed::default_fan()]), &s0);
    let mut st = Stepper::new(g, 0.0);
    let mut s = s0;
    for _ in 0..5 {
        s = st.step_observed(&s, StepSize::Fixed(0.1), &mut obs).unwrap();
    }
    for m in obs.markers() {
        assert_eq!(m.eta, m.x0);
        assert_eq!(m.d, IDENTITY);
        assert_eq!(m.history.len(), 6);
    }
}

/// Stream function of `sin(pi x) sin(pi y)` is `omega / (2 pi^2)`; markers follow its level sets.
#[test]
fn markers_follow_streamlines_of_steady_flow() {
    let g = grid(32);
    let psi = |p: [f64; 2]| (PI * p[0]).sin() * (PI * p[1]).sin();
    let w = ScalarField2D::from_fn(g, |x, y| psi([x, y]));
    let s0 = SimState::new(&w, &ScalarField2D::zeros(g), 0.0).unwrap();
    let seeds = MarkerSeed::Points { points: vec![[0.3, 0.2], [-0.6, 0.45], [0.05, -0.7]] };
    for method in [Interpolation::Spectral, Interpolation::LocalPolynomial] {
        let mut obs = MarkerObserver::new(seed_markers(&[seeds.clone()]), &s0).without_key_integral();
        obs.interpolation = MarkerInterpolation::Fixed(method);
        advance(s0.clone(), 2.0, 0.4, &mut obs).unwrap();
        let tol = if method == Interpolation::Spectral { 1e-7 } else { 1e-5 };
        for m in obs.markers() {
            assert!((psi(m.eta) - psi(m.x0)).abs() < tol, "{method:?}: {:?}", m);
            assert!((m.det() - 1.0).abs() < 1e-4);
            assert!(m.eta != m.x0);
        }
    }
}

/// Rigid rotation: markers keep their radius; compared with a fine RK4 oracle.
#[test]
fn rigid_rotation_keeps_radius() {
    let om = 2.0;
    let rot = |_: f64, x: [f64; 2]| ([-om * x[1], om * x[0]], [[0.0, -om], [om, 0.0]]);
    let x0 = [0.3, 0.1];
    let mut coarse = MarkerSet::new(vec![FlowMarker::new(0, x0)]);
    coarse.advance_prescribed(0.0, 1.0, 100, rot);
    let mut fine = MarkerSet::new(vec![FlowMarker::new(0, x0)]);
    fine.advance_prescribed(0.0, 1.0, 3000, rot);
    let (a, b) = (&coarse.markers[0], &fine.markers[0]);
    let r0 = x0[0].hypot(x0[1]);
    assert!((a.eta[0].hypot(a.eta[1]) - r0).abs() < 1e-8);
    assert!((a.eta[0] - b.eta[0]).abs() < 1e-8 && (a.eta[1] - b.eta[1]).abs() < 1e-8);
    let exact = [x0[0] * om.cos() - x0[1] * om.sin(), x0[0] * om.sin() + x0[1] * om.cos()];
    assert!((b.eta[0] - exact[0]).abs() < 1e-12 && (b.eta[1] - exact[1]).abs() < 1e-12);
    let p = PolarRates::from_velocity(a.eta, rot(0.0, a.eta).0, 0.0);
    assert!(p.radial.abs() < 1e-6 && (p.angular - om).abs() < 1e-6);
}

#[test]
fn yudovich_constant_for_frozen_shear() {
    let a = 0.8;
    let t = 0.75;
    let pts = vec![[0.1, 0.05], [0.2, 0.05], [-0.1, 0.3], [0.15, 0.3]];
    let mut set = MarkerSet::new(seed_markers(&[MarkerSeed::Points { points: pts }]));
    set.advance_prescribed(0.0, t, 300, |_, x| ([a * x[0], -a * x[1]], [[a, 0.0], [0.0, -a]]));
    let rep = yudovich_check(&set.markers, &[(0, 1), (2, 3)], t, 1.0);
    for (c, d0) in rep.c.iter().zip([0.1f64, 0.25]) {
        let want = a / d0.ln().abs();
        assert!((c / want - 1.0).abs() < 0.05, "{c} vs {want}");
    }
}

#[test]
fn yudovich_constant_is_bounded_for_bahouri_chemin() {
    let g = grid(128);
    let w = smoothed_bahouri_chemin(g, 3).unwrap();
    let s0 = SimState::new(&w, &ScalarField2D::zeros(g), 0.0).unwrap();
    let w_sup = s0.diagnostics().omega_max;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut pts = Vec::new();
    for _ in 0..100 {
        let x: [f64; 2] = [rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6)];
        let r: f64 = rng.gen_range(0.01..0.3);
        let th: f64 = rng.gen_range(0.0..2.0 * PI);
        pts.push(x);
        pts.push([x[0] + r * th.cos(), x[1] + r * th.sin()]);
    }
    let mut obs = MarkerObserver::new(seed_markers(&[MarkerSeed::Points { points: pts }]), &s0).without_key_integral();
    let s = advance(s0, 0.25, 0.4, &mut obs).unwrap();
    let pairs: Vec<_> = (0..100).map(|i| (2 * i, 2 * i + 1)).collect();
    let rep = yudovich_check(obs.markers(), &pairs, s.t, w_sup);
    assert_eq!(rep.c.len(), 100);
    assert!(rep.c_max.is_finite() && rep.c_max <= 10.0, "{}", rep.c_max);
    assert!(obs.set.worst_determinant_drift() < 1e-4);
}

#[test]
fn radial_rate_on_the_diagonal_is_a_remainder() {
    let g = grid(256);
    let w = smoothed_bahouri_chemin(g, 4).unwrap();
    let sup = w.max_abs();
    for r in [0.1, 0.2, 0.4] {
        let eta = [r * (PI / 4.0).cos(), r * (PI / 4.0).sin()];
        let p = polar_rates(eta, &w).unwrap();
        assert!(p.radial_main.abs() < 1e-12);
        // measured constant in |d|eta|/dt| <= C |omega|_inf |eta|
        assert!(p.radial.abs() <= 2.0 * sup * r, "r={r}: {}", p.radial);
        assert!(p.angular < 0.0);
    }
    let k = key_integral_sample(&w, 0.0, 0.2, 16).unwrap();
    assert!(k.i > 0.0 && k.b_sup.is_finite());
}

#[test]
fn bubble_shapes_hold_initially() {
    let g = grid(512);
    let coeffs = BubbleCoefficients::ones(3);
    let ladder = RectangleLadder::default();
    for (k, b) in bubble_tracers(g, &coeffs).unwrap().iter().enumerate() {
        let rep = bubble_shape_check(b, 1.0, &ladder, k + 1, 0.0);
        assert!(rep.core_ok && rep.support_ok, "{rep:?}");
    }
}

#[test]
fn determinant_drift_is_reported() {
    let g = grid(64);
    let w = smoothed_bahouri_chemin(g, 2).unwrap();
    let s0 = SimState::new(&w, &ScalarField2D::zeros(g), 0.0).unwrap();
    let mut obs = MarkerObserver::new(seed_markers(&[MarkerSeed::default_fan()]), &s0).without_key_integral();
    obs.determinant_tolerance = 0.0;
    let err = advance(s0, 0.1, 0.4, &mut obs).unwrap_err();
    assert!(matches!(err, Error::DeterminantDrift { .. }));
}

#[test]
fn key_series_integrates_along_the_run() {
    let g = grid(64);
    let w = smoothed_bahouri_chemin(g, 2).unwrap();
    let s0 = SimState::new(&w, &ScalarField2D::zeros(g), 0.0).unwrap();
    let mut obs = MarkerObserver::new(seed_markers(&[MarkerSeed::Origin]), &s0);
    let s = advance(s0, 0.2, 0.4, &mut obs).unwrap();
    let integ = obs.integrated_key();
    let last = integ.last().unwrap();
    assert!((last.0 - s.t).abs() < 1e-12);
    let i0 = obs.key_series[0].i0;
    assert!(last.1 > 0.0 && (last.1 / (i0 * s.t) - 1.0).abs() < 0.2);
    // origin marker stays at the stagnation point and is stretched along x1
    let m = &obs.markers()[0];
    assert!(m.eta[0].abs() < 1e-12 && m.eta[1].abs() < 1e-12);
    assert!(m.d[0][0] > 1.0 && m.d[1][1] < 1.0);
}
