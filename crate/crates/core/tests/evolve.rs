use std::f64::consts::PI;

use proptest::prelude::*;
use vortexlab::error::Error;
use vortexlab::evolve::*;
use vortexlab::fields::{curl_2p5d, Grid2D, ScalarField2D};
use vortexlab::initial_data::{small_scale_profile, smoothed_bahouri_chemin, SmallScaleMode};

fn grid(n: usize) -> Grid2D {
    Grid2D::new(n).unwrap()
}

#[test]
fn eigenmode_is_steady() {
    let g = grid(32);
    let w = ScalarField2D::from_fn(g, |x, y| (PI * x).sin() * (PI * y).sin());
    let s0 = SimState::new(&w, &ScalarField2D::zeros(g), 0.0).unwrap();
    let mut st = Stepper::new(g, 0.0);
    let s1 = st.step(&s0, StepSize::Fixed(0.01)).unwrap();
    let diff = s1.omega_l.sub(&s0.omega_l).max_abs();
    assert!(diff < 1e-8, "{diff}");
    assert!((s1.t - 0.01).abs() < 1e-15);
}

#[test]
fn constant_small_scale_is_untouched() {
    let g = grid(64);
    let w = smoothed_bahouri_chemin(g, 2).unwrap();
    let s0 = SimState::new(&w, &ScalarField2D::constant(g, 0.75), 0.0).unwrap();
    let s1 = advance(s0, 0.05, 0.4, &mut NoObserver).unwrap();
    let dev = s1.u_s.map(|v| v - 0.75).max_abs();
    assert!(dev < 1e-14, "{dev}");
}

#[test]
fn viscous_modes_decay_exactly() {
    let g = grid(32);
    let nu = 0.01;
    let dt = 0.1;
    let us = ScalarField2D::from_fn(g, |x, y| (PI * x).cos() + 0.3 * (3.0 * PI * y).sin() * (2.0 * PI * x).cos());
    let s0 = SimState::new(&ScalarField2D::zeros(g), &us, nu).unwrap();
    let mut st = Stepper::new(g, nu);
    let s1 = st.step(&s0, StepSize::Fixed(dt)).unwrap();
    let c0 = s0.u_s.coefficients();
    let c1 = s1.u_s.coefficients();
    for ((i, j), z) in c0.indexed_iter() {
        let k2 = g.wavenumber(i).powi(2) + g.wavenumber(j).powi(2);
        let want = z * (-nu * k2 * dt).exp();
        assert!((c1[[i, j]] - want).norm() < 1e-12);
    }
}

#[test]
fn oversized_step_is_rejected() {
    let g = grid(32);
    let w = ScalarField2D::from_fn(g, |x, y| (PI * x).sin() * (PI * y).sin());
    let s0 = SimState::new(&w, &ScalarField2D::zeros(g), 0.0).unwrap();
    let limit = s0.cfl_limit();
    let mut st = Stepper::new(g, 0.0);
    let err = st.step(&s0, StepSize::Fixed(1.5 * limit)).unwrap_err();
    assert!(matches!(err, Error::CflViolation { .. }));
}

#[test]
fn nonzero_mean_vorticity_is_rejected() {
    let g = grid(16);
    let w = ScalarField2D::constant(g, 1.0);
    assert!(matches!(SimState::new(&w, &w, 0.0), Err(Error::NonZeroMean { .. })));
}

#[test]
fn inviscid_invariants_are_conserved() {
    let g = grid(128);
    let w = smoothed_bahouri_chemin(g, 3).unwrap();
    let rho = small_scale_profile(g, 4, SmallScaleMode::LinearThm2).unwrap();
    let s0 = SimState::new(&w, &rho, 0.0).unwrap();
    let d0 = s0.diagnostics();
    let s1 = advance(s0, 0.5, 0.4, &mut NoObserver).unwrap();
    let d1 = s1.diagnostics();
    // Truncation conserves these exactly; what is left is the O(dt^5) stepping error.
    assert!(((d1.energy_l - d0.energy_l) / d0.energy_l).abs() < 1e-9);
    assert!(((d1.enstrophy_l - d0.enstrophy_l) / d0.enstrophy_l).abs() < 1e-7);
    assert!(((d1.us_l2 - d0.us_l2) / d0.us_l2).abs() < 1e-8);
    assert!(d1.expected_spectrum > d0.expected_spectrum);
}

#[test]
fn viscous_energy_decreases() {
    let g = grid(64);
    let w = smoothed_bahouri_chemin(g, 2).unwrap();
    let rho = ScalarField2D::from_fn(g, |x, y| (PI * x).sin() * (2.0 * PI * y).cos());
    let s = SimState::new(&w, &rho, 1e-3).unwrap();
    let mut st = Stepper::new(g, 1e-3);
    let mut s = s;
    let mut last = s.diagnostics();
    for _ in 0..10 {
        s = st.step(&s, StepSize::Cfl { cfl: 0.4, t_end: 1.0 }).unwrap();
        let d = s.diagnostics();
        assert!(d.energy <= last.energy);
        assert!(d.us_l2 <= last.us_l2);
        last = d;
    }
}

#[test]
fn small_scale_vorticity_at_start_is_the_curl() {
    let g = grid(128);
    let rho = small_scale_profile(g, 4, SmallScaleMode::LinearThm2).unwrap();
    let s = SimState::new(&ScalarField2D::zeros(g), &rho, 0.0).unwrap();
    let a = small_scale_vorticity(&s);
    let b = curl_2p5d(&rho.dealiased());
    assert!(a.sub(&b).max_abs() < 1e-12);
}

#[test]
fn small_scale_vorticity_is_frozen_without_flow() {
    let g = grid(64);
    let rho = ScalarField2D::from_fn(g, |x, y| (PI * x).sin() * (PI * y).sin().powi(3));
    let s0 = SimState::new(&ScalarField2D::zeros(g), &rho, 0.0).unwrap();
    let mut st = Stepper::new(g, 0.0);
    let s1 = st.step(&s0, StepSize::Fixed(0.3)).unwrap();
    assert!(small_scale_vorticity(&s1).sub(&small_scale_vorticity(&s0)).max_abs() < 1e-13);
}

#[test]
fn expected_spectrum_of_single_mode() {
    let g = grid(32);
    let s = SimState::new(&ScalarField2D::zeros(g), &ScalarField2D::from_fn(g, |_, y| (PI * y).sin()), 0.0).unwrap();
    assert!((expected_spectrum(&s).unwrap() - PI * PI).abs() < 1e-12);
    let z = SimState::new(&ScalarField2D::zeros(g), &ScalarField2D::zeros(g), 0.0).unwrap();
    assert!(matches!(expected_spectrum(&z), Err(Error::ZeroSmallScale)));
}

#[test]
fn expected_spectrum_matches_fourier_sum() {
    let g = grid(32);
    let modes = [(1, 0, 0.5), (2, 3, -0.7), (0, 4, 0.2), (5, 1, 0.9)];
    let us = ScalarField2D::from_fn(g, |x, y| {
        modes.iter().map(|&(a, b, c)| c * (PI * (a as f64 * x + b as f64 * y)).cos()).sum()
    });
    // Each cosine mode contributes |c|^2/2 of mean square at wavenumber^2 pi^2 (a^2 + b^2).
    let num: f64 = modes.iter().map(|&(a, b, c)| c * c * PI * PI * (a * a + b * b) as f64).sum();
    let den: f64 = modes.iter().map(|&(_, _, c)| c * c).sum();
    let s = SimState::new(&ScalarField2D::zeros(g), &us, 0.0).unwrap();
    assert!((expected_spectrum(&s).unwrap() - num / den).abs() < 1e-10 * num / den);
}

/// Transported profile under the frozen strain `a (x1, -x2)`.
fn strained(rho: impl Fn(f64, f64) -> f64, at: f64) -> impl Fn(f64, f64) -> f64 {
    move |x, y| rho((-at).exp() * x, at.exp() * y)
}

fn profile(x: f64, y: f64) -> f64 {
    y * (-(x / 0.1).powi(2) - (y / 0.03).powi(2)).exp()
}

fn squared_gradients(g: Grid2D) -> (f64, f64) {
    let w = curl_2p5d(&ScalarField2D::from_fn(g, profile));
    // curl of (0, 0, rho) is (d2 rho, -d1 rho)
    (w.u1.l2_norm_sq(), w.u2.l2_norm_sq())
}

#[test]
fn frozen_shear_pushforward_matches_transport() {
    let g = grid(1024);
    let (a, b) = squared_gradients(g);
    for at in [0.25f64, 0.5, 1.0] {
        let us_t = ScalarField2D::from_fn(g, strained(profile, at));
        let direct = curl_2p5d(&us_t).l2_norm_sq();
        // Push-forward: omega^S(t, eta(x)) = D eta(x) omega^S_0(x), with eta area preserving.
        let push = a * (2.0 * at).exp() + b * (-2.0 * at).exp();
        assert!(((direct - push) / push).abs() < 1e-6, "at={at}: {direct} vs {push}");
    }
}

#[test]
fn frozen_shear_spectrum_grows_like_exp_2at() {
    let g = grid(1024);
    let (a, b) = squared_gradients(g);
    let s0 = SimState::new(&ScalarField2D::zeros(g), &ScalarField2D::from_fn(g, profile), 0.0).unwrap();
    let e0 = expected_spectrum(&s0).unwrap();
    for at in [0.5, 1.0] {
        let us = ScalarField2D::from_fn(g, strained(profile, at));
        let s = SimState::new(&ScalarField2D::zeros(g), &us, 0.0).unwrap();
        let ratio = expected_spectrum(&s).unwrap() / e0;
        let want = (2.0 * at).exp();
        assert!((ratio / want - 1.0).abs() < 0.1, "at={at}: {ratio} vs {want}");
    }
    // Past at = 1 the stretched profile no longer fits the period; use the change of variables.
    for at in [1.5f64, 2.0] {
        let ratio = (a * (2.0 * at).exp() + b * (-2.0 * at).exp()) / (a + b);
        assert!((ratio / (2.0 * at).exp() - 1.0).abs() < 0.1);
    }
}

#[test]
fn run_emits_rows_and_snapshots() {
    let cfg = RunConfig {
        grid: 64,
        initial: InitialCondition::Bc { n: 2 },
        small_scale: None,
        nu: 0.0,
        t_end: 0.2,
        dt: Some(0.02),
        cfl: 0.4,
        diag_every: Some(2),
        snapshot_times: vec![0.1],
    };
    let out = run(&cfg).unwrap();
    assert_eq!(out.steps, 10);
    assert_eq!(out.rows.len(), 6);
    assert_eq!(out.snapshots.len(), 1);
    assert!((out.snapshots[0].time - 0.1).abs() < 1e-12);
    let csv = out.to_csv();
    assert!(csv.starts_with(Diagnostics::CSV_HEADER));
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn maximum_principle_on_resolved_data() {
    let g = grid(128);
    let w = ScalarField2D::from_fn(g, |x, y| {
        (PI * x).sin() * (PI * y).sin() + 0.6 * (PI * (x + 2.0 * y)).cos() + 0.3 * (2.0 * PI * x).sin() * (PI * y).cos()
    });
    let mut s = SimState::new(&w, &ScalarField2D::zeros(g), 0.0).unwrap();
    let w0 = s.diagnostics().omega_max;
    let mut st = Stepper::new(g, 0.0);
    while s.t < 1.0 - 1e-12 {
        s = st.step(&s, StepSize::Cfl { cfl: 0.4, t_end: 1.0 }).unwrap();
        let m = s.diagnostics().omega_max;
        assert!(m <= w0 * (1.0 + 1e-4), "t={} max={m} vs {w0}", s.t);
    }
}

fn random_field(g: Grid2D, coeffs: &[(i32, i32, f64, f64)]) -> ScalarField2D {
    ScalarField2D::from_fn(g, |x, y| {
        coeffs
            .iter()
            .map(|&(a, b, c, s)| {
                let ph = PI * (a as f64 * x + b as f64 * y);
                c * ph.cos() + s * ph.sin()
            })
            .sum()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn truncated_dynamics_conserve_quadratic_invariants(
        modes in prop::collection::vec((-4i32..=4, 1i32..=4, -1.0f64..1.0, -1.0f64..1.0), 2..6),
        tracer in prop::collection::vec((-4i32..=4, 0i32..=4, -1.0f64..1.0, -1.0f64..1.0), 1..4),
    ) {
        let g = grid(32);
        let w = random_field(g, &modes);
        let us = random_field(g, &tracer);
        let s0 = SimState::new(&w, &us, 0.0).unwrap();
        let d0 = s0.diagnostics();
        let s1 = advance(s0, 0.05, 0.3, &mut NoObserver).unwrap();
        let d1 = s1.diagnostics();
        prop_assert!(((d1.energy_l - d0.energy_l) / d0.energy_l).abs() < 1e-6);
        prop_assert!(((d1.enstrophy_l - d0.enstrophy_l) / d0.enstrophy_l).abs() < 1e-6);
        prop_assert!(((d1.us_l2 - d0.us_l2) / d0.us_l2.max(1e-300)).abs() < 1e-6);
    }
}
