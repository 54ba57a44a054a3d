use std::f64::consts::PI;

use proptest::prelude::*;
use vortexlab::coarse_grain::*;
use vortexlab::evolve::SimState;
use vortexlab::fields::{biot_savart_2d, Grid2D, ScalarField2D, VectorField2D};
use vortexlab::initial_data::smoothed_bahouri_chemin;

fn grid(n: usize) -> Grid2D {
    Grid2D::new(n).unwrap()
}

fn spec(k: f64) -> FilterSpec {
    FilterSpec::new(k).unwrap()
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn filter_preserves_constants_and_scales_modes() {
    let g = grid(32);
    let c = ScalarField2D::constant(g, 1.7);
    assert!((spec(3.0).apply(&c).values()[[5, 9]] - 1.7).abs() < 1e-14);
    let (a, b) = (2.0, -3.0);
    let f = ScalarField2D::from_fn(g, |x, y| (PI * (a * x + b * y)).cos());
    for k in [2.0, 5.0, 11.0] {
        let fb = spec(k).apply(&f);
        let want = (-(PI * PI * (a * a + b * b)) / (4.0 * k * k)).exp();
        let got = fb.values()[[3, 7]] / f.values()[[3, 7]];
        assert!((got - want).abs() < 1e-10, "{k}");
    }
}

#[test]
fn filter_converges_monotonically_as_k_grows() {
    let g = grid(32);
    let f = ScalarField2D::from_fn(g, |x, y| (PI * x).sin() + 0.5 * (3.0 * PI * y).cos() * (PI * x).cos());
    let mut last = f64::INFINITY;
    for k in [1.0, 2.0, 4.0, 8.0, 16.0, 64.0] {
        let e = spec(k).apply(&f).sub(&f).max_abs();
        assert!(e < last);
        last = e;
    }
    assert!(last < 1e-2);
}

#[test]
fn kernel_mass_and_second_moment() {
    let s = spec(4.0);
    let mass = simpson(|r| 2.0 * PI * r * s.kernel(r), 0.0, 3.0, 4000);
    assert!((mass - 1.0).abs() < 1e-10);
    // int r1^2 G dr = int_0^inf int_0^2pi r^2 cos^2(t) G(r) r dt dr
    let m2 = simpson(|r| PI * r.powi(3) * s.kernel(r), 0.0, 3.0, 4000);
    assert!((m2 - s.second_moment()).abs() < 1e-10 * s.second_moment().max(1.0));
    let w = s.discrete_kernel(grid(64));
    assert!((w.values().sum() - 1.0).abs() < 1e-12);
    assert!(w.values().iter().all(|&v| v > -1e-14));
}

#[test]
fn filtering_commutes_with_derivatives() {
    let g = grid(32);
    let f = ScalarField2D::from_fn(g, |x, y| (PI * x).sin() * (2.0 * PI * y).cos() + (PI * (x + y)).cos());
    let s = spec(3.0);
    assert!(s.apply(&f.derivative(0)).sub(&s.apply(&f).derivative(0)).max_abs() < 1e-12);
    assert!(s.apply(&f.derivative(1)).sub(&s.apply(&f).derivative(1)).max_abs() < 1e-12);
}

fn sample_velocity(g: Grid2D) -> VectorField2D {
    let w = ScalarField2D::from_fn(g, |x, y| {
        (PI * x).sin() * (PI * y).sin()
            + 0.4 * (3.0 * PI * x).cos() * (2.0 * PI * y).sin()
            + 0.2 * (5.0 * PI * (x - y)).sin()
    });
    biot_savart_2d(&w).unwrap()
}

#[test]
fn stress_of_constant_field_vanishes() {
    let g = grid(16);
    let u = VectorField2D::new(ScalarField2D::constant(g, 0.3), ScalarField2D::constant(g, -1.1));
    let t = stress_tensor(&u, spec(2.0));
    assert!(t.max_abs() < 1e-14);
    assert!(energy_flux(&u, spec(2.0)).pi.max_abs() < 1e-14);
}

#[test]
fn stress_of_unresolved_mode_is_its_mean_square() {
    let g = grid(64);
    let m = 12.0;
    let u = VectorField2D::new(ScalarField2D::from_fn(g, |_, y| (m * PI * y).cos()), ScalarField2D::zeros(g));
    let t = stress_tensor(&u, spec(2.0));
    // bar(cos^2) = 1/2 + small remainder; bar(u) is exponentially small
    assert!((t.t11.values()[[10, 20]] - 0.5).abs() < 1e-10);
    assert!(t.t12.max_abs() < 1e-14 && t.t22.max_abs() < 1e-14);
}

#[test]
fn stress_is_positive_semidefinite() {
    let g = grid(64);
    let u = sample_velocity(g);
    let scale = u.max_abs().powi(2);
    for k in [2.0, 4.0, 8.0, 16.0] {
        let t = stress_tensor(&u, spec(k));
        assert!(t.symmetric && t.asymmetry() < 1e-12);
        assert!(t.eigenvalue_range().min >= -1e-10 * scale, "{k}: {:?}", t.eigenvalue_range());
    }
}

#[test]
fn deformation_of_local_rotation_and_shear() {
    let g = grid(32);
    let o = g.origin_index();
    let rot = VectorField2D::new(
        ScalarField2D::from_fn(g, |_, y| (PI * y).sin() / PI),
        ScalarField2D::from_fn(g, |x, _| -(PI * x).sin() / PI),
    );
    let s = deformation_tensor(&rot);
    for (i, j) in [(0, 0), (0, 1), (1, 1)] {
        assert!(s.component(i, j).values()[[o, o]].abs() < 1e-12);
    }
    let shear = VectorField2D::new(ScalarField2D::from_fn(g, |_, y| (PI * y).sin() / PI), ScalarField2D::zeros(g));
    let s = deformation_tensor(&shear);
    assert!((s.t12.values()[[o, o]] - 0.5).abs() < 1e-12);
    assert!(s.t11.values()[[o, o]].abs() < 1e-12 && s.t22.values()[[o, o]].abs() < 1e-12);
    let s = deformation_tensor(&sample_velocity(g));
    assert!(s.trace().max_abs() < 1e-10);
}

#[test]
fn model_pair_cascades_forward() {
    let k = 8.0;
    let f = spec(2.0);
    let rep = model_flow_report(k, f, 64);
    assert!(rep.all_positive);
    assert!(rep.max_rel_error < 1e-8, "{}", rep.max_rel_error);
    let c = f.second_moment();
    let half = rep.rows.iter().find(|r| (r.r * k - 0.5).abs() < 1e-12).unwrap();
    assert!((half.pi - c).abs() < 1e-8 * c);
    let two = rep.rows.iter().find(|r| (r.r * k - 2.0).abs() < 1e-12).unwrap();
    assert!((two.pi - c / 16.0).abs() < 1e-8 * c);
    let s = model_strain([0.1, 0.2]);
    assert_eq!(s, [[0.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]);
    let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]];
    assert_eq!(-contract3(&id, &s), 1.0);
    let t = model_stress([0.05, 0.02], k, 1.0);
    assert!((t[0][0] - 1.0).abs() < 1e-14 && (t[1][1] - 1.0).abs() < 1e-14 && t[2][2] == 0.0);
}

#[test]
fn gaussian_bands_telescope() {
    let g = grid(64);
    let u = sample_velocity(g);
    let b = band_decompose(&u, 4).unwrap();
    let mut sum = VectorField2D::zeros(g);
    for (n, band) in b.bands.iter().enumerate() {
        sum = sum.add(band);
        let want = filter(&u, spec(b.k[n]));
        assert!(sum.sub(&want).max_abs() < 1e-13);
    }
    assert!(sum.add(&b.residual).sub(&u).max_abs() < 1e-13);
    assert!(band_decompose(&u, 5).is_err());
}

#[test]
fn sharp_bands_isolate_a_shell() {
    let g = grid(64);
    // |xi| = pi lies in (2, 4], the second shell
    let u = VectorField2D::new(
        ScalarField2D::from_fn(g, |_, y| (PI * y).sin()),
        ScalarField2D::from_fn(g, |x, _| (PI * x).cos()),
    );
    let b = sharp_band_decompose(&u, 4).unwrap();
    assert!(b.bands[1].sub(&u).max_abs() < 1e-13);
    for n in [0, 2, 3] {
        assert!(b.bands[n].max_abs() < 1e-13);
    }
    assert!(b.residual_norm < 1e-12);
}

#[test]
fn distant_shells_do_not_interact_below_the_filter() {
    let g = grid(512);
    // shells (16, 32] and (64, 128]
    let a = ScalarField2D::from_fn(g, |_, y| (8.0 * PI * y).cos());
    let b = ScalarField2D::from_fn(g, |_, y| (32.0 * PI * y).cos());
    let s = spec(4.0);
    let cross = s.apply(&a.mul(&b)).max_abs();
    let same = s.apply(&a.mul(&a)).max_abs();
    assert!(cross < 1e-12 && (same - 0.5).abs() < 1e-12);
    let u = VectorField2D::new(a.add(&b), ScalarField2D::zeros(g));
    let bands = sharp_band_decompose(&u, 7).unwrap();
    assert!(bands.bands[4].sub(&VectorField2D::new(a.clone(), ScalarField2D::zeros(g))).max_abs() < 1e-12);
}

#[test]
fn first_order_stress_matches_for_smooth_bands() {
    let g = grid(128);
    let u = sample_velocity(g);
    let mut last = f64::INFINITY;
    for k in [16.0, 32.0, 64.0] {
        let s = spec(k);
        let exact = stress_tensor(&u, s);
        let approx = first_order_stress(&u, s);
        let rel = exact.sub(&approx).max_abs() / exact.max_abs();
        assert!(rel < last, "{k}: {rel}");
        last = rel;
    }
    assert!(last < 0.02, "{last}");
    assert!(first_order_stress(&VectorField2D::zeros(g), spec(3.0)).max_abs() == 0.0);
}

#[test]
fn inviscid_budget_closes() {
    let g = grid(64);
    let w = smoothed_bahouri_chemin(g, 2).unwrap();
    let s = SimState::new(&w, &ScalarField2D::zeros(g), 0.0).unwrap();
    for row in flux_budget(&s, &[2.0, 4.0, 8.0], 1e-3).unwrap() {
        assert!(row.residual.abs() < 1e-6 * row.scale, "{row:?}");
        assert!(row.flux.abs() > 10.0 * row.residual.abs());
    }
}

#[test]
fn viscous_budget_closes() {
    let g = grid(64);
    let w = smoothed_bahouri_chemin(g, 2).unwrap();
    let s = SimState::new(&w, &ScalarField2D::zeros(g), 1e-3).unwrap();
    for row in flux_budget(&s, &[4.0], 1e-3).unwrap() {
        assert!(row.dissipation > 0.0);
        assert!(row.residual.abs() < 1e-6 * row.scale, "{row:?}");
    }
}

#[test]
fn scale_locality_is_a_fraction_of_the_total() {
    let g = grid(128);
    let u = biot_savart_2d(&smoothed_bahouri_chemin(g, 3).unwrap()).unwrap();
    let (part, frac) = scale_locality(&u, spec(4.0), 2.0, 8.0);
    assert!(part.is_finite() && frac.is_finite());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    /// tau(x) = sum_r g(r) du du - (sum_r g(r) du)(sum_r g(r) du), with du = u(x + r) - u(x).
    #[test]
    fn stress_matches_increment_form(
        modes in prop::collection::vec((-3i32..=3, 0i32..=3, -1.0f64..1.0, -1.0f64..1.0), 1..5),
        k in 1.5f64..6.0,
        i in 0usize..16, j in 0usize..16,
    ) {
        let g = grid(16);
        let field = |p: i32| ScalarField2D::from_fn(g, |x, y| modes.iter().map(|&(a, b, c, s)| {
            let ph = PI * (a as f64 * x + b as f64 * y) + p as f64;
            c * ph.cos() + s * ph.sin()
        }).sum());
        let u = VectorField2D::new(field(0), field(1));
        let s = spec(k);
        let tau = stress_tensor(&u, s);
        let w = s.discrete_kernel(g);
        let o = g.origin_index();
        let n = g.n();
        let (v1, v2) = (u.u1.values(), u.u2.values());
        let (mut m1, mut m2, mut p11, mut p12, mut p22) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for a in 0..n {
            for b in 0..n {
                let wt = w.values()[[a, b]];
                let (ii, jj) = ((i + a + n - o) % n, (j + b + n - o) % n);
                let d1 = v1[[ii, jj]] - v1[[i, j]];
                let d2 = v2[[ii, jj]] - v2[[i, j]];
                m1 += wt * d1; m2 += wt * d2;
                p11 += wt * d1 * d1; p12 += wt * d1 * d2; p22 += wt * d2 * d2;
            }
        }
        prop_assert!((tau.t11.values()[[i, j]] - (p11 - m1 * m1)).abs() < 1e-10);
        prop_assert!((tau.t12.values()[[i, j]] - (p12 - m1 * m2)).abs() < 1e-10);
        prop_assert!((tau.t22.values()[[i, j]] - (p22 - m2 * m2)).abs() < 1e-10);
    }
}
