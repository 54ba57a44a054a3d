use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vortexlab::cascade_mc::*;
use vortexlab::initial_data::BubbleProfile;
use vortexlab::Error;

fn default_snapshot() -> SnapshotU {
    build_snapshot(2, 2, SeedProfile::default()).unwrap()
}

fn max_diff(a: &HatField, b: &HatField) -> f64 {
    let l = a.lattice();
    (0..l.d)
        .flat_map(|c| a.component(c).iter().zip(b.component(c)).map(|(x, y)| (x - y).norm()).collect::<Vec<_>>())
        .fold(0.0, f64::max)
}

fn max_abs(a: &HatField) -> f64 {
    (0..a.lattice().d).flat_map(|c| a.component(c).iter().map(|z| z.norm()).collect::<Vec<_>>()).fold(0.0, f64::max)
}

/// Random coefficients on the shell support, no symmetry imposed.
fn random_field(l: Lattice, shell: &ShellSpec, seed: u64) -> HatField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = HatField::zeros(l);
    for idx in l.support(shell) {
        let mut v = [Complex64::new(0.0, 0.0); 3];
        for c in v.iter_mut().take(l.d) {
            *c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        f.set(idx, v);
    }
    f
}

#[test]
fn snapshot_is_odd_divergence_free_and_real() {
    for seed in [SeedProfile::default(), SeedProfile::OffsetBubble { ell: 0.5, offset: [0.3, -0.1] }] {
        let s = build_snapshot(2, 2, seed).unwrap();
        let scale = max_abs(s.coefficients());
        assert!(s.symmetry_residual() < 1e-12 * scale, "{seed:?}");
        assert!(s.coefficients().divergence_residual() < 1e-12 * scale);
        assert!(s.coefficients().conjugate_residual() < 1e-12 * scale);
        assert!(s.energy() > 1.0);
    }
    assert!(!default_snapshot().was_antisymmetrized());
    let off = build_snapshot(2, 2, SeedProfile::OffsetBubble { ell: 0.5, offset: [0.3, -0.1] }).unwrap();
    assert!(off.was_antisymmetrized());
}

#[test]
fn snapshot_energy_regression() {
    // frozen from the coefficient sum over the unit shell pair, lattice 1/8
    let s = default_snapshot();
    assert!((s.energy() - 59.907_563_368_136_35).abs() < 1e-9 * 59.9, "{}", s.energy());
    let direct: f64 =
        s.support().iter().map(|&i| s.coefficients().get(i).iter().map(|z| z.norm_sqr()).sum::<f64>()).sum::<f64>()
            / 64.0;
    assert!((direct - s.energy()).abs() < 1e-12 * direct);
}

#[test]
fn snapshot_matches_direct_fourier_quadrature() {
    // u^ = i xi_perp / |xi|^2 * int zeta(x / ell) e^{-i xi . x} dx
    let ell = 0.5;
    let s = default_snapshot();
    let p = BubbleProfile::default();
    let n = 800;
    let half = 4.0 * ell;
    let h = 2.0 * half / n as f64;
    for xi in [[0.75, 0.5], [-1.25, 2.0], [3.0, -0.625]] {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..n {
            let x1 = -half + (a as f64 + 0.5) * h;
            for b in 0..n {
                let x2 = -half + (b as f64 + 0.5) * h;
                let w = p.zeta(x1 / ell, x2 / ell);
                if w != 0.0 {
                    acc += Complex64::from_polar(w, -(xi[0] * x1 + xi[1] * x2));
                }
            }
        }
        acc *= h * h;
        let k2 = xi[0] * xi[0] + xi[1] * xi[1];
        let i = Complex64::new(0.0, 1.0);
        let want = [-i * xi[1] / k2 * acc, i * xi[0] / k2 * acc];
        let got = s.eval([xi[0], xi[1], 0.0]);
        let scale = want[0].norm().max(want[1].norm());
        for c in 0..2 {
            assert!((got[c] - want[c]).norm() < 1e-5 * scale.max(1e-3), "{xi:?} {c}: {} vs {}", got[c], want[c]);
        }
    }
}

#[test]
fn rotate_hat_identity_composition_and_isometry() {
    let s = default_snapshot();
    let id = s.rotate_hat(&ROT_IDENTITY);
    assert!(max_diff(&id, s.coefficients()) < 1e-12 * max_abs(s.coefficients()));
    let scale = max_abs(s.coefficients());
    // R_{pi/2} twice is R_pi
    let twice = s.rotate_hat(&quarter(1)).quarter_turn(1);
    assert!(max_diff(&twice, &s.rotate_hat(&quarter(2))) < 1e-12 * scale);
    for theta in [0.3, 1.1, 2.9] {
        let a = s.rotate_hat(&rot_z(theta)).quarter_turn(1);
        let b = s.rotate_hat(&rot_z(theta + FRAC_PI_2));
        assert!(max_diff(&a, &b) < 1e-10 * scale, "{theta}");
        assert!((s.rotate_hat(&rot_z(theta)).norm_sq() - s.energy()).abs() < 1e-12 * s.energy());
        // before the energy correction the lattice sum drifts by a boundary term
        let raw = s.rotate_hat_raw(&rot_z(theta)).norm_sq();
        assert!((raw - s.energy()).abs() < 3e-3 * s.energy());
    }
}

#[test]
fn three_wave_trilinear_and_zero() {
    let shell = ShellSpec::unit(2, 2).unwrap();
    let l = Lattice::for_shell(&shell, 2);
    let (u, v, w) = (random_field(l, &shell, 1), random_field(l, &shell, 2), random_field(l, &shell, 3));
    let zero = HatField::zeros(l);
    assert_eq!(three_wave_complex(&zero, &v, &w, &shell), Complex64::new(0.0, 0.0));
    assert_eq!(three_wave_complex(&u, &zero, &w, &shell).norm(), 0.0);
    assert_eq!(three_wave_complex(&u, &v, &zero, &shell).norm(), 0.0);
    let j = three_wave_complex(&u, &v, &w, &shell);
    for a in [2.5, -0.75] {
        let ja = three_wave_complex(&u.scaled(a), &v, &w, &shell);
        assert!((ja - j * a).norm() < 1e-12 * j.norm().max(1.0));
        let jb = three_wave_complex(&u, &v, &w.scaled(a), &shell);
        assert!((jb - j * a).norm() < 1e-12 * j.norm().max(1.0));
    }
    let u2 = random_field(l, &shell, 4);
    let sum = three_wave_complex(&u.add(&u2), &v, &w, &shell);
    let parts = j + three_wave_complex(&u2, &v, &w, &shell);
    assert!((sum - parts).norm() < 1e-12 * sum.norm().max(1.0));
}

#[test]
fn three_wave_matches_direct_double_sum() {
    let shell = ShellSpec::unit(2, 2).unwrap();
    let l = Lattice::for_shell(&shell, 2);
    let (u, v, w) = (random_field(l, &shell, 11), random_field(l, &shell, 12), random_field(l, &shell, 13));
    let q = l.q as i64;
    let in_l = |m: [i64; 2]| {
        let r2 = (m[0] * m[0] + m[1] * m[1]) as f64 / (q * q) as f64;
        (0.25..=4.0).contains(&r2)
    };
    let in_s = |m: [i64; 2]| {
        let r2 = (m[0] * m[0] + m[1] * m[1]) as f64 / (q * q) as f64;
        (1.0..=16.0).contains(&r2)
    };
    let at = |f: &HatField, m: [i64; 2]| f.get(l.index([m[0], m[1], 0]).unwrap());
    let r = 8i64;
    let i = Complex64::new(0.0, 1.0);
    let mut want = Complex64::new(0.0, 0.0);
    for x1 in -r..=r {
        for x2 in -r..=r {
            let xi = [x1, x2];
            if !in_l(xi) {
                continue;
            }
            let wv = at(&w, [-x1, -x2]);
            for e1 in -r..=r {
                for e2 in -r..=r {
                    let eta = [e1, e2];
                    let diff = [x1 - e1, x2 - e2];
                    if !in_s(eta) || !in_s(diff) {
                        continue;
                    }
                    let ud = at(&u, diff);
                    let vv = at(&v, eta);
                    let dot_u = i * (ud[0] * x1 as f64 + ud[1] * x2 as f64) / q as f64;
                    want += dot_u * (vv[0] * wv[0] + vv[1] * wv[1]);
                }
            }
        }
    }
    want *= l.cell() * l.cell();
    let got = three_wave_complex(&u, &v, &w, &shell);
    assert!((got - want).norm() < 1e-10 * want.norm(), "{got} vs {want}");
}

#[test]
fn three_wave_common_shift_covariance() {
    let s = default_snapshot();
    let shell = s.shell();
    let u = s.rotate_hat(&rot_z(0.4));
    let v = s.rotate_hat(&rot_z(1.3));
    let w = s.coefficients().clone();
    let j = three_wave_complex(&u, &v, &w, &shell);
    for y in [[3.0, -1.5], [17.2, 40.1]] {
        let js = three_wave_complex(&u.shifted(&y), &v.shifted(&y), &w.shifted(&y), &shell);
        assert!((js - j).norm() < 1e-10 * s.energy().powf(1.5), "{js} vs {j}");
    }
}

#[test]
fn snapshot_flux_vanishes_by_quarter_turn_symmetry() {
    let s = default_snapshot();
    let scale = s.energy().powf(1.5);
    assert!(s.flux().abs() < 1e-12 * scale);
    assert!(s.flux_imag().abs() < 1e-8 * scale);
    assert!(s.flux_degenerate());
    assert!(s.kolmogorov_ratio().is_none());
    assert!(matches!(s.require_positive_flux(), Err(Error::DegenerateSnapshot(_))));
}

#[test]
fn synthesize_degenerate_and_cancelling_samples() {
    let s = default_snapshot();
    let sample = EnsembleSample::identity(2, 0, 2);
    let f = synthesize(&s, &sample, 1, None).unwrap();
    assert!(max_diff(&f.coeffs, s.coefficients()) < 1e-12 * max_abs(s.coefficients()));

    // four identical copies at k = 2
    let f = synthesize(&s, &EnsembleSample::identity(2, 1, 2), 2, None).unwrap();
    let want = s.coefficients().scaled(4.0 * 2f64.powf(alpha_solve(2)));
    assert!(max_diff(&f.coeffs, &want) < 1e-12 * max_abs(&want));

    // an antisymmetric pair cancels exactly
    let mut pair = EnsembleSample::identity(2, 1, 2);
    for (j, t) in pair.terms.iter_mut().enumerate() {
        t.theta = if j % 2 == 0 { 0.0 } else { FRAC_PI_2 };
        t.shift = [1.5 * (j / 2) as f64, 0.0, 0.0];
    }
    let f = synthesize(&s, &pair, 2, None).unwrap();
    assert!(max_abs(&f.coeffs) < 1e-12 * max_abs(s.coefficients()));
    let shell = ShellSpec::level(2, 1, 2).unwrap();
    assert!(shell_energy(&f, &shell).unwrap() < 1e-20);

    assert!(matches!(synthesize(&s, &pair, 4, None), Err(Error::ShellMismatch(_))));
    assert!(matches!(shell_energy(&f, &ShellSpec::level(2, 2, 2).unwrap()), Err(Error::ShellMismatch(_))));
}

#[test]
fn phase_only_energy_matches_double_sum() {
    let s = default_snapshot();
    let l = s.lattice();
    let alpha = alpha_solve(2);
    let opts =
        EnsembleOptions { rotations: RotationMode::Identity, angles: AngleMode::Zero, shifts: ShiftMode::Uniform };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [1u32, 2, 3] {
        let k = 2u64.pow(n);
        let kf = k as f64;
        let sample = EnsembleSample::draw(&mut rng, 2, n, 2, &opts, 2.0 * PI * l.q as f64);
        assert!(sample.len() <= 64);
        let shell = ShellSpec::level(2, n, 2).unwrap();
        let e = shell_energy(&synthesize(&s, &sample, k, None).unwrap(), &shell).unwrap();
        // k^(d-1+2 alpha) sum_xi |U(xi)|^2 |sum_j e^{i y_j . xi / k}|^2
        let mut acc = 0.0;
        for &idx in s.support() {
            let xi = l.xi(idx);
            let u2: f64 = s.coefficients().get(idx).iter().map(|z| z.norm_sqr()).sum();
            let mut ph = Complex64::new(0.0, 0.0);
            for t in &sample.terms {
                ph += Complex64::from_polar(1.0, (t.shift[0] * xi[0] + t.shift[1] * xi[1]) / kf);
            }
            acc += u2 * ph.norm_sqr();
        }
        let want = kf.powf(1.0 + 2.0 * alpha) * acc * l.cell();
        assert!((e - want).abs() < 1e-11 * want, "n = {n}: {e} vs {want}");
        let resonant = kf.powf(-1.0 + 4.0 + 2.0 * alpha) * s.energy();
        assert!((resonant - kf.powf(-5.0 / 3.0) * s.energy()).abs() < 1e-12 * resonant);
    }
}

#[test]
fn shell_energy_of_empty_and_outside_fields() {
    let s = default_snapshot();
    let l = s.lattice();
    let zero = SynthField { k: 2.0, alpha: -7.0 / 3.0, coeffs: HatField::zeros(l), diagonal_mass: 0.0 };
    let shell = ShellSpec::level(2, 1, 2).unwrap();
    assert_eq!(shell_energy(&zero, &shell).unwrap(), 0.0);
    let mut outside = HatField::zeros(l);
    // |xi| = 1/8 and |xi| = 5 both miss [1/2, 4]
    outside.set(l.index([1, 0, 0]).unwrap(), [Complex64::new(1.0, 0.0); 3]);
    outside.set(l.index([0, 40, 0]).unwrap(), [Complex64::new(1.0, 0.0); 3]);
    let f = SynthField { coeffs: outside, ..zero };
    assert_eq!(shell_energy(&f, &shell).unwrap(), 0.0);
    assert_eq!(shell_mass(&f.coeffs, &s.shell()), 0.0);
}

#[test]
fn alpha_identities() {
    assert!((alpha_solve(3) + 10.0 / 3.0).abs() < 1e-15);
    assert!((alpha_solve(2) + 7.0 / 3.0).abs() < 1e-15);
    for d in [2usize, 3] {
        let a = alpha_solve(d);
        let df = d as f64;
        assert!((-1.0 + 2.0 * df + 2.0 * a + 5.0 / 3.0).abs() < 1e-14);
        assert!((3.0 * df + 1.0 + 3.0 * a).abs() < 1e-14);
    }
}

#[test]
fn resonant_flux_identity_on_lattice_exact_rotations() {
    let s = default_snapshot();
    let opts = EnsembleOptions {
        rotations: RotationMode::QuarterTurns,
        angles: AngleMode::QuarterTurns,
        shifts: ShiftMode::Uniform,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let sample = EnsembleSample::draw(&mut rng, 2, 1, 2, &opts, 2.0 * PI * 8.0);
    let res = resonant_flux(&s, &sample, 2, None).unwrap();
    let alpha = alpha_solve(2);
    let want = 2f64.powf(5.0 + 3.0 * alpha) * 4.0 * s.flux();
    assert!((res - want).abs() < 1e-12 * s.energy().powf(1.5), "{res} vs {want}");
}

#[test]
fn frozen_single_sample_equals_synthesis() {
    let s = default_snapshot();
    let cfg = McConfig { shells: 2, samples: 1, seed: 1, options: EnsembleOptions::frozen(), alpha: None };
    let r = monte_carlo(&s, &cfg).unwrap();
    for row in &r.rows {
        let shell = ShellSpec::level(2, row.n, 2).unwrap();
        let f = synthesize(&s, &EnsembleSample::identity(2, row.n, 2), row.k, None).unwrap();
        assert_eq!(row.mean_e, shell_energy(&f, &shell).unwrap());
        assert_eq!(row.mean_pi, shell_flux(&f, &shell).unwrap());
        assert!(row.stderr_e.is_nan());
    }
}

#[test]
fn small_ensemble_statistics_and_determinism() {
    let s = default_snapshot();
    let cfg = McConfig { shells: 2, samples: 150, seed: 21, ..Default::default() };
    let r = monte_carlo(&s, &cfg).unwrap();
    for row in &r.rows {
        assert!((row.mean_pi - row.resonant_pi).abs() <= 3.0 * row.stderr_pi, "{row:?}");
        assert!(row.mean_interference.abs() <= 3.0 * row.stderr_interference, "{row:?}");
        assert!((row.mean_e - row.resonant_e).abs() <= 3.0 * row.stderr_e, "{row:?}");
    }
    assert!((r.slope + 5.0 / 3.0).abs() < 4.0 * r.slope_stderr + 0.02);
    let again = monte_carlo(&s, &cfg).unwrap();
    assert_eq!(serde_json::to_string(&r).unwrap(), serde_json::to_string(&again).unwrap());
}

#[test]
fn rotated_snapshot_has_mean_zero() {
    let s = default_snapshot();
    let rep = mean_zero_check(&s, 400, 17);
    assert!(rep.pass, "{rep:?}");
    assert!(rep.stddev > 0.5 * s.energy().sqrt());
}

#[test]
fn three_dimensional_snapshot() {
    let s = build_snapshot(3, 2, SeedProfile::default()).unwrap();
    let scale = max_abs(s.coefficients());
    assert!(s.energy() > 0.0);
    assert!(s.symmetry_residual() < 1e-12 * scale);
    assert!(s.coefficients().divergence_residual() < 1e-12 * scale);
    assert!(s.flux().abs() < 1e-10 * s.energy().powf(1.5));
    // octahedral rotations keep the lattice energy
    for r in octahedral_group().iter().step_by(5) {
        assert!((s.rotate_hat_raw(r).norm_sq() - s.energy()).abs() < 1e-10 * s.energy());
    }
    let cfg = McConfig { shells: 1, samples: 3, seed: 2, ..Default::default() };
    let rep = monte_carlo(&s, &cfg).unwrap();
    assert_eq!(rep.rows[0].terms, 8);
    assert!(rep.rows[0].mean_e > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn rotation_keeps_energy_and_oddness(theta in 0.0f64..(2.0 * PI)) {
        let s = default_snapshot();
        let f = s.rotate_hat(&rot_z(theta));
        prop_assert!((f.norm_sq() - s.energy()).abs() < 1e-12 * s.energy());
        // R_theta U stays odd under the quarter turn
        let back = f.quarter_turn(1).add(&f);
        prop_assert!(max_abs(&back) < 1e-10 * max_abs(&f));
        prop_assert!(f.divergence_residual() < 1e-12 * max_abs(&f));
    }

    #[test]
    fn shift_covariance_holds_for_any_shift(y1 in -50.0f64..50.0, y2 in -50.0f64..50.0) {
        let shell = ShellSpec::unit(2, 2).unwrap();
        let l = Lattice::for_shell(&shell, 2);
        let (u, v, w) = (random_field(l, &shell, 31), random_field(l, &shell, 32), random_field(l, &shell, 33));
        let j = three_wave_complex(&u, &v, &w, &shell);
        let y = [y1, y2];
        let js = three_wave_complex(&u.shifted(&y), &v.shifted(&y), &w.shifted(&y), &shell);
        prop_assert!((js - j).norm() < 1e-10 * j.norm().max(1.0));
    }
}
