//! Monte-Carlo averages over the ensemble and the spectral exponent.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::shell::{HatField, ShellSpec};
use super::snapshot::{rot_z, SnapshotU};
use super::synth::{default_alpha, flux_with, shell_energy, synthesize, EnsembleOptions, EnsembleSample};
use super::wave::ThreeWave;
use crate::error::{Error, Result};

/// `alpha = -(1 + 3d)/3`, the exponent for which `k^(3d+1+3 alpha) Pi^U` is
/// scale independent.
pub fn alpha_solve(d: usize) -> f64 {
    assert!(d == 2 || d == 3, "dimension {d} not supported");
    let alpha = default_alpha(d);
    let d = d as f64;
    assert!((3.0 * d + 1.0 + 3.0 * alpha).abs() < 1e-12);
    assert!((-1.0 + 2.0 * d + 2.0 * alpha + 5.0 / 3.0).abs() < 1e-12);
    alpha
}

/// Single-pass mean and variance.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; NaN below two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            f64::NAN
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        (self.variance() / self.count as f64).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    /// Levels `n = 1..=shells`, i.e. `k = b, b^2, ...`.
    pub shells: u32,
    pub samples: usize,
    pub seed: u64,
    pub options: EnsembleOptions,
    /// Defaults to `alpha_solve(d)`.
    pub alpha: Option<f64>,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { shells: 3, samples: 2000, seed: 7, options: EnsembleOptions::default(), alpha: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellStats {
    pub n: u32,
    pub k: u64,
    pub terms: usize,
    pub mean_e: f64,
    pub stderr_e: f64,
    pub mean_pi: f64,
    pub stderr_pi: f64,
    /// `k^(-1+2d+2 alpha) E^U`.
    pub resonant_e: f64,
    /// `k^(3d+1+3 alpha) Pi^U`.
    pub resonant_pi: f64,
    /// Mean and standard error of the diagonal-free remainder of `E`.
    pub mean_interference: f64,
    pub stderr_interference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub d: usize,
    pub b: u32,
    pub alpha: f64,
    pub samples: usize,
    pub e_u: f64,
    pub pi_u: f64,
    pub flux_degenerate: bool,
    /// `E^U / (Pi^U)^(2/3)`; absent when the flux vanishes.
    pub kolmogorov_ratio: Option<f64>,
    pub rows: Vec<ShellStats>,
    /// Fitted exponent of mean `E` against `k`.
    pub slope: f64,
    pub slope_stderr: f64,
}

/// Weighted least-squares slope of `y` against `x` with standard deviations
/// `sigma`; unweighted when any sigma is not positive.
pub fn fit_slope(x: &[f64], y: &[f64], sigma: &[f64]) -> (f64, f64) {
    let weighted = sigma.iter().all(|s| *s > 0.0 && s.is_finite());
    let w: Vec<f64> = if weighted { sigma.iter().map(|s| 1.0 / (s * s)).collect() } else { vec![1.0; x.len()] };
    let sw: f64 = w.iter().sum();
    let sx: f64 = w.iter().zip(x).map(|(w, x)| w * x).sum();
    let sy: f64 = w.iter().zip(y).map(|(w, y)| w * y).sum();
    let sxx: f64 = w.iter().zip(x).map(|(w, x)| w * x * x).sum();
    let sxy: f64 = w.iter().zip(x).zip(y).map(|((w, x), y)| w * x * y).sum();
    let den = sw * sxx - sx * sx;
    let slope = (sw * sxy - sx * sy) / den;
    let err = if weighted { (sw / den).sqrt() } else { f64::NAN };
    (slope, err)
}

/// Seed for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

struct SampleOutcome {
    energy: Vec<f64>,
    flux: Vec<f64>,
    interference: Vec<f64>,
}

/// Average `E^Theta(k)` and `Pi^Theta_k` over i.i.d. samples at
/// `k = b, ..., b^shells`. Deterministic for a given seed regardless of the
/// thread count.
pub fn monte_carlo(snap: &SnapshotU, cfg: &McConfig) -> Result<McReport> {
    if cfg.samples == 0 || cfg.shells == 0 {
        return Err(Error::Config("need at least one sample and one shell".into()));
    }
    let sh = snap.shell();
    let (b, d) = (sh.b, sh.d);
    let alpha = cfg.alpha.unwrap_or_else(|| alpha_solve(d));
    let period = 2.0 * std::f64::consts::PI * snap.lattice().q as f64;
    let tw = ThreeWave::new(snap.lattice(), sh);
    let shells: Vec<ShellSpec> = (1..=cfg.shells).map(|n| ShellSpec::level(b, n, d)).collect::<Result<_>>()?;
    let df = d as f64;
    let e_scale: Vec<f64> = shells.iter().map(|s| (s.k as f64).powf(-1.0 + df + 2.0 * alpha)).collect();

    let run = |index: usize| -> Result<SampleOutcome> {
        let mut rng = sample_rng(cfg.seed, index as u64);
        let mut out = SampleOutcome { energy: Vec::new(), flux: Vec::new(), interference: Vec::new() };
        for (n, shell) in (1..=cfg.shells).zip(&shells) {
            let sample = EnsembleSample::draw(&mut rng, b, n, d, &cfg.options, period);
            let f = synthesize(snap, &sample, shell.k, Some(alpha))?;
            let e = shell_energy(&f, shell)?;
            out.energy.push(e);
            out.flux.push(flux_with(&tw, &f));
            out.interference.push(e - e_scale[n as usize - 1] * f.diagonal_mass);
        }
        Ok(out)
    };
    let outcomes: Vec<SampleOutcome> =
        crate::threads::install(|| (0..cfg.samples).into_par_iter().map(run).collect::<Result<Vec<_>>>())?;

    let e_u = snap.energy();
    let pi_u = snap.flux();
    let mut rows = Vec::new();
    for (i, shell) in shells.iter().enumerate() {
        let mut we = Welford::default();
        let mut wp = Welford::default();
        let mut wi = Welford::default();
        for o in &outcomes {
            we.push(o.energy[i]);
            wp.push(o.flux[i]);
            wi.push(o.interference[i]);
        }
        let k = shell.k as f64;
        rows.push(ShellStats {
            n: i as u32 + 1,
            k: shell.k,
            terms: super::synth::term_count(b, i as u32 + 1, d),
            mean_e: we.mean(),
            stderr_e: we.stderr(),
            mean_pi: wp.mean(),
            stderr_pi: wp.stderr(),
            resonant_e: k.powf(-1.0 + 2.0 * df + 2.0 * alpha) * e_u,
            resonant_pi: k.powf(3.0 * df + 1.0 + 3.0 * alpha) * pi_u,
            mean_interference: wi.mean(),
            stderr_interference: wi.stderr(),
        });
    }
    let x: Vec<f64> = rows.iter().map(|r| (r.k as f64).ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.mean_e.ln()).collect();
    let sigma: Vec<f64> = rows.iter().map(|r| r.stderr_e / r.mean_e).collect();
    let (slope, slope_stderr) = if rows.len() >= 2 { fit_slope(&x, &y, &sigma) } else { (f64::NAN, f64::NAN) };
    Ok(McReport {
        d,
        b,
        alpha,
        samples: cfg.samples,
        e_u,
        pi_u,
        flux_degenerate: snap.flux_degenerate(),
        kolmogorov_ratio: snap.kolmogorov_ratio(),
        rows,
        slope,
        slope_stderr,
    })
}

/// Empirical check of `E[R_theta o U] = 0` for uniform `theta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanZeroReport {
    pub samples: usize,
    /// Lattice L2 norm of the sample mean.
    pub mean_norm: f64,
    /// Sample standard deviation, `sqrt(sum |F_i - mean|^2 / (N - 1))`.
    pub stddev: f64,
    /// `3 stddev / sqrt(N)`.
    pub bound: f64,
    pub pass: bool,
}

pub fn mean_zero_check(snap: &SnapshotU, samples: usize, seed: u64) -> MeanZeroReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angles: Vec<f64> = (0..samples).map(|_| rng.gen_range(0.0..2.0 * std::f64::consts::PI)).collect();
    let fields: Vec<HatField> =
        crate::threads::install(|| angles.par_iter().map(|&t| snap.rotate_hat(&rot_z(t))).collect());
    let mut sum = HatField::zeros(snap.lattice());
    let mut sq = 0.0;
    for f in &fields {
        sum = sum.add(f);
        sq += f.norm_sq();
    }
    let n = samples as f64;
    let mean = sum.scaled(1.0 / n);
    let mean_sq = mean.norm_sq();
    let var = ((sq - n * mean_sq) / (n - 1.0)).max(0.0);
    let stddev = var.sqrt();
    let bound = 3.0 * stddev / n.sqrt();
    let mean_norm = mean_sq.sqrt();
    MeanZeroReport { samples, mean_norm, stddev, bound, pass: mean_norm <= bound }
}
