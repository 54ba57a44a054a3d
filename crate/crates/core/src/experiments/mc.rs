//! CSV and manifest for the Monte-Carlo spectrum.

use super::config::ExperimentConfig;
use super::output::{fmt, ExperimentOutput, Manifest, Table};
use crate::cascade_mc::{
    build_snapshot, mean_zero_check, monte_carlo, McConfig, McReport, MeanZeroReport, SeedProfile,
};
use crate::error::Result;

pub fn mc_config(cfg: &ExperimentConfig) -> McConfig {
    McConfig {
        shells: cfg.levels()[1],
        samples: cfg.mc.samples,
        seed: cfg.seed,
        options: cfg.mc.ensemble.clone(),
        alpha: None,
    }
}

/// Rows `k, meanE, stderrE, meanPi, stderrPi` then a `#` block with the fit.
pub fn mc_table(r: &McReport) -> Table {
    let mut t = Table::new(&["k", "meanE", "stderrE", "meanPi", "stderrPi"]);
    for s in &r.rows {
        t.push(vec![s.k.to_string(), fmt(s.mean_e), fmt(s.stderr_e), fmt(s.mean_pi), fmt(s.stderr_pi)]);
    }
    t.note(format!("slope={} stderr={} target={}", fmt(r.slope), fmt(r.slope_stderr), fmt(-5.0 / 3.0)));
    t.note(format!("d={} b={} alpha={} samples={}", r.d, r.b, fmt(r.alpha), r.samples));
    t.note(format!("E_U={} Pi_U={} flux_degenerate={}", fmt(r.e_u), fmt(r.pi_u), r.flux_degenerate));
    t
}

pub fn run_cascade_mc(cfg: &ExperimentConfig) -> Result<(McReport, Option<MeanZeroReport>)> {
    cfg.validate()?;
    let snap = build_snapshot(cfg.mc.d, cfg.mc.b, SeedProfile::default())?;
    let report = monte_carlo(&snap, &mc_config(cfg))?;
    let zero = (cfg.mc.mean_zero_samples > 1).then(|| mean_zero_check(&snap, cfg.mc.mean_zero_samples, cfg.seed));
    Ok((report, zero))
}

pub(crate) fn mc_output(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let (report, zero) = run_cascade_mc(cfg)?;
    let mut m = Manifest::new(cfg);
    m.constant("slope", report.slope);
    m.constant("slope_stderr", report.slope_stderr);
    m.constant("alpha", report.alpha);
    m.constant("e_u", report.e_u);
    m.constant("pi_u", report.pi_u);
    if let Some(ratio) = report.kolmogorov_ratio {
        m.constant("kolmogorov_ratio", ratio);
    }
    m.flag("flux_degenerate", report.flux_degenerate);
    if let Some(z) = zero {
        m.constant("mean_zero_norm", z.mean_norm);
        m.constant("mean_zero_bound", z.bound);
        m.flag("mean_zero_pass", z.pass);
    }
    let mut out = ExperimentOutput::new(m);
    out.add_table("cascade_mc.csv", mc_table(&report));
    Ok(out)
}
