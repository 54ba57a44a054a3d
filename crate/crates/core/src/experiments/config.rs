//! Experiment configuration: one JSON object, every field but `kind` optional.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cascade_mc::EnsembleOptions;
use crate::error::{Error, Result};
use crate::lagrangian::MarkerSeed;

/// Deepest level any experiment accepts.
pub const MAX_LEVEL: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Cascade,
    ZerothLaw,
    DeformBc,
    DeformBubbles,
    InviscidLimit,
    FluxReport,
    CascadeMc,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Cascade => "cascade",
            ExperimentKind::ZerothLaw => "zeroth-law",
            ExperimentKind::DeformBc => "deform-bc",
            ExperimentKind::DeformBubbles => "deform-bubbles",
            ExperimentKind::InviscidLimit => "inviscid-limit",
            ExperimentKind::FluxReport => "flux-report",
            ExperimentKind::CascadeMc => "cascade-mc",
        }
    }

    /// Level range used when the config leaves `levels` out.
    pub fn default_levels(self) -> [u32; 2] {
        match self {
            ExperimentKind::Cascade | ExperimentKind::ZerothLaw | ExperimentKind::DeformBc => [4, 6],
            ExperimentKind::DeformBubbles => [4, 8],
            ExperimentKind::InviscidLimit | ExperimentKind::FluxReport => [4, 4],
            ExperimentKind::CascadeMc => [1, 3],
        }
    }
}

/// Small-scale profile of the 2.5D runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileChoice {
    /// Dipole `y2 bump(|y|)` on `B(0, 2^-n)` with unit gradient norm.
    Dipole,
    /// `2^{n/2} x2` near the origin, cut off at `4 * 2^{-n/2}`.
    Linear,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FluxOptions {
    /// Filter wavenumbers of the budget and the point-wise statistics.
    pub ks: Vec<f64>,
    /// Horizon of the run before the budget is closed.
    pub t_end: f64,
    /// Fixed step of the central difference.
    pub dt: f64,
    /// Model-flow wavenumber and sampling density.
    pub model_k: f64,
    pub model_points: usize,
}

impl Default for FluxOptions {
    fn default() -> Self {
        FluxOptions { ks: vec![4.0, 8.0, 16.0], t_end: 0.1, dt: 1e-3, model_k: 8.0, model_points: 64 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McOptions {
    pub d: usize,
    pub b: u32,
    pub samples: usize,
    pub ensemble: EnsembleOptions,
    /// Samples of the rotation-average check; 0 skips it.
    pub mean_zero_samples: usize,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions { d: 2, b: 2, samples: 2000, ensemble: EnsembleOptions::default(), mean_zero_samples: 400 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Inclusive level range `[n_min, n_max]`; the number of shells for `cascade-mc`.
    pub levels: Option<[u32; 2]>,
    /// Grid points per axis; per level `2^(n+4)` (bubbles `2^(n+3)`) when absent.
    pub grid: Option<usize>,
    /// Time horizon.
    pub delta: f64,
    /// Viscosity exponent parameter, `nu_n = 2^(-2 M n)`.
    pub m: f64,
    /// Viscosity override for every level.
    pub nu: Option<f64>,
    /// Viscosities of the inviscid-limit ladder.
    pub nu_ladder: Vec<f64>,
    pub cfl: f64,
    pub profile: Option<ProfileChoice>,
    /// Extra markers on top of the origin and the ball around it.
    pub markers: Vec<MarkerSeed>,
    /// Time of the bubble shape check is `c1 / S_k`.
    pub shape_c1: f64,
    pub shape_grid: usize,
    /// Bubbles checked for shape, `k = 1..=shape_bubbles`.
    pub shape_bubbles: usize,
    pub flux: FluxOptions,
    pub mc: McOptions,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    /// Snapshot of the final large-scale vorticity per level.
    pub write_snapshots: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: ExperimentKind::Cascade,
            levels: None,
            grid: None,
            delta: 0.25,
            m: 2.0,
            nu: None,
            nu_ladder: vec![1e-4, 1e-5, 1e-6],
            cfl: 0.4,
            profile: None,
            markers: Vec::new(),
            shape_c1: 0.05,
            shape_grid: 1024,
            shape_bubbles: 3,
            flux: FluxOptions::default(),
            mc: McOptions::default(),
            seed: 7,
            out_dir: None,
            write_snapshots: false,
        }
    }
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig { kind, ..Default::default() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn levels(&self) -> [u32; 2] {
        self.levels.unwrap_or_else(|| self.kind.default_levels())
    }

    pub fn level_range(&self) -> std::ops::RangeInclusive<u32> {
        let [a, b] = self.levels();
        a..=b
    }

    pub fn profile(&self) -> ProfileChoice {
        self.profile.unwrap_or(match self.kind {
            ExperimentKind::ZerothLaw | ExperimentKind::InviscidLimit => ProfileChoice::Linear,
            _ => ProfileChoice::Dipole,
        })
    }

    /// Grid for level `n` of a Bahouri-Chemin run.
    pub fn grid_for(&self, n: u32) -> usize {
        self.grid.unwrap_or(1usize << (n.min(MAX_LEVEL) + 4))
    }

    /// `2^(-2 M n)` unless overridden.
    pub fn nu_for(&self, n: u32) -> f64 {
        self.nu.unwrap_or_else(|| 2f64.powf(-2.0 * self.m * n as f64))
    }

    pub fn validate(&self) -> Result<()> {
        let [a, b] = self.levels();
        if a == 0 || a > b {
            return Err(Error::Config(format!("level range [{a}, {b}] is empty or starts at 0")));
        }
        if b > MAX_LEVEL {
            return Err(Error::Config(format!("level {b} exceeds the supported maximum {MAX_LEVEL}")));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::Config(format!("delta must be positive, got {}", self.delta)));
        }
        if !(self.m > 0.0) {
            return Err(Error::Config(format!("M must be positive, got {}", self.m)));
        }
        if let Some(nu) = self.nu {
            if !(nu >= 0.0 && nu.is_finite()) {
                return Err(Error::Config(format!("nu must be non-negative, got {nu}")));
            }
        }
        if self.nu_ladder.iter().any(|nu| !(*nu > 0.0)) {
            return Err(Error::Config("nu ladder entries must be positive".into()));
        }
        if !(self.cfl > 0.0 && self.cfl <= 0.5) {
            return Err(Error::Config(format!("cfl must lie in (0, 0.5], got {}", self.cfl)));
        }
        if self.kind == ExperimentKind::InviscidLimit && self.nu_ladder.len() < 2 {
            return Err(Error::Config("the inviscid limit needs at least two viscosities".into()));
        }
        if self.kind == ExperimentKind::CascadeMc && self.mc.samples == 0 {
            return Err(Error::Config("cascade-mc needs at least one sample".into()));
        }
        Ok(())
    }

    /// Canonical JSON, excluding the output directory.
    pub fn canonical_json(&self) -> String {
        let mut c = self.clone();
        c.out_dir = None;
        serde_json::to_string(&c).expect("config serializes")
    }

    /// Hex SHA-256 of [`canonical_json`](Self::canonical_json).
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
