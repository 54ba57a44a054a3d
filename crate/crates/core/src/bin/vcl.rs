use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use vortexlab::evolve::{run, RunConfig};
use vortexlab::experiments::{
    ball_markers, band_wavenumbers, deform_markers, flux_rows, flux_table, run_experiment, small_scale_for, DeformData,
    ExperimentConfig, ExperimentKind, ProfileChoice,
};
use vortexlab::fields::{Grid2D, ScalarField2D, Snapshot};
use vortexlab::initial_data::{bourgain_li_bubbles, single_bubble, smoothed_bahouri_chemin, BubbleCoefficients};
use vortexlab::lagrangian::MarkerSeed;
use vortexlab::{Error, Result};

#[derive(Parser)]
#[command(name = "vcl", version, about = "Vortex-stretching laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Bc,
    Bubble,
    Bubbles,
    Eigenmode,
    SmallScale,
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Dipole,
    Linear,
}

impl From<Profile> for ProfileChoice {
    fn from(p: Profile) -> Self {
        match p {
            Profile::Dipole => ProfileChoice::Dipole,
            Profile::Linear => ProfileChoice::Linear,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write an initial field as a snapshot.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 4)]
        n: u32,
        #[arg(long, default_value_t = 0.125)]
        ell: f64,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, value_enum, default_value = "dipole")]
        profile: Profile,
        #[arg(long, default_value = "field.vcl")]
        out: PathBuf,
    },
    /// Run a simulation or experiment config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Track flow-map markers and their deformation gradients.
    Deform {
        #[arg(long, value_enum, default_value = "bc")]
        data: Data,
        #[arg(long, default_value_t = 5)]
        n: u32,
        /// Comma-separated list of origin, fan, ball.
        #[arg(long, default_value = "origin")]
        markers: String,
        #[arg(long)]
        grid: Option<usize>,
        /// Horizon; bubbles default to `S_n^(-1/2)`.
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long, default_value_t = 0.4)]
        cfl: f64,
        #[arg(long, default_value = "deform.csv")]
        out: PathBuf,
    },
    /// Point-wise energy flux of a vorticity snapshot.
    Flux {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long = "K")]
        k: Option<f64>,
        /// Dyadic levels `lo:hi` of extra filter wavenumbers.
        #[arg(long)]
        bands: Option<String>,
        #[arg(long, default_value = "flux.csv")]
        out: PathBuf,
    },
    /// Time-averaged enstrophy over a level range.
    ZerothLaw {
        #[arg(long, default_value = "4:6")]
        levels: String,
        #[arg(long = "M", default_value_t = 2.0)]
        m: f64,
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long, default_value_t = 0.25)]
        delta: f64,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value = "zeroth-law")]
        out_dir: PathBuf,
    },
    /// Monte-Carlo shell spectrum of the self-similar ensemble.
    CascadeMc {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        b: u32,
        #[arg(long, default_value_t = 3)]
        shells: u32,
        #[arg(long = "N", default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value = "mc.csv")]
        out: PathBuf,
    },
    /// Viscous against inviscid runs over a viscosity ladder.
    Inviscid {
        #[arg(long, default_value_t = 4)]
        n: u32,
        #[arg(long, value_delimiter = ',', default_value = "1e-4,1e-5,1e-6")]
        nu: Vec<f64>,
        #[arg(long, default_value_t = 0.25)]
        delta: f64,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value = "inviscid")]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Data {
    Bc,
    Bubbles,
}

fn parse_range(s: &str) -> Result<(u32, u32)> {
    let bad = || Error::Config(format!("expected a range lo:hi, got {s:?}"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn write_experiment(cfg: &ExperimentConfig, dir: &Path) -> Result<()> {
    let out = run_experiment(cfg)?;
    for p in out.write(dir)? {
        println!("{}", p.display());
    }
    Ok(())
}

/// `2^k`, or zero (rejected by the grid) when it overflows.
fn dyadic(k: u32) -> usize {
    1usize.checked_shl(k).unwrap_or(0)
}

fn gen(kind: GenKind, n: u32, ell: f64, grid: Option<usize>, profile: Profile, out: &Path) -> Result<()> {
    let (name, field): (&str, ScalarField2D) = match kind {
        GenKind::Bc => {
            let g = Grid2D::new(grid.unwrap_or(dyadic(n.saturating_add(4))))?;
            ("omega_l", smoothed_bahouri_chemin(g, n)?)
        }
        GenKind::Bubble => ("omega_l", single_bubble(Grid2D::new(grid.unwrap_or(512))?, ell)?),
        GenKind::Bubbles => {
            let g = Grid2D::new(grid.unwrap_or(dyadic(n.saturating_add(3))))?;
            ("omega_l", bourgain_li_bubbles(g, &BubbleCoefficients::ones(n as usize))?)
        }
        GenKind::Eigenmode => {
            let g = Grid2D::new(grid.unwrap_or(256))?;
            let pi = std::f64::consts::PI;
            ("omega_l", ScalarField2D::from_fn(g, |x, y| (pi * x).sin() * (pi * y).sin()))
        }
        GenKind::SmallScale => {
            let g = Grid2D::new(grid.unwrap_or(dyadic(n.saturating_add(4))))?;
            ("u_s", small_scale_for(profile.into(), g, n)?)
        }
    };
    Snapshot::new(name, 0.0, 0.0, field).save(out)?;
    println!("{}", out.display());
    Ok(())
}

fn run_config(path: &Path, out_dir: &Path, nu: Option<f64>, grid: Option<usize>, seed: Option<u64>) -> Result<()> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("kind").is_some() {
        let mut cfg: ExperimentConfig = serde_json::from_value(value)?;
        cfg.nu = nu.or(cfg.nu);
        cfg.grid = grid.or(cfg.grid);
        cfg.seed = seed.unwrap_or(cfg.seed);
        let dir = cfg.out_dir.clone().unwrap_or_else(|| out_dir.to_path_buf());
        return write_experiment(&cfg, &dir);
    }
    let mut cfg: RunConfig = serde_json::from_value(value)?;
    if let Some(nu) = nu {
        cfg.nu = nu;
    }
    if let Some(g) = grid {
        cfg.grid = g;
    }
    let output = run(&cfg)?;
    std::fs::create_dir_all(out_dir)?;
    let csv = out_dir.join("diagnostics.csv");
    std::fs::write(&csv, output.to_csv())?;
    println!("{}", csv.display());
    for (i, s) in output.snapshots.iter().enumerate() {
        let p = out_dir.join(format!("{}_{i:03}.vcl", s.name));
        s.save(&p)?;
        println!("{}", p.display());
    }
    let final_path = out_dir.join("final_omega_l.vcl");
    let st = &output.final_state;
    Snapshot::new("omega_l", st.t, st.nu, st.omega_l.clone()).save(&final_path)?;
    println!("{}", final_path.display());
    Ok(())
}

fn marker_seeds(list: &str, n: u32) -> Result<Vec<MarkerSeed>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| match s {
            "origin" => Ok(MarkerSeed::Origin),
            "fan" => Ok(MarkerSeed::default_fan()),
            "ball" => Ok(MarkerSeed::Points { points: ball_markers(0.5f64.powi(n as i32)) }),
            other => Err(Error::Config(format!("unknown marker set {other:?}"))),
        })
        .collect()
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { kind, n, ell, grid, profile, out } => gen(kind, n, ell, grid, profile, &out),
        Command::Run { config, out_dir, nu, grid, seed } => run_config(&config, &out_dir, nu, grid, seed),
        Command::Deform { data, n, markers, grid, t_end, cfl, out } => {
            let data = match data {
                Data::Bc => DeformData::Bc,
                Data::Bubbles => DeformData::Bubbles,
            };
            let table = deform_markers(data, n, grid, t_end, cfl, &marker_seeds(&markers, n)?)?;
            std::fs::write(&out, table.to_csv())?;
            println!("{}", out.display());
            Ok(())
        }
        Command::Flux { snapshot, k, bands, out } => {
            let snap = Snapshot::load(&snapshot)?;
            let bands = bands.as_deref().map(parse_range).transpose()?;
            let rows = flux_rows(&snap.field, &band_wavenumbers(k, bands)?)?;
            std::fs::write(&out, flux_table(&rows).to_csv())?;
            println!("{}", out.display());
            Ok(())
        }
        Command::ZerothLaw { levels, m, nu, delta, grid, out_dir } => {
            let (lo, hi) = parse_range(&levels)?;
            let cfg = ExperimentConfig {
                levels: Some([lo, hi]),
                m,
                nu,
                delta,
                grid,
                ..ExperimentConfig::new(ExperimentKind::ZerothLaw)
            };
            write_experiment(&cfg, &out_dir)
        }
        Command::CascadeMc { d, b, shells, samples, seed, out } => {
            let mut cfg = ExperimentConfig::new(ExperimentKind::CascadeMc);
            cfg.levels = Some([1, shells]);
            cfg.seed = seed;
            cfg.mc.d = d;
            cfg.mc.b = b;
            cfg.mc.samples = samples;
            cfg.mc.mean_zero_samples = 0;
            let result = run_experiment(&cfg)?;
            let table = result.table("cascade_mc.csv").expect("table is produced");
            std::fs::write(&out, table.to_csv())?;
            let manifest = out.with_extension("manifest.json");
            std::fs::write(&manifest, result.manifest.to_json())?;
            println!("{}", out.display());
            Ok(())
        }
        Command::Inviscid { n, nu, delta, grid, out_dir } => {
            let cfg = ExperimentConfig {
                levels: Some([n, n]),
                nu_ladder: nu,
                delta,
                grid,
                ..ExperimentConfig::new(ExperimentKind::InviscidLimit)
            };
            write_experiment(&cfg, &out_dir)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vcl: {e}");
            ExitCode::from(1)
        }
    }
}
