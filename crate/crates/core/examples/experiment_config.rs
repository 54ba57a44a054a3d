//! Load an experiment from JSON, run it and write CSV tables plus a manifest.
//!
//! `cargo run --example experiment_config -- [config.json] [out_dir]`

use vortexlab::experiments::{run_experiment, ExperimentConfig};

const DEFAULT: &str = r#"{
    "kind": "cascade",
    "levels": [2, 3],
    "grid": 128,
    "delta": 0.1
}"#;

fn main() -> vortexlab::Result<()> {
    let mut args = std::env::args().skip(1);
    let cfg = match args.next() {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::from_json(DEFAULT)?,
    };
    let dir = args.next().map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("vortexlab-experiment"));
    println!("{} config {}", cfg.kind.name(), cfg.hash());
    for path in run_experiment(&cfg)?.write(&dir)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
