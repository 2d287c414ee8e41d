//! Drives the experiment runner from an in-memory config, the same path the
//! `lhz` binary takes from a JSON file.

use lattice_helmholtz::cli::{run, ExperimentConfig, Subcommand};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::temp_dir().join("lhz-example-invert");
    let json = serde_json::json!({
        "schema_version": 1,
        "dim": 2,
        "seed": 11,
        "band": {"lo": 1.0, "hi": 3.0, "count": 4},
        "directions": {"count": 32},
        "source": {"kind": "random", "domain": {"lo": [0, 0], "hi": [2, 2]}},
        "domain": {"lo": [0, 0], "hi": [2, 2]},
        "output_dir": out,
    });
    let cfg: ExperimentConfig = serde_json::from_value(json)?;
    let summary = run(Subcommand::Invert, &cfg)?;
    for (k, v) in &summary.metrics {
        println!("{k:>24} = {v}");
    }
    for a in &summary.artifacts {
        println!("wrote {}", summary.output_dir.join(a).display());
    }
    Ok(())
}
