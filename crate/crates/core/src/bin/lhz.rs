use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use lattice_helmholtz::cli::{run_file, Subcommand, SCHEMA_VERSION};

#[derive(Parser)]
#[command(
    name = "lhz",
    version,
    about = "Forward and inverse problems for the discrete Helmholtz equation on Z^d",
    after_help = format!(
        "Config files are JSON, schema version {SCHEMA_VERSION}. Exit status: 0 ok, 2 config error, 3 numerical failure."
    )
)]
struct Args {
    subcommand: Subcommand,
    /// JSON experiment config
    config: PathBuf,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run_file(args.subcommand, &args.config) {
        Ok(summary) => {
            for (name, value) in &summary.metrics {
                println!("{name} = {value}");
            }
            println!("wrote {} artifacts to {}", summary.artifacts.len() + 2, summary.output_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("lhz: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
