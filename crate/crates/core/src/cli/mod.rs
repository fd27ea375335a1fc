//! Command-line front end: `dualdyson <config> [--out DIR] [--seedless]`.

mod config;
mod run;

use std::path::PathBuf;

use clap::Parser;

pub use config::{
    parse_config, ConfigError, Experiment, HhgSettings, JcSettings, Model, RunConfig, SweepParameter, SweepSettings,
    WkbjSettings,
};
pub use run::{run, RunError, EXIT_CONFIG, EXIT_IO, EXIT_NUMERICAL};

#[derive(Debug, Parser)]
#[command(name = "dualdyson", about = "Run a Dyson / dual Dyson series experiment from a JSON config")]
pub struct Args {
    /// Path to the JSON run configuration.
    pub config: PathBuf,
    /// Output directory (overrides `output` in the config).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Accepted for compatibility; no experiment uses random numbers.
    #[arg(long)]
    pub seedless: bool,
}

/// Runs the CLI and returns the process exit code.
pub fn main_with_args(args: Args) -> i32 {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return EXIT_IO;
        }
    };
    let config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let out = args.out.or_else(|| config.output.clone().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("out"));
    match run(&config, &out) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
