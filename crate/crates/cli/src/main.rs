use std::path::PathBuf;
use std::process::ExitCode;

use blidkit_cli::{resolve_output_dir, run, ExperimentConfig, RunError};
use clap::Parser;

/// Run a blidkit experiment from a JSON config.
///
/// Exit status: 0 when every verdict is as expected, 2 when any is not,
/// 1 on configuration or runtime errors.
#[derive(Debug, Parser)]
#[command(name = "blidkit", version)]
struct Args {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: config `output_dir`, then $BLIDKIT_OUTPUT_DIR, then ./blidkit-out).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Only print errors.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("blidkit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(args: &Args) -> Result<i32, RunError> {
    let mut config = ExperimentConfig::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let dir = resolve_output_dir(args.output.clone(), &config);
    let summary = run(&config, &dir)?;
    if !args.quiet {
        for c in &summary.cases {
            let verdict = match (c.pass, c.expected_pass) {
                (true, true) => "pass",
                (false, false) => "fail (expected)",
                (false, true) => "FAIL",
                (true, false) => "PASS (expected fail)",
            };
            println!("{verdict:>20}  {}", c.name);
        }
        println!("report: {}", summary.report_path.display());
    }
    Ok(summary.exit_code())
}
