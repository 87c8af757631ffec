use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hypmass_cli::config::{Command, Overrides};
use hypmass_cli::run_file;

/// Mass, static-potential and rigidity checks for asymptotically hyperbolic metrics.
#[derive(Parser, Debug)]
#[command(name = "hypmass", version)]
struct Args {
    /// Command to run; may instead be given as "command" in the config.
    #[arg(value_enum)]
    command: Option<Command>,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Polar nodes of the sphere quadrature.
    #[arg(long)]
    quad_order: Option<usize>,
    /// Primary tolerance of the command.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let ov = Overrides {
        command: args.command,
        out: args.out,
        quad_order: args.quad_order,
        tol: args.tol,
        seed: args.seed,
    };
    match run_file(&args.config, &ov) {
        Ok((report, dir)) => {
            for c in &report.checks {
                println!(
                    "{} {}: {:e} (tolerance {:e})",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.tolerance
                );
            }
            println!("report written to {}", dir.join("report.json").display());
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
