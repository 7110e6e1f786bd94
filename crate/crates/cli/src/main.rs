use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use fuchsian_cli::commands::{certify_cmd, check_cmd, solve_cmd, verify_example_cmd, CertifyArgs, CliError};
use fuchsian_cli::report::Obj;

#[derive(Parser)]
#[command(name = "fuchsian", version, about = "Formal solutions and uniqueness certificates for Fuchsian PDEs")]
struct Cli {
    /// Append wall-clock timings to the report (breaks byte-identical output).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an equation and print its characteristic exponents.
    Check {
        spec: String,
        /// Depth K for the P_k(0) != 0 test.
        #[arg(long, default_value_t = 8)]
        order: u32,
    },
    /// Compute the formal solution through t^K.
    Solve {
        spec: String,
        #[arg(long, default_value_t = 8)]
        order: u32,
        /// Also write u0 as a series JSON file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build and verify the barrier certificate for a candidate w.
    Certify {
        spec: String,
        #[arg(long, conflicts_with = "w_random")]
        w: Option<String>,
        /// Draw w from the seeded candidate class instead of a file.
        #[arg(long)]
        w_random: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        order: u32,
        #[arg(long, default_value_t = 50)]
        grid: usize,
        /// Integrate characteristics down to tfloor * t0.
        #[arg(long, default_value_t = 1e-6)]
        tfloor: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        kappa: Option<f64>,
        /// Override eps00 after the parameter search.
        #[arg(long)]
        eps00: Option<f64>,
        /// Directory for grid.csv and path.csv.
        #[arg(long)]
        out: Option<String>,
    },
    /// Reproduce one of the bundled worked examples.
    VerifyExample {
        name: String,
        #[arg(long, default_value_t = 4)]
        exponent_p: i32,
    },
}

fn run(cli: Cli) -> Result<fuchsian_cli::report::Report, CliError> {
    match cli.command {
        Command::Check { spec, order } => check_cmd(&spec, order),
        Command::Solve { spec, order, out } => solve_cmd(&spec, order, out.as_deref()),
        Command::Certify { spec, w, w_random, seed, order, grid, tfloor, tol, kappa, eps00, out } => {
            let args = CertifyArgs { w, w_random, seed, order, grid, tfloor, tol, kappa, eps00, out };
            certify_cmd(&spec, &args)
        }
        Command::VerifyExample { name, exponent_p } => verify_example_cmd(&name, exponent_p),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let timings = cli.timings;
    let start = Instant::now();
    match run(cli) {
        Ok(mut report) => {
            if timings {
                report.timings = Some(Obj::new().f("total_seconds", start.elapsed().as_secs_f64()).into());
            }
            print!("{}", report.to_json());
            ExitCode::from(report.outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
