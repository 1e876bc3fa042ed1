//! weyl-jacobi: spectral transforms for complex Jacobi matrices.
//!
//! Every subcommand prints one JSON report to stdout (the weyl grid prints
//! CSV when no --out file is given) and uses the exit codes 0 success,
//! 1 tolerance failure, 2 input error, 3 numeric error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use weyl_jacobi_cli::commands;

#[derive(Parser)]
#[command(
    name = "weyl-jacobi",
    version,
    about = "Direct and inverse spectral transforms for complex Jacobi matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute spectral data (atoms of nu with phases psi) from a
    /// coefficient file.
    Direct {
        /// Coefficient JSON file.
        coefficients: PathBuf,
        /// Truncation size (defaults to the full file).
        #[arg(long)]
        depth: Option<usize>,
        /// Write the spectral data to this file as well as the report.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the 2x2 matrix measure to this file.
        #[arg(long)]
        measure_out: Option<PathBuf>,
    },
    /// Reconstruct coefficients from a spectral-data file.
    Inverse {
        /// Spectral JSON file.
        spectral: PathBuf,
        /// Number of diagonal coefficients to reconstruct (defaults to the
        /// atom count).
        #[arg(long)]
        depth: Option<usize>,
        /// Write the coefficients to this file as well as the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run direct then inverse and compare; exit 0 iff every coefficient
    /// returns within --tol.
    Roundtrip {
        /// Coefficient JSON file (alternative to --seed).
        coefficients: Option<PathBuf>,
        /// Generate the instance from this seed instead of a file.
        #[arg(long)]
        seed: Option<u64>,
        /// Truncation size; required with --seed.
        #[arg(long)]
        depth: Option<usize>,
        /// Largest accepted relative coefficient error.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Test hook: corrupt the spectral intermediate to force a failure.
        #[arg(long)]
        corrupt: bool,
    },
    /// Tabulate Weyl matrices on a grid: CSV of z, M(w), R(z) and identity
    /// residuals, one row per w = r exp(i ray-angle), z = sqrt(w).
    Weyl {
        /// Spectral JSON file.
        spectral: PathBuf,
        /// Grid radii in the w plane, as r0:r1:count:log (or :lin).
        #[arg(long, default_value = "1:100:21:log")]
        radii: String,
        /// Ray angle in the w plane, in radians.
        #[arg(long, default_value_t = std::f64::consts::PI)]
        ray_angle: f64,
        /// Write the CSV here and print a report instead of the CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the decay order of the scaled Weyl-matrix difference of two
    /// operators; the order localizes their first disagreement.
    BorgMarchenko {
        /// First coefficient JSON file.
        coefficients1: PathBuf,
        /// Second coefficient JSON file.
        coefficients2: PathBuf,
        /// Truncation size applied to both files (defaults to each file's
        /// own size).
        #[arg(long)]
        depth: Option<usize>,
        /// Fit radii in the w plane, as r0:r1:count:log (or :lin).
        #[arg(long, default_value = "10:1e5:9:log")]
        radii: String,
        /// Ray angle in the w plane, in radians.
        #[arg(long, default_value_t = std::f64::consts::PI)]
        ray_angle: f64,
    },
    /// Classify spectral data: self-adjoint and free-diagonal detection.
    Classify {
        /// Spectral JSON file.
        spectral: PathBuf,
        /// Phase threshold for the classification.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Weak-convergence residuals of a coefficient sequence against its
    /// limit, from a manifest file.
    Continuity {
        /// Manifest JSON file with "limit", "sequence" and optional "n".
        manifest: PathBuf,
        /// Truncation size (overrides the manifest's "n").
        #[arg(long)]
        depth: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Direct { coefficients, depth, out, measure_out } => commands::cmd_direct(
            coefficients,
            *depth,
            out.as_deref(),
            measure_out.as_deref(),
        ),
        Command::Inverse { spectral, depth, out } => {
            commands::cmd_inverse(spectral, *depth, out.as_deref())
        }
        Command::Roundtrip { coefficients, seed, depth, tol, corrupt } => {
            commands::cmd_roundtrip(coefficients.as_deref(), *seed, *depth, *tol, *corrupt)
        }
        Command::Weyl { spectral, radii, ray_angle, out } => {
            commands::cmd_weyl(spectral, radii, *ray_angle, out.as_deref())
        }
        Command::BorgMarchenko { coefficients1, coefficients2, depth, radii, ray_angle } => {
            commands::cmd_borg_marchenko(coefficients1, coefficients2, *depth, radii, *ray_angle)
        }
        Command::Classify { spectral, tol } => commands::cmd_classify(spectral, *tol),
        Command::Continuity { manifest, depth } => commands::cmd_continuity(manifest, *depth),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
