//! `spin1` command-line front end.
//!
//! Exit codes: 0 all checks passed, 1 a verification failed (the report is
//! still written), 2 usage or configuration error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
pub mod config;
pub mod snapshot;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "spin1", version, about = "Spin-1 first-order wave equation toolkit")]
pub struct Cli {
    /// Machine-readable output and errors.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    H,
    E,
    A,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    #[value(name = "+")]
    Plus,
    #[value(name = "-")]
    Minus,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the matrix identities in exact arithmetic.
    VerifyAlgebra,
    /// Eigenvalues of H(k).
    Dispersion {
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        /// Wavevector as x,y,z.
        #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
        k: Vec<f64>,
    },
    /// Derive (u, v) from a seeded plane-wave potential and check the system.
    ChainCheck {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        modes: usize,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, value_enum, default_value = "h")]
        variant: VariantArg,
        #[arg(long = "mass-sign", value_enum, default_value = "-", allow_hyphen_values = true)]
        mass_sign: SignArg,
    },
    /// Evolve a configured initial state and write diagnostics.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        /// Final snapshot; overrides the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Diagnostics CSV; overrides the config.
        #[arg(long)]
        diag: Option<PathBuf>,
    },
    /// Coupled-field identities on random trial fields.
    EmCheck {
        #[arg(long)]
        config: PathBuf,
    },
    /// Lattice spectrum in a uniform magnetic field.
    Landau {
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long, default_value_t = 1)]
        flux: u32,
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = 1.0)]
        charge: f64,
        /// Box side; defaults to sqrt(2 pi), where one flux quantum gives eB = 1.
        #[arg(long)]
        length: Option<f64>,
        /// Sorted E^2 values as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Print the header of a snapshot file.
    SnapshotInfo { path: PathBuf },
}

/// Error raised by a subcommand, carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn failed(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_FAILED,
            message: message.into(),
        }
    }
}

fn report_error(json: bool, code: i32, message: &str) {
    let mut err = std::io::stderr().lock();
    if json {
        let v = serde_json::json!({ "error": message, "exit_code": code });
        let _ = writeln!(err, "{v}");
    } else {
        let _ = writeln!(err, "error: {message}");
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("SPIN1_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("SPIN1_THREADS must be a non-negative integer, got {raw:?}")))?;
    if n > 0 {
        // A pool built earlier in the same process stays in place.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parse `argv` (program name first), run the subcommand and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let json_requested = argv.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return EXIT_OK;
            }
            if json_requested {
                report_error(true, EXIT_USAGE, e.to_string().trim_end());
            } else {
                let _ = e.print();
            }
            return EXIT_USAGE;
        }
    };
    if let Err(e) = configure_threads() {
        report_error(cli.json, e.code, &e.message);
        return e.code;
    }
    match commands::dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            report_error(cli.json, e.code, &e.message);
            e.code
        }
    }
}
