use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use alif_cli::commands::{
    self, AcsArgs, CounterexampleArgs, DecomposeArgs, SpectrumArgs, SweepArgs, SweepMetric,
    SymbolArgs,
};

const DEFAULT_EXTREMA_LENGTH: &str = r#"{"type":"extrema","multiplier":2.0}"#;

/// Signal decomposition by adaptive local iterative filtering, plus spectral
/// diagnostics for its iteration matrices.
#[derive(Parser)]
#[command(name = "alif-spectra", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a signal (CSV, one sample per line) into IMFs plus a trend.
    Decompose {
        /// Input signal path.
        #[arg(long)]
        signal: PathBuf,
        /// Filter document (inline JSON or a path).
        #[arg(long)]
        filter: String,
        /// Length document or extrema strategy (inline JSON or a path).
        #[arg(long, default_value = DEFAULT_EXTREMA_LENGTH)]
        length: String,
        /// Relative stopping tolerance of the inner loop.
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        /// Inner-iteration cap.
        #[arg(long, default_value_t = 200)]
        max_inner: usize,
        /// Cap on the number of extracted IMFs.
        #[arg(long, default_value_t = 32)]
        max_imfs: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the symbol on a tensor grid and dump plot-ready CSV.
    Symbol {
        #[arg(long)]
        filter: String,
        #[arg(long)]
        length: String,
        #[arg(long = "grid-x", default_value_t = 101)]
        grid_x: usize,
        #[arg(long = "grid-theta", default_value_t = 257)]
        grid_theta: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Full spectral report for one iteration matrix.
    Spectrum {
        #[arg(long)]
        filter: String,
        #[arg(long)]
        length: String,
        /// Matrix size.
        #[arg(long)]
        n: usize,
        /// Also dump the matrix as CSV.
        #[arg(long)]
        dump_matrix_csv: bool,
        /// Also dump the matrix in the binary layout.
        #[arg(long)]
        dump_matrix_bin: bool,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-size metric sweeps (parallelism capped by ALIF_SPECTRA_THREADS).
    Sweep {
        #[arg(long, value_enum)]
        metric: MetricArg,
        #[arg(long)]
        filter: String,
        #[arg(long)]
        length: String,
        /// Comma-separated matrix sizes.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        /// Truncation width (zero-distribution metric only).
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Truncation-error table: empirical energy against the closed bound.
    Acs {
        #[arg(long)]
        filter: String,
        #[arg(long)]
        length: String,
        /// Comma-separated matrix sizes.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        /// Comma-separated truncation widths.
        #[arg(long, value_delimiter = ',')]
        m: Vec<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build and verify the 3x3 divergence fixture (exit 1 on failure).
    Counterexample {
        /// Dump the kernel nodes as CSV.
        #[arg(long)]
        dump_filter: bool,
        /// Dump the symbol grid as CSV.
        #[arg(long)]
        dump_symbol: bool,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Distribution,
    SymmetryDefect,
    ZeroDistribution,
}

impl From<MetricArg> for SweepMetric {
    fn from(m: MetricArg) -> SweepMetric {
        match m {
            MetricArg::Distribution => SweepMetric::Distribution,
            MetricArg::SymmetryDefect => SweepMetric::SymmetryDefect,
            MetricArg::ZeroDistribution => SweepMetric::ZeroDistribution,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Decompose {
            signal,
            filter,
            length,
            delta,
            max_inner,
            max_imfs,
            seed,
            out,
        } => commands::run_decompose(&DecomposeArgs {
            signal,
            filter,
            length,
            delta,
            max_inner,
            max_imfs,
            seed,
            out,
        }),
        Command::Symbol {
            filter,
            length,
            grid_x,
            grid_theta,
            seed,
            out,
        } => commands::run_symbol(&SymbolArgs {
            filter,
            length,
            grid_x,
            grid_theta,
            seed,
            out,
        }),
        Command::Spectrum {
            filter,
            length,
            n,
            dump_matrix_csv,
            dump_matrix_bin,
            seed,
            out,
        } => commands::run_spectrum(&SpectrumArgs {
            filter,
            length,
            n,
            dump_matrix_csv,
            dump_matrix_bin,
            seed,
            out,
        }),
        Command::Sweep {
            metric,
            filter,
            length,
            sizes,
            m,
            seed,
            out,
        } => commands::run_sweep(&SweepArgs {
            metric: metric.into(),
            filter,
            length,
            sizes,
            m,
            seed,
            out,
        }),
        Command::Acs {
            filter,
            length,
            sizes,
            m,
            seed,
            out,
        } => commands::run_acs(&AcsArgs {
            filter,
            length,
            sizes,
            m,
            seed,
            out,
        }),
        Command::Counterexample {
            dump_filter,
            dump_symbol,
            seed,
            out,
        } => commands::run_counterexample(&CounterexampleArgs {
            dump_filter,
            dump_symbol,
            seed,
            out,
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("alif-spectra: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
