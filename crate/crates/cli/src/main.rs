//! `sepfront`: entropic separability analysis from the command line.

mod commands;
mod grid;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use grid::{parse_q, GridSpec};
use output::Format;
use sepfront::figures::Preset;

#[derive(Debug, Parser)]
#[command(
    name = "sepfront",
    version,
    about = "Tsallis conditional entropy and separable-entangled frontiers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format for tables.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,

    /// Write the table to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads for grid commands (output does not depend on it).
    #[arg(long, global = true, env = "SEPFRONT_PARALLEL")]
    parallel: Option<usize>,
}

#[derive(Debug, Args, Clone, Copy)]
struct PointArgs {
    #[arg(long, allow_negative_numbers = true)]
    x: f64,
    #[arg(long, allow_negative_numbers = true)]
    y: f64,
    /// Temperature; 0 selects the zero-temperature limit.
    #[arg(long = "T", allow_negative_numbers = true)]
    t: f64,
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
}

#[derive(Debug, Args, Clone)]
struct FrontierArgs {
    #[arg(long = "T", conflicts_with = "t_grid", allow_negative_numbers = true)]
    t: Option<f64>,
    /// Temperature grid `start:end:count`, endpoints included.
    #[arg(long = "T-grid")]
    t_grid: Option<GridSpec>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    /// Bisection tolerance in y.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Points in the coarse y scan.
    #[arg(long, default_value_t = 64)]
    coarse: usize,
    /// Skip the vertex-locus column.
    #[arg(long)]
    no_vertices: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Entropies at one point.
    Eval {
        #[command(flatten)]
        point: PointArgs,
        /// Entropic index; `inf` gives the sign of the q -> infinity limit.
        #[arg(long, value_parser = parse_q)]
        q: f64,
    },
    /// S_q(A|B) over a q grid plus q = 1 and q = infinity.
    ScanQ {
        #[command(flatten)]
        point: PointArgs,
        /// q grid `start:end:count`; log-spaced unless --linear.
        #[arg(long, default_value = "0.1:100:60")]
        q_grid: GridSpec,
        #[arg(long)]
        linear: bool,
    },
    /// Frontier y along a line in x or in T.
    Frontier {
        #[arg(long, conflicts_with = "x_grid", allow_negative_numbers = true)]
        x: Option<f64>,
        /// x grid `start:end:count`, endpoints included.
        #[arg(long)]
        x_grid: Option<GridSpec>,
        #[command(flatten)]
        line: FrontierArgs,
    },
    /// Frontier y over an (x, T) grid with the vertex locus per T.
    Sweep {
        #[arg(long)]
        x_grid: GridSpec,
        #[arg(long = "T-grid")]
        t_grid: GridSpec,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 64)]
        coarse: usize,
        #[arg(long)]
        no_vertices: bool,
    },
    /// Temperature above which no entangled region remains.
    TCritical {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Seeded cross-validation suite.
    Verify {
        #[arg(long, default_value_t = 20240101)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Data for a figure preset: 1, 2, 3, 4, 4-vertices or 5.
    Figure {
        #[arg(long)]
        id: Preset,
    },
    /// Truncated density matrix as `row col value` triplets.
    DumpMatrix {
        #[command(flatten)]
        point: PointArgs,
        /// Levels per oscillator; chosen from --tail-tol when absent.
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long, default_value_t = 1e-10)]
        tail_tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match cli.parallel {
        Some(0) => {
            eprintln!("error: --parallel must be at least 1");
            return ExitCode::from(2);
        }
        Some(n) => n,
        None => 1,
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(3);
        }
    };
    let ctx = commands::Context {
        format: cli.format,
        output: cli.output,
    };
    match pool.install(|| commands::run(cli.command, &ctx)) {
        Ok(code) => code,
        Err(failure) => {
            if !failure.message.is_empty() {
                eprintln!("error: {}", failure.message);
            }
            ExitCode::from(failure.code)
        }
    }
}
