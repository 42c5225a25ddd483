mod args;
mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;
use odeim_core::cartan::AlgebraKind;
use odeim_core::error::Error;

use output::Format;

#[derive(Parser)]
#[command(name = "odeim", version, about = "ODE/IM numerics for simply-laced affine Kac-Moody algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,

    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Worker threads for grids over E and x (0: all cores).
    #[arg(long, default_value_t = 0, global = true)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Perron-Frobenius vector against the closed forms.
    Masses {
        #[arg(long, value_parser = args::algebra)]
        algebra: AlgebraKind,
    },
    /// Chevalley, grading and twist residuals of the fundamental representations.
    Repcheck {
        #[arg(long, value_parser = args::algebra)]
        algebra: AlgebraKind,
        #[arg(long)]
        node: Option<usize>,
    },
    /// Subdominant solution (or its rotation Ψ_k) on a grid of x.
    Solve {
        #[command(flatten)]
        conn: ConnArgs,
        #[arg(long, default_value_t = 1)]
        node: usize,
        /// x grid, `a:b:n` or a list.
        #[arg(long, value_parser = args::grid, default_value = "2,1,0.5")]
        grid: args::List<f64>,
        /// Rotation index k.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        k: f64,
        #[arg(long)]
        x_match: Option<f64>,
    },
    /// Ψ-system residuals on 16 points of [0.2, 2].
    Psicheck {
        #[command(flatten)]
        conn: ConnArgs,
        /// Node (all nodes when omitted).
        #[arg(long)]
        node: Option<usize>,
    },
    /// Table of Q and Q-tilde over a grid of real E.
    Q {
        #[command(flatten)]
        conn: ConnArgs,
        #[command(flatten)]
        ell: EllArgs,
        #[arg(long, default_value_t = 1)]
        node: usize,
        /// Energy grid, `a:b:n` or a list.
        #[arg(long, value_parser = args::grid, default_value = "-5:5:11", allow_hyphen_values = true)]
        grid: args::List<f64>,
    },
    /// Zeros of Q^(i) in a real window and the Bethe residuals there.
    Bethe {
        #[command(flatten)]
        conn: ConnArgs,
        #[command(flatten)]
        ell: EllArgs,
        #[arg(long, default_value_t = 1)]
        node: usize,
        #[arg(long, value_parser = args::window, default_value = "0:30", allow_hyphen_values = true)]
        window: (f64, f64),
        #[arg(long, default_value_t = 3)]
        max_count: usize,
        /// Grid points scanned across the window.
        #[arg(long, default_value_t = 61)]
        scan: usize,
        /// Count zeros in a rectangle around the window by the argument principle.
        #[arg(long)]
        certify: bool,
    },
    /// g-Airy function by contour quadrature.
    Airy {
        /// `A` (matrix size n, algebra A_{n-1}) or `D` (rank n).
        #[arg(long, value_parser = ["A", "D", "a", "d"])]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = args::grid, default_value = "0.5:3:11", allow_hyphen_values = true)]
        grid: args::List<f64>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        k: i32,
        /// Compare with the ODE solution after one-point normalization at x = 1.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Args, Clone)]
struct ConnArgs {
    #[arg(long, value_parser = args::algebra)]
    algebra: AlgebraKind,
    #[arg(long = "M", default_value_t = 1.0)]
    m: f64,
    #[arg(long = "E", value_parser = args::complex, default_value = "0", allow_hyphen_values = true)]
    energy: C64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args, Clone)]
struct EllArgs {
    /// Coefficients of ℓ = Σ ℓ_j h_j, comma-separated (zero when omitted).
    #[arg(long, value_parser = args::complex_list, allow_hyphen_values = true)]
    ell: Option<args::List<C64>>,
    /// Draw ℓ from the unit polydisc.
    #[arg(long, conflicts_with = "ell")]
    random_ell: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Weyl word for ℓ = 0, e.g. `1,2`.
    #[arg(long, value_parser = args::word, default_value = "")]
    word: args::List<usize>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) => 3,
        Error::Unsupported(_) => 4,
        Error::Construction(_) => 5,
        Error::Dimension(_) => 6,
        Error::NoMaximalEigenvalue(_) => 7,
        Error::Integration { .. } => 8,
        Error::NonGeneric(_) => 9,
        Error::IllConditioned(_) => 10,
        Error::Degenerate(_) => 11,
        Error::Radius(_) => 12,
        Error::Eigen => 13,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    let report = match cli.command {
        Command::Masses { algebra } => commands::masses(algebra),
        Command::Repcheck { algebra, node } => commands::repcheck(algebra, node),
        Command::Solve { conn, node, grid, k, x_match } => commands::solve(&conn.into(), node, &grid.0, k, x_match),
        Command::Psicheck { conn, node } => commands::psicheck(&conn.into(), node),
        Command::Q { conn, ell, node, grid } => commands::q_table(&conn.into(), &ell.into(), node, &grid.0),
        Command::Bethe { conn, ell, node, window, max_count, scan, certify } => {
            commands::bethe(&conn.into(), &ell.into(), node, window, max_count, scan, certify)
        }
        Command::Airy { family, n, grid, k, check } => commands::airy(&family, n, &grid.0, k, check),
    };
    match report {
        Ok(r) => {
            if let Err(e) = r.write(cli.format, cli.output.as_deref()) {
                eprintln!("odeim: cannot write output: {e}");
                return ExitCode::from(14);
            }
            if r.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("odeim: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

impl From<ConnArgs> for commands::Conn {
    fn from(a: ConnArgs) -> Self {
        commands::Conn { kind: a.algebra, m: a.m, energy: a.energy, tol: a.tol }
    }
}

impl From<EllArgs> for commands::Ell {
    fn from(a: EllArgs) -> Self {
        commands::Ell { values: a.ell.map(|l| l.0), random: a.random_ell, seed: a.seed, word: a.word.0 }
    }
}
