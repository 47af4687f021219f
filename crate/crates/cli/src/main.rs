use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

const CSV_SCHEMAS: &str = "\
CSV output (stdout or --output), one header row first:
  symmetrize   t,axis,levels,sup_in,sup_out,max_change
  properties   name,lhs,rhs,slack,pass
  lemmas       name,lhs,rhs,slack,pass
  decompose    k,z0..zN,inner_radius,outer_radius,radiality_residual,monotone,accepted
  verify-pde   name,lhs,rhs,slack,pass
  brock        name,lhs,rhs,slack,pass
  example      variant,p,s,dim,n,sup,lipschitz
  rings        name,lhs,rhs,slack,pass

Checks pass when lhs <= rhs + slack. Exit status: 0 when every check
passes, 1 when one fails, 2 on usage or I/O errors.";

#[derive(Parser, Debug)]
#[command(name = "steinerflow", version, about = "Continuous Steiner symmetrization and symmetry checks for sampled functions", after_help = CSV_SCHEMAS)]
struct Cli {
    /// Worker threads [default: all cores].
    #[arg(long, global = true, env = "STEINERFLOW_THREADS")]
    threads: Option<usize>,
    /// Write CSV here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
    /// Seed for randomized test functions.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Input {
    /// Input grid function (SGF).
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
}

#[derive(Args, Debug, Clone, Copy)]
struct Sym {
    /// Symmetrization axis.
    #[arg(long, default_value_t = 0)]
    axis: usize,
    /// Number of levels of the ladder.
    #[arg(long, default_value_t = steinerflow::DEFAULT_LEVELS)]
    levels: usize,
}

#[derive(Args, Debug, Clone, Copy)]
struct Equation {
    /// Exponent of the p-Laplacian.
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Exemplar profile exponent; selects the source term.
    #[arg(long, default_value_t = 3.0)]
    s: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum ExampleKind {
    ThreeMountains,
    Ring,
    Shifted,
    Perturbed,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq)]
enum Mode {
    Outer,
    Ring,
    Degenerate,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Symmetrize a grid function along one axis.
    Symmetrize {
        #[command(flatten)]
        input: Input,
        /// Time; `inf` gives the Steiner symmetrization.
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        sym: Sym,
        /// Output grid function (SGF).
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Rearrangement inequalities at time t.
    Properties {
        #[command(flatten)]
        input: Input,
        /// Comparison function v >= u; defaults to u itself.
        #[arg(long, value_name = "FILE")]
        upper: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        #[command(flatten)]
        sym: Sym,
    },
    /// Energy, flux and small-time estimates for a solution.
    Lemmas {
        #[command(flatten)]
        input: Input,
        /// Ring-shaped function for the truncated ordering; defaults to the input.
        #[arg(long, value_name = "FILE")]
        ring: Option<PathBuf>,
        #[command(flatten)]
        eq: Equation,
        #[arg(long, default_value_t = 0.2)]
        t: f64,
        /// Allowed small-time slope.
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[command(flatten)]
        sym: Sym,
    },
    /// Splits the non-flat region into radial annuli.
    Decompose {
        #[command(flatten)]
        input: Input,
        /// Radiality tolerance.
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
        /// Fail unless exactly this many annuli are found.
        #[arg(long)]
        expect_annuli: Option<usize>,
    },
    /// Weak residuals against random bumps and the boundary condition.
    VerifyPde {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        eq: Equation,
        /// Number of test bumps.
        #[arg(long, default_value_t = 10)]
        tests: usize,
        #[arg(long, default_value_t = 0.5)]
        radius_min: f64,
        #[arg(long, default_value_t = 1.5)]
        radius_max: f64,
        /// Allowed weak residual [default: one grid spacing].
        #[arg(long)]
        weak_tol: Option<f64>,
        #[arg(long, value_enum, default_value_t = Mode::Outer)]
        mode: Mode,
        /// Bound on |grad u| near the boundary in degenerate mode.
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Width of the boundary band [default: one grid spacing].
        #[arg(long)]
        band_width: Option<f64>,
        /// Expected boundary gradients (outer, then inner for rings).
        #[arg(long, value_delimiter = ',')]
        expect: Vec<f64>,
        /// Relative tolerance for --expect.
        #[arg(long, default_value_t = 0.02)]
        rel: f64,
    },
    /// Small-time slope of the gradient energy under symmetrization.
    Brock {
        #[command(flatten)]
        input: Input,
        /// Exponent of G(z) = z^p/p.
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[command(flatten)]
        sym: Sym,
        /// Critical slope [default: scaled by the discretization error].
        #[arg(long)]
        eps_crit: Option<f64>,
        /// Times of the slope fit.
        #[arg(long, value_delimiter = ',')]
        times: Vec<f64>,
        /// Also write the table t,energy_change here.
        #[arg(long, value_name = "FILE")]
        energies: Option<PathBuf>,
    },
    /// Samples a closed-form exemplar.
    Example {
        #[arg(value_enum)]
        kind: ExampleKind,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 3.0)]
        s: f64,
        /// Nodes per axis.
        #[arg(long, default_value_t = 128)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Output grid function (SGF).
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Boundary conditions and truncated ordering on a ring-shaped domain.
    Rings {
        #[command(flatten)]
        input: Input,
        /// Exponent of G(z) = z^p/p.
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 0.1)]
        t: f64,
        /// Truncations beta1,beta0,gamma0,gamma1.
        #[arg(long, value_delimiter = ',', default_values_t = [0.9, 0.8, 0.3, 0.2])]
        truncations: Vec<f64>,
        #[arg(long)]
        band_width: Option<f64>,
        /// Expected outer and inner boundary gradients.
        #[arg(long, value_delimiter = ',')]
        expect: Vec<f64>,
        #[arg(long, default_value_t = 0.02)]
        rel: f64,
        #[command(flatten)]
        sym: Sym,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let threads = cli.threads;
    let run = move || commands::run(&cli);
    let outcome = match threads {
        Some(n) => steinerflow::battery::with_threads(n, run).and_then(|r| r),
        None => run(),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("steinerflow: {e}");
            ExitCode::from(2)
        }
    }
}
