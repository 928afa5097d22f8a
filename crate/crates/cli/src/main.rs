mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use sextic::dynamics::FailureKind;
use sextic::Error;

/// Exact and high-precision tools for monodromy-free sextic potentials.
#[derive(Parser, Debug)]
#[command(name = "sextic", version)]
pub struct Cli {
    #[command(flatten)]
    pub run: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Working precision in bits.
    #[arg(long, global = true, env = "SEXTIC_PRECISION_BITS", default_value_t = 256,
          value_parser = clap::value_parser!(u32).range(64..))]
    pub prec: u32,
    /// Tolerance for zero tests and root clustering [default: 2^(-prec/2)].
    #[arg(long, global = true)]
    pub zero_tol: Option<f64>,
    /// Newton residual tolerance [default: 2^(-3 prec/4)].
    #[arg(long, global = true)]
    pub newton_tol: Option<f64>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 20_240_601)]
    pub seed: u64,
    /// JSON output file; stdout when absent.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn zero_tol(&self) -> f64 {
        self.zero_tol.unwrap_or_else(|| sextic::exactnum::default_tol(self.prec))
    }

    pub fn newton_tol(&self) -> f64 {
        self.newton_tol.unwrap_or_else(|| 2f64.powi(-((3 * self.prec / 4) as i32)))
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Quasi-polynomial spectrum of x^6 - nu x^2 + l(l+1)/x^2.
    Qes(ProblemArgs),
    /// Crum descendants of the canonical sextic.
    Darboux(DarbouxArgs),
    /// Trivial-monodromy checks and locus solving.
    Locus {
        #[command(subcommand)]
        action: LocusAction,
    },
    /// Stieltjes relations of a quasi-rational function.
    Stieltjes(StieltjesArgs),
    /// Zero and pole dynamics.
    Dynamics(DynamicsArgs),
    /// Runs every acceptance criterion and prints a pass/fail table.
    Repro {
        /// Run a single criterion.
        #[arg(long)]
        criterion: Option<u8>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ExpArg {
    /// exp(-x^4/4)
    Minus,
    /// exp(+x^4/4)
    Plus,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum BranchArg {
    /// x^(-l) at the origin
    MinusL,
    /// x^(l+1) at the origin
    LPlusOne,
}

#[derive(Args, Debug)]
pub struct ProblemArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = decimal)]
    pub nu: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true, value_parser = decimal)]
    pub ell: String,
    #[arg(long = "exp", value_enum, default_value = "minus")]
    pub exp: ExpArg,
    #[arg(long, value_enum, default_value = "minus-l")]
    pub branch: BranchArg,
    /// Family label (D+-, D++, D-+, D--); overrides --exp and --branch.
    #[arg(long, allow_hyphen_values = true)]
    pub family: Option<String>,
}

#[derive(Args, Debug)]
pub struct DarbouxArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Comma-separated eigenfunction indices (1-based); empty for the base.
    #[arg(long, conflicts_with = "enumerate", required_unless_present = "enumerate")]
    pub subset: Option<String>,
    /// All 2^M descendants.
    #[arg(long, requires = "out_dir")]
    pub enumerate: bool,
    /// Directory for the enumerated potentials.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum LocusAction {
    /// Laurent-coefficient check of a potential or configuration file.
    Check {
        input: PathBuf,
    },
    /// Newton solve from an initial configuration.
    Solve {
        input: PathBuf,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
    },
    /// Continuation of a locus solution in nu.
    Continue {
        input: PathBuf,
        /// Final value of nu.
        #[arg(long, allow_hyphen_values = true)]
        nu_to: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Geometric rather than linear spacing in nu (same sign at both ends).
        #[arg(long)]
        geometric: bool,
        /// Branch samples as CSV.
        #[arg(long)]
        csv: PathBuf,
    },
}

#[derive(Args, Debug)]
pub struct StieltjesArgs {
    /// Quasi-rational function file, or a pole configuration with --shape-sweep.
    pub input: PathBuf,
    /// Solve the relations starting from the input.
    #[arg(long)]
    pub solve: bool,
    /// Solve over (a, -a) pairs.
    #[arg(long, requires = "solve")]
    pub symmetric: bool,
    /// Best residual over every admissible zero count and exponent.
    #[arg(long, conflicts_with = "solve")]
    pub shape_sweep: bool,
    /// Random starts per shape.
    #[arg(long, default_value_t = 16)]
    pub starts: usize,
}

#[derive(Args, Debug)]
pub struct DynamicsArgs {
    /// Initial state file.
    #[arg(long, conflicts_with = "closed_form_nu7", required_unless_present = "closed_form_nu7")]
    pub state: Option<PathBuf>,
    /// Two-zero closed-form family, as `c1,c2` (complex entries like 1+2i).
    #[arg(long, allow_hyphen_values = true)]
    pub closed_form_nu7: Option<String>,
    /// Start time for the closed form.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t0: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub atol: f64,
    #[arg(long, default_value_t = 0.05)]
    pub max_step: f64,
    /// Trajectory CSV.
    #[arg(long)]
    pub csv: PathBuf,
}

fn decimal(s: &str) -> Result<String, String> {
    rug::Float::parse(s.trim())
        .map(|_| s.to_string())
        .map_err(|e| format!("not a decimal number: {e}"))
}

/// Exit status for a failed run.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::NoQuasiPolynomialSolutions(_)) => 2,
        Some(Error::IterationCap { .. } | Error::NoConvergence(_) | Error::SingularJacobian) => 3,
        Some(Error::Collision { .. }) => 4,
        Some(Error::Integration(f)) => match f.kind {
            FailureKind::Collision => 4,
            FailureKind::StepUnderflow | FailureKind::BlowUp => 3,
        },
        _ => match err.downcast_ref::<commands::Status>() {
            Some(s) => s.code,
            None => 1,
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(64),
            };
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
