//! Command-line front end for `levykit`: JSON model specs in, result
//! envelopes and CSV tables out.

pub mod canned;
pub mod commands;
pub mod envelope;
pub mod spec;

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use levykit::Complex64;
use serde_json::json;

pub use commands::{Options, Suite};
pub use envelope::ResultEnvelope;
pub use spec::ModelSpec;

#[derive(Debug, Parser)]
#[command(name = "levykit", version, about = "Compensators, Mellin transforms and measure changes for Lévy models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON model specification.
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    /// Directory for CSV tables.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of Monte Carlo paths; enables MC cross-checks where optional.
    #[arg(long, global = true)]
    pub paths: Option<usize>,
    /// Print the result envelope as JSON.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Yor,
    Modulus,
    PiiMean,
    Martingale,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Characteristic function of X_T.
    Charfn {
        /// Comma-separated frequencies; defaults to the spec's u-grid.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        u: Option<Vec<f64>>,
    },
    /// Mellin transforms g± and conditional characteristic functions φ±.
    Mellin {
        /// Comma-separated exponents written `re` or `re:im`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alpha: Vec<String>,
    },
    /// Subdensities of log|E_T| and the terminal wealth density.
    Density,
    /// Mean-variance case study with built-in parameters.
    MvDemo,
    /// Expected exponential utility with Poisson-timed jumps.
    Utility,
    /// Characteristics and compensators after a change of measure.
    Girsanov,
    /// Monte Carlo estimate of E[E(ξ∘X)_T].
    Simulate,
    /// Run a property suite and report pass/fail with margins.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Charfn { .. } => "charfn",
            Command::Mellin { .. } => "mellin",
            Command::Density => "density",
            Command::MvDemo => "mv-demo",
            Command::Utility => "utility",
            Command::Girsanov => "girsanov",
            Command::Simulate => "simulate",
            Command::Verify { .. } => "verify",
        }
    }
}

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Exit code for a failed command: numerical failures map to 3, everything
/// else to 2.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.chain().find_map(|e| e.downcast_ref::<levykit::Error>()) {
        Some(e) if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_INVALID,
    }
}

/// Machine-readable failure reason.
pub fn error_kind(err: &anyhow::Error) -> &'static str {
    match err.chain().find_map(|e| e.downcast_ref::<levykit::Error>()) {
        Some(e) => e.kind(),
        None => "invalid_input",
    }
}

fn parse_alpha(s: &str) -> Result<Complex64> {
    let (re, im) = match s.split_once(':') {
        Some((re, im)) => (re, im),
        None => (s, "0"),
    };
    let parse = |v: &str| v.trim().parse::<f64>().with_context(|| format!("invalid exponent {s:?}"));
    let z = Complex64::new(parse(re)?, parse(im)?);
    if !(z.re.is_finite() && z.im.is_finite()) {
        bail!("exponent {s:?} is not finite");
    }
    Ok(z)
}

fn load_spec(path: Option<&PathBuf>) -> Result<Option<ModelSpec>> {
    let Some(path) = path else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Some(ModelSpec::parse(&text)?))
}

fn require(spec: Option<&ModelSpec>) -> Result<&ModelSpec> {
    spec.context("this command needs --spec <file>")
}

/// Parses inputs, runs the command and writes tables to `--out`.
pub fn run(cli: &Cli) -> Result<ResultEnvelope> {
    let spec = load_spec(cli.spec.as_ref())?;
    let opts = Options {
        seed: cli.seed,
        paths: cli.paths,
        raw: cli.out.is_some(),
    };
    let alphas = match &cli.command {
        Command::Mellin { alpha } => alpha.iter().map(|a| parse_alpha(a)).collect::<Result<Vec<_>>>()?,
        _ => Vec::new(),
    };
    if let Command::Charfn { u: Some(us) } = &cli.command {
        if let Some(u) = us.iter().find(|u| !u.is_finite()) {
            bail!("frequency {u} is not finite");
        }
    }
    let input = json!({
        "command": cli.command.name(),
        "spec": spec,
        "seed": cli.seed,
        "paths": cli.paths,
        "args": format!("{:?}", cli.command),
    });
    let mut env = ResultEnvelope::new(cli.command.name(), &input);
    let s = spec.as_ref();
    match &cli.command {
        Command::Charfn { u } => commands::charfn(&mut env, require(s)?, u.as_deref())?,
        Command::Mellin { .. } => commands::mellin(&mut env, require(s)?, &alphas)?,
        Command::Density => commands::density(&mut env, require(s)?, &opts)?,
        Command::MvDemo => commands::mv_demo(&mut env, &opts, cli.out.is_some())?,
        Command::Utility => commands::utility(&mut env, require(s)?, &opts)?,
        Command::Girsanov => commands::girsanov(&mut env, require(s)?, &opts)?,
        Command::Simulate => commands::simulate_cmd(&mut env, require(s)?, &opts)?,
        Command::Verify { suite } => {
            let suite = match suite {
                SuiteArg::Yor => Suite::Yor,
                SuiteArg::Modulus => Suite::Modulus,
                SuiteArg::PiiMean => Suite::PiiMean,
                SuiteArg::Martingale => Suite::Martingale,
            };
            commands::verify(&mut env, s, suite, &opts)?
        }
    }
    if let Some(dir) = &cli.out {
        env.write_tables(dir)?;
    }
    Ok(env)
}
