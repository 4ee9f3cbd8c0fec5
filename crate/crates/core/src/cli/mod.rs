//! Command-line front end. Exit codes: 0 success, 1 invalid certificate or
//! failed property, 2 malformed input.

pub mod oracle;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;

use crate::error::{Error, Result};
use crate::fuzzy::FuzzyRelation;
use crate::lifting::{lift, LiftOperator};
use crate::proofs::{check_certificate, prove_lift, Certificate, Context};
use crate::rational::{default_precision, parse_rational, Rational};
use crate::terms::{ConvexTerm, Distribution};
use crate::theories::two_zeros::dyadic_grid;
use crate::theories::{model_respects_finitary_rules, two_zeros_model, ModelFile, QuantEquation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;

/// Environment variable overriding the interval precision.
pub const PRECISION_VAR: &str = "LIFTCERT_PRECISION";

#[derive(Debug, Parser)]
#[command(
    name = "liftcert",
    version,
    about = "Kantorovich-style liftings with checkable proof certificates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lifted distance between two distributions, with an optimal coupling.
    Lift(LiftArgs),
    /// Like `lift`, and writes a certificate for the bound.
    Prove {
        #[command(flatten)]
        args: LiftArgs,
        #[arg(long, default_value = "cert.json")]
        cert: PathBuf,
    },
    /// Checks a certificate.
    Check {
        #[arg(long)]
        cert: PathBuf,
        /// The root context must be exactly this relation.
        #[arg(long)]
        space: Option<PathBuf>,
        /// Reject the infinitary rule.
        #[arg(long)]
        finite: bool,
    },
    /// Cross-checks the solver against vertex enumeration.
    Oracle {
        #[arg(long, default_value_t = 100)]
        random: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Finite-model satisfaction of a quantitative (in)equation.
    Satisfies {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        eq: PathBuf,
    },
    /// The two-zeros countermodel on the grid {1/2^i : i = 1..n}.
    DemoNoncompact {
        #[arg(long, default_value_t = 10)]
        grid: u32,
    },
}

#[derive(Debug, clap::Args)]
pub struct LiftArgs {
    /// standard | max | power:<k> | geometric
    #[arg(long, default_value = "standard")]
    pub op: String,
    #[arg(long)]
    pub space: PathBuf,
    #[arg(long)]
    pub mu: PathBuf,
    #[arg(long)]
    pub nu: PathBuf,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_MALFORMED
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_MALFORMED
        }
    }
}

pub fn precision() -> Result<Rational> {
    match std::env::var(PRECISION_VAR) {
        Ok(s) => {
            let q = parse_rational(s.trim())?;
            if q <= Rational::from_integer(0.into()) || q >= Rational::from_integer(1.into()) {
                return Err(Error::Parse(format!("{PRECISION_VAR} must lie in (0,1), got `{s}`")));
            }
            Ok(q)
        }
        Err(_) => Ok(default_precision()),
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::Json(format!("{}: {e}", path.display())))
}

fn io(e: std::io::Error) -> Error {
    Error::Parse(format!("write failed: {e}"))
}

struct Loaded {
    op: LiftOperator,
    space: FuzzyRelation,
    mu: Distribution,
    nu: Distribution,
}

fn load(a: &LiftArgs) -> Result<Loaded> {
    Ok(Loaded {
        op: a.op.parse()?,
        space: read_json(&a.space)?,
        mu: read_json(&a.mu)?,
        nu: read_json(&a.nu)?,
    })
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Lift(a) => {
            let l = load(&a)?;
            let r = lift(l.op, &l.space, &l.mu, &l.nu, &precision()?)?;
            writeln!(out, "operator: {}", l.op).map_err(io)?;
            writeln!(out, "value: {}", r.value).map_err(io)?;
            writeln!(out, "coupling: {}", serde_json::to_string(&r.coupling)?).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Prove { args, cert } => {
            let l = load(&args)?;
            let w = precision()?;
            let r = lift(l.op, &l.space, &l.mu, &l.nu, &w)?;
            let (s, t): (ConvexTerm, ConvexTerm) = (l.mu.to_term(), l.nu.to_term());
            let proof = prove_lift(l.op, &l.space, &s, &t, &w)?;
            let c = Certificate::new(l.op, &w, proof);
            std::fs::write(&cert, c.to_canonical_json())
                .map_err(|e| Error::Parse(format!("cannot write {}: {e}", cert.display())))?;
            writeln!(out, "operator: {}", l.op).map_err(io)?;
            writeln!(out, "value: {}", r.value).map_err(io)?;
            writeln!(out, "coupling: {}", serde_json::to_string(&r.coupling)?).map_err(io)?;
            writeln!(out, "certificate: {} ({} nodes)", cert.display(), c.derivation.size()).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Check { cert, space, finite } => {
            let c = Certificate::from_json(&read_text(&cert)?)?;
            let ctx = match space {
                Some(p) => Some(Context::from_fuzzy(&read_json::<FuzzyRelation>(&p)?)),
                None => None,
            };
            match check_certificate(&c, ctx.as_ref(), finite) {
                Ok(v) => {
                    writeln!(out, "valid: {} ({} nodes)", v.judgment, v.nodes).map_err(io)?;
                    Ok(EXIT_OK)
                }
                Err(r) => {
                    writeln!(out, "invalid: {r}").map_err(io)?;
                    Ok(EXIT_INVALID)
                }
            }
        }
        Command::Oracle { random, seed, jobs } => {
            let w = precision()?;
            let mut bad = 0;
            for (sd, res) in oracle::run_random(random, seed, jobs, &w) {
                for line in res? {
                    if !line.agrees() {
                        bad += 1;
                        writeln!(out, "seed {sd}: {}", oracle::describe(&line)).map_err(io)?;
                    }
                }
            }
            writeln!(out, "instances: {random}, mismatches: {bad}").map_err(io)?;
            Ok(if bad == 0 { EXIT_OK } else { EXIT_INVALID })
        }
        Command::Satisfies { model, eq } => {
            let m = read_json::<ModelFile>(&model)?.load()?;
            let e: QuantEquation = read_json(&eq)?;
            let e = QuantEquation::new(e.context, e.lhs, e.rhs, e.bound)?;
            if m.satisfies(&e)? {
                writeln!(out, "satisfied: {e}").map_err(io)?;
                Ok(EXIT_OK)
            } else {
                writeln!(out, "not satisfied: {e}").map_err(io)?;
                Ok(EXIT_INVALID)
            }
        }
        Command::DemoNoncompact { grid } => {
            if grid == 0 || grid > 64 {
                return Err(Error::Parse(format!("grid size must be in 1..=64, got {grid}")));
            }
            let m = two_zeros_model(&dyadic_grid(grid))?;
            let report = model_respects_finitary_rules(&m, &[]);
            writeln!(out, "{report}").map_err(io)?;
            Ok(if report.is_witness() { EXIT_OK } else { EXIT_INVALID })
        }
    }
}
