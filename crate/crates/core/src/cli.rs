//! Command-line front end. Exit codes: 0 success, 1 bad input, 2 failed
//! computation, 3 failed verification.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::asymptotics::nth_root_diagnostic;
use crate::config::{canonical_json, format_float, NormConfig};
use crate::error::Error;
use crate::interp::{degree_formula, is_sequentially_ordered_pairs, minimal_interp, OrderedPairSeq};
use crate::poly::{roots, Poly};
use crate::solver::solve;
use crate::structure::classify;
use crate::verify::{
    asymptotics_suite, bounds_suite, interp_suite, ordered_zeroloc_suite, p1_suite, rolle_suite, zeroloc_suite, SuiteReport,
};
use crate::zerolocation::check_zero_location;

pub const EXIT_INPUT: i32 = 1;
pub const EXIT_COMPUTE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

pub const SEED_VAR: &str = "SOBOLEV_SEED";
pub const DEFAULT_SEED: u64 = 42;

#[derive(Parser, Debug)]
#[command(name = "sobolev", about = "Monic polynomials of least deviation from zero in discrete Sobolev p-norms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    P1,
    Bounds,
    Rolle,
    Zeroloc,
    Asymptotics,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the monic minimal polynomial of degree n.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Sign changes of P_n inside the continuous support against the bounds.
    Zeros {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Lacunarity, ordering, d and d* of the norm.
    Classify {
        #[arg(long)]
        config: PathBuf,
    },
    /// nth-root, arcsine and ratio diagnostics for n = 1..=n_max.
    Asymptotics {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 30)]
        n_max: usize,
        #[arg(long, default_value_t = 0)]
        j_max: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Monic polynomial of least degree from a JSON list of [point, order] pairs.
    Interp {
        #[arg(long)]
        pairs: PathBuf,
    },
    /// Norm and normalized residuals of a polynomial (ascending coefficients).
    Normeval {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        coeffs: Vec<f64>,
    },
    /// Run a randomized property suite; seeded by SOBOLEV_SEED.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        suite: Suite,
        /// Largest degree checked (suite-specific default).
        #[arg(long)]
        n_max: Option<usize>,
        /// Random cases (suite-specific default).
        #[arg(long)]
        trials: Option<usize>,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidInput(_) | Error::Unsupported(_) | Error::Hypothesis(_) => EXIT_INPUT,
        Error::ZeroPolynomial
        | Error::NonFinite(_)
        | Error::Singular(_)
        | Error::NonConvergence { .. }
        | Error::LinearProgram(_) => EXIT_COMPUTE,
    }
}

pub fn seed_from_env() -> Result<u64, Error> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("{SEED_VAR} must be an unsigned integer, got {s:?}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

enum Outcome {
    Done(String),
    Failed(String),
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(Outcome::Done(text)) => {
            let _ = writeln!(out, "{text}");
            0
        }
        Ok(Outcome::Failed(text)) => {
            let _ = writeln!(out, "{text}");
            let _ = writeln!(err, "verification failed");
            EXIT_VERIFY
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn coeffs_json(p: &Poly) -> Value {
    json!(p.coeffs())
}

fn roots_json(p: &Poly) -> Result<Value, Error> {
    if p.degree().unwrap_or(0) == 0 {
        return Ok(json!([]));
    }
    Ok(serde_json::to_value(roots(p)?.roots).expect("roots serialize"))
}

fn dispatch(command: Command) -> Result<Outcome, Error> {
    match command {
        Command::Solve { config, n, format } => {
            let cfg = NormConfig::load(&config)?;
            let sn = cfg.norm()?;
            let sol = solve(&sn, n, &cfg.solver)?;
            Ok(Outcome::Done(match format {
                Format::Json => canonical_json(&json!({
                    "n": n,
                    "p": cfg.p,
                    "coeffs": coeffs_json(&sol.poly),
                    "norm": sol.norm_value,
                    "residual_max": sol.residual_max(),
                    "method": sol.method.as_str(),
                    "iterations": sol.iterations,
                    "roots": roots_json(&sol.poly)?,
                })),
                Format::Csv => {
                    let mut s = String::from("power,coefficient\n");
                    for (i, c) in sol.poly.coeffs().iter().enumerate() {
                        s.push_str(&format!("{i},{}\n", format_float(*c)));
                    }
                    s.trim_end().to_string()
                }
            }))
        }
        Command::Zeros { config, n } => {
            let cfg = NormConfig::load(&config)?;
            let sn = cfg.norm()?;
            let report = check_zero_location(&sn, n, &cfg.solver)?;
            let poly = solve(&sn, n, &cfg.solver)?.poly;
            let mut v = serde_json::to_value(&report).expect("report serializes");
            v["roots"] = roots_json(&poly)?;
            Ok(Outcome::Done(canonical_json(&v)))
        }
        Command::Classify { config } => {
            let cfg = NormConfig::load(&config)?;
            let class = classify(&cfg.measure()?);
            Ok(Outcome::Done(canonical_json(&serde_json::to_value(class).expect("classification serializes"))))
        }
        Command::Asymptotics { config, n_max, j_max, format } => {
            let cfg = NormConfig::load(&config)?;
            if n_max == 0 {
                return Err(Error::InvalidInput("n_max must be positive".into()));
            }
            let report = nth_root_diagnostic(&cfg.norm()?, n_max, j_max, &cfg.solver)?;
            Ok(Outcome::Done(match format {
                Format::Json => canonical_json(&serde_json::to_value(&report).expect("report serializes")),
                Format::Csv => report.to_csv().trim_end().to_string(),
            }))
        }
        Command::Interp { pairs } => {
            let text = std::fs::read_to_string(&pairs)
                .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", pairs.display())))?;
            let seq: OrderedPairSeq =
                serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("pairs: {e}")))?;
            let u = minimal_interp(&seq)?;
            Ok(Outcome::Done(canonical_json(&json!({
                "coeffs": coeffs_json(&u),
                "degree": u.degree(),
                "degree_formula": degree_formula(&seq),
                "ordered": is_sequentially_ordered_pairs(&seq),
            }))))
        }
        Command::Normeval { config, coeffs } => {
            let cfg = NormConfig::load(&config)?;
            let sn = cfg.norm()?;
            let p = Poly::new(coeffs);
            let mut v = json!({ "norm": sn.norm(&p)?, "norm_pow": sn.norm_pow(&p)? });
            if p.degree().unwrap_or(0) >= 1 {
                let r = sn.residuals(&p)?;
                v["residuals"] = json!(r.normalized);
                v["residuals_raw"] = json!(r.entries);
                v["max_abs"] = json!(r.max_abs);
            }
            Ok(Outcome::Done(canonical_json(&v)))
        }
        Command::Verify { config, suite, n_max, trials } => {
            let seed = seed_from_env()?;
            let load = || -> Result<NormConfig, Error> {
                let path = config
                    .as_ref()
                    .ok_or_else(|| Error::InvalidInput("this suite needs --config".into()))?;
                NormConfig::load(path)
            };
            let reports: Vec<SuiteReport> = match suite {
                Suite::P1 => {
                    let cfg = load()?;
                    vec![p1_suite(&cfg.norm()?, n_max.unwrap_or(4), trials.unwrap_or(200), seed, &cfg.solver)?]
                }
                Suite::Bounds => vec![bounds_suite(&load()?.norm()?, trials.unwrap_or(500), seed)?],
                Suite::Rolle => vec![
                    rolle_suite(trials.unwrap_or(1000), seed)?,
                    interp_suite(trials.unwrap_or(500), seed)?,
                ],
                Suite::Zeroloc => {
                    let cfg = load()?;
                    let sn = cfg.norm()?;
                    let n_max = n_max.unwrap_or(20);
                    let mut reps = vec![zeroloc_suite(&sn, n_max, &cfg.solver)?];
                    if classify(sn.measure()).is_sequentially_ordered {
                        reps.push(ordered_zeroloc_suite(&sn, n_max, &cfg.solver)?);
                    }
                    reps
                }
                Suite::Asymptotics => {
                    let cfg = load()?;
                    vec![asymptotics_suite(&cfg.norm()?, n_max.unwrap_or(30), &cfg.solver)?]
                }
            };
            let pass = reports.iter().all(SuiteReport::pass);
            let text = canonical_json(&json!({
                "seed": seed,
                "pass": pass,
                "reports": serde_json::to_value(&reports).expect("reports serialize"),
            }));
            Ok(if pass { Outcome::Done(text) } else { Outcome::Failed(text) })
        }
    }
}
