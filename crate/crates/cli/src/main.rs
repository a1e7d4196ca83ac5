//! `padrec`: p-adic analysis of linear recurrences from the command line.

mod commands;
mod input;
mod render;

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use padic_recur::density::DEFAULT_STATE_BUDGET;
use padic_recur::{Error, ErrorKind};
use serde_json::json;

use commands::{Output, TermQuery, TreeMode};
use input::{parse_int_list, RecurrenceSource};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(Error),
}

impl CliError {
    pub fn config(msg: String) -> Self {
        CliError::Config(msg)
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Config | ErrorKind::Domain => 2,
                ErrorKind::Unsupported => 3,
                ErrorKind::Precision => 4,
            },
        }
    }

    fn kind(&self) -> &'static str {
        match self.exit_code() {
            3 => "unsupported",
            4 => "precision",
            _ => "config",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Parser)]
#[command(
    name = "padrec",
    version,
    about = "p-adic analysis of linear recurrences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Precision in p-adic digits.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Extra digits carried internally.
    #[arg(long = "guard-digits", global = true)]
    guard_digits: Option<u32>,
    /// Maximum number of orbit steps per density computation.
    #[arg(long = "state-budget", global = true, default_value_t = DEFAULT_STATE_BUDGET)]
    state_budget: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Args, Clone, Default)]
struct RecArgs {
    /// Recurrence JSON file.
    input: Option<String>,
    #[arg(long)]
    p: Option<u64>,
    /// Coefficients a_0,…,a_{l-1} of x^l + Σ a_i x^i (integers or num/den).
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
    /// Initial terms s(0),…,s(l-1).
    #[arg(long, allow_hyphen_values = true)]
    initial: Option<String>,
}

#[derive(Args, Clone)]
struct ElementArgs {
    #[arg(long)]
    p: u64,
    /// Coordinates c0[,c1] of c0 + c1·θ, θ a root of the modulus.
    #[arg(long, allow_hyphen_values = true)]
    value: String,
    /// Monic modulus, constant term first (e.g. "-5,0,1").
    #[arg(long, allow_hyphen_values = true)]
    modulus: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Terms of the sequence modulo p^N.
    Terms {
        #[command(flatten)]
        rec: RecArgs,
        /// A single index.
        #[arg(long, allow_hyphen_values = true)]
        n: Option<String>,
        /// All indices 0..=N.
        #[arg(long = "n-max")]
        n_max: Option<usize>,
        /// Comma-separated indices.
        #[arg(long = "n-list", allow_hyphen_values = true)]
        n_list: Option<String>,
        /// a,b,n for the index a·p^(f n) + b.
        #[arg(long, allow_hyphen_values = true)]
        large: Option<String>,
    },
    /// Whether the sequence has a twisted interpolation.
    Classify {
        #[command(flatten)]
        rec: RecArgs,
    },
    /// The interpolating family.
    Interp {
        #[command(flatten)]
        rec: RecArgs,
        /// i,r,x: evaluate s_(i,r)(q x + r).
        #[arg(long, allow_hyphen_values = true)]
        eval: Option<String>,
        /// Compare with the terms for n ≤ N.
        #[arg(long)]
        agreement: Option<u64>,
    },
    /// lim s(a p^(f n) + b).
    Limit {
        #[command(flatten)]
        rec: RecArgs,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        b: i64,
        /// Integer polynomial, highest degree first (e.g. "5,5,1").
        #[arg(long = "check-poly", allow_hyphen_values = true)]
        check_poly: Option<String>,
        /// Compare with the terms for n ≤ K.
        #[arg(long = "verify-terms")]
        verify_terms: Option<u32>,
    },
    /// Check that a serialized limit is a root of a polynomial.
    Verify {
        /// Output of `limit --json` ("-" or absent for stdin).
        input: Option<String>,
        /// Highest degree first; defaults to the file's algebraic_witness.
        #[arg(long, allow_hyphen_values = true)]
        poly: Option<String>,
    },
    /// Densities of attained residues.
    Density {
        #[command(flatten)]
        rec: RecArgs,
        #[arg(long = "alpha-max", default_value_t = 4)]
        alpha_max: u32,
        /// Also compute the exact limiting density.
        #[arg(long)]
        exact: bool,
    },
    /// Tree of attained residues.
    Tree {
        #[command(flatten)]
        rec: RecArgs,
        #[arg(long = "alpha-max", default_value_t = 3)]
        alpha_max: u32,
        /// Require certified marking of cosets inside the closure.
        #[arg(long, conflicts_with = "empirical")]
        exact: bool,
        /// Plain orbit tree without marking.
        #[arg(long)]
        empirical: bool,
        /// Write Graphviz output (to PATH, or stdout without a value).
        #[arg(long, num_args = 0..=1, default_missing_value = "-")]
        dot: Option<String>,
    },
    /// Teichmüller representative.
    Omega {
        #[command(flatten)]
        elem: ElementArgs,
    },
    /// exp_p, log_p or sinh_p.
    Explog {
        #[command(flatten)]
        elem: ElementArgs,
        #[arg(long = "fn", default_value = "exp", value_parser = ["exp", "log", "sinh"])]
        function: String,
    },
}

fn load(cli: &Cli, rec: &RecArgs) -> Result<padic_recur::recurrence::RecurrenceSpec, CliError> {
    RecurrenceSource {
        path: rec.input.clone(),
        p: rec.p,
        coeffs: rec.coeffs.clone(),
        initial: rec.initial.clone(),
        precision: cli.precision,
        guard: cli.guard_digits,
    }
    .load()
}

fn term_query(
    n: &Option<String>,
    n_max: Option<usize>,
    n_list: &Option<String>,
    large: &Option<String>,
) -> Result<TermQuery, CliError> {
    let given = [
        n.is_some(),
        n_max.is_some(),
        n_list.is_some(),
        large.is_some(),
    ]
    .iter()
    .filter(|b| **b)
    .count();
    if given != 1 {
        return Err(CliError::config(
            "give exactly one of --n, --n-max, --n-list, --large".into(),
        ));
    }
    if let Some(s) = n {
        let v: BigInt = s
            .trim()
            .parse()
            .map_err(|_| CliError::config(format!("cannot parse index '{s}'")))?;
        return Ok(TermQuery::Single(v));
    }
    if let Some(m) = n_max {
        return Ok(TermQuery::Range(m));
    }
    if let Some(s) = n_list {
        return Ok(TermQuery::List(parse_int_list(s)?));
    }
    let parts = parse_int_list(large.as_deref().unwrap())?;
    if parts.len() != 3 {
        return Err(CliError::config("--large expects a,b,n".into()));
    }
    let n = u32::try_from(&parts[2]).map_err(|_| CliError::config("bad n in --large".into()))?;
    Ok(TermQuery::Large {
        a: parts[0].clone(),
        b: parts[1].clone(),
        n,
    })
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    let budget = cli.state_budget;
    match &cli.command {
        Command::Terms {
            rec,
            n,
            n_max,
            n_list,
            large,
        } => {
            let query = term_query(n, *n_max, n_list, large)?;
            commands::terms(&load(cli, rec)?, query)
        }
        Command::Classify { rec } => commands::classify_cmd(&load(cli, rec)?),
        Command::Interp {
            rec,
            eval,
            agreement,
        } => commands::interp(&load(cli, rec)?, eval.as_deref(), *agreement),
        Command::Limit {
            rec,
            a,
            b,
            check_poly,
            verify_terms,
        } => commands::limit(
            &load(cli, rec)?,
            *a,
            *b,
            check_poly.as_deref(),
            *verify_terms,
        ),
        Command::Verify { input, poly } => commands::verify(input.as_deref(), poly.as_deref()),
        Command::Density {
            rec,
            alpha_max,
            exact,
        } => commands::density(&load(cli, rec)?, *alpha_max, *exact, budget),
        Command::Tree {
            rec,
            alpha_max,
            exact,
            empirical,
            ..
        } => {
            let mode = match (*exact, *empirical) {
                (true, _) => TreeMode::Exact,
                (_, true) => TreeMode::Empirical,
                _ => TreeMode::Auto,
            };
            commands::tree(&load(cli, rec)?, *alpha_max, mode, budget)
        }
        Command::Omega { elem } => {
            commands::omega(elem.p, &elem.value, elem.modulus.as_deref(), cli.precision)
        }
        Command::Explog { elem, function } => commands::explog(
            elem.p,
            &elem.value,
            elem.modulus.as_deref(),
            function,
            cli.precision,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = if cli.json { Format::Json } else { cli.format };
    match run(&cli) {
        Ok(out) => {
            let dot_target = match &cli.command {
                Command::Tree { dot, .. } => dot.clone(),
                _ => None,
            };
            if let Some(path) = dot_target.filter(|p| p != "-") {
                let dot = out.dot.clone().unwrap_or_default();
                if let Err(e) = fs::write(&path, dot) {
                    eprintln!("error: cannot write {path}: {e}");
                    return ExitCode::from(2);
                }
            }
            let wants_dot = format == Format::Dot
                || matches!(&cli.command, Command::Tree { dot: Some(p), .. } if p == "-");
            let body = match format {
                Format::Json => serde_json::to_string_pretty(&out.json).unwrap() + "\n",
                _ if wants_dot => match out.dot {
                    Some(d) => d,
                    None => {
                        eprintln!("error: this command has no dot output");
                        return ExitCode::from(2);
                    }
                },
                _ => out.text,
            };
            // a closed pipe is not an error for us
            let _ = io::stdout().lock().write_all(body.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            if format == Format::Json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(
                        &json!({"error": e.to_string(), "kind": e.kind()})
                    )
                    .unwrap()
                );
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
