//! `treegap` command-line front end.

mod commands;
mod text;

use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use treegap::io::{parse_distance_matrix, parse_edge_list, parse_newick};
use treegap::{Error, FiniteMetric, MetricTree};

#[derive(Parser, Debug)]
#[command(name = "treegap", version, about = "Negative type gaps of finite metric trees")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Input format; `auto` reads Newick when the text starts with "(".
    #[arg(long, value_enum, global = true, default_value_t = Format::Auto)]
    format: Format,
    #[arg(long, value_enum, global = true, default_value_t = Output::Text)]
    output: Output,
    /// Bisection width for `maxp`, `star` and `necklace`; eigenvalue band
    /// for `check`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Exponent for `check`.
    #[arg(long, global = true)]
    p: Option<f64>,
    /// Size for `star` (leaves) and `necklace` (largest star).
    #[arg(long, global = true)]
    n: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form 1-negative type gap, generic weighting and cross-checks.
    Gap { input: PathBuf },
    /// Maximal p-negative type by bisection.
    Maxp { input: PathBuf },
    /// Test p-negative type at the exponent given by `--p`.
    Check { input: PathBuf },
    /// Build the star with `--n` leaves and analyse it.
    Star,
    /// Build the necklace of stars 2..=`--n` and analyse it.
    Necklace,
    /// Evaluate the enhanced inequality for a weighting read from a file.
    Verify { input: PathBuf, eta: PathBuf },
    /// Run the oracle cross-check suite on a tree.
    Oracle { input: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Auto,
    Newick,
    Edgelist,
    Matrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
    Text,
}

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Validation(String),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Validation(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::SyntaxError { .. } | Error::ParseError { .. } | Error::EmptyTree | Error::NonPositiveBranchLength(_) => {
                CliError::Parse(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub enum Input {
    Tree(MetricTree),
    Metric(FiniteMetric),
}

impl Input {
    fn into_tree(self) -> CliResult<MetricTree> {
        match self {
            Input::Tree(t) => Ok(t),
            Input::Metric(_) => Err(CliError::Validation("this command needs a tree, not a distance matrix".into())),
        }
    }
}

fn read_text(path: &PathBuf) -> CliResult<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Parse(format!("cannot read standard input: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))
}

fn load_input(path: &PathBuf, format: Format) -> CliResult<Input> {
    let text = read_text(path)?;
    let format = match format {
        Format::Auto if text.trim_start().starts_with('(') => Format::Newick,
        Format::Auto => Format::Edgelist,
        f => f,
    };
    Ok(match format {
        Format::Newick => Input::Tree(parse_newick(&text)?),
        Format::Matrix => Input::Metric(parse_distance_matrix(&text)?),
        _ => Input::Tree(parse_edge_list(&text)?),
    })
}

fn positive_tol(tol: Option<f64>, default: f64) -> CliResult<f64> {
    match tol {
        None => Ok(default),
        Some(t) if t > 0.0 && t.is_finite() => Ok(t),
        Some(t) => Err(CliError::Validation(format!("--tol must be positive, got {t}"))),
    }
}

/// Rendered output and whether every reported cross-check passed.
fn run(cli: &Cli) -> CliResult<(String, bool)> {
    let out = cli.output;
    match &cli.command {
        Command::Gap { input } => commands::gap(&load_input(input, cli.format)?.into_tree()?, out),
        Command::Maxp { input } => {
            let tol = positive_tol(cli.tol, commands::DEFAULT_BRACKET)?;
            commands::maxp(load_input(input, cli.format)?, tol, out)
        }
        Command::Check { input } => {
            let tol = positive_tol(cli.tol, treegap::negtype::DEFAULT_TOL)?;
            let p = cli.p.ok_or_else(|| CliError::Validation("check needs --p".into()))?;
            commands::check(load_input(input, cli.format)?, p, tol, out)
        }
        Command::Star => {
            let tol = positive_tol(cli.tol, commands::DEFAULT_BRACKET)?;
            let n = cli.n.ok_or_else(|| CliError::Validation("star needs --n".into()))?;
            commands::star(n, tol, out)
        }
        Command::Necklace => {
            let tol = positive_tol(cli.tol, commands::DEFAULT_BRACKET)?;
            let n = cli.n.ok_or_else(|| CliError::Validation("necklace needs --n".into()))?;
            commands::necklace(n, tol, out)
        }
        Command::Verify { input, eta } => {
            let tree = load_input(input, cli.format)?.into_tree()?;
            let weights = treegap::io::parse_weights(&read_text(eta)?)?;
            commands::verify(&tree, &weights, out)
        }
        Command::Oracle { input } => commands::oracle(&load_input(input, cli.format)?.into_tree()?, cli.seed, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, passed)) => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                let e = CliError::Internal("cross-checks failed".into());
                eprintln!("treegap: {}", e.message());
                ExitCode::from(e.exit_code())
            }
        }
        Err(e) => {
            eprintln!("treegap: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
