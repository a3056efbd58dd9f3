//! `semiroots` command-line front end.

mod output;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use semiroots::mikhalkin::{Dispatch, DEFAULT_SIGMA_GRID};
use semiroots::parse::parse_equation;
use semiroots::pipeline::{self, RunConfig, SolveMethod};
use semiroots::quadrature::QuadSettings;
use semiroots::Error;

#[derive(Parser)]
#[command(
    name = "semiroots",
    version,
    about = "Polynomial roots from elementary integrals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute all roots.
    Solve(Options),
    /// Report, per branch, whether the integral formula converges.
    Domain(Options),
    /// Compare raw and polished roots against the iterative oracle.
    Compare(Options),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Integral,
    Series,
    ClosedForm,
    Oracle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Options {
    #[arg(long, value_enum, default_value = "auto")]
    method: MethodArg,
    /// Skip Newton polishing.
    #[arg(long)]
    no_polish: bool,
    #[arg(long, default_value_t = QuadSettings::default().tol)]
    quad_tol: f64,
    #[arg(long, default_value_t = QuadSettings::default().max_level)]
    quad_max_level: usize,
    #[arg(long, default_value_t = DEFAULT_SIGMA_GRID)]
    sigma_grid: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write to FILE instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Evaluate branches concurrently.
    #[arg(long)]
    parallel: bool,
    /// Leave failed branches unfilled instead of using oracle roots.
    #[arg(long)]
    no_fallback: bool,
    /// Use the half-power formula only for the pure trinomial shape.
    #[arg(long)]
    strict_dispatch: bool,
    /// Equation text, a JSON coefficient array, or a file containing either.
    #[arg(value_name = "EQUATION_OR_FILE")]
    equation: String,
}

impl Options {
    fn config(&self) -> RunConfig {
        RunConfig {
            method: match self.method {
                MethodArg::Auto => SolveMethod::Auto,
                MethodArg::Integral => SolveMethod::Integral,
                MethodArg::Series => SolveMethod::Series,
                MethodArg::ClosedForm => SolveMethod::ClosedForm,
                MethodArg::Oracle => SolveMethod::Oracle,
            },
            polish: !self.no_polish,
            quad_tol: self.quad_tol,
            quad_max_level: self.quad_max_level,
            sigma_grid: self.sigma_grid,
            parallel_branches: self.parallel,
            fallback: !self.no_fallback,
            dispatch: if self.strict_dispatch {
                Dispatch::Strict
            } else {
                Dispatch::Extended
            },
        }
    }
}

const EXIT_FAILURE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_INCOMPLETE: u8 = 4;

enum Failure {
    Parse(String),
    Other(String),
}

fn read_equation(arg: &str) -> Result<String, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        fs::read_to_string(path)
            .map(|s| s.trim().to_string())
            .map_err(|e| Failure::Other(format!("{}: {e}", path.display())))
    } else {
        Ok(arg.trim().to_string())
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Other(e.to_string())),
    }
}

fn library(e: Error) -> Failure {
    match e {
        Error::ParseError { .. } | Error::ConstantPolynomial | Error::LeadingZero => {
            Failure::Parse(e.to_string())
        }
        other => Failure::Other(other.to_string()),
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    let (Command::Solve(opts) | Command::Domain(opts) | Command::Compare(opts)) = &command;
    let text = read_equation(&opts.equation)?;
    let p = parse_equation(&text).map_err(library)?;
    let config = opts.config();
    config.validate().map_err(library)?;
    match command {
        Command::Solve(_) => {
            let s = pipeline::solve(&p, &config).map_err(library)?;
            emit(&opts.out, &output::solution(&text, &s, opts.format))?;
            Ok(if s.is_complete() { 0 } else { EXIT_INCOMPLETE })
        }
        Command::Domain(_) => {
            let d = pipeline::domain(&p, config.sigma_grid).map_err(library)?;
            emit(&opts.out, &output::domain(&text, &d, opts.format))?;
            Ok(if d.all_convergent() { 0 } else { EXIT_DOMAIN })
        }
        Command::Compare(_) => {
            let cmp = pipeline::compare(&p, &config).map_err(library)?;
            let form = p.normalize_to_mellin_form().map_err(library)?;
            emit(
                &opts.out,
                &output::comparison(&text, &form, &cmp, opts.format),
            )?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_PARSE)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
