mod commands;
mod input;
mod selftest;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

#[derive(Debug, Parser)]
#[command(name = "pickfn", version, about = "Pick functions, their measures and Möbius transforms")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// JSON input file, `-` for stdin.
    #[arg(long, global = true, default_value = "-")]
    input: String,
    #[arg(long, global = true, default_value_t = pickfn::DEFAULT_TOL)]
    pub tol: f64,
    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write plot arrays as JSON to this file.
    #[arg(long, global = true)]
    pub emit_grid: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    pub grid_min: f64,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub grid_max: f64,
    #[arg(long, default_value_t = 101)]
    pub nodes: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate φ at points of the upper half-plane.
    Eval {
        /// Point as `re,im`; repeatable. Defaults to `i`.
        #[arg(long = "at", value_parser = parse_complex, allow_hyphen_values = true)]
        at: Vec<Complex64>,
    },
    /// Classify a matrix by how it maps the upper half-plane.
    Classify,
    /// Representation of `z ↦ φ(M.z)`.
    Transform {
        /// Nodes of the `(s, Λ_M f(s))` plot grid.
        #[arg(long, default_value_t = 50)]
        nodes: usize,
    },
    /// Recover the measure from boundary limits.
    Invert {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 1e-3)]
        threshold: f64,
        /// Known atom location; repeatable.
        #[arg(long = "atom", allow_negative_numbers = true)]
        atoms: Vec<f64>,
    },
    /// Decide whether a rational function maps the upper half-plane into itself.
    CheckRational,
    /// Positivity tests for linear-fractional, affine or sampled functions.
    CheckPositivity {
        #[arg(long, default_value_t = 1e-2)]
        margin: f64,
        #[arg(long, default_value_t = 24)]
        grid: usize,
        #[command(flatten)]
        support: GridArgs,
        #[arg(long, default_value_t = 1e-3)]
        threshold: f64,
    },
    /// Compare `Λ_{MN} f` with `Λ_M Λ_N f` on an angle grid.
    SemigroupCheck {
        #[arg(long, default_value_t = 50)]
        nodes: usize,
    },
    /// Disk and half-plane transfers.
    Cayley,
    /// Run the closed-form example suite.
    Selftest,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected `re,im`, got {s:?}"))?;
    let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok(Complex64::new(p(re)?, p(im)?))
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Domain(String),
    Malformed(String),
}

impl From<pickfn::Error> for Failure {
    fn from(e: pickfn::Error) -> Self {
        Self::Domain(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Self::Malformed(format!("malformed input: {e}"))
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::Malformed(format!("cannot read input: {e}"))
    }
}

impl Global {
    pub fn read_input(&self) -> Result<String, Failure> {
        let mut text = String::new();
        if self.input == "-" {
            io::stdin().read_to_string(&mut text)?;
        } else {
            text = fs::read_to_string(&self.input)?;
        }
        Ok(text)
    }

    pub fn parse<T: serde::de::DeserializeOwned>(&self) -> Result<T, Failure> {
        Ok(serde_json::from_str(&self.read_input()?)?)
    }

    pub fn emit(&self, value: &serde_json::Value) -> Result<(), Failure> {
        if let Some(path) = &self.emit_grid {
            let text = serde_json::to_string_pretty(value).expect("plot data serializes");
            fs::write(path, text).map_err(|e| Failure::Domain(format!("cannot write {}: {e}", path.display())))?;
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<serde_json::Value, Failure> {
    let g = &cli.global;
    match cli.command {
        Command::Eval { at } => commands::eval(g, &at),
        Command::Classify => commands::classify(g),
        Command::Transform { nodes } => commands::transform(g, nodes),
        Command::Invert { grid, threshold, atoms } => commands::invert(g, &grid, threshold, &atoms),
        Command::CheckRational => commands::check_rational(g),
        Command::CheckPositivity { margin, grid, support, threshold } => {
            commands::check_positivity(g, margin, grid, &support, threshold)
        }
        Command::SemigroupCheck { nodes } => commands::semigroup_check(g, nodes),
        Command::Cayley => commands::cayley(g),
        Command::Selftest => selftest::run(g),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let selftest = matches!(cli.command, Command::Selftest);
    match run(cli) {
        Ok(value) => {
            let text = serde_json::to_string_pretty(&value).expect("output serializes");
            if writeln!(io::stdout(), "{text}").is_err() {
                return ExitCode::FAILURE;
            }
            if selftest && value["failed"].as_u64() != Some(0) {
                return ExitCode::FAILURE;
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Malformed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
