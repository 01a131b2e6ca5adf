mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use siegel_renorm::LabError;

#[derive(Parser, Debug)]
#[command(name = "siegel", version, about = "Golden-mean semi-Siegel Henon renormalization laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// TOML config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for artifacts and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,
    /// Working precision in bits (53 selects hardware doubles).
    #[arg(long, global = true)]
    pub precision: Option<u32>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve the 1D renormalization fixed point and write zeta_star.json.
    FixedPoint {
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Universal constants: 1D data, beta and alpha, Delta constants.
    Constants {
        #[arg(long, default_value = "0.2")]
        a: String,
    },
    /// Build the renormalization tower and write tower_summary.json.
    Tower {
        #[arg(long, default_value = "0.2")]
        a: String,
        #[arg(long)]
        levels: Option<usize>,
    },
    /// Saddle, unstable and stable manifolds at one level.
    Manifolds {
        #[arg(long, default_value = "0.2")]
        a: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Solve for a heteroclinic tangency parameter (needs zeta_star.json).
    Tangency {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Newton start; the asymptotic seed when omitted.
        #[arg(long)]
        a: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Relative perturbation for the splitting check (0 skips it).
        #[arg(long, default_value_t = 1e-2)]
        split_delta: f64,
    },
    /// Normalized scaling ratios across the levels of one tower.
    ScalingTable {
        #[arg(long, default_value = "0.2")]
        a: String,
    },
    /// Run the acceptance suite.
    Accept {
        #[arg(long, default_value = "0.2")]
        a: String,
        /// Skip the tangency criteria.
        #[arg(long)]
        quick: bool,
    },
}

/// Failure categories with their exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Internal = 1,
    InvalidInput = 2,
    MissingCache = 3,
    PrecisionExhausted = 4,
    Numerical = 5,
    AcceptanceMismatch = 6,
    Io = 7,
}

impl Category {
    pub fn name(self) -> &'static str {
        match self {
            Category::Internal => "internal",
            Category::InvalidInput => "invalid_input",
            Category::MissingCache => "missing_cache",
            Category::PrecisionExhausted => "precision_exhausted",
            Category::Numerical => "numerical",
            Category::AcceptanceMismatch => "acceptance_mismatch",
            Category::Io => "io",
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub category: Category,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

pub fn fail(category: Category, message: impl Into<String>) -> anyhow::Error {
    CliError {
        category,
        message: message.into(),
    }
    .into()
}

fn categorize(e: &anyhow::Error) -> Category {
    if let Some(c) = e.downcast_ref::<CliError>() {
        return c.category;
    }
    if let Some(l) = e.downcast_ref::<LabError>() {
        return match l {
            LabError::PrecisionExhausted(_) => Category::PrecisionExhausted,
            LabError::Invalid(_) => Category::InvalidInput,
            LabError::Io(_) => Category::Io,
            _ => Category::Numerical,
        };
    }
    if e.downcast_ref::<std::io::Error>().is_some() {
        return Category::Io;
    }
    Category::Internal
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let cat = categorize(&e);
            let line = serde_json::json!({"error": cat.name(), "message": format!("{e:#}")});
            eprintln!("{line}");
            ExitCode::from(cat as u8)
        }
    }
}
