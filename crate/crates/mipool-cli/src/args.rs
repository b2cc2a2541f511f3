//! Command-line interface definition.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use mipool::simulation::SimulationConfig;

/// Which pooling rules to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleChoice {
    Both,
    Conventional,
    Simplified,
}

/// Run a Monte Carlo coverage study of multiple-imputation pooling rules and
/// write the per-condition summary as CSV (plus an optional SVG coverage
/// plot).
#[derive(Debug, Parser)]
#[command(name = "mipool", version, about)]
pub struct Cli {
    /// Population size per replication
    #[arg(long = "n-pop", default_value_t = 1000)]
    pub n_pop: usize,

    /// Number of imputations per replication
    #[arg(long, default_value_t = 5)]
    pub m: usize,

    /// Chained-equation iterations per imputation
    #[arg(long, default_value_t = 10)]
    pub iterations: usize,

    /// Replications per missingness rate
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,

    /// Comma-separated missingness rates, each strictly inside (0, 1)
    #[arg(
        long,
        value_delimiter = ',',
        value_parser = parse_rate,
        default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,0.95"
    )]
    pub rates: Vec<f64>,

    /// Nominal confidence level
    #[arg(long, default_value_t = 0.95, value_parser = parse_level)]
    pub level: f64,

    /// RNG seed (falls back to the MIPOOL_SEED environment variable)
    #[arg(long, env = "MIPOOL_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Which pooling rules to report
    #[arg(long, value_enum, default_value_t = RuleChoice::Both)]
    pub rules: RuleChoice,

    /// Write the summary CSV here (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Write an SVG coverage plot here (requires --rules both)
    #[arg(long)]
    pub plot: Option<PathBuf>,

    /// Worker threads; 0 means one per core
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

fn parse_rate(s: &str) -> Result<f64, String> {
    let rate: f64 = s
        .parse()
        .map_err(|_| format!("`{s}` is not a number"))?;
    if rate > 0.0 && rate < 1.0 {
        Ok(rate)
    } else {
        Err(format!("rate {rate} must lie strictly inside (0, 1)"))
    }
}

fn parse_level(s: &str) -> Result<f64, String> {
    let level: f64 = s
        .parse()
        .map_err(|_| format!("`{s}` is not a number"))?;
    if level > 0.0 && level < 1.0 {
        Ok(level)
    } else {
        Err(format!("level {level} must lie strictly inside (0, 1)"))
    }
}

impl Cli {
    /// The study configuration implied by the flags.
    pub fn to_config(&self) -> SimulationConfig {
        SimulationConfig {
            n_pop: self.n_pop,
            miss_rates: self.rates.clone(),
            m: self.m,
            iterations: self.iterations,
            reps: self.reps,
            level: self.level,
            seed: self.seed,
            ..SimulationConfig::default()
        }
    }
}
