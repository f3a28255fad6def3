use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use mcore::config::AnalysisConfig;

pub const SEED_ENV: &str = "CORE_ANALYZER_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "core-analyzer",
    version,
    about = "Definite sets, multiplicative cores and peripheral spectra of positive unital maps on M_n"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze a channel file and write a core report.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        /// Report path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Follow the orbit of one operator and write an orbit report.
    Orbit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        operator: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write per-step columns as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// List catalog channels or write one to a channel file.
    Zoo {
        #[command(subcommand)]
        action: ZooAction,
    },
    /// Run every check on randomly drawn channels.
    Fuzz {
        #[arg(long)]
        count: usize,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        dims: Vec<usize>,
        /// Random kinds; defaults to the standard four.
        #[arg(long, value_delimiter = ',')]
        kinds: Vec<String>,
        /// Directory receiving one JSON file per failing instance.
        #[arg(long)]
        archive_dir: Option<PathBuf>,
        /// Summary path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum ZooAction {
    List,
    Make {
        name: String,
        #[arg(long)]
        dim: usize,
        /// Family parameters as key=value.
        params: Vec<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    #[arg(long)]
    pub tol_rank: Option<f64>,
    #[arg(long)]
    pub tol_peripheral: Option<f64>,
    #[arg(long)]
    pub tol_faithful: Option<f64>,
    #[arg(long)]
    pub angle_tol: Option<f64>,
    #[arg(long)]
    pub max_power: Option<usize>,
    #[arg(long)]
    pub orbit_steps: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Overridden by the CORE_ANALYZER_SEED environment variable.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl ConfigArgs {
    /// Applies the flags over the defaults; `env_seed` wins over `--seed`.
    pub fn resolve(&self, env_seed: Option<&str>) -> Result<AnalysisConfig, String> {
        let d = AnalysisConfig::default();
        let seed = match env_seed {
            Some(s) => s
                .trim()
                .parse()
                .map_err(|_| format!("{SEED_ENV}={s} is not an unsigned integer"))?,
            None => self.seed.unwrap_or(d.seed),
        };
        let config = AnalysisConfig {
            tol_rank: self.tol_rank.unwrap_or(d.tol_rank),
            tol_peripheral: self.tol_peripheral.unwrap_or(d.tol_peripheral),
            tol_faithful: self.tol_faithful.unwrap_or(d.tol_faithful),
            angle_tol: self.angle_tol.unwrap_or(d.angle_tol),
            max_power: self.max_power.unwrap_or(d.max_power),
            orbit_steps: self.orbit_steps.unwrap_or(d.orbit_steps),
            samples: self.samples.unwrap_or(d.samples),
            seed,
        };
        config.check().map_err(|e| e.to_string())?;
        Ok(config)
    }
}
