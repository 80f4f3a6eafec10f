use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use rankone_lab::config::RunConfig;
use rankone_lab::{commands, exit_code, Classify, ExitKind};

#[derive(Parser)]
#[command(
    name = "rankone-lab",
    version,
    about = "Construct and verify eigenvalue-free rank-one perturbations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the selection plan, coefficients and bundle.
    Construct(Overrides),
    /// Run the eigenvalue test and bundle checks on stored artifacts.
    Verify(Overrides),
    /// Write heat-map, eigenvalue and growth CSVs from stored artifacts.
    Sweep(Overrides),
}

#[derive(Args)]
struct Overrides {
    /// Flat TOML config; flags below take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    cantor_ratio: Option<f64>,
    /// Last construction stage.
    #[arg(long)]
    stages: Option<u32>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    /// Total verification grid size.
    #[arg(long)]
    grid: Option<usize>,
    /// Comma-separated truncation sizes; pass an empty string for none.
    #[arg(long)]
    truncations: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Overrides {
    fn resolve(self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::from_file(path).kind(ExitKind::Config)?,
            None => RunConfig::default(),
        };
        if let Some(m) = self.model {
            c.model = m;
        }
        if self.cantor_ratio.is_some() {
            c.cantor_ratio = self.cantor_ratio;
        }
        if let Some(s) = self.stages {
            c.stages = s;
        }
        if let Some(h) = self.horizon {
            c.horizon = h;
        }
        if let Some(d) = self.delta {
            c.delta = d;
        }
        if let Some(g) = self.grid {
            c.grid_points = g;
        }
        if let Some(t) = self.truncations {
            c.truncations = t
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse().with_context(|| format!("--truncations: {s:?} is not a size")))
                .collect::<Result<_>>()
                .kind(ExitKind::Config)?;
        }
        if let Some(o) = self.out {
            c.out = o;
        }
        Ok(c)
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Construct(o) => commands::construct(&o.resolve()?).map(|_| true),
        Command::Verify(o) => commands::verify(&o.resolve()?).map(|r| r.pass),
        Command::Sweep(o) => commands::sweep(&o.resolve()?).map(|_| true),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(ExitKind::Verification as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
