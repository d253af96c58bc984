use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use grauert_lab::config::{Experiment, ExperimentConfig};
use grauert_lab::{plot, Cache, RunResult};

#[derive(Parser)]
#[command(name = "grauert-lab", about = "Szegő and Poisson kernel experiments on Grauert tubes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML config; its `experiment` must match the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    TorusExample,
    KernelDiagonal,
    Scaling,
    RapidDecay,
    KirillovCheck,
    HusimiBound,
    LpNorm,
    Orthogonality,
    /// Every experiment with its default config.
    All,
}

impl Command {
    fn experiments(&self) -> Vec<Experiment> {
        match self {
            Command::TorusExample => vec![Experiment::TorusExample],
            Command::KernelDiagonal => vec![Experiment::KernelDiagonal],
            Command::Scaling => vec![Experiment::Scaling],
            Command::RapidDecay => vec![Experiment::RapidDecay],
            Command::KirillovCheck => vec![Experiment::KirillovCheck],
            Command::HusimiBound => vec![Experiment::HusimiBound],
            Command::LpNorm => vec![Experiment::LpNorm],
            Command::Orthogonality => vec![Experiment::Orthogonality],
            Command::All => Experiment::ALL.to_vec(),
        }
    }
}

fn load(cli: &Cli, experiment: Experiment) -> RunResult<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => {
            let c = ExperimentConfig::from_toml(&std::fs::read_to_string(path)?)?;
            if c.experiment != experiment {
                return Err(grauert_core::LabError::Config(format!(
                    "config is for '{}', subcommand is '{}'",
                    c.experiment.name(),
                    experiment.name()
                ))
                .into());
            }
            c
        }
        None => ExperimentConfig::default_for(experiment),
    };
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn execute(cli: &Cli) -> RunResult<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| grauert_core::LabError::Config(e.to_string()))?;
    }
    let experiments = cli.command.experiments();
    if experiments.len() > 1 && cli.config.is_some() {
        return Err(grauert_core::LabError::Config("--config needs a single experiment".into()).into());
    }
    // Validate every config before any file is written.
    let configs = experiments.iter().map(|&e| load(cli, e)).collect::<RunResult<Vec<_>>>()?;
    let cache = Cache::new(cli.cache_dir.clone())?;
    let mut ok = true;
    for config in &configs {
        let report = grauert_lab::run(config, &cache)?;
        let mut files = report.write(&config.output_dir)?;
        files.extend(plot::plot_default(&report, &config.output_dir)?);
        for line in report.summary_lines() {
            println!("{line}");
        }
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
        for f in files {
            eprintln!("wrote {}", f.display());
        }
        ok &= report.all_passed();
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
