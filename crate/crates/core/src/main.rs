use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use torus_inflation::inflation_lab::{emit_report, run_experiment, Experiment, ExperimentConfig, Format};
use torus_inflation::{Error, Result};

const THREADS_VAR: &str = "INFLATION_LAB_THREADS";

#[derive(Parser)]
#[command(name = "inflation-lab", version, about = "Norm inflation experiments for cubic NLS on scaled tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML (or JSON) config; defaults are used when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Report destination; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: OutFormat,
    /// Worker threads (overrides INFLATION_LAB_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print the effective config as TOML and exit.
    #[arg(long, global = true)]
    print_config: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Two-block inflation sweep over N.
    Inflate,
    /// Small-dispersion error against the ODE over δ and L.
    Approx,
    /// Torus norms of a periodized profile against the real-line norm.
    Periodize,
    /// Γ_j counts along the supercritical δ-sweep.
    Gamma,
    /// (R, A, T) grid scan of the block conditions.
    Feasibility,
}

#[derive(ValueEnum, Clone, Copy)]
enum OutFormat {
    Csv,
    Json,
}

impl Command {
    fn experiment(self) -> Experiment {
        match self {
            Command::Inflate => Experiment::Inflate,
            Command::Approx => Experiment::Approx,
            Command::Periodize => Experiment::Periodize,
            Command::Gamma => Experiment::Gamma,
            Command::Feasibility => Experiment::Feasibility,
        }
    }
}

fn threads(flag: Option<usize>) -> Result<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var(THREADS_VAR) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| Error::Config(format!("{THREADS_VAR}={v} is not a thread count"))),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<()> {
    let experiment = cli.command.experiment();
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default_for(experiment),
    };
    if cfg.experiment != experiment {
        return Err(Error::Config(format!("config is for `{}` but the subcommand is `{}`", cfg.experiment.label(), experiment.label())));
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    if cli.print_config {
        print!("{}", cfg.to_toml()?);
        return Ok(());
    }
    let report = run_experiment(&cfg, threads(cli.threads)?)?;
    let out = cli.out.or_else(|| cfg.output_path.as_ref().map(PathBuf::from));
    let format = match cli.format {
        OutFormat::Csv => Format::Csv,
        OutFormat::Json => Format::Json,
    };
    emit_report(&report, format, out.as_deref())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("inflation-lab: {e}");
            ExitCode::FAILURE
        }
    }
}
