use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use roadsafe_core::data::SyntheticConfig;
use roadsafe_core::pipeline::{cmd_generate, cmd_run, RunConfig};

/// Crash-rate modeling of road sections with tree ensembles and a
/// lane-width what-if analysis.
#[derive(Debug, Parser)]
#[command(name = "roadsafe", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic section-year CSV and its generator truth file.
    Generate(Common),
    /// Run ingestion, model fitting, selection, importance and the
    /// lane-width simulation, writing every report.
    Run(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML run configuration. Without it, synthetic data with default
    /// settings is used.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; all available cores by default. Output does not
    /// depend on this.
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig {
                generator: Some(SyntheticConfig::default()),
                ..RunConfig::default()
            },
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(out) = &self.out {
            config.output_dir = out.clone();
        }
        Ok(config)
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.threads {
            anyhow::ensure!(n >= 1, "--threads must be at least 1");
            builder = builder.num_threads(n);
        }
        builder.build().context("cannot start the worker pool")
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(common) => {
            let config = common.resolve()?;
            let out = common.pool()?.install(|| cmd_generate(&config))?;
            println!("wrote {} records to {}", out.n_records, out.csv.display());
            println!("wrote {}", out.truth.display());
        }
        Command::Run(common) => {
            let config = common.resolve()?;
            let out = common.pool()?.install(|| cmd_run(&config))?;
            let m = &out.manifest;
            println!(
                "{} sections ({} train, {} test); winner {}",
                m.n_sections,
                m.n_train,
                m.n_test,
                m.winner.label()
            );
            let order: Vec<String> = out
                .effect
                .ordering()
                .iter()
                .map(|w| format!("{w} ft"))
                .collect();
            println!(
                "lane widths by simulated {}: {}",
                out.effect.response_label,
                order.join(" > ")
            );
            if let Some(kw) = &out.effect.kruskal_wallis {
                println!(
                    "Kruskal-Wallis chi-squared {:.2}, df {}, p {}",
                    kw.h_statistic,
                    kw.df,
                    roadsafe_core::stats::format_p(kw.p_value)
                );
            }
            if let Some(note) = &out.effect.note {
                println!("{note}");
            }
            println!(
                "wrote {} artifacts to {}",
                m.artifacts.len() + 1,
                out.output_dir.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
