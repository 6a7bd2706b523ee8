use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wassknn_experiments::config::parse_text;
use wassknn_experiments::summary::{render_plot, render_table};
use wassknn_experiments::{parse_threads, run, summarize, Error, ExperimentConfig, Result, THREADS_VAR};

/// Seeded Wasserstein k-NN experiments.
#[derive(Parser)]
#[command(name = "wassknn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a suite and write its CSV.
    Run {
        /// Flat key=value configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        suite: Option<String>,
        /// Comma-separated sample sizes.
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Any other configuration key, as key=value.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Aggregate a risk CSV per sample size.
    Summarize {
        csv: PathBuf,
        /// Write a two-column `n risk` file for plotting.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n = parse_threads(&v)?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Usage(e.to_string()))?;
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Run { config, suite, n, seed, trials, out, set } => {
            let mut pairs = match config {
                Some(path) => parse_text(&fs::read_to_string(path)?)?,
                None => Vec::new(),
            };
            for s in set {
                let (k, v) = s.split_once('=').ok_or_else(|| Error::Usage(format!("--set expects key=value, got `{s}`")))?;
                pairs.push((k.trim().into(), v.trim().into()));
            }
            let flags = [
                ("suite", suite),
                ("n", n),
                ("seed", seed.map(|s| s.to_string())),
                ("trials", trials.map(|t| t.to_string())),
                ("out", out.map(|p| p.display().to_string())),
            ];
            pairs.extend(flags.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))));
            let cfg = ExperimentConfig::from_pairs(&pairs)?;
            let bytes = run(&cfg)?;
            match &cfg.out {
                Some(path) => fs::write(path, &bytes)?,
                None => std::io::stdout().lock().write_all(&bytes)?,
            }
        }
        Command::Summarize { csv, plot } => {
            let rows = summarize(fs::File::open(csv)?)?;
            print!("{}", render_table(&rows));
            if let Some(path) = plot {
                fs::write(path, render_plot(&rows))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wassknn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
