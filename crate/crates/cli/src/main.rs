use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use statjet::ensemble::Progress;
use statjet::metrics::Variable;
use statjet::pipeline::{self, RenderRequest, RenderTarget};
use statjet::CaseConfig;

#[derive(Parser)]
#[command(name = "statjet", version, about = "Monte Carlo ensembles of a perturbed 2D jet and their grid-convergence statistics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run (or resume) the ensemble described by a config file.
    Run {
        config: PathBuf,
        /// Cap on worker threads; overrides run.workers.
        #[arg(long)]
        max_jobs: Option<usize>,
        #[arg(long, short)]
        quiet: bool,
    },
    /// Cauchy metrics and rate fits from a finished ensemble.
    Metrics {
        manifest: PathBuf,
        /// Directory for the CSVs; defaults to the manifest's directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Render one sample, the mean or the standard deviation as a PPM image.
    Render {
        manifest: PathBuf,
        #[arg(long, default_value_t = 0)]
        time_index: usize,
        /// `mean`, `std` or a sample index.
        #[arg(long, default_value = "mean")]
        what: RenderTarget,
        /// Grid index in the manifest; the finest by default.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value = "rho")]
        variable: Variable,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Refit rates from an existing metrics CSV.
    Rates {
        metrics: PathBuf,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Print a config file with every default filled in.
    Template {
        /// The 500x100 to 4000x800 ladder with 1000 samples.
        #[arg(long)]
        full_scale: bool,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run { config, max_jobs, quiet } => {
            let report = |p: &Progress| {
                eprintln!("[{}/{}] sample {} on {}: {:?} ({} diverged)", p.done, p.total, p.m, p.grid, p.status, p.diverged)
            };
            let progress: Option<&(dyn Fn(&Progress) + Sync)> = if quiet { None } else { Some(&report) };
            let summary = pipeline::cmd_run(&config, max_jobs, progress)
                .with_context(|| format!("run {}", config.display()))?;
            println!(
                "{} samples x {} grids, {} diverged; manifest {}",
                summary.manifest.samples,
                summary.manifest.grids.len(),
                summary.diverged,
                summary.manifest_path.display()
            );
        }
        Command::Metrics { manifest, out_dir } => {
            let report = pipeline::cmd_metrics(&manifest, out_dir.as_deref())
                .with_context(|| format!("metrics {}", manifest.display()))?;
            println!("time,pair,M_star,W1,E_strong");
            for r in &report.rows {
                println!("{},{},{},{:.6e},{:.6e}", r.time, r.pair, r.m_star, r.w1, r.e_strong);
            }
            println!("time,r_W1,r_strong");
            for r in &report.rates {
                println!("{},{:.4},{:.4}", r.time, r.r_w1, r.r_strong);
            }
        }
        Command::Render { manifest, time_index, what, grid, variable, output } => {
            let req = RenderRequest { time_index, target: what, grid, variable, output };
            pipeline::cmd_render(&manifest, &req).with_context(|| format!("render {}", manifest.display()))?;
            println!("wrote {}", req.output.display());
        }
        Command::Rates { metrics, output } => {
            let rates = pipeline::cmd_rates(&metrics, &output).with_context(|| format!("rates {}", metrics.display()))?;
            for r in &rates {
                println!("{},{:.4},{:.4}", r.time, r.r_w1, r.r_strong);
            }
        }
        Command::Template { full_scale } => {
            let cfg = if full_scale { CaseConfig::full_scale() } else { CaseConfig::desk() };
            print!("{}", cfg.to_toml());
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
