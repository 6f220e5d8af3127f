use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use vortex_cli::config::{Emit, Overrides, RunConfig};
use vortex_cli::error::CliError;
use vortex_cli::sweep::{run_panels, StateDump, SweepOptions};
use vortex_cli::{figure, verify};
use vortex_core::lattice::{ChargePair, Hopping, Model};
use vortex_core::stationary::solve_at;

#[derive(Parser)]
#[command(
    name = "vortex",
    version,
    about = "Vortex branches of the discrete NLS lattice: continuation, spectra, figures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one stationary state at `--eps` by continuation from zero coupling.
    Continue {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        eps: f64,
    },
    /// Sweep the coupling grid and write branch, comparison and event files.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        resume: bool,
        /// Also compute zero-eigenvalue multiplicities at every point.
        #[arg(long)]
        kernel: bool,
    },
    /// Render a figure from existing sweep artifacts.
    Figure {
        #[command(flatten)]
        run: RunArgs,
        /// Figure number (1 to 4); defaults to the config's `figure`.
        #[arg(long)]
        number: Option<u8>,
    },
    /// Run the acceptance criteria for the configured regime.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Run every criterion instead of the regime's subset.
        #[arg(long)]
        all: bool,
        /// Criterion numbers to run.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
    /// Print the closed-form small-coupling predictions on the coupling grid.
    Predict {
        #[command(flatten)]
        run: RunArgs,
    },
}

fn parse_model(s: &str) -> Result<Model, String> {
    match s {
        "scalar" => Ok(Model::Scalar),
        "vector" => Ok(Model::Vector),
        _ => Err(format!("expected scalar or vector, got {s:?}")),
    }
}

fn parse_hopping(s: &str) -> Result<Hopping, String> {
    match s {
        "neighbor_sum" | "neighbor-sum" => Ok(Hopping::NeighborSum),
        "laplacian" => Ok(Hopping::Laplacian),
        _ => Err(format!("expected neighbor_sum or laplacian, got {s:?}")),
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_model)]
    model: Option<Model>,
    #[arg(long, value_parser = |s: &str| s.parse::<ChargePair>().map_err(|e| e.to_string()))]
    charges: Option<ChargePair>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long, value_parser = parse_hopping)]
    hopping: Option<Hopping>,
    #[arg(long)]
    eps_start: Option<f64>,
    #[arg(long)]
    eps_stop: Option<f64>,
    #[arg(long)]
    eps_step: Option<f64>,
    #[arg(long)]
    grid_n: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = |s: &str| s.parse::<Emit>().map_err(|e| e.to_string()))]
    emit: Option<Emit>,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig, CliError> {
        let base = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let o = Overrides {
            model: self.model,
            charges: self.charges,
            beta: self.beta,
            omega: self.omega,
            delta: self.delta,
            hopping: self.hopping,
            eps_start: self.eps_start,
            eps_stop: self.eps_stop,
            eps_step: self.eps_step,
            grid_n: self.grid_n,
            out: self.out.clone(),
            emit: self.emit,
        };
        o.apply(base)
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Continue { run, eps } => {
            let cfg = run.config()?;
            let spec = cfg.spec()?;
            let state = solve_at(&spec, eps, cfg.eps_grid.step, &cfg.newton_config()).map_err(CliError::from)?;
            println!("{}", serde_json::to_string_pretty(&StateDump::from_state(&state))?);
            Ok(())
        }
        Command::Sweep { run, resume, kernel } => {
            let cfg = run.config()?;
            let opts = SweepOptions { resume, kernel, ..SweepOptions::default() };
            for out in run_panels(&cfg, &opts)? {
                let first = out.hh.first().map(|e| e.eps_star);
                println!(
                    "{}: {} points, first instability {}",
                    out.dir.display(),
                    out.manifest.points.len(),
                    first.map_or("none".to_string(), |e| format!("{e:.6}"))
                );
            }
            if cfg.emit.svg {
                if let Some(n) = cfg.figure {
                    let (svg, _) = figure::emit_figure(&cfg, n)?;
                    println!("{}", svg.display());
                }
            }
            Ok(())
        }
        Command::Figure { run, number } => {
            let cfg = run.config()?;
            let n = number.or(cfg.figure).ok_or_else(|| CliError::Config("no figure number given".into()))?;
            let (svg, dat) = figure::emit_figure(&cfg, n)?;
            println!("{}\n{}", svg.display(), dat.display());
            Ok(())
        }
        Command::Verify { run, all, only } => {
            let cfg = run.config()?;
            let numbers = if !only.is_empty() {
                only
            } else if all {
                (1..=10).collect()
            } else {
                verify::criteria_for(&cfg)
            };
            let reports = verify::run_criteria(&numbers);
            for r in &reports {
                eprintln!("{}", r.summary_line());
            }
            println!("{}", serde_json::to_string_pretty(&verify::to_json(&reports))?);
            Ok(())
        }
        Command::Predict { run } => {
            let cfg = run.config()?;
            let table = verify::predict_table(&cfg).context("predictions")?;
            println!("{}", serde_json::to_string_pretty(&table)?);
            Ok(())
        }
    }
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
