use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use vort2d_core::convergence::{error_curve, error_curve_csv, long_time_statistics, stats_csv};
use vort2d_core::norms::{estimate_wente_constants, WenteEnsemble};
use vort2d_core::runner::{budget_for, checkpoint_name, initial_state, parse_config, InitialCondition, SimConfig, Simulation};
use vort2d_core::stability::{StabilityBudget, CSV_HEADER};
use vort2d_core::Error;

mod gronwall_csv;

const BUDGET_FILE: &str = "budget.txt";
const DIAG_FILE: &str = "diag.csv";

#[derive(Parser)]
#[command(name = "vort2d", version, about = "Semi-implicit spectral solver for 2D periodic Navier-Stokes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation, writing diag.csv, checkpoints and budget.txt.
    Run {
        config: PathBuf,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Continue from the newest checkpoint in the output directory.
        #[arg(long)]
        resume: bool,
        /// Stop after reaching this step, leaving the run resumable.
        #[arg(long)]
        max_steps: Option<u64>,
    },
    /// Print the stability budget for a configuration.
    Budget { config: PathBuf },
    /// Estimate the Wente constants by random sampling.
    Wente {
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Ensemble::Multiscale)]
        ensemble: Ensemble,
    },
    /// Temporal error curve against a fine-step reference.
    Convergence {
        config: PathBuf,
        /// Comma-separated, strictly decreasing time steps.
        #[arg(long, value_delimiter = ',', required = true)]
        dts: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        t_star: f64,
        /// Reference step; defaults to min(dts)/16.
        #[arg(long)]
        dt_ref: Option<f64>,
        #[arg(long, default_value = "error_curve.csv")]
        out: PathBuf,
    },
    /// Time-averaged energy and enstrophy over a window, per time step.
    Stats {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        dts: Vec<f64>,
        /// Window as `start,end`.
        #[arg(long, value_delimiter = ',', required = true)]
        window: Vec<f64>,
        #[arg(long, default_value = "stats.csv")]
        out: PathBuf,
    },
    /// Check the discrete uniform Gronwall lemma on sequences from a CSV.
    Gronwall { csv: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Ensemble {
    FullBand,
    Multiscale,
}

fn load_config(path: &Path) -> Result<SimConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

fn latest_checkpoint(dir: &Path) -> Result<PathBuf> {
    let mut best: Option<(u64, PathBuf)> = None;
    for entry in fs::read_dir(dir).with_context(|| format!("listing {}", dir.display()))? {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
        let Some(step) = name.strip_prefix("ckpt_").and_then(|s| s.strip_suffix(".bin")) else { continue };
        let Ok(step) = step.parse::<u64>() else { continue };
        if checkpoint_name(step) == name && best.as_ref().map_or(true, |(s, _)| step > *s) {
            best = Some((step, path));
        }
    }
    best.map(|(_, p)| p)
        .with_context(|| format!("no checkpoint found in {}", dir.display()))
}

fn run(config: &Path, out: &Path, resume: bool, max_steps: Option<u64>) -> Result<()> {
    let mut cfg = load_config(config)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    if resume {
        cfg.initial = InitialCondition::Checkpoint(latest_checkpoint(out)?);
    }
    let resuming = matches!(cfg.initial, InitialCondition::Checkpoint(_));
    let budget_path = out.join(BUDGET_FILE);
    let mut sim = if resuming && budget_path.exists() {
        let text = fs::read_to_string(&budget_path).with_context(|| format!("reading {}", budget_path.display()))?;
        let budget = StabilityBudget::parse_record(&text).with_context(|| format!("in {}", budget_path.display()))?;
        Simulation::with_budget(cfg, budget)?
    } else {
        let sim = Simulation::new(cfg)?;
        fs::write(&budget_path, sim.budget().record())
            .with_context(|| format!("writing {}", budget_path.display()))?;
        sim
    };
    sim = sim.with_checkpoint_dir(out);

    let diag_path = out.join(DIAG_FILE);
    let append = resuming && diag_path.exists();
    let file = if append {
        OpenOptions::new().append(true).open(&diag_path)
    } else {
        File::create(&diag_path)
    }
    .with_context(|| format!("opening {}", diag_path.display()))?;
    let mut diag = BufWriter::new(file);
    if !append {
        writeln!(diag, "{CSV_HEADER}")?;
    }

    let checkpoint_every = sim.config().checkpoint_every;
    let limit = max_steps.unwrap_or(u64::MAX);
    let result = sim.run_until(limit, |rec| {
        writeln!(diag, "{}", rec.csv_row()).map_err(Error::from)?;
        if checkpoint_every > 0 && rec.step % checkpoint_every == 0 {
            diag.flush().map_err(Error::from)?;
        }
        Ok(())
    });
    diag.flush().with_context(|| format!("writing {}", diag_path.display()))?;
    let summary = result?;
    if summary.final_step < sim.total_steps() {
        let path = sim.checkpoint_now()?;
        println!("stopped at step {}; resume from {}", summary.final_step, path.display());
    } else if checkpoint_every > 0 && summary.final_step % checkpoint_every != 0 {
        sim.checkpoint_now()?;
    }
    println!("steps={}", summary.steps_taken);
    println!("final_step={}", summary.final_step);
    println!("max_l2={:e}", summary.max_l2);
    println!("m0={:e}", sim.budget().m0);
    println!("l2_violations={}", summary.l2_violations);
    println!("h1_violations={}", summary.h1_violations);
    Ok(())
}

fn budget(config: &Path) -> Result<()> {
    let cfg = load_config(config)?;
    let initial = initial_state(&cfg)?;
    print!("{}", budget_for(&cfg, &initial)?.report());
    Ok(())
}

fn wente(n: usize, samples: usize, seed: u64, ensemble: Ensemble) -> Result<()> {
    let ensemble = match ensemble {
        Ensemble::FullBand => WenteEnsemble::FullBand,
        Ensemble::Multiscale => WenteEnsemble::Multiscale,
    };
    for est in estimate_wente_constants(n, samples, seed, ensemble)? {
        println!("{}={:e}", est.variant.name(), est.sup_ratio);
    }
    Ok(())
}

fn convergence(config: &Path, dts: &[f64], t_star: f64, dt_ref: Option<f64>, out: &Path) -> Result<()> {
    let cfg = load_config(config)?;
    let Some(min) = dts.iter().copied().reduce(f64::min) else { bail!("no time steps given") };
    let curve = error_curve(&cfg, dts, dt_ref.unwrap_or(min / 16.0), t_star)?;
    fs::write(out, error_curve_csv(&curve)).with_context(|| format!("writing {}", out.display()))?;
    println!("order={}", curve.order);
    println!("monotone={}", curve.is_monotone());
    Ok(())
}

fn stats(config: &Path, dts: &[f64], window: &[f64], out: &Path) -> Result<()> {
    let cfg = load_config(config)?;
    let &[a, b] = window else { bail!("--window takes exactly two values, start,end") };
    let window = (a, b);
    let rows = dts
        .iter()
        .map(|&dt| long_time_statistics(&cfg, dt, window))
        .collect::<vort2d_core::Result<Vec<_>>>()?;
    fs::write(out, stats_csv(&rows)).with_context(|| format!("writing {}", out.display()))?;
    for r in &rows {
        println!("dt={} mean_enstrophy={:e}", r.dt, r.mean_enstrophy);
    }
    Ok(())
}

fn gronwall(path: &Path) -> Result<()> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let input = gronwall_csv::parse(&text).map_err(|e| anyhow::anyhow!("{}:{e}", path.display()))?;
    let outcome = vort2d_core::stability::uniform_gronwall_check(&input)?;
    println!("premise={}", outcome.premise_ok);
    println!("bound={:e}", outcome.bound);
    println!("conclusion={}", outcome.conclusion_ok);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config, out, resume, max_steps } => run(config, out, *resume, *max_steps),
        Command::Budget { config } => budget(config),
        Command::Wente { n, samples, seed, ensemble } => wente(*n, *samples, *seed, *ensemble),
        Command::Convergence { config, dts, t_star, dt_ref, out } => convergence(config, dts, *t_star, *dt_ref, out),
        Command::Stats { config, dts, window, out } => stats(config, dts, window, out),
        Command::Gronwall { csv } => gronwall(csv),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let numerical = e.chain().any(|c| matches!(c.downcast_ref::<Error>(), Some(Error::NumericalFailure { .. })));
            ExitCode::from(if numerical { 2 } else { 1 })
        }
    }
}
