use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use gdbench_core::diamond::{user_corrections, BoundReport, DiamondOracle, OracleConfig};
use gdbench_core::estimation::{fit_exponential, DecaySeries};
use gdbench_core::gd::{discrete_params, liouville_pgd};
use gdbench_core::mc::{run_experiment_with, ExperimentConfig, ExperimentId, Scale};
use gdbench_core::parallel::Execution;
use gdbench_core::rb::{ideal_predictions, rb_observables};

mod params;

#[derive(Parser)]
#[command(name = "gdbench", version, about = "Damping-channel estimation and bound studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write trials.csv, summary.csv and meta.json.
    Run {
        #[arg(long)]
        experiment: ExperimentId,
        /// key=value file layered over the experiment defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Trials per sweep point.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Use the trial counts quoted in the figure captions.
        #[arg(long)]
        caption_scale: bool,
        /// Run on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Evaluate the bounds and the numerical diamond norm for one channel.
    Bounds {
        #[arg(long)]
        params: PathBuf,
    },
    /// Fit c1·exp(−rate·t) + c0 to a `time,value` CSV.
    Fit {
        #[arg(long)]
        input: PathBuf,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Run {
            experiment,
            config,
            seed,
            trials,
            out,
            caption_scale,
            sequential,
        } => {
            let mut cfg = match &config {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    ExperimentConfig::parse(experiment, &text)
                        .with_context(|| format!("in {}", path.display()))?
                }
                None => ExperimentConfig::defaults(experiment),
            };
            if caption_scale {
                cfg.scale = Scale::Caption;
                cfg.trials = cfg.default_trials();
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(n) = trials {
                cfg.trials = n;
            }
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::default()
            };
            let start = std::time::Instant::now();
            let ds = run_experiment_with(&cfg, exec, None)?;
            ds.write_to(&out)
                .with_context(|| format!("writing to {}", out.display()))?;
            log::info!(
                "{} rows written to {} in {:.1?}",
                ds.trials.len(),
                out.display(),
                start.elapsed()
            );
        }
        Command::Bounds { params } => {
            let text = fs::read_to_string(&params)
                .with_context(|| format!("reading {}", params.display()))?;
            let spec = params::parse(&text).with_context(|| format!("in {}", params.display()))?;
            let p = &spec.params;
            let (g1, g2) = discrete_params(p.gamma1, p.gamma2, spec.dt)?;
            let channel = liouville_pgd(p, spec.dt)?;
            let rb = rb_observables(&channel);
            let corrections = user_corrections(p, spec.dt, &rb).ok();
            let mut report = BoundReport::compute(g1, g2, p.lambda, &rb, corrections.as_ref())?;
            let oracle = DiamondOracle::new(OracleConfig {
                starts: spec.oracle_starts,
                seed: spec.oracle_seed,
                ..OracleConfig::default()
            })
            .evaluate(&channel.identity_minus());
            report.oracle_diamond = Some(oracle.value);
            let out = json!({
                "params": p,
                "dt": spec.dt,
                "gamma1_discrete": g1,
                "gamma2_discrete": g2,
                "rb": rb,
                "rb_ideal": ideal_predictions(g1, g2)?,
                "bounds": report,
                "oracle": oracle,
                "completely_positive": channel.is_completely_positive(1e-12),
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Fit { input } => {
            let file =
                fs::File::open(&input).with_context(|| format!("opening {}", input.display()))?;
            let series = DecaySeries::read_csv(file)?;
            let fit = fit_exponential(&series)?;
            if !fit.converged {
                log::warn!("fit did not converge after {} iterations", fit.iterations);
            }
            let out = json!({
                "rate": fit.rate(),
                "last_rate": fit.last_rate(),
                "c1": fit.c1,
                "c0": fit.c0,
                "rms_residual": fit.rms_residual,
                "converged": fit.converged,
                "iterations": fit.iterations,
                "points": series.len(),
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
    }
    Ok(())
}
