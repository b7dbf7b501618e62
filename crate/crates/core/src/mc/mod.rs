//! Seeded Monte Carlo runner for the estimation and bound studies.
//!
//! Work items are (group, strength, trial) triples flattened into a global
//! index that doubles as the RNG stream, so a run gives the same rows whether
//! it is scheduled sequentially or on the rayon pool.

mod analysis;
mod config;
mod output;
mod trial;

pub use analysis::{
    crossover_strength, fig4_binning, sweep_slope, BinSample, Fig4Bin, SummaryRow, SweepFit,
};
pub use config::{ExperimentConfig, ExperimentId, Scale};
pub use output::{RNG_DESCRIPTION, SUMMARY_FILE, TRIALS_FILE, META_FILE};
pub use trial::{trial_rng, ChannelOutcome, Estimate, Estimator, TrialRecord};

use analysis::mean;

use crate::diamond::GeneralBound;
use crate::error::Result;
use crate::parallel::{map_indexed, Execution};

/// Trial records in index order plus the derived summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub config: ExperimentConfig,
    pub trials: Vec<TrialRecord>,
    pub summary: Vec<SummaryRow>,
    /// Fits that did not converge; excluded from every mean.
    pub fit_failures: usize,
    pub general_bound: Option<String>,
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Dataset> {
    run_experiment_with(config, Execution::default(), None)
}

pub fn run_experiment_with(
    config: &ExperimentConfig,
    exec: Execution,
    general: Option<&dyn GeneralBound>,
) -> Result<Dataset> {
    config.validate()?;
    let groups = config.groups();
    let strengths = config.strengths();
    let per_group = strengths.len() * config.trials;
    let total = groups.len() * per_group;
    log::info!(
        "{}: {} work items ({} groups x {} strengths x {} trials)",
        config.experiment,
        total,
        groups.len(),
        strengths.len(),
        config.trials
    );

    let results = map_indexed(total, exec, |index| {
        let group = groups[index / per_group];
        let strength = strengths[(index % per_group) / config.trials];
        trial::run_trial(config, index, group, strength, general)
    });
    let trials = results.into_iter().collect::<Result<Vec<_>>>()?;

    let fit_failures = trials
        .iter()
        .flat_map(|t| &t.estimates)
        .filter(|e| e.estimate.is_none())
        .count();
    if fit_failures > 0 {
        log::warn!("{fit_failures} fits did not converge and are excluded from the means");
    }
    let summary = summarise(config, &trials, general.is_some());
    Ok(Dataset {
        config: config.clone(),
        trials,
        summary,
        fit_failures,
        general_bound: general.map(|g| g.name().to_string()),
    })
}

fn summarise(cfg: &ExperimentConfig, trials: &[TrialRecord], with_general: bool) -> Vec<SummaryRow> {
    let groups = cfg.groups();
    let strengths = cfg.strengths();
    let mut rows = Vec::new();
    match cfg.experiment {
        ExperimentId::Fig4 => fig4_summary(cfg, trials, &mut rows),
        ExperimentId::Fig3a | ExperimentId::Fig3b => {
            let mut crossings = Vec::new();
            for &g in &groups {
                let mut curve = Vec::new();
                for &s in &strengths {
                    let cell: Vec<&ChannelOutcome> = trials
                        .iter()
                        .filter(|t| t.group == g && t.strength == s)
                        .filter_map(|t| t.channel.as_ref())
                        .collect();
                    let robust = channel_summary(g, s, &cell, &mut rows);
                    if with_general {
                        let general = mean(cell.iter().filter_map(|c| c.bounds.general_bound));
                        if let (Some(r), Some(gb)) = (robust, general) {
                            curve.push((s, r, gb));
                        }
                    }
                }
                if let Some(s_star) = crossover_strength(&curve) {
                    let r = mean(
                        trials
                            .iter()
                            .filter(|t| t.group == g)
                            .filter_map(|t| t.channel.map(|c| c.r_gd)),
                    )
                    .unwrap_or(f64::NAN);
                    rows.push(SummaryRow::new("crossover_strength", "", g, s_star, curve.len()));
                    rows.push(SummaryRow::new("crossover_r", "", g, r, curve.len()));
                    crossings.push((r, s_star));
                }
            }
            if let Some(fit) = sweep_slope(&crossings) {
                rows.push(SummaryRow::new("crossover_slope", "", None, fit.slope, fit.points));
            }
        }
        id => {
            for &est in Estimator::for_experiment(id) {
                let label = est.as_str();
                let g = cfg.gamma2_prime;
                let mut sweep = Vec::new();
                for &s in &strengths {
                    let all: Vec<&Estimate> = trials
                        .iter()
                        .filter(|t| t.strength == s)
                        .flat_map(|t| t.estimates.iter().filter(|e| e.estimator == est))
                        .collect();
                    let errors: Vec<f64> = all.iter().filter_map(|e| e.error()).collect();
                    let n = errors.len();
                    let failures = all.len() - n;
                    let row = |m: &str, v: f64, n: usize| SummaryRow::new(m, label, g, v, n).at_strength(s);
                    if let Some(m) = mean(errors.iter().map(|e| e.abs())) {
                        rows.push(row("mean_abs_error", m, n));
                        sweep.push((s, m));
                    }
                    if let Some(m) = mean(errors.iter().copied()) {
                        rows.push(row("mean_error", m, n));
                    }
                    let predicted: Vec<f64> = all
                        .iter()
                        .filter(|e| e.estimate.is_some())
                        .filter_map(|e| e.predicted_error)
                        .collect();
                    if let Some(m) = mean(predicted.iter().copied()) {
                        rows.push(row("mean_predicted_error", m, predicted.len()));
                    }
                    rows.push(row("fit_failures", failures as f64, all.len()));
                }
                if id.is_sweep() {
                    if let Some(fit) = sweep_slope(&sweep) {
                        rows.push(SummaryRow::new("sweep_slope", label, g, fit.slope, fit.points));
                        rows.push(SummaryRow::new(
                            "sweep_intercept",
                            label,
                            g,
                            fit.intercept,
                            fit.points,
                        ));
                    }
                }
            }
        }
    }
    rows
}

/// Appends the bound-study rows for one (Γ2′, s) cell and returns the mean
/// robust bound.
fn channel_summary(
    g: f64,
    s: f64,
    cell: &[&ChannelOutcome],
    rows: &mut Vec<SummaryRow>,
) -> Option<f64> {
    let n = cell.len();
    let mut push = |metric: &str, v: Option<f64>| {
        if let Some(v) = v {
            rows.push(SummaryRow::new(metric, "", g, v, n).at_strength(s));
        }
    };
    let robust = mean(cell.iter().map(|c| c.bounds.bound_robust));
    push("mean_r", mean(cell.iter().map(|c| c.rb.r)));
    push("mean_r_gd", mean(cell.iter().map(|c| c.r_gd)));
    push("mean_oracle", mean(cell.iter().filter_map(|c| c.bounds.oracle_diamond)));
    push("mean_bound_new", mean(cell.iter().map(|c| c.bounds.bound_new)));
    push("mean_bound_robust", robust);
    push("mean_bound_new_user", mean(cell.iter().filter_map(|c| c.bounds.bound_new_user)));
    push(
        "mean_bound_robust_user",
        mean(cell.iter().filter_map(|c| c.bounds.bound_robust_user)),
    );
    push("mean_general_bound", mean(cell.iter().filter_map(|c| c.bounds.general_bound)));
    let count = |f: &dyn Fn(&ChannelOutcome) -> bool| Some(cell.iter().filter(|c| f(c)).count() as f64);
    push("chain_violations", count(&|c| !chain_holds(c)));
    push("r_above_r_gd", count(&|c| c.rb.r > c.r_gd));
    push("oracle_flagged", count(&|c| c.oracle_flagged));
    robust
}

/// bound_robust_user ≥ bound_robust ≥ bound_new ≥ oracle, skipping links
/// that were not computed.
pub fn chain_holds(c: &ChannelOutcome) -> bool {
    let b = &c.bounds;
    let user_ok = b.bound_robust_user.map_or(true, |u| u >= b.bound_robust);
    let oracle_ok = b.oracle_diamond.map_or(true, |o| b.bound_new >= o);
    user_ok && b.bound_robust >= b.bound_new && oracle_ok
}

fn fig4_summary(cfg: &ExperimentConfig, trials: &[TrialRecord], rows: &mut Vec<SummaryRow>) {
    let samples: Vec<BinSample> = trials
        .iter()
        .filter_map(|t| {
            let c = t.channel.as_ref()?;
            Some(BinSample {
                p: t.strength,
                r: c.rb.r,
                oracle: c.bounds.oracle_diamond?,
                bound_new: c.bounds.bound_new,
                general: c.bounds.general_bound,
            })
        })
        .collect();
    for bin in fig4_binning(&samples, cfg.r_bin_width, cfg.r_max) {
        let row = |m: &str, v: f64| {
            SummaryRow::new(m, "", None, v, bin.count)
                .at_strength(bin.p)
                .in_bin(bin.r_lo, bin.r_hi)
        };
        rows.push(row("bin_mean_oracle", bin.mean_oracle));
        rows.push(row("bin_mean_bound_new", bin.mean_bound_new));
        if let Some(g) = bin.mean_general {
            rows.push(row("bin_mean_general_bound", g));
        }
        if let Some(f) = bin.improvement_fraction {
            rows.push(row("bin_improvement_fraction", f));
        }
    }
    for &p in &cfg.p_values {
        let cell: Vec<&ChannelOutcome> = trials
            .iter()
            .filter(|t| t.strength == p)
            .filter_map(|t| t.channel.as_ref())
            .collect();
        let non_cp = cell.iter().filter(|c| !c.completely_positive).count();
        rows.push(
            SummaryRow::new("non_cp_channels", "", None, non_cp as f64, cell.len())
                .at_strength(p),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(id: ExperimentId, trials: usize) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::defaults(id);
        cfg.trials = trials;
        cfg.oracle_starts = 4;
        cfg
    }

    #[test]
    fn noiseless_unperturbed_fit_is_exact() {
        let mut cfg = small(ExperimentId::Fig1a, 10);
        cfg.strength = 0.0;
        cfg.spam_k_max = 0.0;
        cfg.spam_n1_max = 0.0;
        cfg.spam_n2_max = 0.0;
        let ds = run_experiment(&cfg).unwrap();
        let row = ds.summary.iter().find(|r| r.metric == "mean_abs_error").unwrap();
        assert!(row.value < 1e-8, "{row:?}");
        assert_eq!(row.count, 10);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let cfg = small(ExperimentId::Fig2c, 6);
        let a = run_experiment_with(&cfg, Execution::Sequential, None).unwrap();
        let b = run_experiment_with(&cfg, Execution::Parallel, None).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trials.len(), 6 * cfg.sweep.len());
        assert_eq!(a.trials[0].estimates.len(), 2);
    }

    #[test]
    fn sweep_layout_and_slope_rows() {
        let ds = run_experiment(&small(ExperimentId::Fig1b, 4)).unwrap();
        assert_eq!(ds.trials.len(), 20);
        for (i, t) in ds.trials.iter().enumerate() {
            assert_eq!(t.index, i);
            assert_eq!(t.strength, ds.config.sweep[i / 4]);
        }
        assert!(ds.summary.iter().any(|r| r.metric == "sweep_slope"));
    }

    struct Fixed(f64);
    impl GeneralBound for Fixed {
        fn bound(&self, _: &crate::rb::RbReport) -> f64 {
            self.0
        }
        fn name(&self) -> &str {
            "fixed"
        }
    }

    #[test]
    fn channel_study_with_plugged_bound() {
        let mut cfg = small(ExperimentId::Fig3a, 3);
        cfg.sweep = vec![1e-4, 1e-3, 1e-2];
        let ds = run_experiment_with(&cfg, Execution::Sequential, Some(&Fixed(0.5))).unwrap();
        assert_eq!(ds.general_bound.as_deref(), Some("fixed"));
        let c = ds.trials[0].channel.unwrap();
        assert_eq!(c.bounds.general_bound, Some(0.5));
        assert!(c.bounds.bound_new_user.is_some());
        let v = ds.summary.iter().find(|r| r.metric == "r_above_r_gd").unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn fig4_summary_has_bins_and_cp_counts() {
        let mut cfg = small(ExperimentId::Fig4, 5);
        cfg.p_values = vec![0.0, 0.1];
        let ds = run_experiment(&cfg).unwrap();
        assert_eq!(ds.trials.len(), 10);
        let cp: Vec<_> = ds.summary.iter().filter(|r| r.metric == "non_cp_channels").collect();
        assert_eq!(cp.len(), 2);
        assert_eq!(cp[0].value, 0.0);
        let binned: usize = ds
            .summary
            .iter()
            .filter(|r| r.metric == "bin_mean_oracle")
            .map(|r| r.count)
            .sum();
        assert!(binned > 0 && binned <= 10);
    }
}
