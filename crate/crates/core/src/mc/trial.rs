use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ExperimentId};
use crate::diamond::{user_corrections, BoundReport, DiamondOracle, GeneralBound, OracleConfig};
use crate::error::Result;
use crate::estimation::{
    fit_exponential, predicted_estimator_bias, simulate_avg_ramsey, simulate_population_inversion,
    simulate_static_ramsey, uniform_times, with_shot_noise, AngleAverage, DecaySeries, SpamParams,
};
use crate::gd::{discrete_params, liouville_gd, liouville_pgd, LiouvilleChannel, PerturbedGdParams};
use crate::rb::{ideal_predictions, rb_observables, RbReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    PopulationInversion,
    StaticRamsey,
    AveragedRamsey,
}

impl Estimator {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::PopulationInversion => "population_inversion",
            Self::StaticRamsey => "static_ramsey",
            Self::AveragedRamsey => "averaged_ramsey",
        }
    }

    pub fn for_experiment(id: ExperimentId) -> &'static [Estimator] {
        use Estimator::*;
        match id {
            ExperimentId::Fig1a | ExperimentId::Fig1b => &[PopulationInversion],
            ExperimentId::Fig2a => &[StaticRamsey],
            ExperimentId::Fig2b | ExperimentId::Fig2d => &[AveragedRamsey],
            ExperimentId::Fig2c => &[StaticRamsey, AveragedRamsey],
            _ => &[],
        }
    }
}

/// One fitted rate and its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimator: Estimator,
    pub truth: f64,
    /// `None` when the fit did not converge.
    pub estimate: Option<f64>,
    /// Leading-order prediction of estimate − truth, where one exists.
    pub predicted_error: Option<f64>,
    pub iterations: usize,
    pub rms_residual: f64,
}

impl Estimate {
    pub fn error(&self) -> Option<f64> {
        self.estimate.map(|e| e - self.truth)
    }
}

/// Channel-level results for the bound studies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelOutcome {
    pub gamma1_discrete: f64,
    pub gamma2_discrete: f64,
    /// Error rate of the unperturbed GD channel with the same (γ1, γ2).
    pub r_gd: f64,
    pub rb: RbReport,
    pub bounds: BoundReport,
    pub oracle_spread: f64,
    pub oracle_flagged: bool,
    pub completely_positive: bool,
    /// Σ Eᵢⱼ² of the sampled unital perturbation (fig4 only).
    pub esum_true: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    /// Global work-item index; also the RNG stream.
    pub index: usize,
    /// Γ2′ of the outer group (fig3b varies it; otherwise the configured Γ2′).
    pub group: f64,
    /// Perturbation strength s, or p for fig4.
    pub strength: f64,
    pub params: PerturbedGdParams,
    pub spam: SpamParams,
    pub estimates: Vec<Estimate>,
    pub channel: Option<ChannelOutcome>,
}

/// Per-trial generator: ChaCha8 keyed by the run seed, stream = trial index,
/// so results do not depend on scheduling.
pub fn trial_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn symmetric<R: Rng>(rng: &mut R, s: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        rng.gen_range(-s..=s)
    }
}

fn upto<R: Rng>(rng: &mut R, hi: f64) -> f64 {
    if hi == 0.0 {
        0.0
    } else {
        rng.gen_range(0.0..=hi)
    }
}

fn sample_lambda<R: Rng>(rng: &mut R, cfg: &ExperimentConfig) -> f64 {
    if cfg.lambda_min == cfg.lambda_max {
        cfg.lambda_min
    } else {
        rng.gen_range(cfg.lambda_min..=cfg.lambda_max)
    }
}

/// Damping parameters with every perturbation coefficient drawn from [−s, s].
fn sample_perturbed<R: Rng>(
    rng: &mut R,
    cfg: &ExperimentConfig,
    gamma2_prime: f64,
    gamma1: f64,
    s: f64,
) -> Result<PerturbedGdParams> {
    let lambda = sample_lambda(rng, cfg);
    let base = PerturbedGdParams::from_total_dephasing(gamma2_prime, gamma1, lambda)?;
    let (ar, ai, b, d) = (
        symmetric(rng, s),
        symmetric(rng, s),
        symmetric(rng, s),
        symmetric(rng, s),
    );
    base.with_perturbation(ar, ai, b, d)
}

fn sample_spam<R: Rng>(rng: &mut R, cfg: &ExperimentConfig) -> Result<SpamParams> {
    let k = upto(rng, cfg.spam_k_max);
    let n1 = upto(rng, cfg.spam_n1_max);
    let n2 = symmetric(rng, cfg.spam_n2_max);
    SpamParams::new(k, n1, n2)
}

pub(crate) fn run_trial(
    cfg: &ExperimentConfig,
    index: usize,
    group: f64,
    strength: f64,
    general: Option<&dyn GeneralBound>,
) -> Result<TrialRecord> {
    let mut rng = trial_rng(cfg.seed, index);
    match cfg.experiment {
        ExperimentId::Fig4 => fig4_trial(cfg, index, strength, &mut rng, general),
        ExperimentId::Fig3a | ExperimentId::Fig3b => {
            let gamma1 = if cfg.experiment == ExperimentId::Fig3b {
                group / 10.0
            } else {
                cfg.gamma1
            };
            let params = sample_perturbed(&mut rng, cfg, group, gamma1, strength)?;
            let channel = channel_outcome(cfg, &params, None, &mut rng, general)?;
            Ok(TrialRecord {
                index,
                group,
                strength,
                params,
                spam: SpamParams::none(),
                estimates: Vec::new(),
                channel: Some(channel),
            })
        }
        _ => estimation_trial(cfg, index, group, strength, &mut rng),
    }
}

fn estimation_trial(
    cfg: &ExperimentConfig,
    index: usize,
    group: f64,
    strength: f64,
    rng: &mut ChaCha8Rng,
) -> Result<TrialRecord> {
    let params = sample_perturbed(rng, cfg, group, cfg.gamma1, strength)?;
    let spam = sample_spam(rng, cfg)?;
    let predicted = predicted_estimator_bias(&params).ok();
    let mut estimates = Vec::new();
    for &est in Estimator::for_experiment(cfg.experiment) {
        let (series, truth, predicted_error) = match est {
            Estimator::PopulationInversion => {
                let times = uniform_times(1.0 / params.gamma1, cfg.points);
                (
                    simulate_population_inversion(&params, &spam, &times)?,
                    params.gamma1,
                    predicted.map(|p| p.gamma1 - params.gamma1),
                )
            }
            Estimator::StaticRamsey => {
                let g2p = params.total_dephasing();
                let times = uniform_times(1.0 / g2p, cfg.points);
                (simulate_static_ramsey(&params, &spam, &times)?, g2p, None)
            }
            Estimator::AveragedRamsey => {
                let g2p = params.total_dephasing();
                let times = uniform_times(1.0 / g2p, cfg.points);
                let mode = match cfg.n_angles {
                    0 => AngleAverage::Analytic,
                    n => AngleAverage::Discrete(n),
                };
                (
                    simulate_avg_ramsey(&params, &spam, &times, mode)?,
                    g2p,
                    predicted.map(|p| p.gamma2_prime - g2p),
                )
            }
        };
        let series = noisy(series, cfg.shots, rng)?;
        let fit = fit_exponential(&series)?;
        estimates.push(Estimate {
            estimator: est,
            truth,
            estimate: fit.rate(),
            predicted_error,
            iterations: fit.iterations,
            rms_residual: fit.rms_residual,
        });
    }
    Ok(TrialRecord {
        index,
        group,
        strength,
        params,
        spam,
        estimates,
        channel: None,
    })
}

fn noisy(series: DecaySeries, shots: u64, rng: &mut ChaCha8Rng) -> Result<DecaySeries> {
    if shots == 0 {
        Ok(series)
    } else {
        with_shot_noise(&series, shots, rng)
    }
}

fn oracle_for(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> DiamondOracle {
    DiamondOracle::new(OracleConfig {
        starts: cfg.oracle_starts,
        tolerance: cfg.oracle_tol,
        seed: rng.gen(),
        ..OracleConfig::default()
    })
}

/// Bounds, oracle and RB observables of the perturbed process over one gate
/// (or of `explicit` when given), using the true (γ1, γ2).
fn channel_outcome(
    cfg: &ExperimentConfig,
    params: &PerturbedGdParams,
    explicit: Option<(LiouvilleChannel, f64)>,
    rng: &mut ChaCha8Rng,
    general: Option<&dyn GeneralBound>,
) -> Result<ChannelOutcome> {
    let (g1, g2) = discrete_params(params.gamma1, params.gamma2, cfg.dt)?;
    let (channel, esum_true) = match explicit {
        Some((ch, esum)) => (ch, Some(esum)),
        None => (liouville_pgd(params, cfg.dt)?, None),
    };
    let rb = rb_observables(&channel);
    let corrections = if esum_true.is_none() {
        Some(user_corrections(params, cfg.dt, &rb)?)
    } else {
        None
    };
    let mut bounds = BoundReport::compute(g1, g2, params.lambda, &rb, corrections.as_ref())?;
    let oracle = oracle_for(cfg, rng).evaluate(&channel.identity_minus());
    bounds.oracle_diamond = Some(oracle.value);
    bounds.general_bound = general.map(|g| g.bound(&rb));
    Ok(ChannelOutcome {
        gamma1_discrete: g1,
        gamma2_discrete: g2,
        r_gd: ideal_predictions(g1, g2)?.r,
        rb,
        bounds,
        oracle_spread: oracle.spread,
        oracle_flagged: oracle.flagged,
        completely_positive: channel.is_completely_positive(1e-12),
        esum_true,
    })
}

/// Λ_GD plus a unital block with entries uniform in [−pΓ2′, pΓ2′], with Γ1
/// and Γ2 drawn uniformly from [0, rate_max].
fn fig4_trial(
    cfg: &ExperimentConfig,
    index: usize,
    p: f64,
    rng: &mut ChaCha8Rng,
    general: Option<&dyn GeneralBound>,
) -> Result<TrialRecord> {
    let gamma1 = upto(rng, cfg.rate_max);
    let gamma2 = upto(rng, cfg.rate_max);
    let lambda = sample_lambda(rng, cfg);
    let params = PerturbedGdParams::ideal(gamma1, gamma2, lambda)?;
    let width = p * params.total_dephasing();
    let e = nalgebra::Matrix3::from_fn(|_, _| symmetric(rng, width));
    let (g1, g2) = discrete_params(gamma1, gamma2, cfg.dt)?;
    let gd = liouville_gd(g1, g2, lambda)?;
    let channel = LiouvilleChannel::from_parts(&(gd.unital() + e), &gd.nonunital());
    let outcome = channel_outcome(cfg, &params, Some((channel, e.norm_squared())), rng, general)?;
    Ok(TrialRecord {
        index,
        group: params.total_dephasing(),
        strength: p,
        params,
        spam: SpamParams::none(),
        estimates: Vec::new(),
        channel: Some(outcome),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_independent_of_order() {
        let a: u64 = trial_rng(5, 3).gen();
        let _: u64 = trial_rng(5, 4).gen();
        let b: u64 = trial_rng(5, 3).gen();
        assert_eq!(a, b);
        assert_ne!(a, trial_rng(5, 4).gen::<u64>());
        assert_ne!(a, trial_rng(6, 3).gen::<u64>());
    }

    #[test]
    fn zero_strength_samples_unperturbed() {
        let cfg = ExperimentConfig::defaults(ExperimentId::Fig1a);
        let mut rng = trial_rng(1, 0);
        let p = sample_perturbed(&mut rng, &cfg, 0.1, 0.01, 0.0).unwrap();
        assert!(p.is_unperturbed());
        assert!((0.8..=1.0).contains(&p.lambda));
    }

    #[test]
    fn spam_ranges() {
        let cfg = ExperimentConfig::defaults(ExperimentId::Fig1a);
        let mut rng = trial_rng(2, 0);
        for _ in 0..200 {
            let s = sample_spam(&mut rng, &cfg).unwrap();
            assert!((0.0..=0.02).contains(&s.k) && (0.0..=0.02).contains(&s.n1));
            assert!((-0.02..=0.02).contains(&s.n2));
        }
    }

    #[test]
    fn fig4_trial_records_perturbation_size() {
        let mut cfg = ExperimentConfig::defaults(ExperimentId::Fig4);
        cfg.oracle_starts = 4;
        let rec = run_trial(&cfg, 0, 0.1, 0.05, None).unwrap();
        let ch = rec.channel.unwrap();
        let e = ch.esum_true.unwrap();
        assert!((ch.bounds.esum_used - e).abs() < 1e-12);
        assert!(e <= 9.0 * (0.05 * rec.params.total_dephasing()).powi(2));
        assert!(ch.bounds.bound_new_user.is_none());
    }
}
