use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentId {
    Fig1a,
    Fig1b,
    Fig2a,
    Fig2b,
    Fig2c,
    Fig2d,
    Fig3a,
    Fig3b,
    Fig4,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 9] = [
        Self::Fig1a,
        Self::Fig1b,
        Self::Fig2a,
        Self::Fig2b,
        Self::Fig2c,
        Self::Fig2d,
        Self::Fig3a,
        Self::Fig3b,
        Self::Fig4,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Fig1a => "fig1a",
            Self::Fig1b => "fig1b",
            Self::Fig2a => "fig2a",
            Self::Fig2b => "fig2b",
            Self::Fig2c => "fig2c",
            Self::Fig2d => "fig2d",
            Self::Fig3a => "fig3a",
            Self::Fig3b => "fig3b",
            Self::Fig4 => "fig4",
        }
    }

    /// Experiments that loop over the `sweep` list rather than one strength.
    pub fn is_sweep(&self) -> bool {
        matches!(
            self,
            Self::Fig1b | Self::Fig2c | Self::Fig2d | Self::Fig3a | Self::Fig3b
        )
    }

    /// Experiments that build channels and evaluate bounds instead of fitting
    /// decay curves.
    pub fn is_channel_study(&self) -> bool {
        matches!(self, Self::Fig3a | Self::Fig3b | Self::Fig4)
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s.trim())
            .ok_or_else(|| Error::UnknownExperiment(s.to_string()))
    }
}

/// Trial-count preset when `trials` is not given explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// Reduced counts for the oracle-heavy channel studies.
    Desk,
    /// Counts quoted in the figure captions.
    Caption,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    /// Trials per sweep point (or per p value for fig4).
    pub trials: usize,
    pub seed: u64,
    pub scale: Scale,
    pub gamma2_prime: f64,
    pub gamma1: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Perturbation half-width s for single-strength experiments.
    pub strength: f64,
    pub sweep: Vec<f64>,
    pub spam_k_max: f64,
    pub spam_n1_max: f64,
    pub spam_n2_max: f64,
    /// Gate duration for the channel studies.
    pub dt: f64,
    /// Samples per decay curve.
    pub points: usize,
    /// Angles for the averaged Ramsey experiment; 0 selects the exact
    /// continuum average.
    pub n_angles: usize,
    /// Shots per expectation value; 0 means noiseless.
    pub shots: u64,
    pub oracle_starts: usize,
    pub oracle_tol: f64,
    /// Upper end of the uniform ranges for Γ1 and Γ2 in fig4.
    pub rate_max: f64,
    pub r_bin_width: f64,
    pub r_max: f64,
    pub p_values: Vec<f64>,
    pub gamma2_prime_values: Vec<f64>,
}

const DEFAULT_SWEEP: [f64; 5] = [1e-4, 3e-4, 1e-3, 3e-3, 1e-2];

impl ExperimentConfig {
    pub fn defaults(experiment: ExperimentId) -> Self {
        let mut cfg = Self {
            experiment,
            trials: 0,
            seed: 0,
            scale: Scale::Desk,
            gamma2_prime: 0.1,
            gamma1: 0.01,
            lambda_min: 0.8,
            lambda_max: 1.0,
            strength: 1e-3,
            sweep: DEFAULT_SWEEP.to_vec(),
            spam_k_max: 0.02,
            spam_n1_max: 0.02,
            spam_n2_max: 0.02,
            dt: 1.0,
            points: 100,
            n_angles: 0,
            shots: 0,
            oracle_starts: 50,
            oracle_tol: 1e-7,
            rate_max: 0.15,
            r_bin_width: 0.005,
            r_max: 0.05,
            p_values: vec![0.0, 0.025, 0.05, 0.075, 0.1],
            gamma2_prime_values: vec![0.025, 0.05, 0.1, 0.2, 0.4],
        };
        cfg.trials = cfg.default_trials();
        cfg
    }

    /// Per-point trial count when the config does not set one.
    pub fn default_trials(&self) -> usize {
        use ExperimentId::*;
        match (self.experiment, self.scale) {
            (Fig1a, _) | (Fig2b, _) => 2000,
            (Fig2a, _) => 20_000,
            (Fig1b | Fig2c | Fig2d, _) => 1000,
            (Fig3a, Scale::Desk) | (Fig3b, Scale::Desk) => 200,
            (Fig3a, Scale::Caption) => 5000,
            (Fig3b, Scale::Caption) => 10_000,
            (Fig4, Scale::Desk) => 500,
            (Fig4, Scale::Caption) => 12_000,
        }
    }

    /// Reads `key = value` lines over the defaults for `experiment`.
    ///
    /// Blank lines and `#` comments are ignored. Unknown keys, malformed
    /// values and an `experiment` line that disagrees with `experiment` are
    /// errors. Lists are comma separated.
    pub fn parse(experiment: ExperimentId, text: &str) -> Result<Self> {
        let mut cfg = Self::defaults(experiment);
        let mut explicit_trials = false;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: line_no,
                reason: format!("expected key=value, got {line:?}"),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |reason: String| Error::Config {
                line: line_no,
                reason,
            };
            let num = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| bad(format!("{key}: {v:?} is not a number")))
            };
            let int = |v: &str| {
                v.parse::<u64>()
                    .map_err(|_| bad(format!("{key}: {v:?} is not a nonnegative integer")))
            };
            let list = |v: &str| v.split(',').map(|x| num(x.trim())).collect::<Result<Vec<_>>>();
            match key {
                "experiment" => {
                    let id: ExperimentId = value.parse()?;
                    if id != experiment {
                        return Err(bad(format!(
                            "file is for {id} but {experiment} was requested"
                        )));
                    }
                }
                "trials" => {
                    cfg.trials = int(value)? as usize;
                    explicit_trials = true;
                }
                "seed" => cfg.seed = int(value)?,
                "scale" => {
                    cfg.scale = match value {
                        "desk" => Scale::Desk,
                        "caption" => Scale::Caption,
                        _ => return Err(bad(format!("scale must be desk or caption, got {value:?}"))),
                    }
                }
                "gamma2_prime" => cfg.gamma2_prime = num(value)?,
                "gamma1" => cfg.gamma1 = num(value)?,
                "lambda_min" => cfg.lambda_min = num(value)?,
                "lambda_max" => cfg.lambda_max = num(value)?,
                "strength" => cfg.strength = num(value)?,
                "sweep" => cfg.sweep = list(value)?,
                "spam_k_max" => cfg.spam_k_max = num(value)?,
                "spam_n1_max" => cfg.spam_n1_max = num(value)?,
                "spam_n2_max" => cfg.spam_n2_max = num(value)?,
                "dt" => cfg.dt = num(value)?,
                "points" => cfg.points = int(value)? as usize,
                "n_angles" => cfg.n_angles = int(value)? as usize,
                "shots" => cfg.shots = int(value)?,
                "oracle_starts" => cfg.oracle_starts = int(value)? as usize,
                "oracle_tol" => cfg.oracle_tol = num(value)?,
                "rate_max" => cfg.rate_max = num(value)?,
                "r_bin_width" => cfg.r_bin_width = num(value)?,
                "r_max" => cfg.r_max = num(value)?,
                "p_values" => cfg.p_values = list(value)?,
                "gamma2_prime_values" => cfg.gamma2_prime_values = list(value)?,
                _ => return Err(bad(format!("unknown key {key:?}"))),
            }
        }
        if !explicit_trials {
            cfg.trials = cfg.default_trials();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| Error::Config {
            line: 0,
            reason: reason.to_string(),
        };
        if self.trials == 0 {
            return Err(bad("trials must be at least 1"));
        }
        if !(0.5 <= self.lambda_min && self.lambda_min <= self.lambda_max && self.lambda_max <= 1.0)
        {
            return Err(bad("need 1/2 <= lambda_min <= lambda_max <= 1"));
        }
        if !(self.gamma1 >= 0.0 && self.gamma2_prime >= 0.5 * self.gamma1) {
            return Err(bad("need gamma1 >= 0 and gamma2_prime >= gamma1/2"));
        }
        if self.experiment.is_sweep() && self.sweep.is_empty() {
            return Err(bad("sweep must not be empty"));
        }
        let nonneg = |v: &[f64]| v.iter().all(|x| x.is_finite() && *x >= 0.0);
        if !nonneg(&self.sweep) || !nonneg(&self.p_values) || !(self.strength >= 0.0) {
            return Err(bad("perturbation strengths must be finite and nonnegative"));
        }
        if self.experiment == ExperimentId::Fig4 && self.p_values.is_empty() {
            return Err(bad("p_values must not be empty"));
        }
        if self.experiment == ExperimentId::Fig3b
            && (self.gamma2_prime_values.is_empty()
                || !self.gamma2_prime_values.iter().all(|g| *g > 0.0))
        {
            return Err(bad("gamma2_prime_values must be a nonempty list of positive rates"));
        }
        if !(0.0..1.0).contains(&self.spam_k_max)
            || !(0.0..1.0).contains(&self.spam_n1_max)
            || !(self.spam_n2_max >= 0.0)
        {
            return Err(bad("SPAM maxima must satisfy 0 <= k, n1 < 1 and n2 >= 0"));
        }
        if !(self.dt > 0.0) {
            return Err(bad("dt must be positive"));
        }
        if self.points < 4 {
            return Err(bad("points must be at least 4"));
        }
        if self.oracle_starts == 0 || !(self.oracle_tol > 0.0) {
            return Err(bad("oracle_starts must be >= 1 and oracle_tol > 0"));
        }
        if !(self.rate_max > 0.0 && self.r_bin_width > 0.0 && self.r_max > 0.0) {
            return Err(bad("rate_max, r_bin_width and r_max must be positive"));
        }
        Ok(())
    }

    /// The strengths this experiment iterates over.
    pub fn strengths(&self) -> Vec<f64> {
        match self.experiment {
            ExperimentId::Fig4 => self.p_values.clone(),
            id if id.is_sweep() => self.sweep.clone(),
            _ => vec![self.strength],
        }
    }

    /// Outer groups: one per Γ2′ for fig3b, otherwise just the configured Γ2′.
    pub fn groups(&self) -> Vec<f64> {
        if self.experiment == ExperimentId::Fig3b {
            self.gamma2_prime_values.clone()
        } else {
            vec![self.gamma2_prime]
        }
    }

    /// Renders the configuration in the same key=value format `parse` reads.
    pub fn to_key_values(&self) -> String {
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:e}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let scale = match self.scale {
            Scale::Desk => "desk",
            Scale::Caption => "caption",
        };
        [
            format!("experiment = {}", self.experiment),
            format!("trials = {}", self.trials),
            format!("seed = {}", self.seed),
            format!("scale = {scale}"),
            format!("gamma2_prime = {:e}", self.gamma2_prime),
            format!("gamma1 = {:e}", self.gamma1),
            format!("lambda_min = {:e}", self.lambda_min),
            format!("lambda_max = {:e}", self.lambda_max),
            format!("strength = {:e}", self.strength),
            format!("sweep = {}", list(&self.sweep)),
            format!("spam_k_max = {:e}", self.spam_k_max),
            format!("spam_n1_max = {:e}", self.spam_n1_max),
            format!("spam_n2_max = {:e}", self.spam_n2_max),
            format!("dt = {:e}", self.dt),
            format!("points = {}", self.points),
            format!("n_angles = {}", self.n_angles),
            format!("shots = {}", self.shots),
            format!("oracle_starts = {}", self.oracle_starts),
            format!("oracle_tol = {:e}", self.oracle_tol),
            format!("rate_max = {:e}", self.rate_max),
            format!("r_bin_width = {:e}", self.r_bin_width),
            format!("r_max = {:e}", self.r_max),
            format!("p_values = {}", list(&self.p_values)),
            format!("gamma2_prime_values = {}", list(&self.gamma2_prime_values)),
        ]
        .join("\n")
            + "\n"
    }
}
