//! Parameter files for `gdbench bounds`.

use anyhow::{bail, Context, Result};
use gdbench_core::PerturbedGdParams;

/// One channel to evaluate: rates, perturbation, gate time and oracle
/// settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    pub params: PerturbedGdParams,
    pub dt: f64,
    pub oracle_starts: usize,
    pub oracle_seed: u64,
}

/// Parses `key = value` lines. Γ2 may be given directly (`gamma2`) or as the
/// total dephasing rate (`gamma2_prime`), not both.
pub fn parse(text: &str) -> Result<ChannelSpec> {
    let mut gamma1 = None;
    let mut gamma2 = None;
    let mut gamma2_prime = None;
    let mut lambda = 1.0;
    let mut pert = [0.0; 4];
    let mut dt = 1.0;
    let mut oracle_starts = 50;
    let mut oracle_seed = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let ctx = || format!("line {}: {line:?}", i + 1);
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("{}: expected key=value", ctx()))?;
        let value = value.trim();
        let num = || value.parse::<f64>().with_context(ctx);
        match key.trim() {
            "gamma1" => gamma1 = Some(num()?),
            "gamma2" => gamma2 = Some(num()?),
            "gamma2_prime" => gamma2_prime = Some(num()?),
            "lambda" => lambda = num()?,
            "alpha_r" => pert[0] = num()?,
            "alpha_i" => pert[1] = num()?,
            "beta_raw" => pert[2] = num()?,
            "delta_raw" => pert[3] = num()?,
            "dt" => dt = num()?,
            "oracle_starts" => oracle_starts = value.parse().with_context(ctx)?,
            "oracle_seed" => oracle_seed = value.parse().with_context(ctx)?,
            other => bail!("line {}: unknown key {other:?}", i + 1),
        }
    }

    let gamma1 = gamma1.context("gamma1 is required")?;
    let base = match (gamma2, gamma2_prime) {
        (Some(g2), None) => PerturbedGdParams::ideal(gamma1, g2, lambda)?,
        (None, Some(g2p)) => PerturbedGdParams::from_total_dephasing(g2p, gamma1, lambda)?,
        (None, None) => bail!("one of gamma2 or gamma2_prime is required"),
        (Some(_), Some(_)) => bail!("give gamma2 or gamma2_prime, not both"),
    };
    let params = base.with_perturbation(pert[0], pert[1], pert[2], pert[3])?;
    if !(dt > 0.0) {
        bail!("dt must be positive, got {dt}");
    }
    if oracle_starts == 0 {
        bail!("oracle_starts must be at least 1");
    }
    Ok(ChannelSpec {
        params,
        dt,
        oracle_starts,
        oracle_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_dephasing_form() {
        let spec = parse("gamma1 = 0.01\ngamma2_prime = 0.1 # comment\nbeta_raw = 1e-3\n").unwrap();
        assert!((spec.params.gamma2 - 0.095).abs() < 1e-15);
        assert_eq!(spec.params.beta_raw, 1e-3);
        assert_eq!(spec.dt, 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse("gamma1 = 0.01\ngamma2 = 0.1\nfoo = 1").is_err());
        assert!(parse("gamma1 = 0.01").is_err());
        assert!(parse("gamma1 = 0.01\ngamma2 = 0.1\ngamma2_prime = 0.1").is_err());
        assert!(parse("gamma1 = 0.01\ngamma2 = 0.1\ndt = 0").is_err());
        assert!(parse("gamma1 0.01").is_err());
    }
}
