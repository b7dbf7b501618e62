use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gd::PerturbedGdParams;

/// Expected fitted rates, to leading order in the perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictedEstimates {
    /// Γ1 − β²/(Γ2′ − Γ1): population inversion underestimates Γ1.
    pub gamma1: f64,
    /// Γ2′ + ½β²/(Γ2′ − Γ1): averaged Ramsey overestimates Γ2′.
    pub gamma2_prime: f64,
}

pub fn predicted_estimator_bias(params: &PerturbedGdParams) -> Result<PredictedEstimates> {
    let g2p = params.total_dephasing();
    let gap = g2p - params.gamma1;
    if gap <= 0.0 {
        return Err(Error::DephasingBelowDamping {
            gamma2_prime: g2p,
            gamma1: params.gamma1,
        });
    }
    let shift = params.beta_eff().powi(2) / gap;
    Ok(PredictedEstimates {
        gamma1: params.gamma1 - shift,
        gamma2_prime: g2p + 0.5 * shift,
    })
}
