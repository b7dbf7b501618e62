use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gd::{check_discrete, PauliMap, PerturbedGdParams};
use crate::rb::RbReport;

/// Below this the robust-bound increment rX_ideal + rY_ideal − rX − rY is
/// treated as roundoff rather than a violated assumption.
const ROBUST_TERM_TOLERANCE: f64 = 1e-12;

/// Diamond norm Σ|vᵢ| of the Pauli map ρ ↦ Σ vᵢ PᵢρPᵢ.
pub fn pauli_diamond(v: &Vector4<f64>) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// Pauli-Liouville matrix of ρ ↦ Σ vᵢ PᵢρPᵢ. It is diagonal, with entry j
/// equal to Σᵢ ±vᵢ, the sign recording whether Pᵢ and Pⱼ commute.
pub fn pauli_channel_map(v: &Vector4<f64>) -> PauliMap {
    let sign = |i: usize, j: usize| {
        if i == 0 || j == 0 || i == j {
            1.0
        } else {
            -1.0
        }
    };
    let diag = Vector4::from_fn(|j, _| (0..4).map(|i| sign(i, j) * v[i]).sum());
    PauliMap::new(Matrix4::from_diagonal(&diag))
}

/// A difference map whose only nonzero Pauli-Liouville entry is `x` at
/// (`row`, `col`). Row 0 is excluded because such maps are trace-annihilating.
pub fn single_element_map(row: usize, col: usize, x: f64) -> Result<PauliMap> {
    if !(1..4).contains(&row) || col > 3 {
        return Err(invalid(
            "position",
            format!("({row}, {col}) is not in the lower 3×4 block"),
        ));
    }
    let mut m = Matrix4::zeros();
    m[(row, col)] = x;
    Ok(PauliMap::new(m))
}

/// ‖·‖⋄ of [`single_element_map`]; always |x|.
pub fn single_element_diamond(row: usize, col: usize, x: f64) -> Result<f64> {
    single_element_map(row, col, x)?;
    Ok(x.abs())
}

/// Upper bound on the diamond distance ½‖I − Λ_GD‖⋄.
pub fn eps_gd_ub(gamma1: f64, gamma2: f64, lambda: f64) -> Result<f64> {
    check_discrete(gamma1, gamma2, lambda)?;
    let b = ((1.0 - gamma1) * (1.0 - gamma2)).sqrt();
    Ok(0.5 * (1.0 - b - 0.5 * gamma1 + 2.0 * lambda * gamma1))
}

/// ‖E1‖⋄ for the unital, Pauli-diagonal piece diag(0, 1−b, 1−b, γ1) of I − Λ_GD.
pub fn gd_unital_part_diamond(gamma1: f64, gamma2: f64) -> Result<f64> {
    check_discrete(gamma1, gamma2, 1.0)?;
    let b = ((1.0 - gamma1) * (1.0 - gamma2)).sqrt();
    Ok(1.0 - b + 0.5 * gamma1)
}

/// ‖E2‖⋄ for the nonunital piece of I − Λ_GD, a single entry −γ1(2λ−1).
pub fn gd_nonunital_part_diamond(gamma1: f64, lambda: f64) -> Result<f64> {
    check_discrete(gamma1, 0.0, lambda)?;
    Ok(gamma1 * (2.0 * lambda - 1.0))
}

fn sqrt_nine(esum: f64, what: &str) -> (f64, bool) {
    if esum < 0.0 {
        log::warn!("{what} = {esum:e} is negative; clamping to 0");
        (0.0, true)
    } else {
        ((9.0 * esum).sqrt(), false)
    }
}

/// Increment rX_ideal + rY_ideal − rX − rY, clamped at zero.
fn robust_term(measured: &RbReport, ideal: &RbReport) -> (f64, bool) {
    let delta = ideal.rxy() - measured.rxy();
    if delta < 0.0 {
        let significant = delta < -ROBUST_TERM_TOLERANCE;
        if significant {
            log::warn!("rX + rY exceeds its ideal value by {:e}; clamping", -delta);
        }
        (0.0, significant)
    } else {
        (delta, false)
    }
}

/// Bound on ‖I − Λ‖⋄ from the perturbation sum of squares, with λ set to 1.
pub fn bound_new(gamma1: f64, gamma2: f64, esum: f64) -> Result<f64> {
    let (root, _) = sqrt_nine(esum, "esum");
    Ok(2.0 * eps_gd_ub(gamma1, gamma2, 1.0)? + root)
}

/// Variant of [`bound_new`] that stays above it when γ1, γ2 are estimates.
pub fn bound_robust(
    gamma1: f64,
    gamma2: f64,
    esum: f64,
    measured: &RbReport,
    ideal: &RbReport,
) -> Result<f64> {
    let (delta, _) = robust_term(measured, ideal);
    let (root, _) = sqrt_nine(esum + 6.0 * delta, "robust esum");
    Ok(2.0 * eps_gd_ub(gamma1, gamma2, 1.0)? + 12.0 * delta + root)
}

/// Leading β² shifts of the bounds and sums of squares when they are
/// evaluated with the biased (γ1, γ2) a user would estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserCorrections {
    pub bound_new: f64,
    pub esum: f64,
    pub bound_robust: f64,
    pub esum_robust: f64,
}

impl UserCorrections {
    pub fn zero() -> Self {
        Self {
            bound_new: 0.0,
            esum: 0.0,
            bound_robust: 0.0,
            esum_robust: 0.0,
        }
    }
}

pub fn user_corrections(
    params: &PerturbedGdParams,
    dt: f64,
    measured: &RbReport,
) -> Result<UserCorrections> {
    if !(dt > 0.0) {
        return Err(invalid("dt", format!("{dt} must be positive")));
    }
    let g1 = params.gamma1;
    let g2p = params.total_dephasing();
    if g2p <= g1 {
        return Err(Error::DephasingBelowDamping {
            gamma2_prime: g2p,
            gamma1: g1,
        });
    }
    let k = dt * params.beta_eff().powi(2) / (g2p - g1);
    let e1 = (-g1 * dt).exp();
    let e2 = (-g2p * dt).exp();
    let common = -6.0 * measured.rxy() * e2 + 12.0 * measured.rz * e1 + 2.0 * e1 * e1
        - 6.0 * e1
        - 2.0 * e2 * e2;
    Ok(UserCorrections {
        bound_new: k * (0.5 * e2 - 1.5 * e1),
        esum: k * (common + 6.0 * e2),
        bound_robust: k * (2.5 * e2 - 1.5 * e1),
        esum_robust: k * (common + 7.0 * e2),
    })
}

/// Every bound for one channel, plus the oracle value when it was computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// ε_GD^UB at the λ passed in (a bound on the diamond distance, i.e.
    /// half the norm).
    pub eps_gd_ub: f64,
    pub bound_new: f64,
    pub bound_robust: f64,
    pub bound_new_user: Option<f64>,
    pub bound_robust_user: Option<f64>,
    pub oracle_diamond: Option<f64>,
    pub esum_used: f64,
    pub general_bound: Option<f64>,
    pub esum_clamped: bool,
    pub robust_term_clamped: bool,
}

impl BoundReport {
    pub const CSV_HEADER: [&'static str; 10] = [
        "eps_gd_ub",
        "bound_new",
        "bound_robust",
        "bound_new_user",
        "bound_robust_user",
        "oracle_diamond",
        "esum_used",
        "general_bound",
        "esum_clamped",
        "robust_term_clamped",
    ];

    /// Evaluates the bounds for a channel whose measured observables are
    /// `measured`, given the damping parameters (γ1, γ2, λ) the bounds should
    /// use. `corrections` adds the user-calculated variants.
    pub fn compute(
        gamma1: f64,
        gamma2: f64,
        lambda: f64,
        measured: &RbReport,
        corrections: Option<&UserCorrections>,
    ) -> Result<Self> {
        let ideal = crate::rb::ideal_predictions(gamma1, gamma2)?;
        let esum = crate::rb::esum_from_observables(measured, &ideal, gamma1, gamma2);
        let two_eps = 2.0 * eps_gd_ub(gamma1, gamma2, 1.0)?;
        let (delta, robust_term_clamped) = robust_term(measured, &ideal);
        let user = corrections.map(|c| {
            let (bn, _) = sqrt_nine(esum + c.esum, "user esum");
            let (br, _) = sqrt_nine(esum + 6.0 * delta + c.esum_robust, "user robust esum");
            (
                two_eps + c.bound_new + bn,
                two_eps + 12.0 * delta + c.bound_robust + br,
            )
        });
        Ok(Self {
            eps_gd_ub: eps_gd_ub(gamma1, gamma2, lambda)?,
            bound_new: bound_new(gamma1, gamma2, esum)?,
            bound_robust: bound_robust(gamma1, gamma2, esum, measured, &ideal)?,
            bound_new_user: user.map(|u| u.0),
            bound_robust_user: user.map(|u| u.1),
            oracle_diamond: None,
            esum_used: esum,
            general_bound: None,
            esum_clamped: esum < 0.0,
            robust_term_clamped,
        })
    }

    pub fn csv_row(&self) -> Vec<String> {
        let opt = |x: Option<f64>| x.map(crate::estimation::fmt_f64).unwrap_or_default();
        vec![
            crate::estimation::fmt_f64(self.eps_gd_ub),
            crate::estimation::fmt_f64(self.bound_new),
            crate::estimation::fmt_f64(self.bound_robust),
            opt(self.bound_new_user),
            opt(self.bound_robust_user),
            opt(self.oracle_diamond),
            crate::estimation::fmt_f64(self.esum_used),
            opt(self.general_bound),
            self.esum_clamped.to_string(),
            self.robust_term_clamped.to_string(),
        ]
    }
}

/// A bound on ‖I − Λ‖⋄ in terms of RB observables alone, supplied by the
/// caller (for instance one transcribed from the literature) and reported
/// next to the built-in bounds.
pub trait GeneralBound: Sync {
    fn bound(&self, rb: &RbReport) -> f64;
    fn name(&self) -> &str;
}
