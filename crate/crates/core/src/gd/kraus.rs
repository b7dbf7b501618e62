use nalgebra::{Matrix2, Matrix4};

use super::channel::{check_discrete, paulis, LiouvilleChannel};
use crate::error::{Error, Result};
use crate::linalg::Complex64;

/// Four-operator Kraus decomposition of the generalized damping channel.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    pub ops: [Matrix2<Complex64>; 4],
    /// Derivation scalars (x, a, b).
    pub x: f64,
    pub a: f64,
    pub b: f64,
}

impl KrausSet {
    /// Σ K†K, which equals the identity for a trace-preserving set.
    pub fn completeness(&self) -> Matrix2<Complex64> {
        self.ops.iter().map(|k| k.adjoint() * k).sum()
    }

    pub fn apply(&self, rho: &Matrix2<Complex64>) -> Matrix2<Complex64> {
        self.ops.iter().map(|k| k * rho * k.adjoint()).sum()
    }

    /// Pauli-Liouville matrix of ρ ↦ Σ K ρ K†.
    pub fn liouville(&self) -> Result<LiouvilleChannel> {
        let p = paulis();
        let mut m = Matrix4::zeros();
        for j in 0..4 {
            let out = self.apply(&p[j]);
            for i in 0..4 {
                m[(i, j)] = 0.5 * (p[i] * out).trace().re;
            }
        }
        // Snap roundoff in the trace-preserving row so the wrapper accepts it.
        let row_err = (m[(0, 0)] - 1.0)
            .abs()
            .max(m[(0, 1)].abs())
            .max(m[(0, 2)].abs())
            .max(m[(0, 3)].abs());
        if row_err > 1e-12 {
            return Err(Error::NotCompletelyPositive(format!(
                "Kraus set is not trace preserving (row error {row_err:e})"
            )));
        }
        m[(0, 0)] = 1.0;
        m[(0, 1)] = 0.0;
        m[(0, 2)] = 0.0;
        m[(0, 3)] = 0.0;
        LiouvilleChannel::from_matrix(m)
    }
}

/// Kraus operators of the generalized damping channel.
///
/// Fails when the parameters make x imaginary or a weight negative, which
/// means no such channel is completely positive.
pub fn kraus_gd(gamma1: f64, gamma2: f64, lambda: f64) -> Result<KrausSet> {
    check_discrete(gamma1, gamma2, lambda)?;
    let x_sq = (1.0 - gamma1) * (1.0 - gamma2) - gamma1 * gamma1 * lambda * (1.0 - lambda)
        + 0.25 * gamma1 * gamma1;
    if x_sq < 0.0 {
        return Err(Error::NotCompletelyPositive(format!(
            "x² = {x_sq:e} < 0 for γ1 = {gamma1}, γ2 = {gamma2}, λ = {lambda}"
        )));
    }
    let x = x_sq.sqrt();
    let lower = 1.0 - 0.5 * gamma1 - x;
    if lower < -1e-15 {
        return Err(Error::NotCompletelyPositive(format!(
            "negative Kraus weight 1 − γ1/2 − x = {lower:e}"
        )));
    }
    let lower = lower.max(0.0);
    let upper = 1.0 - 0.5 * gamma1 + x;
    let a = x + 0.5 * gamma1 - gamma1 * lambda;
    let b = ((1.0 - gamma1) * (1.0 - gamma2)).sqrt();

    // At γ1 = 1 both a and b vanish; the limiting direction is (a, b) ∝ (0, 1).
    let norm = a.hypot(b);
    let (ua, ub) = if norm > 1e-300 {
        (a / norm, b / norm)
    } else {
        (0.0, 1.0)
    };

    let c = |v: f64| Complex64::new(v, 0.0);
    let z = c(0.0);
    let k0 = Matrix2::new(c(ua), z, z, c(-ub)) * c(lower.sqrt());
    let k1 = Matrix2::new(z, c((lambda * gamma1).sqrt()), z, z);
    let k2 = Matrix2::new(c(ub), z, z, c(ua)) * c(upper.sqrt());
    let k3 = Matrix2::new(z, z, c(((1.0 - lambda) * gamma1).sqrt()), z);
    Ok(KrausSet {
        ops: [k0, k1, k2, k3],
        x,
        a,
        b,
    })
}
