use std::f64::consts::SQRT_2;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{hermitian_eigenvalues, Complex64};

/// Continuous-time noise parameters of a perturbed generalized damping process.
///
/// Rates are in inverse time units. The four perturbation coefficients are
/// real: any phase on β or δ can be absorbed into σ±.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbedGdParams {
    /// Amplitude damping rate Γ1.
    pub gamma1: f64,
    /// Pure dephasing rate Γ2.
    pub gamma2: f64,
    /// Ground-state equilibrium population λ ∈ [1/2, 1].
    pub lambda: f64,
    pub alpha_r: f64,
    pub alpha_i: f64,
    pub beta_raw: f64,
    pub delta_raw: f64,
}

impl PerturbedGdParams {
    pub fn new(
        gamma1: f64,
        gamma2: f64,
        lambda: f64,
        alpha_r: f64,
        alpha_i: f64,
        beta_raw: f64,
        delta_raw: f64,
    ) -> Result<Self> {
        let p = Self {
            gamma1,
            gamma2,
            lambda,
            alpha_r,
            alpha_i,
            beta_raw,
            delta_raw,
        };
        p.validate()?;
        Ok(p)
    }

    /// Unperturbed generalized damping.
    pub fn ideal(gamma1: f64, gamma2: f64, lambda: f64) -> Result<Self> {
        Self::new(gamma1, gamma2, lambda, 0.0, 0.0, 0.0, 0.0)
    }

    /// Unperturbed process specified by its total dephasing rate Γ2′ = Γ1/2 + Γ2.
    pub fn from_total_dephasing(gamma2_prime: f64, gamma1: f64, lambda: f64) -> Result<Self> {
        let gamma2 = gamma2_prime - 0.5 * gamma1;
        if gamma2 < 0.0 {
            return Err(invalid(
                "gamma2_prime",
                format!("Γ2′ = {gamma2_prime} is below Γ1/2 = {}", 0.5 * gamma1),
            ));
        }
        Self::ideal(gamma1, gamma2, lambda)
    }

    pub fn with_perturbation(
        mut self,
        alpha_r: f64,
        alpha_i: f64,
        beta_raw: f64,
        delta_raw: f64,
    ) -> Result<Self> {
        self.alpha_r = alpha_r;
        self.alpha_i = alpha_i;
        self.beta_raw = beta_raw;
        self.delta_raw = delta_raw;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.gamma1,
            self.gamma2,
            self.lambda,
            self.alpha_r,
            self.alpha_i,
            self.beta_raw,
            self.delta_raw,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(invalid("params", "all parameters must be finite"));
        }
        if self.gamma1 < 0.0 {
            return Err(invalid("gamma1", format!("{} < 0", self.gamma1)));
        }
        if self.gamma2 < 0.0 {
            return Err(invalid("gamma2", format!("{} < 0", self.gamma2)));
        }
        if !(0.5..=1.0).contains(&self.lambda) {
            return Err(invalid(
                "lambda",
                format!("{} outside [1/2, 1]", self.lambda),
            ));
        }
        Ok(())
    }

    /// Total dephasing rate Γ2′ = Γ1/2 + Γ2.
    pub fn total_dephasing(&self) -> f64 {
        0.5 * self.gamma1 + self.gamma2
    }

    /// The combination (β + δ)/√2 that couples the x and z Bloch components.
    pub fn beta_eff(&self) -> f64 {
        (self.beta_raw + self.delta_raw) / SQRT_2
    }

    /// |α| = √(α_r² + α_i²).
    pub fn alpha_abs(&self) -> f64 {
        self.alpha_r.hypot(self.alpha_i)
    }

    pub fn is_unperturbed(&self) -> bool {
        self.alpha_r == 0.0 && self.alpha_i == 0.0 && self.beta_raw == 0.0 && self.delta_raw == 0.0
    }

    /// Dissipator coefficient matrix in the basis (σ₊, σ₋, Z/√2).
    pub fn coefficient_matrix(&self) -> CoefficientMatrix {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let matrix = Matrix3::new(
            c(self.lambda * self.gamma1, 0.0),
            c(self.alpha_r, -self.alpha_i),
            c(self.beta_raw, 0.0),
            c(self.alpha_r, self.alpha_i),
            c((1.0 - self.lambda) * self.gamma1, 0.0),
            c(self.delta_raw, 0.0),
            c(self.beta_raw, 0.0),
            c(self.delta_raw, 0.0),
            c(self.gamma2, 0.0),
        );
        let min_eigenvalue = hermitian_eigenvalues(&matrix)[0];
        CoefficientMatrix {
            matrix,
            min_eigenvalue,
        }
    }
}

/// Hermitian dissipator coefficient matrix with its positivity diagnostic.
///
/// An indefinite matrix is reported, not rejected: symmetric perturbation
/// sampling routinely produces one while the Bloch dynamics stay well defined.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    pub matrix: Matrix3<Complex64>,
    pub min_eigenvalue: f64,
}

impl CoefficientMatrix {
    pub fn is_positive_semidefinite(&self) -> bool {
        let scale = self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max);
        self.min_eigenvalue >= -1e-14 * scale.max(f64::MIN_POSITIVE)
    }

    pub fn is_hermitian(&self) -> bool {
        (self.matrix - self.matrix.adjoint())
            .iter()
            .all(|z| z.norm() == 0.0)
    }
}
