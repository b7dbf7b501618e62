use std::f64::consts::SQRT_2;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::params::PerturbedGdParams;
use crate::error::{Error, Result};
use crate::linalg::{jacobi_symmetric, symmetric3_closed_form};

/// Below this |η·t| the factor (e^{ηt} − 1)/η switches to its Taylor series.
const SERIES_SWITCH: f64 = 1e-8;

/// Affine Bloch-vector dynamics ∂r/∂t = C·r + drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochGenerator {
    pub c: Matrix3<f64>,
    pub drive: Vector3<f64>,
}

impl BlochGenerator {
    pub fn from_params(p: &PerturbedGdParams) -> Self {
        let g2p = p.total_dephasing();
        let beta = p.beta_eff();
        let c = Matrix3::new(
            p.alpha_r - g2p,
            p.alpha_i,
            beta,
            p.alpha_i,
            -p.alpha_r - g2p,
            0.0,
            beta,
            0.0,
            -p.gamma1,
        );
        let drive = Vector3::new(
            2.0 * SQRT_2 * p.delta_raw - 2.0 * beta,
            0.0,
            p.gamma1 * (2.0 * p.lambda - 1.0),
        );
        Self { c, drive }
    }

    pub fn eigensystem(&self) -> EigenSystem {
        EigenSystem::of(&self.c)
    }

    pub fn propagator(&self) -> Propagator {
        let eig = self.eigensystem();
        let drive_modes = eig.vectors.transpose() * self.drive;
        Propagator { eig, drive_modes }
    }

    /// Bloch vector at time `t` starting from `r0`.
    pub fn evolve(&self, r0: &Vector3<f64>, t: f64) -> Vector3<f64> {
        self.propagator().evolve(r0, t)
    }
}

/// Orthonormal eigenvectors and eigenvalues of the symmetric generator C.
///
/// Eigenvalues are ascending. They are taken from the Jacobi diagonalisation
/// (accurate to roundoff even at near-degeneracy); the trigonometric closed
/// form is kept alongside for cross-checking.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenSystem {
    pub values: Vector3<f64>,
    /// Columns are eigenvectors.
    pub vectors: Matrix3<f64>,
    pub closed_form: [f64; 3],
}

impl EigenSystem {
    pub fn of(c: &Matrix3<f64>) -> Self {
        let closed_form = symmetric3_closed_form(c);
        if closed_form[0] == closed_form[2] {
            // C ∝ I: every direction is an eigenvector.
            return Self {
                values: Vector3::from(closed_form),
                vectors: Matrix3::identity(),
                closed_form,
            };
        }
        let (values, vectors) = jacobi_symmetric(c);
        Self {
            values,
            vectors,
            closed_form,
        }
    }

    /// Largest disagreement between the closed-form and Jacobi eigenvalues.
    pub fn closed_form_gap(&self) -> f64 {
        (0..3)
            .map(|i| (self.values[i] - self.closed_form[i]).abs())
            .fold(0.0, f64::max)
    }

    /// Index of the eigenvector with the largest overlap with the z axis,
    /// i.e. the damping mode.
    pub fn damping_mode(&self) -> usize {
        (0..3)
            .max_by(|&i, &j| {
                self.vectors[(2, i)]
                    .abs()
                    .total_cmp(&self.vectors[(2, j)].abs())
            })
            .unwrap_or(2)
    }
}

/// Leading-order eigenvalue approximations for small perturbations, labelled by
/// the mode each one continues from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxEigenvalues {
    /// −Γ2′ + |α| − β²/(Γ2′ − Γ1)
    pub upper_dephasing: f64,
    /// −Γ2′ − |α|
    pub lower_dephasing: f64,
    /// −Γ1 + β²/(Γ2′ − Γ1)
    pub damping: f64,
}

impl ApproxEigenvalues {
    pub fn as_array(&self) -> [f64; 3] {
        [self.upper_dephasing, self.lower_dephasing, self.damping]
    }
}

pub fn eigenvalues_approx(p: &PerturbedGdParams) -> Result<ApproxEigenvalues> {
    let g2p = p.total_dephasing();
    if g2p <= p.gamma1 {
        return Err(Error::DephasingBelowDamping {
            gamma2_prime: g2p,
            gamma1: p.gamma1,
        });
    }
    let shift = p.beta_eff().powi(2) / (g2p - p.gamma1);
    let alpha = p.alpha_abs();
    Ok(ApproxEigenvalues {
        upper_dephasing: -g2p + alpha - shift,
        lower_dephasing: -g2p - alpha,
        damping: -p.gamma1 + shift,
    })
}

/// The generator's eigensystem with the drive projected onto it, ready to be
/// evaluated at any time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagator {
    pub eig: EigenSystem,
    /// λⱼ = ⟨vⱼ, drive⟩.
    pub drive_modes: Vector3<f64>,
}

impl Propagator {
    /// Linear part V·diag(e^{ηt})·Vᵀ and affine shift V·diag((e^{ηt}−1)/η)·λ.
    pub fn at(&self, t: f64) -> (Matrix3<f64>, Vector3<f64>) {
        let v = &self.eig.vectors;
        let decay = self.eig.values.map(|eta| (eta * t).exp());
        let accumulated =
            Vector3::from_fn(|j, _| expm1_over_rate(self.eig.values[j], t) * self.drive_modes[j]);
        let linear = v * Matrix3::from_diagonal(&decay) * v.transpose();
        (linear, v * accumulated)
    }

    pub fn evolve(&self, r0: &Vector3<f64>, t: f64) -> Vector3<f64> {
        let v = &self.eig.vectors;
        let modes = v.transpose() * r0;
        let c = Vector3::from_fn(|j, _| {
            let eta = self.eig.values[j];
            modes[j] * (eta * t).exp() + self.drive_modes[j] * expm1_over_rate(eta, t)
        });
        v * c
    }
}

/// (e^{ηt} − 1)/η, continuous through η = 0.
pub fn expm1_over_rate(eta: f64, t: f64) -> f64 {
    let x = eta * t;
    if x.abs() < SERIES_SWITCH {
        t * (1.0 + x / 2.0 + x * x / 6.0)
    } else {
        (eta * t).exp_m1() / eta
    }
}
