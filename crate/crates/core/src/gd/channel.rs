use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use super::generator::BlochGenerator;
use super::params::PerturbedGdParams;
use crate::error::{invalid, Result};
use crate::linalg::{hermitian_eigenvalues, Complex64};

/// Discrete-time damping probabilities (γ1, γ2) for a gate of duration Δt.
pub fn discrete_params(gamma1_rate: f64, gamma2_rate: f64, dt: f64) -> Result<(f64, f64)> {
    if !(dt > 0.0) {
        return Err(invalid("dt", format!("{dt} must be positive")));
    }
    Ok((
        -(-gamma1_rate * dt).exp_m1(),
        -(-2.0 * gamma2_rate * dt).exp_m1(),
    ))
}

/// Normalised single-qubit Pauli matrices I, X, Y, Z.
pub fn paulis() -> [Matrix2<Complex64>; 4] {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        Matrix2::new(one, z, z, one),
        Matrix2::new(z, one, one, z),
        Matrix2::new(z, -i, i, z),
        Matrix2::new(one, z, z, -one),
    ]
}

/// A Hermiticity-preserving linear map on one qubit, in the Pauli-Liouville
/// representation R_ij = ½ tr(Pᵢ Φ(Pⱼ)). Not necessarily trace preserving;
/// differences of channels live here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliMap {
    pub matrix: Matrix4<f64>,
}

impl PauliMap {
    pub fn new(matrix: Matrix4<f64>) -> Self {
        Self { matrix }
    }

    pub fn zero() -> Self {
        Self::new(Matrix4::zeros())
    }

    /// Applies the map to an arbitrary (not necessarily Hermitian) 2×2 operator.
    pub fn apply(&self, x: &Matrix2<Complex64>) -> Matrix2<Complex64> {
        let p = paulis();
        let coeff: [Complex64; 4] = std::array::from_fn(|j| (p[j] * x).trace());
        let mut out = Matrix2::zeros();
        for (i, pi) in p.iter().enumerate() {
            let mut w = Complex64::new(0.0, 0.0);
            for (j, cj) in coeff.iter().enumerate() {
                w += *cj * self.matrix[(i, j)];
            }
            out += pi * (w * 0.5);
        }
        out
    }

    /// Choi matrix Σ_ab |a⟩⟨b| ⊗ Φ(|a⟩⟨b|) (unnormalised, trace 2 for channels).
    pub fn choi(&self) -> Matrix4<Complex64> {
        let mut j = Matrix4::zeros();
        for a in 0..2 {
            for b in 0..2 {
                let mut e = Matrix2::zeros();
                e[(a, b)] = Complex64::new(1.0, 0.0);
                let block = self.apply(&e);
                for r in 0..2 {
                    for c in 0..2 {
                        j[(2 * a + r, 2 * b + c)] = block[(r, c)];
                    }
                }
            }
        }
        j
    }

    pub fn min_choi_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.choi())[0]
    }
}

/// Trace-preserving single-qubit channel in the Pauli-Liouville
/// representation: first row (1, 0, 0, 0), nonunital column below it, unital
/// 3×3 block in the lower right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleChannel {
    matrix: Matrix4<f64>,
}

impl LiouvilleChannel {
    pub fn identity() -> Self {
        Self {
            matrix: Matrix4::identity(),
        }
    }

    pub fn from_parts(unital: &Matrix3<f64>, nonunital: &Vector3<f64>) -> Self {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = 1.0;
        m.fixed_view_mut::<3, 1>(1, 0).copy_from(nonunital);
        m.fixed_view_mut::<3, 3>(1, 1).copy_from(unital);
        Self { matrix: m }
    }

    /// Wraps a 4×4 matrix, rejecting anything whose first row is not (1,0,0,0).
    pub fn from_matrix(matrix: Matrix4<f64>) -> Result<Self> {
        let row = matrix.row(0);
        if row[0] != 1.0 || row[1] != 0.0 || row[2] != 0.0 || row[3] != 0.0 {
            return Err(invalid(
                "matrix",
                "first row must be (1, 0, 0, 0) for a trace-preserving channel",
            ));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.matrix
    }

    pub fn unital(&self) -> Matrix3<f64> {
        self.matrix.fixed_view::<3, 3>(1, 1).into_owned()
    }

    pub fn nonunital(&self) -> Vector3<f64> {
        self.matrix.fixed_view::<3, 1>(1, 0).into_owned()
    }

    pub fn apply_bloch(&self, r: &Vector3<f64>) -> Vector3<f64> {
        self.unital() * r + self.nonunital()
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix * other.matrix,
        }
    }

    pub fn as_map(&self) -> PauliMap {
        PauliMap::new(self.matrix)
    }

    /// The difference map I − Λ.
    pub fn identity_minus(&self) -> PauliMap {
        PauliMap::new(Matrix4::identity() - self.matrix)
    }

    pub fn choi(&self) -> Matrix4<Complex64> {
        self.as_map().choi()
    }

    /// Completely positive when the Choi matrix is PSD within `tol`.
    pub fn is_completely_positive(&self, tol: f64) -> bool {
        self.as_map().min_choi_eigenvalue() >= -tol
    }
}

/// Generalized damping channel for discrete-time parameters (γ1, γ2, λ).
pub fn liouville_gd(gamma1: f64, gamma2: f64, lambda: f64) -> Result<LiouvilleChannel> {
    check_discrete(gamma1, gamma2, lambda)?;
    let b = ((1.0 - gamma1) * (1.0 - gamma2)).sqrt();
    Ok(LiouvilleChannel::from_parts(
        &Matrix3::from_diagonal(&Vector3::new(b, b, 1.0 - gamma1)),
        &Vector3::new(0.0, 0.0, gamma1 * (2.0 * lambda - 1.0)),
    ))
}

/// Perturbed GD channel over a gate of duration Δt, built in the generator's
/// eigenbasis and rotated back to the Pauli basis.
pub fn liouville_pgd(params: &PerturbedGdParams, dt: f64) -> Result<LiouvilleChannel> {
    if !(dt > 0.0) {
        return Err(invalid("dt", format!("{dt} must be positive")));
    }
    let (unital, shift) = BlochGenerator::from_params(params).propagator().at(dt);
    Ok(LiouvilleChannel::from_parts(&unital, &shift))
}

pub(crate) fn check_discrete(gamma1: f64, gamma2: f64, lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&gamma1) {
        return Err(invalid("gamma1", format!("{gamma1} outside [0, 1]")));
    }
    if !(0.0..=1.0).contains(&gamma2) {
        return Err(invalid("gamma2", format!("{gamma2} outside [0, 1]")));
    }
    if !(0.5..=1.0).contains(&lambda) {
        return Err(invalid("lambda", format!("{lambda} outside [1/2, 1]")));
    }
    Ok(())
}

/// Bloch-vector embedding helper: Pauli coefficients (1, r) of ρ = (I + r·σ)/2.
pub fn bloch_coefficients(r: &Vector3<f64>) -> Vector4<f64> {
    Vector4::new(1.0, r[0], r[1], r[2])
}
