//! Perturbed generalized damping: parameters, Bloch generator, eigensystem
//! and the discrete-time channel representations.

mod channel;
mod generator;
mod kraus;
mod params;

pub(crate) use channel::check_discrete;
pub use channel::{
    bloch_coefficients, discrete_params, liouville_gd, liouville_pgd, paulis, LiouvilleChannel,
    PauliMap,
};
pub use generator::{
    eigenvalues_approx, expm1_over_rate, ApproxEigenvalues, BlochGenerator, EigenSystem, Propagator,
};
pub use kraus::{kraus_gd, KrausSet};
pub use params::{CoefficientMatrix, PerturbedGdParams};

use nalgebra::Vector3;

/// Builds the coefficient matrix for `params`.
pub fn build_coefficient_matrix(params: &PerturbedGdParams) -> CoefficientMatrix {
    params.coefficient_matrix()
}

pub fn bloch_generator(params: &PerturbedGdParams) -> BlochGenerator {
    BlochGenerator::from_params(params)
}

pub fn eigensystem_exact(generator: &BlochGenerator) -> EigenSystem {
    generator.eigensystem()
}

pub fn evolve_bloch(generator: &BlochGenerator, r0: &Vector3<f64>, t: f64) -> Vector3<f64> {
    generator.evolve(r0, t)
}
