//! Diamond-distance bounds for perturbed generalized damping channels, the
//! exact norms they are assembled from, and a numerical oracle to check
//! them against.

mod closed_form;
mod oracle;

pub use closed_form::{
    bound_new, bound_robust, eps_gd_ub, gd_nonunital_part_diamond, gd_unital_part_diamond,
    pauli_channel_map, pauli_diamond, single_element_diamond, single_element_map, user_corrections,
    BoundReport, GeneralBound, UserCorrections,
};
pub use oracle::{diamond_oracle, DiamondOracle, OracleConfig, OracleResult, AGREEMENT_THRESHOLD};
