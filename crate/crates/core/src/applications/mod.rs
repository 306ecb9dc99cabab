//! Linear systems and fermionic reduced density matrices.

mod fermion;
mod linear;

pub use fermion::{
    estimate_1rdm_entry, exact_1rdm_entry, majorana_product, majorana_string, one_body_hermitian, one_body_matrix,
    MajoranaIndex, Parity, RdmEstimate,
};
pub use linear::{
    build_gap_amplified, build_hg, embedded_observable, exact_solution_expectation, interpolated_system, prepare_initial,
    qlss_estimate, solution_embedding, InitialState, LinearSystemInstance, QlssConfig, QlssReport,
};
