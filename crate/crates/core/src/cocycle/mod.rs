//! Bézout solutions of the infinitesimal equations, the Čech cocycle on the
//! two chart overlaps and the cocycle matrix with its closed-form checks.

mod bezout;
mod expansion;
mod local;
mod matrix;
mod oracles;

pub use bezout::{bezout_cofactors, BezoutData};
pub use expansion::{
    cocycle_coefficients, cocycle_quotient, cocycle_series, holo_other, holomorphic_var,
    DEFAULT_MARGIN,
};
pub use local::{verify_propagation, CocycleContext, LocalSolution, Site};
pub use matrix::{
    assemble, build_level_matrix, build_level_matrix_in, full_matrix, full_matrix_in,
    full_matrix_with_margin, resolve_level_directly, CocycleMatrix, LevelBlock,
};
pub use oracles::{
    closed_form_oracles, closed_form_oracles_on, closed_form_oracles_with, level_one_blocks, vandermonde,
    ClosedFormData, Fault, Check, OracleReport, Status, GLOBAL_SIGN,
};
