//! Level-one holomorphic modular forms: q-expansions, Hecke operators and eigenforms.

pub mod cache;
pub mod delta;
pub mod eigen;
pub mod qexp;

pub use eigen::{eigenforms, hecke_relation_check, Eigenform};
pub use qexp::{cusp_basis, eisenstein_and_delta, hecke_apply, QExpansion};
