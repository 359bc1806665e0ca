//! Petersson geometric side, the twisted global identity, Voronoi, the stage
//! pipeline and the functional equation.

pub mod identity;
pub mod lfunc;
pub mod petersson;
pub mod pipeline;

pub use petersson::{petersson_dim1_factorization, petersson_geometric, PeterssonTable, PeterssonValue};
pub use identity::{main_identity_check, voronoi_check, IdentityResult, SpectralConfig};
pub use pipeline::{pipeline_trace, PipelineTrace, Stages};
pub use lfunc::{completed_l, functional_equation_check, l_value, CompletedL, FunctionalEquation, LConfig};
