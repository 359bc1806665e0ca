//! Exact and numeric verification of the character-sum, Bessel, Hecke and
//! trace-formula identities behind the twisted Voronoi formula for level-one
//! holomorphic cusp forms.

pub mod characters;
pub mod cyclotomic;
pub mod error;
pub mod exec;
pub mod expsums;
pub mod modforms;
pub mod residue;
pub mod special;
pub mod spectral;
pub mod verify;
