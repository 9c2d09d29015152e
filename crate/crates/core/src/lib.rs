//! Exact arithmetic on lattice polytopes: hulls, lattice point enumeration,
//! normality, and one-point extensions ("jumps") that preserve normality.

pub mod cone;
pub mod error;
pub mod exact;
pub mod gallery;
pub mod hull;
pub mod io;
pub mod jump;
pub mod linalg;
pub mod lp;
pub mod polytope;
pub mod search;
pub mod triangulation;

pub use error::{Error, Result};
pub use polytope::{FacetForm, LatticePolytope, LatticeVector, Stratum};
