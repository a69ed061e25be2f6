//! Combinatorics of fs monoids, polysimplicial sets, stratifications and
//! tempered extension towers.

pub mod complex;
pub mod cone;
pub mod error;
pub mod fibration;
pub mod group;
pub mod lambda;
pub mod lattice;
pub mod monoid;
pub mod pi1;
pub mod poset;
pub mod strata;
pub mod tempered;

pub use error::{Error, Result};
