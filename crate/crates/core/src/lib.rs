//! Exact verification of shifted symplectic and contact Darboux models.
//!
//! Everything is computed over the rationals in free graded-commutative
//! algebras: presentations and their de Rham algebras, the Darboux builders
//! for targets and sources, and point-evaluated chain complexes for
//! non-degeneracy.

pub mod cdga;
pub mod cli;
pub mod darboux;
pub mod derham;
pub mod error;
pub mod graded_algebra;
pub mod homcheck;
pub mod lagrangian;
pub mod legendrian;
pub mod report;

pub use error::{Error, Result};
