//! Finite relation and cylindric atom structures, the constructions built on
//! them, and exact solvers for the games played over them.

pub mod algebra;
pub mod error;
pub mod games;
pub mod graph;
pub mod matrices;
pub mod monk;
pub mod rainbow;
pub mod report;

pub use error::{Error, Result};
