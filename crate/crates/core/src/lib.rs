//! Structure analysis for positive unital maps on `M_n`: definite sets,
//! multiplicative cores, peripheral eigenspaces, invariant states,
//! trace-preserving conditional expectations and orbit diagnostics.

pub mod error;
pub mod linops;

pub use error::{Error, Result};

/// Largest matrix dimension `n` accepted by the analysis pipeline.
pub const MAX_DIM: usize = 12;
pub mod analysis;
pub mod asymptotics;
pub mod checks;
pub mod config;
pub mod core_algebra;
pub mod defset;
pub mod fuzz;
pub mod io;
pub mod jordan;
pub mod posmap;
pub mod random;
pub mod registry;
pub mod report;
pub mod zoo;
