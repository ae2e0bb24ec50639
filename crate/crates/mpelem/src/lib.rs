//! Medium-precision elementary functions with rigorous error bounds.

pub mod argtables;
pub mod bench;
pub mod cli;
pub mod functions;
pub mod fixedpoint;
pub mod limb;
pub mod prover;
pub mod series;
pub mod vectors;

pub use limb::{Limb, Word};
