//! Exact-arithmetic workbench for affine finite automata and the models they
//! simulate.

pub mod automata;
pub mod format;
pub mod linalg;
pub mod scalar;
pub mod transforms;
pub mod unary;
pub mod zoo;
