//! Shared numerics: special functions and a simplex minimizer.

pub mod nelder_mead;
pub mod special;
