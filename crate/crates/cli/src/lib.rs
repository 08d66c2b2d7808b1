//! Batch front end for the cohomogeneity-one Einstein solver.

pub mod checks;
pub mod commands;
pub mod config;
pub mod emit;
