pub mod boundary;
pub mod odes;
pub mod series;
pub mod triple;
pub mod integrator;
pub mod shooting;
pub mod oracles;
pub mod diagnostics;
