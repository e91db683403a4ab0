pub mod admissibility;
pub mod error;
pub mod exec;
pub mod frame;
pub mod rng;
pub mod eigensteps;
pub mod polytope;
mod simplex;
pub mod torus;
pub mod synthesis;
pub mod spark;
pub mod singularity;
pub mod stats;
pub mod experiments;
