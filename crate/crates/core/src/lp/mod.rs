//! Linear programming kernel: a revised simplex that reports row duals, and a
//! branch-and-bound driver on top of it.

mod mip;
mod model;
mod simplex;

pub use mip::{solve_mip, MipOptions};
pub use model::{Basis, BasisStatus, LinearProgram, Relation, Row, Sense, SolveResult, Status};
pub use simplex::{solve_lp, solve_lp_warm};

#[cfg(test)]
mod tests;
