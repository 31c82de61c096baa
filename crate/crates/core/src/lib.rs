//! Robust maximum flow over path flows: scenarios remove up to k arcs and
//! destroy every path through them, and the solver maximizes the flow that
//! survives the worst scenario.

pub mod classes;
pub mod config;
pub mod decompose;
pub mod driver;
pub mod enumerate;
pub mod error;
pub mod heuristic;
pub mod hybrid;
pub mod instances;
pub mod interdiction;
pub mod io;
pub mod lp;
pub mod master;
pub mod maxflow;
pub mod network;
pub mod oracle;
pub mod path;
pub mod pricing;
pub mod report;

pub use classes::ScenarioClass;
pub use config::{Limits, SolverConfig};
pub use driver::{solve_hybrid, solve_robust, RobustSolution, SeparationState, SolveStatus};
pub use error::{Error, Result};
pub use heuristic::solve_heuristic;
pub use network::{Arc, ArcId, FlowNetwork, NodeId};
pub use oracle::run_oracle;
pub use path::{Path, PathFlow, Scenario};
