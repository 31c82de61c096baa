use serde::{Deserialize, Serialize};

/// Caps on enumeration and search effort.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    /// Simple paths an oracle may enumerate.
    pub paths: usize,
    /// Scenarios an oracle (or the enumeration backend) may enumerate.
    pub scenarios: usize,
    /// Branch-and-bound nodes per MIP.
    pub nodes: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            paths: 10_000,
            scenarios: 100_000,
            nodes: 1_000_000,
        }
    }
}

/// Settings for the simultaneous separation loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub k: usize,
    /// Absolute gap between primal and dual bound at which the loop stops.
    pub gap_tolerance: f64,
    /// Most scenarios generated per iteration; unbounded when `None`.
    pub max_interdictions_per_iter: Option<usize>,
    /// Penalize arcs already used by generated paths during pricing.
    pub path_penalty: bool,
    /// Penalize arcs already interdicted by generated scenarios.
    pub scenario_penalty: bool,
    pub limits: Limits,
    /// Outer iterations before giving up.
    pub max_iterations: usize,
    pub seed: u64,
}

impl SolverConfig {
    pub fn new(k: usize) -> Self {
        SolverConfig {
            k,
            gap_tolerance: 1e-6,
            max_interdictions_per_iter: None,
            path_penalty: true,
            scenario_penalty: true,
            limits: Limits::default(),
            max_iterations: 10_000,
            seed: 0,
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(self.gap_tolerance > 0.0) {
            return crate::error::input_err("gap tolerance must be positive");
        }
        if self.max_interdictions_per_iter == Some(0) {
            return crate::error::input_err("max interdictions per iteration must be at least 1");
        }
        Ok(())
    }
}

/// Penalty per previously used arc in pricing.
pub const PATH_PENALTY: f64 = 1e-4;
