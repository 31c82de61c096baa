//! Brute-force reference values: the robust and hybrid LPs written out over
//! every simple path and every scenario.

use crate::classes::ScenarioClass;
use crate::config::Limits;
use crate::enumerate::enumerate_simple_paths;
use crate::error::{input_err, Result};
use crate::lp::{solve_lp, LinearProgram, Relation, Sense, Status};
use crate::master::{build_full_hybrid_model, build_full_model};
use crate::network::FlowNetwork;
use crate::path::{Path, PathFlow, Scenario};

#[derive(Clone, Debug)]
pub struct OracleSolution {
    pub value: f64,
    pub flow: PathFlow,
}

fn solve_full(lp: &LinearProgram, paths: Vec<Path>) -> Result<OracleSolution> {
    let res = solve_lp(lp);
    if res.status != Status::Optimal {
        return input_err(format!("full LP ended with status {:?}", res.status));
    }
    let flow = PathFlow::from_pairs(
        paths
            .into_iter()
            .zip(&res.primal)
            .filter(|(_, &r)| r > 1e-9)
            .map(|(p, &r)| (p, r)),
    );
    Ok(OracleSolution {
        value: res.objective,
        flow,
    })
}

/// Optimal robust value over scenarios of `k` arcs.
pub fn run_oracle(net: &FlowNetwork, k: usize, limits: &Limits) -> Result<OracleSolution> {
    net.validate()?;
    let model = build_full_model(net, k, limits)?;
    solve_full(&model.lp, model.paths)
}

/// Optimal hybrid value Σ_c q_c min_{η∈Ω_c} val_η(x).
pub fn run_hybrid_oracle(
    net: &FlowNetwork,
    classes: &[ScenarioClass],
    weights: &[f64],
    limits: &Limits,
) -> Result<OracleSolution> {
    net.validate()?;
    let model = build_full_hybrid_model(net, classes, weights, limits)?;
    solve_full(&model.lp, model.paths)
}

/// max_x Σ_ω Q(ω) val_ω(x) for an explicit scenario distribution.
pub fn run_stochastic_oracle(
    net: &FlowNetwork,
    distribution: &[(Scenario, f64)],
    limits: &Limits,
) -> Result<OracleSolution> {
    net.validate()?;
    let paths = enumerate_simple_paths(net, limits.paths)?;
    let mut lp = LinearProgram::new(Sense::Maximize);
    for p in &paths {
        let survive: f64 = distribution
            .iter()
            .filter(|(s, _)| !p.hits(s))
            .map(|(_, q)| q)
            .sum();
        lp.add_column(survive, 0.0, f64::INFINITY);
    }
    for (e, a) in net.arcs.iter().enumerate() {
        let coeffs: Vec<(usize, f64)> = paths
            .iter()
            .enumerate()
            .filter(|(_, p)| p.contains(e))
            .map(|(j, _)| (j, 1.0))
            .collect();
        if !coeffs.is_empty() {
            lp.add_row(coeffs, Relation::Le, a.capacity);
        }
    }
    solve_full(&lp, paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_arcs() {
        let mut net = FlowNetwork::new(2, 0, 1);
        for _ in 0..3 {
            net.add_arc(0, 1, 1.0, false);
        }
        let lim = Limits::default();
        assert!((run_oracle(&net, 1, &lim).unwrap().value - 2.0).abs() < 1e-9);
        let s = Scenario::new(&net, vec![0]).unwrap();
        let none = Scenario::new(&net, vec![]).unwrap();
        let v = run_stochastic_oracle(&net, &[(s, 0.5), (none, 0.5)], &lim).unwrap().value;
        assert!((v - 2.5).abs() < 1e-9);
    }
}
