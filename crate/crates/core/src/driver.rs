//! The simultaneous separation loop. Each iteration prices paths into the
//! restricted master until none has positive reduced price, which makes the
//! master value a dual bound, and then runs exact interdiction on the
//! master's flow, which gives its worst-case value as a primal bound and
//! adds violated scenario rows. The loop stops when the bounds meet.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::classes::ScenarioClass;
use crate::config::SolverConfig;
use crate::error::Result;
use crate::heuristic::solve_heuristic;
use crate::interdiction::{separate_exact, Perturbation};
use crate::master::{check_weights, solve_master, HybridMasterSolution, WorkingSet};
use crate::network::FlowNetwork;
use crate::path::{Path, PathFlow, Scenario};
use crate::pricing::{price_path_with, DualPrices, PricingBackend};

/// Iterations without bound movement or new columns/rows before giving up.
const STALL_ITERATIONS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    IterationLimit,
    /// Path or scenario working set outgrew the configured limits.
    ResourceLimit,
    /// Neither bound moved and nothing new was generated.
    Stalled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub iteration: usize,
    pub primal_bound: f64,
    pub dual_bound: f64,
    pub paths_generated: usize,
    pub scenarios_generated: usize,
    pub active_paths: usize,
    pub active_scenarios: usize,
    pub pricing_calls: usize,
    pub interdiction_calls: usize,
    #[serde(skip)]
    pub pricing_seconds: f64,
    #[serde(skip)]
    pub interdiction_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PricingCall {
    pub iteration: usize,
    /// Scenarios with a positive dual at this call.
    pub priced_scenarios: usize,
    /// Reduced price of the returned path, if one was found.
    pub price: Option<f64>,
    #[serde(skip)]
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct SeparationState {
    pub paths: WorkingSet<Path>,
    /// One working set per scenario class.
    pub scenarios: Vec<WorkingSet<Scenario>>,
    pub master: Option<HybridMasterSolution>,
    pub primal_bound: f64,
    pub dual_bound: f64,
    /// Outer iterations (pricing phase plus interdiction phase).
    pub iterations: usize,
    /// Pricing plus interdiction calls.
    pub separation_calls: usize,
    pub log: Vec<IterationLog>,
    pub pricing_calls: Vec<PricingCall>,
    pub interdiction_seconds: Vec<f64>,
    /// Value of the initial heuristic flow.
    pub heuristic_value: f64,
    pub status: SolveStatus,
}

impl SeparationState {
    pub fn gap(&self) -> f64 {
        self.dual_bound - self.primal_bound
    }

    pub fn scenarios_generated(&self) -> usize {
        self.scenarios.iter().map(|s| s.len()).sum()
    }

    pub fn active_paths(&self) -> usize {
        self.master.as_ref().map_or(0, |m| m.active_paths())
    }

    pub fn active_scenarios(&self) -> usize {
        self.master.as_ref().map_or(0, |m| m.active_scenarios())
    }
}

#[derive(Clone, Debug)]
pub struct RobustSolution {
    /// Flow attaining the primal bound.
    pub flow: PathFlow,
    pub value: f64,
    pub state: SeparationState,
}

impl RobustSolution {
    pub fn converged(&self) -> bool {
        self.state.status == SolveStatus::Converged
    }
}

/// Maximizes the worst-case flow over scenarios of `config.k` arcs.
pub fn solve_robust(net: &FlowNetwork, config: &SolverConfig) -> Result<RobustSolution> {
    let class = ScenarioClass::cardinality(net, config.k);
    run(net, &[class], &[1.0], config)
}

/// Maximizes Σ_c q_c · (worst-case flow over class c).
pub fn solve_hybrid(
    net: &FlowNetwork,
    classes: &[ScenarioClass],
    weights: &[f64],
    config: &SolverConfig,
) -> Result<RobustSolution> {
    check_weights(weights, classes.len())?;
    run(net, classes, weights, config)
}

fn run(
    net: &FlowNetwork,
    classes: &[ScenarioClass],
    weights: &[f64],
    config: &SolverConfig,
) -> Result<RobustSolution> {
    net.validate()?;
    config.validate()?;
    let tol = config.gap_tolerance;

    // Start from the heuristic for the heaviest class.
    let lead = (0..classes.len())
        .max_by(|&a, &b| weights[a].total_cmp(&weights[b]).then(b.cmp(&a)))
        .unwrap_or(0);
    let heuristic = solve_heuristic(net, classes.get(lead).map_or(config.k, |c| c.size()));
    let mut state = SeparationState {
        paths: WorkingSet::new(),
        scenarios: vec![WorkingSet::new(); classes.len()],
        master: None,
        primal_bound: f64::NEG_INFINITY,
        dual_bound: f64::INFINITY,
        iterations: 0,
        separation_calls: 0,
        log: Vec::new(),
        pricing_calls: Vec::new(),
        interdiction_seconds: Vec::new(),
        heuristic_value: heuristic.value,
        status: SolveStatus::IterationLimit,
    };
    let mut used_arcs = vec![false; net.arc_count()];
    for p in heuristic.flow.paths() {
        for &e in p.arcs() {
            used_arcs[e] = true;
        }
        state.paths.insert(p.clone());
    }
    // The heuristic flow is feasible, so its worst-case value is a primal bound.
    let mut best_flow = heuristic.flow.clone();
    state.primal_bound = heuristic.flow.value()
        - classes
            .iter()
            .zip(weights)
            .filter(|(_, &q)| q > 0.0)
            .map(|(class, &q)| {
                state.separation_calls += 1;
                q * separate_exact(net, &heuristic.flow, class, None).destroyed
            })
            .sum::<f64>();
    let mut stall = 0;

    while state.iterations < config.max_iterations {
        state.iterations += 1;
        let iteration = state.iterations;
        let before = (state.primal_bound, state.dual_bound, state.paths.len(), state.scenarios_generated());

        // Pricing to optimality.
        let mut pricing_seconds = 0.0;
        let mut pricing_calls = 0;
        let master = loop {
            let refs: Vec<&[Scenario]> = state.scenarios.iter().map(|s| s.items()).collect();
            let warm = state.master.as_ref().and_then(|m| m.basis.as_ref());
            let master = solve_master(net, state.paths.items(), &refs, weights, warm)?;
            state.master = Some(master.clone());
            let prices = DualPrices::new(
                master.arc_duals.clone(),
                state
                    .scenarios
                    .iter()
                    .zip(&master.scenario_duals)
                    .flat_map(|(set, duals)| set.items().iter().cloned().zip(duals.iter().copied())),
                1e-12,
            );
            let start = Instant::now();
            let found = price_path_with(
                net,
                &prices,
                config.path_penalty.then_some(used_arcs.as_slice()),
                PricingBackend::Auto,
                &config.limits,
            );
            let seconds = start.elapsed().as_secs_f64();
            pricing_seconds += seconds;
            pricing_calls += 1;
            state.pricing_calls.push(PricingCall {
                iteration,
                priced_scenarios: prices.scenarios.len(),
                price: found.as_ref().map(|p| p.price),
                seconds,
            });
            match found {
                Some(p) if !state.paths.contains(&p.path) => {
                    log::trace!("priced path {:?} at {}", p.path.arcs(), p.price);
                    for &e in p.path.arcs() {
                        used_arcs[e] = true;
                    }
                    state.paths.insert(p.path);
                    if state.paths.len() > config.limits.paths {
                        break master;
                    }
                }
                Some(p) => {
                    log::debug!("pricing returned a known path at price {}", p.price);
                    break master;
                }
                None => break master,
            }
        };
        state.separation_calls += pricing_calls;
        if state.paths.len() > config.limits.paths {
            state.master = Some(master);
            state.status = SolveStatus::ResourceLimit;
            break;
        }
        state.dual_bound = state.dual_bound.min(master.objective);

        // Interdiction on the master's flow.
        let x = master.flow(state.paths.items());
        let viol_tol = 1e-9 * x.value().max(1.0);
        let mut interdiction_seconds = 0.0;
        let mut interdiction_calls = 0;
        let mut worst_total = 0.0;
        for (c, class) in classes.iter().enumerate() {
            if weights[c] == 0.0 {
                continue;
            }
            let lambda = master.lambdas[c];
            let start = Instant::now();
            let exact = separate_exact(net, &x, class, None);
            interdiction_calls += 1;
            worst_total += weights[c] * exact.destroyed;
            if exact.destroyed > lambda + viol_tol {
                let cap = config.max_interdictions_per_iter.unwrap_or(usize::MAX);
                let mut added = 0;
                while added < cap {
                    let cand = if config.scenario_penalty && !state.scenarios[c].is_empty() {
                        interdiction_calls += 1;
                        separate_exact(
                            net,
                            &x,
                            class,
                            Some(Perturbation {
                                previous: state.scenarios[c].items(),
                                lambda,
                            }),
                        )
                    } else {
                        exact.clone()
                    };
                    if cand.destroyed <= lambda + viol_tol || !state.scenarios[c].insert(cand.scenario) {
                        break;
                    }
                    added += 1;
                    if !config.scenario_penalty {
                        break;
                    }
                }
            }
            let seconds = start.elapsed().as_secs_f64();
            interdiction_seconds += seconds;
            state.interdiction_seconds.push(seconds);
        }
        state.separation_calls += interdiction_calls;
        let value = x.value() - worst_total;
        if value > state.primal_bound {
            state.primal_bound = value;
            best_flow = x;
        }

        state.log.push(IterationLog {
            iteration,
            primal_bound: state.primal_bound,
            dual_bound: state.dual_bound,
            paths_generated: state.paths.len(),
            scenarios_generated: state.scenarios_generated(),
            active_paths: master.active_paths(),
            active_scenarios: master.active_scenarios(),
            pricing_calls,
            interdiction_calls,
            pricing_seconds,
            interdiction_seconds,
        });
        log::debug!(
            "iteration {iteration}: primal {} dual {} paths {} scenarios {}",
            state.primal_bound,
            state.dual_bound,
            state.paths.len(),
            state.scenarios_generated()
        );
        state.master = Some(master);

        if state.gap() <= tol {
            state.status = SolveStatus::Converged;
            break;
        }
        if state.scenarios_generated() > config.limits.scenarios {
            state.status = SolveStatus::ResourceLimit;
            break;
        }
        let moved = state.primal_bound > before.0 + 1e-12
            || state.dual_bound < before.1 - 1e-12
            || state.paths.len() > before.2
            || state.scenarios_generated() > before.3;
        stall = if moved { 0 } else { stall + 1 };
        if stall >= STALL_ITERATIONS {
            log::warn!("separation stalled with gap {}", state.gap());
            state.status = SolveStatus::Stalled;
            break;
        }
    }
    if state.status != SolveStatus::Converged {
        log::warn!(
            "stopped without convergence ({:?}): primal {} dual {}",
            state.status,
            state.primal_bound,
            state.dual_bound
        );
    }
    let value = state.primal_bound.max(0.0);
    Ok(RobustSolution {
        flow: best_flow,
        value,
        state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parallel(n: usize) -> FlowNetwork {
        let mut net = FlowNetwork::new(2, 0, 1);
        for _ in 0..n {
            net.add_arc(0, 1, 1.0, false);
        }
        net
    }

    #[test]
    fn two_parallel_arcs() {
        let sol = solve_robust(&parallel(2), &SolverConfig::new(1)).unwrap();
        assert!(sol.converged());
        assert!((sol.value - 1.0).abs() < 1e-9);
        assert!(sol.state.iterations <= 3);
    }

    #[test]
    fn hybrid_weights() {
        let net = parallel(3);
        let classes = [ScenarioClass::cardinality(&net, 1), ScenarioClass::cardinality(&net, 2)];
        let cfg = SolverConfig::new(1);
        let sol = solve_hybrid(&net, &classes, &[0.5, 0.5], &cfg).unwrap();
        assert!((sol.value - 1.5).abs() < 1e-9, "{}", sol.value);
        let sol = solve_hybrid(&net, &classes, &[1.0, 0.0], &cfg).unwrap();
        assert!((sol.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn no_path_is_zero() {
        let mut net = FlowNetwork::new(3, 0, 2);
        net.add_arc(0, 1, 1.0, false);
        let sol = solve_robust(&net, &SolverConfig::new(1)).unwrap();
        assert!(sol.converged());
        assert_eq!(sol.value, 0.0);
    }

    #[test]
    fn bounds_are_logged_in_order() {
        let mut net = FlowNetwork::new(4, 0, 3);
        for (u, v, c) in [(0, 1, 2.0), (0, 2, 1.0), (1, 2, 1.0), (1, 3, 1.0), (2, 3, 2.0), (0, 3, 0.5)] {
            net.add_arc(u, v, c, false);
        }
        let sol = solve_robust(&net, &SolverConfig::new(1)).unwrap();
        assert!(sol.converged());
        for rec in &sol.state.log {
            assert!(rec.primal_bound <= rec.dual_bound + 1e-9);
        }
        for w in sol.state.log.windows(2) {
            assert!(w[1].primal_bound >= w[0].primal_bound);
            assert!(w[1].dual_bound <= w[0].dual_bound);
        }
    }
}
