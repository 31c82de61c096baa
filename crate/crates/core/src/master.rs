//! Restricted master LPs over a working set of path columns and scenario
//! rows, for the robust model and for the per-class hybrid model.

use std::collections::HashSet;

use crate::classes::ScenarioClass;
use crate::config::Limits;
use crate::enumerate::enumerate_simple_paths;
use crate::error::{input_err, Error, Result};
use crate::lp::{solve_lp_warm, Basis, BasisStatus, LinearProgram, Relation, Sense, Status};
use crate::network::FlowNetwork;
use crate::path::{Path, PathFlow, Scenario};

const ACTIVE_TOL: f64 = 1e-9;

/// Paths and scenarios in insertion order, deduplicated.
#[derive(Clone, Debug, Default)]
pub struct WorkingSet<T> {
    items: Vec<T>,
    seen: HashSet<T>,
}

impl<T: Clone + Eq + std::hash::Hash> WorkingSet<T> {
    pub fn new() -> Self {
        WorkingSet {
            items: Vec::new(),
            seen: HashSet::new(),
        }
    }

    /// Returns false when the item was already present.
    pub fn insert(&mut self, item: T) -> bool {
        if self.seen.contains(&item) {
            return false;
        }
        self.seen.insert(item.clone());
        self.items.push(item);
        true
    }

    pub fn items(&self) -> &[T] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, item: &T) -> bool {
        self.seen.contains(item)
    }
}

#[derive(Clone, Debug)]
pub struct MasterSolution {
    /// Rate per path, aligned with the path list given to the solver.
    pub rates: Vec<f64>,
    pub lambda: f64,
    /// |x| - λ.
    pub objective: f64,
    /// Capacity duals y_e, zero for arcs no path uses.
    pub arc_duals: Vec<f64>,
    /// Scenario duals y_η, aligned with the scenario list.
    pub scenario_duals: Vec<f64>,
}

impl MasterSolution {
    pub fn flow(&self, paths: &[Path]) -> PathFlow {
        PathFlow::from_pairs(
            paths
                .iter()
                .zip(&self.rates)
                .filter(|(_, &r)| r > ACTIVE_TOL)
                .map(|(p, &r)| (p.clone(), r)),
        )
    }

    pub fn active_paths(&self) -> usize {
        self.rates.iter().filter(|&&r| r > ACTIVE_TOL).count()
    }

    pub fn active_scenarios(&self) -> usize {
        self.scenario_duals.iter().filter(|&&y| y > ACTIVE_TOL).count()
    }
}

#[derive(Clone, Debug)]
pub struct HybridMasterSolution {
    pub rates: Vec<f64>,
    /// Worst destroyed flow per class.
    pub lambdas: Vec<f64>,
    pub weights: Vec<f64>,
    /// Σ x_P - Σ q_k λ_k.
    pub objective: f64,
    pub arc_duals: Vec<f64>,
    /// Per class, aligned with that class's scenario list.
    pub scenario_duals: Vec<Vec<f64>>,
    /// Final basis, for restarting after paths or scenarios are appended.
    pub basis: Option<MasterBasis>,
}

/// A master basis keyed by path, class, arc and scenario rather than by LP
/// position, so it survives appending paths and scenarios.
#[derive(Clone, Debug, Default)]
pub struct MasterBasis {
    paths: Vec<BasisStatus>,
    lambdas: Vec<BasisStatus>,
    arc_rows: Vec<Option<BasisStatus>>,
    scenario_rows: Vec<Vec<BasisStatus>>,
}

impl HybridMasterSolution {
    pub fn flow(&self, paths: &[Path]) -> PathFlow {
        PathFlow::from_pairs(
            paths
                .iter()
                .zip(&self.rates)
                .filter(|(_, &r)| r > ACTIVE_TOL)
                .map(|(p, &r)| (p.clone(), r)),
        )
    }

    pub fn active_paths(&self) -> usize {
        self.rates.iter().filter(|&&r| r > ACTIVE_TOL).count()
    }

    pub fn active_scenarios(&self) -> usize {
        self.scenario_duals
            .iter()
            .flatten()
            .filter(|&&y| y > ACTIVE_TOL)
            .count()
    }
}

pub fn check_weights(weights: &[f64], classes: usize) -> Result<()> {
    if weights.len() != classes {
        return input_err(format!(
            "{} weights given for {classes} classes",
            weights.len()
        ));
    }
    if weights.iter().any(|q| !q.is_finite() || *q < 0.0) {
        return input_err("weights must be nonnegative");
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return input_err(format!("weights sum to {total}, not 1"));
    }
    Ok(())
}

/// Layout of a master LP: which column and row each object occupies.
struct MasterLp {
    lp: LinearProgram,
    lambda_cols: Vec<usize>,
    arc_rows: Vec<Option<usize>>,
    scenario_rows: Vec<Vec<usize>>,
}

fn build_master(
    net: &FlowNetwork,
    paths: &[Path],
    classes: &[&[Scenario]],
    weights: &[f64],
) -> Result<MasterLp> {
    let m = net.arc_count();
    for p in paths {
        if p.arcs().iter().any(|&e| e >= m) {
            return input_err("path uses an unknown arc");
        }
    }
    let mut lp = LinearProgram::new(Sense::Maximize);
    for _ in paths {
        lp.add_column(1.0, 0.0, f64::INFINITY);
    }
    let lambda_cap = net.total_capacity();
    let lambda_cols: Vec<usize> = weights
        .iter()
        .map(|&q| lp.add_column(-q, 0.0, lambda_cap))
        .collect();

    let mut users: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (j, p) in paths.iter().enumerate() {
        for &e in p.arcs() {
            users[e].push(j);
        }
    }
    let mut arc_rows = vec![None; m];
    for e in 0..m {
        if !users[e].is_empty() {
            let coeffs = users[e].iter().map(|&j| (j, 1.0)).collect();
            arc_rows[e] = Some(lp.add_row(coeffs, Relation::Le, net.arcs[e].capacity));
        }
    }
    let mut scenario_rows = Vec::with_capacity(classes.len());
    for (c, scenarios) in classes.iter().enumerate() {
        let mut rows = Vec::with_capacity(scenarios.len());
        for eta in scenarios.iter() {
            if eta.arcs().iter().any(|&e| e >= m) {
                return input_err("scenario uses an unknown arc");
            }
            let mut coeffs: Vec<(usize, f64)> = paths
                .iter()
                .enumerate()
                .filter(|(_, p)| p.hits(eta))
                .map(|(j, _)| (j, 1.0))
                .collect();
            coeffs.push((lambda_cols[c], -1.0));
            rows.push(lp.add_row(coeffs, Relation::Le, 0.0));
        }
        scenario_rows.push(rows);
    }
    Ok(MasterLp {
        lp,
        lambda_cols,
        arc_rows,
        scenario_rows,
    })
}

fn hint(built: &MasterLp, npaths: usize, warm: &MasterBasis) -> Basis {
    let mut columns = vec![BasisStatus::AtLower; built.lp.num_cols()];
    for (j, st) in warm.paths.iter().take(npaths).enumerate() {
        columns[j] = *st;
    }
    for (c, &col) in built.lambda_cols.iter().enumerate() {
        columns[col] = warm.lambdas.get(c).copied().unwrap_or(BasisStatus::AtLower);
    }
    let mut rows = vec![BasisStatus::Basic; built.lp.num_rows()];
    for (e, r) in built.arc_rows.iter().enumerate() {
        if let (Some(r), Some(Some(st))) = (r, warm.arc_rows.get(e)) {
            rows[*r] = *st;
        }
    }
    for (c, class_rows) in built.scenario_rows.iter().enumerate() {
        for (i, &r) in class_rows.iter().enumerate() {
            if let Some(st) = warm.scenario_rows.get(c).and_then(|v| v.get(i)) {
                rows[r] = *st;
            }
        }
    }
    Basis { columns, rows }
}

pub(crate) fn solve_master(
    net: &FlowNetwork,
    paths: &[Path],
    classes: &[&[Scenario]],
    weights: &[f64],
    warm: Option<&MasterBasis>,
) -> Result<HybridMasterSolution> {
    let built = build_master(net, paths, classes, weights)?;
    let start = warm.map(|w| hint(&built, paths.len(), w));
    let res = solve_lp_warm(&built.lp, start.as_ref());
    if res.status != Status::Optimal {
        return input_err(format!("master LP ended with status {:?}", res.status));
    }
    let arc_duals = built
        .arc_rows
        .iter()
        .map(|r| r.map_or(0.0, |i| res.duals[i].max(0.0)))
        .collect();
    let scenario_duals = built
        .scenario_rows
        .iter()
        .map(|rows| rows.iter().map(|&i| res.duals[i].max(0.0)).collect())
        .collect();
    let rates: Vec<f64> = res.primal[..paths.len()].iter().map(|v| v.max(0.0)).collect();
    let lambdas: Vec<f64> = built.lambda_cols.iter().map(|&c| res.primal[c]).collect();
    let basis = res.basis.as_ref().map(|b| MasterBasis {
        paths: b.columns[..paths.len()].to_vec(),
        lambdas: built.lambda_cols.iter().map(|&c| b.columns[c]).collect(),
        arc_rows: built.arc_rows.iter().map(|r| r.map(|i| b.rows[i])).collect(),
        scenario_rows: built
            .scenario_rows
            .iter()
            .map(|rows| rows.iter().map(|&i| b.rows[i]).collect())
            .collect(),
    });
    Ok(HybridMasterSolution {
        basis,
        rates,
        lambdas,
        weights: weights.to_vec(),
        objective: res.objective,
        arc_duals,
        scenario_duals,
    })
}

/// Solves the restricted robust master over `paths` and `scenarios`.
pub fn solve_restricted_master(
    net: &FlowNetwork,
    paths: &[Path],
    scenarios: &[Scenario],
) -> Result<MasterSolution> {
    let mut h = solve_master(net, paths, &[scenarios], &[1.0], None)?;
    Ok(MasterSolution {
        rates: h.rates,
        lambda: h.lambdas[0],
        objective: h.objective,
        arc_duals: h.arc_duals,
        scenario_duals: h.scenario_duals.pop().unwrap_or_default(),
    })
}

/// Solves the hybrid master: one λ per class, weighted by `weights`.
pub fn solve_hybrid_master(
    net: &FlowNetwork,
    paths: &[Path],
    classes: &[Vec<Scenario>],
    weights: &[f64],
) -> Result<HybridMasterSolution> {
    check_weights(weights, classes.len())?;
    let refs: Vec<&[Scenario]> = classes.iter().map(|c| c.as_slice()).collect();
    solve_master(net, paths, &refs, weights, None)
}

/// The complete robust LP with every simple path and every scenario.
pub struct FullModel {
    pub lp: LinearProgram,
    pub paths: Vec<Path>,
    pub scenarios: Vec<Scenario>,
}

pub fn build_full_model(net: &FlowNetwork, k: usize, limits: &Limits) -> Result<FullModel> {
    let class = ScenarioClass::cardinality(net, k);
    let mut h = build_full_hybrid_model(net, &[class], &[1.0], limits)?;
    Ok(FullModel {
        lp: h.lp,
        paths: h.paths,
        scenarios: h.classes.pop().unwrap_or_default(),
    })
}

pub struct FullHybridModel {
    pub lp: LinearProgram,
    pub paths: Vec<Path>,
    pub classes: Vec<Vec<Scenario>>,
}

/// The complete hybrid LP over every path and every scenario of each class.
pub fn build_full_hybrid_model(
    net: &FlowNetwork,
    classes: &[ScenarioClass],
    weights: &[f64],
    limits: &Limits,
) -> Result<FullHybridModel> {
    check_weights(weights, classes.len())?;
    let paths = enumerate_simple_paths(net, limits.paths)?;
    let mut budget = limits.scenarios;
    let mut sets = Vec::with_capacity(classes.len());
    for c in classes {
        let s = c.enumerate(budget).map_err(|_| Error::Overflow {
            what: "scenario",
            limit: limits.scenarios,
        })?;
        budget -= s.len();
        sets.push(s);
    }
    let refs: Vec<&[Scenario]> = sets.iter().map(|c| c.as_slice()).collect();
    let built = build_master(net, &paths, &refs, weights)?;
    Ok(FullHybridModel {
        lp: built.lp,
        paths,
        classes: sets,
    })
}
