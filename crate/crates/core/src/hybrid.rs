//! Statistics for the hybrid model: class partitions, empirical class
//! weights from observed failures, the capacity constants λ*, the sample
//! generalization bound, and a minimax equality check.

use serde::{Deserialize, Serialize};

use crate::classes::ScenarioClass;
use crate::config::Limits;
use crate::enumerate::enumerate_simple_paths;
use crate::error::{input_err, Error, Result};
use crate::interdiction::class_worst_value;
use crate::lp::{solve_lp, LinearProgram, Relation, Sense, Status};
use crate::network::{ArcId, FlowNetwork};
use crate::oracle::run_hybrid_oracle;
use crate::path::{PathFlow, Scenario};

/// How scenarios are grouped into classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionSpec {
    /// One class of all k-arc scenarios per listed k.
    Cardinality(Vec<usize>),
    /// Classes of scenarios with j regular and k exposed arcs per listed pair.
    TwoTier {
        regular: Vec<ArcId>,
        exposed: Vec<ArcId>,
        pairs: Vec<(usize, usize)>,
    },
}

impl PartitionSpec {
    pub fn classes(&self, net: &FlowNetwork) -> Result<Vec<ScenarioClass>> {
        match self {
            PartitionSpec::Cardinality(ks) => {
                let mut sorted = ks.clone();
                sorted.sort_unstable();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return input_err("class sizes repeat");
                }
                let pool = net.interdictable().len();
                if let Some(k) = ks.iter().find(|&&k| k > pool) {
                    return input_err(format!("class size {k} exceeds the {pool} interdictable arcs"));
                }
                Ok(ks.iter().map(|&k| ScenarioClass::cardinality(net, k)).collect())
            }
            PartitionSpec::TwoTier {
                regular,
                exposed,
                pairs,
            } => pairs
                .iter()
                .map(|&(j, k)| ScenarioClass::two_tier(net, regular.clone(), j, exposed.clone(), k))
                .collect(),
        }
    }
}

/// Index of the class containing `scenario`.
pub fn classify(classes: &[ScenarioClass], scenario: &Scenario) -> Option<usize> {
    classes.iter().position(|c| c.contains(scenario))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalWeights {
    pub counts: Vec<usize>,
    pub observations: usize,
}

impl EmpiricalWeights {
    /// Class frequencies q̂.
    pub fn weights(&self) -> Vec<f64> {
        let n = self.observations.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }
}

/// Counts observed scenarios per class.
pub fn observe(classes: &[ScenarioClass], scenarios: &[Scenario]) -> Result<EmpiricalWeights> {
    let mut counts = vec![0; classes.len()];
    for (i, s) in scenarios.iter().enumerate() {
        match classify(classes, s) {
            Some(c) => counts[c] += 1,
            None => {
                return input_err(format!(
                    "observation {} (arcs {:?}) belongs to no class",
                    i + 1,
                    s.arcs()
                ))
            }
        }
    }
    Ok(EmpiricalWeights {
        counts,
        observations: scenarios.len(),
    })
}

pub fn lambda_star(net: &FlowNetwork, class: &ScenarioClass) -> f64 {
    class.lambda_star(net)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralizationBound {
    /// Σ q̂_c min_{η∈Ω_c} val_η(x).
    pub empirical: f64,
    /// (2/√N) Σ λ*_c √q̂_c.
    pub complexity: f64,
    /// 2C √(8 ln(4/δ)/N) with C the largest λ*.
    pub confidence: f64,
    pub bound: f64,
}

/// Correction terms of the bound for given class weights and constants.
pub fn bound_terms(lambdas: &[f64], weights: &[f64], n: usize, delta: f64) -> Result<(f64, f64)> {
    if !(delta > 0.0 && delta < 1.0) {
        return input_err(format!("delta must lie in (0, 1), got {delta}"));
    }
    if n == 0 {
        return input_err("at least one observation is needed");
    }
    let n = n as f64;
    let complexity = 2.0 / n.sqrt() * lambdas.iter().zip(weights).map(|(l, q)| l * q.sqrt()).sum::<f64>();
    let c = lambdas.iter().copied().fold(0.0, f64::max);
    let confidence = 2.0 * c * (8.0 * (4.0 / delta).ln() / n).sqrt();
    Ok((complexity, confidence))
}

/// High-probability lower bound on the expected worst-case value of `x`
/// under the true class weights, from `weights` estimated on N observations.
pub fn generalization_bound(
    net: &FlowNetwork,
    x: &PathFlow,
    classes: &[ScenarioClass],
    weights: &EmpiricalWeights,
    delta: f64,
) -> Result<GeneralizationBound> {
    if weights.counts.len() != classes.len() {
        return input_err("weights and classes differ in length");
    }
    let q = weights.weights();
    let lambdas: Vec<f64> = classes.iter().map(|c| c.lambda_star(net)).collect();
    let (complexity, confidence) = bound_terms(&lambdas, &q, weights.observations, delta)?;
    let empirical = weighted_worst_value(net, x, classes, &q);
    Ok(GeneralizationBound {
        empirical,
        complexity,
        confidence,
        bound: empirical - complexity - confidence,
    })
}

/// Σ_c q_c min_{η∈Ω_c} val_η(x), skipping zero-weight classes.
pub fn weighted_worst_value(net: &FlowNetwork, x: &PathFlow, classes: &[ScenarioClass], q: &[f64]) -> f64 {
    classes
        .iter()
        .zip(q)
        .filter(|(_, &w)| w > 0.0)
        .map(|(c, &w)| w * class_worst_value(net, x, c))
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimaxCheck {
    /// max_x Σ q_c min_{η∈Ω_c} val_η(x).
    pub lhs: f64,
    /// min over distributions Q with Q(Ω_c) = q_c of max_x E_Q[val(x)].
    pub rhs: f64,
    pub pass: bool,
}

/// Compares the hybrid optimum against the value of the game in which an
/// adversary picks a scenario distribution with fixed class masses. The
/// adversary's problem is one LP: min Σ u_e y_e subject to
/// Σ_{e∈P} y_e ≥ Σ_ω Q_ω [P misses ω] for every path P, Σ_{ω∈Ω_c} Q_ω = q_c.
pub fn minimax_check(
    net: &FlowNetwork,
    classes: &[ScenarioClass],
    weights: &[f64],
    tolerance: f64,
    limits: &Limits,
) -> Result<MinimaxCheck> {
    let lhs = run_hybrid_oracle(net, classes, weights, limits)?.value;
    let paths = enumerate_simple_paths(net, limits.paths)?;
    let mut lp = LinearProgram::new(Sense::Minimize);
    let y: Vec<usize> = net.arcs.iter().map(|a| lp.add_column(a.capacity, 0.0, f64::INFINITY)).collect();
    let mut budget = limits.scenarios;
    let mut scen: Vec<(usize, Scenario)> = Vec::new();
    for (c, class) in classes.iter().enumerate() {
        let all = class.enumerate(budget).map_err(|_| Error::Overflow {
            what: "scenario",
            limit: limits.scenarios,
        })?;
        budget -= all.len();
        let cols: Vec<(usize, f64)> = all
            .iter()
            .map(|_| (lp.add_column(0.0, 0.0, f64::INFINITY), 1.0))
            .collect();
        lp.add_row(cols.clone(), Relation::Eq, weights[c]);
        scen.extend(all.into_iter().zip(cols).map(|(s, (col, _))| (col, s)));
    }
    for p in &paths {
        let mut coeffs: Vec<(usize, f64)> = p.arcs().iter().map(|&e| (y[e], 1.0)).collect();
        coeffs.extend(scen.iter().filter(|(_, s)| !p.hits(s)).map(|(col, _)| (*col, -1.0)));
        lp.add_row(coeffs, Relation::Ge, 0.0);
    }
    let res = solve_lp(&lp);
    if res.status != Status::Optimal {
        return input_err(format!("adversary LP ended with status {:?}", res.status));
    }
    let rhs = res.objective;
    Ok(MinimaxCheck {
        lhs,
        rhs,
        pass: (lhs - rhs).abs() <= tolerance,
    })
}
