//! Scenario classes: the sets Ω over which a worst case is taken.
//!
//! A class is a product of tiers; each tier names a pool of interdictable
//! arcs and how many of them a scenario removes. The plain robust model uses
//! one tier over every interdictable arc.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::enumerate::binomial;
use crate::error::{input_err, Error, Result};
use crate::network::{ArcId, FlowNetwork};
use crate::path::Scenario;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tier {
    pub arcs: Vec<ArcId>,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioClass {
    tiers: Vec<Tier>,
}

impl ScenarioClass {
    /// All scenarios of `k` interdictable arcs. When fewer than `k` arcs are
    /// interdictable the class holds only the scenario removing all of them.
    pub fn cardinality(net: &FlowNetwork, k: usize) -> Self {
        let arcs = net.interdictable();
        let count = k.min(arcs.len());
        ScenarioClass {
            tiers: vec![Tier { arcs, count }],
        }
    }

    /// Scenarios removing `j` arcs of `regular` and `k` arcs of `exposed`.
    pub fn two_tier(
        net: &FlowNetwork,
        regular: Vec<ArcId>,
        j: usize,
        exposed: Vec<ArcId>,
        k: usize,
    ) -> Result<Self> {
        let mut all: Vec<ArcId> = regular.iter().chain(&exposed).copied().collect();
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return input_err("regular and exposed arc sets overlap");
        }
        for &e in &all {
            match net.arcs.get(e) {
                None => return input_err(format!("unknown arc {e}")),
                Some(a) if a.safe => return input_err(format!("arc {e} is safe")),
                _ => {}
            }
        }
        if j > regular.len() || k > exposed.len() {
            return input_err("tier count exceeds its arc pool");
        }
        let mut regular = regular;
        let mut exposed = exposed;
        regular.sort_unstable();
        exposed.sort_unstable();
        Ok(ScenarioClass {
            tiers: vec![
                Tier {
                    arcs: regular,
                    count: j,
                },
                Tier {
                    arcs: exposed,
                    count: k,
                },
            ],
        })
    }

    pub fn tiers(&self) -> &[Tier] {
        &self.tiers
    }

    /// Number of arcs in every scenario of the class.
    pub fn size(&self) -> usize {
        self.tiers.iter().map(|t| t.count).sum()
    }

    pub fn count(&self) -> u128 {
        self.tiers
            .iter()
            .map(|t| binomial(t.arcs.len(), t.count))
            .fold(1u128, |a, b| a.saturating_mul(b))
    }

    pub fn contains(&self, scenario: &Scenario) -> bool {
        let mut used = 0;
        for t in &self.tiers {
            let hit = scenario
                .arcs()
                .iter()
                .filter(|e| t.arcs.binary_search(e).is_ok())
                .count();
            if hit != t.count {
                return false;
            }
            used += hit;
        }
        used == scenario.len()
    }

    pub fn enumerate(&self, limit: usize) -> Result<Vec<Scenario>> {
        if self.count() > limit as u128 {
            return Err(Error::Overflow {
                what: "scenario",
                limit,
            });
        }
        let per_tier: Vec<Vec<Vec<ArcId>>> = self
            .tiers
            .iter()
            .map(|t| t.arcs.iter().copied().combinations(t.count).collect())
            .collect();
        let mut out: Vec<Scenario> = per_tier
            .iter()
            .multi_cartesian_product()
            .map(|parts| {
                let mut arcs: Vec<ArcId> = parts.into_iter().flatten().copied().collect();
                arcs.sort_unstable();
                Scenario::from_sorted_unchecked(arcs)
            })
            .collect();
        if self.tiers.is_empty() {
            out = vec![Scenario::from_sorted_unchecked(Vec::new())];
        }
        out.sort();
        Ok(out)
    }

    /// Largest total capacity a scenario of the class removes.
    pub fn lambda_star(&self, net: &FlowNetwork) -> f64 {
        self.tiers
            .iter()
            .map(|t| {
                let mut caps: Vec<f64> = t.arcs.iter().map(|&e| net.arcs[e].capacity).collect();
                caps.sort_by(|a, b| b.total_cmp(a));
                caps.iter().take(t.count).sum::<f64>()
            })
            .sum()
    }
}
