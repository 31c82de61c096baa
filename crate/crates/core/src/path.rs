//! Paths, path flows and scenarios, and the surviving/destroyed flow values.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{input_err, Result};
use crate::network::{ArcId, FlowNetwork};

/// A simple s-t path given by its arcs in route order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Path {
    arcs: Vec<ArcId>,
}

impl Path {
    /// Checks that `arcs` chain from source to sink without revisiting a node.
    pub fn new(net: &FlowNetwork, arcs: Vec<ArcId>) -> Result<Path> {
        if arcs.is_empty() {
            return input_err("empty path");
        }
        let mut seen = vec![false; net.node_count];
        let mut at = net.source;
        seen[at] = true;
        for &e in &arcs {
            let Some(arc) = net.arcs.get(e) else {
                return input_err(format!("path uses unknown arc {e}"));
            };
            if arc.tail != at {
                return input_err(format!("arc {e} does not continue the path"));
            }
            at = arc.head;
            if seen[at] {
                return input_err(format!("path revisits node {at}"));
            }
            seen[at] = true;
        }
        if at != net.sink {
            return input_err("path does not end at the sink");
        }
        Ok(Path { arcs })
    }

    pub(crate) fn from_arcs_unchecked(arcs: Vec<ArcId>) -> Path {
        Path { arcs }
    }

    pub fn arcs(&self) -> &[ArcId] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn contains(&self, arc: ArcId) -> bool {
        self.arcs.contains(&arc)
    }

    pub fn hits(&self, scenario: &Scenario) -> bool {
        self.arcs.iter().any(|e| scenario.contains(*e))
    }
}

/// A set of interdictable arcs removed together.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Scenario {
    arcs: Vec<ArcId>,
}

impl Scenario {
    /// Validates indices and safe flags; duplicates are rejected.
    pub fn new(net: &FlowNetwork, mut arcs: Vec<ArcId>) -> Result<Scenario> {
        arcs.sort_unstable();
        for w in arcs.windows(2) {
            if w[0] == w[1] {
                return input_err(format!("scenario repeats arc {}", w[0]));
            }
        }
        for &e in &arcs {
            match net.arcs.get(e) {
                None => return input_err(format!("scenario uses unknown arc {e}")),
                Some(a) if a.safe => return input_err(format!("scenario interdicts safe arc {e}")),
                Some(_) => {}
            }
        }
        Ok(Scenario { arcs })
    }

    pub(crate) fn from_sorted_unchecked(arcs: Vec<ArcId>) -> Scenario {
        debug_assert!(arcs.windows(2).all(|w| w[0] < w[1]));
        Scenario { arcs }
    }

    pub fn arcs(&self) -> &[ArcId] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn contains(&self, arc: ArcId) -> bool {
        self.arcs.binary_search(&arc).is_ok()
    }
}

/// Nonnegative flow rates on s-t paths. Zero-rate entries are dropped.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PathFlow {
    entries: BTreeMap<Path, f64>,
}

impl PathFlow {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `rate` to the path's current rate.
    pub fn add(&mut self, path: Path, rate: f64) {
        if rate <= 0.0 {
            return;
        }
        *self.entries.entry(path).or_insert(0.0) += rate;
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Path, f64)>) -> Self {
        let mut flow = PathFlow::new();
        for (p, r) in pairs {
            flow.add(p, r);
        }
        flow
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Path, f64)> {
        self.entries.iter().map(|(p, &r)| (p, r))
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.entries.keys()
    }

    pub fn rate(&self, path: &Path) -> f64 {
        self.entries.get(path).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total value |x|.
    pub fn value(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Per-arc load x_e for a network with `arc_count` arcs.
    pub fn arc_loads(&self, arc_count: usize) -> Vec<f64> {
        let mut load = vec![0.0; arc_count];
        for (p, r) in self.iter() {
            for &e in p.arcs() {
                load[e] += r;
            }
        }
        load
    }

    /// Largest load over interdictable arcs.
    pub fn max_interdictable_load(&self, net: &FlowNetwork) -> f64 {
        let load = self.arc_loads(net.arc_count());
        net.interdictable()
            .into_iter()
            .map(|e| load[e])
            .fold(0.0, f64::max)
    }

    /// Checks capacity feasibility within `tol` and that every path is valid.
    pub fn check_feasible(&self, net: &FlowNetwork, tol: f64) -> Result<()> {
        for p in self.paths() {
            Path::new(net, p.arcs().to_vec())?;
        }
        let load = self.arc_loads(net.arc_count());
        for (e, (l, a)) in load.iter().zip(&net.arcs).enumerate() {
            if *l > a.capacity + tol {
                return input_err(format!(
                    "arc {e} carries {l} above its capacity {}",
                    a.capacity
                ));
            }
        }
        Ok(())
    }
}

/// Flow on paths that avoid every arc of `eta`.
pub fn val_eta(x: &PathFlow, eta: &Scenario) -> f64 {
    x.iter().filter(|(p, _)| !p.hits(eta)).map(|(_, r)| r).sum()
}

/// Flow on paths that meet `eta`.
pub fn destroyed(x: &PathFlow, eta: &Scenario) -> f64 {
    x.iter().filter(|(p, _)| p.hits(eta)).map(|(_, r)| r).sum()
}
