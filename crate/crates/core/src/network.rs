//! Directed multigraph with arc capacities and safe-arc flags.

use serde::{Deserialize, Serialize};

use crate::error::{input_err, Result};

pub type NodeId = usize;
pub type ArcId = usize;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub tail: NodeId,
    pub head: NodeId,
    pub capacity: f64,
    #[serde(default)]
    pub safe: bool,
}

/// A flow network. Arcs are identified by their position in `arcs`; parallel
/// arcs are allowed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowNetwork {
    pub node_count: usize,
    pub source: NodeId,
    pub sink: NodeId,
    pub arcs: Vec<Arc>,
}

impl FlowNetwork {
    pub fn new(node_count: usize, source: NodeId, sink: NodeId) -> Self {
        FlowNetwork {
            node_count,
            source,
            sink,
            arcs: Vec::new(),
        }
    }

    pub fn add_arc(&mut self, tail: NodeId, head: NodeId, capacity: f64, safe: bool) -> ArcId {
        self.arcs.push(Arc {
            tail,
            head,
            capacity,
            safe,
        });
        self.arcs.len() - 1
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count == 0 {
            return input_err("network has no nodes");
        }
        if self.source >= self.node_count || self.sink >= self.node_count {
            return input_err("source or sink out of range");
        }
        if self.source == self.sink {
            return input_err("source and sink coincide");
        }
        for (i, a) in self.arcs.iter().enumerate() {
            if a.tail >= self.node_count || a.head >= self.node_count {
                return input_err(format!("arc {i} has an endpoint out of range"));
            }
            if !a.capacity.is_finite() || a.capacity < 0.0 {
                return input_err(format!("arc {i} has invalid capacity {}", a.capacity));
            }
        }
        Ok(())
    }

    /// Indices of arcs that may appear in a scenario, ascending.
    pub fn interdictable(&self) -> Vec<ArcId> {
        (0..self.arcs.len()).filter(|&e| !self.arcs[e].safe).collect()
    }

    pub fn capacities(&self) -> Vec<f64> {
        self.arcs.iter().map(|a| a.capacity).collect()
    }

    pub fn total_capacity(&self) -> f64 {
        self.arcs.iter().map(|a| a.capacity).sum()
    }

    /// Outgoing arc ids per node, in arc index order.
    pub fn out_arcs(&self) -> Vec<Vec<ArcId>> {
        let mut out = vec![Vec::new(); self.node_count];
        for (i, a) in self.arcs.iter().enumerate() {
            out[a.tail].push(i);
        }
        out
    }

    /// Copy of the network with the given arcs removed from consideration by
    /// zeroing their capacity. Arc indices are preserved.
    pub fn with_arcs_removed(&self, removed: &[ArcId]) -> FlowNetwork {
        let mut net = self.clone();
        for &e in removed {
            net.arcs[e].capacity = 0.0;
        }
        net
    }
}
