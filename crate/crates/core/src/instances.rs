//! Instance generators. Every random draw comes from a ChaCha8 generator
//! seeded with the caller's seed, with a fixed stream number per kind of
//! draw, so instances are reproducible across platforms.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::{input_err, Result};
use crate::network::{FlowNetwork, NodeId};

/// Stream numbers per draw site.
mod stream {
    pub const P2_BUNDLE_SIZE: u64 = 1;
    pub const P2_CAPACITY: u64 = 2;
    pub const RMAT_TOPOLOGY: u64 = 3;
    pub const RMAT_CAPACITY: u64 = 4;
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Nodes s, v, t: `n` parallel s→v arcs of capacity `big_m` and
/// (n-1)·big_m parallel unit arcs v→t, all interdictable.
pub fn gen_p1(big_m: usize, n: usize) -> Result<FlowNetwork> {
    if big_m == 0 || n == 0 {
        return input_err("P1 needs M >= 1 and n >= 1");
    }
    let mut net = FlowNetwork::new(3, 0, 2);
    for _ in 0..n {
        net.add_arc(0, 1, big_m as f64, false);
    }
    for _ in 0..(n - 1) * big_m {
        net.add_arc(1, 2, 1.0, false);
    }
    Ok(net)
}

/// Series of `n` nodes; consecutive nodes are joined by m0 + Poisson(m0)
/// parallel arcs whose capacities grow by (|ε|+1)², ε standard normal,
/// starting from 0.
pub fn gen_p2(n: usize, m0: usize, seed: u64) -> Result<FlowNetwork> {
    if n < 2 || m0 == 0 {
        return input_err("P2 needs n >= 2 and m0 >= 1");
    }
    let poisson = Poisson::new(m0 as f64).map_err(|e| crate::Error::Input(e.to_string()))?;
    let mut sizes = rng(seed, stream::P2_BUNDLE_SIZE);
    let mut caps = rng(seed, stream::P2_CAPACITY);
    let mut net = FlowNetwork::new(n, 0, n - 1);
    for j in 0..n - 1 {
        let extra: f64 = poisson.sample(&mut sizes);
        let count = m0 + extra as usize;
        let mut u = 0.0;
        for _ in 0..count {
            let eps: f64 = StandardNormal.sample(&mut caps);
            u += (eps.abs() + 1.0).powi(2);
            net.add_arc(j, j + 1, u, false);
        }
    }
    Ok(net)
}

/// Chain of `n` blocks. Block i runs from node 2i to node 2i+2 through a
/// middle node: a safe arc of capacity `m` and an interdictable arc of
/// capacity `big_m` into the middle node, then m + big_m unit arcs out.
pub fn gen_p3(n: usize, m: usize, big_m: usize) -> Result<FlowNetwork> {
    if n == 0 || m == 0 || big_m == 0 {
        return input_err("P3 needs n, m, M >= 1");
    }
    let mut net = FlowNetwork::new(2 * n + 1, 0, 2 * n);
    for i in 0..n {
        let (a, w, b) = (2 * i, 2 * i + 1, 2 * i + 2);
        net.add_arc(a, w, m as f64, true);
        net.add_arc(a, w, big_m as f64, false);
        for _ in 0..m + big_m {
            net.add_arc(w, b, 1.0, false);
        }
    }
    Ok(net)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RmatParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RmatParams {
    pub const RMAT_A: RmatParams = RmatParams { a: 0.5, b: 0.2, c: 0.2, d: 0.1 };
    pub const UNIFORM: RmatParams = RmatParams { a: 0.25, b: 0.25, c: 0.25, d: 0.25 };
}

/// Recursive-matrix random graph with `arcs` distinct arcs and no loops.
///
/// Node counts that are not powers of two are drawn on the next power of two
/// and out-of-range endpoints are redrawn. The node of largest out-degree is
/// the source, the other node of largest in-degree the sink (lowest index on
/// ties); arcs touching either are safe. Capacities are uniform on (0, 1).
pub fn gen_rmat(nodes: usize, arcs: usize, p: RmatParams, seed: u64) -> Result<FlowNetwork> {
    let parts = [p.a, p.b, p.c, p.d];
    if parts.iter().any(|v| !(0.0..=1.0).contains(v)) || (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return input_err("R-MAT parameters must be nonnegative and sum to 1");
    }
    if nodes < 2 {
        return input_err("R-MAT needs at least 2 nodes");
    }
    if arcs as u128 > nodes as u128 * (nodes as u128 - 1) {
        return input_err("more arcs requested than distinct node pairs");
    }
    let levels = nodes.next_power_of_two().trailing_zeros();
    let mut topo = rng(seed, stream::RMAT_TOPOLOGY);
    let mut seen = HashSet::with_capacity(arcs);
    let mut pairs = Vec::with_capacity(arcs);
    while pairs.len() < arcs {
        let (mut u, mut v) = (0usize, 0usize);
        for _ in 0..levels {
            let r: f64 = topo.random();
            let (du, dv) = if r < p.a {
                (0, 0)
            } else if r < p.a + p.b {
                (0, 1)
            } else if r < p.a + p.b + p.c {
                (1, 0)
            } else {
                (1, 1)
            };
            u = 2 * u + du;
            v = 2 * v + dv;
        }
        if u >= nodes || v >= nodes || u == v || !seen.insert((u, v)) {
            continue;
        }
        pairs.push((u, v));
    }
    let mut outdeg = vec![0usize; nodes];
    let mut indeg = vec![0usize; nodes];
    for &(u, v) in &pairs {
        outdeg[u] += 1;
        indeg[v] += 1;
    }
    let source = argmax(&outdeg, None);
    let sink = argmax(&indeg, Some(source));
    let mut caps = rng(seed, stream::RMAT_CAPACITY);
    let mut net = FlowNetwork::new(nodes, source, sink);
    for (u, v) in pairs {
        let cap = loop {
            let c: f64 = caps.random();
            if c > 0.0 {
                break c;
            }
        };
        let safe = [u, v].iter().any(|&x| x == source || x == sink);
        net.add_arc(u, v, cap, safe);
    }
    Ok(net)
}

fn argmax(deg: &[usize], skip: Option<NodeId>) -> NodeId {
    let mut best = usize::MAX;
    for (v, &d) in deg.iter().enumerate() {
        if Some(v) == skip {
            continue;
        }
        if best == usize::MAX || d > deg[best] {
            best = v;
        }
    }
    best
}

/// Adds a supersource joined to every source and a supersink joined from
/// every sink, by safe arcs whose capacity is the terminal's total incident
/// capacity.
pub fn add_supersource_sink(net: &FlowNetwork, sources: &[NodeId], sinks: &[NodeId]) -> Result<FlowNetwork> {
    if sources.is_empty() || sinks.is_empty() {
        return input_err("terminal lists must be nonempty");
    }
    if let Some(v) = sources.iter().chain(sinks).find(|&&v| v >= net.node_count) {
        return input_err(format!("terminal {v} is not a node"));
    }
    let n = net.node_count;
    let mut out = FlowNetwork::new(n + 2, n, n + 1);
    for a in &net.arcs {
        out.add_arc(a.tail, a.head, a.capacity, a.safe);
    }
    for &s in sources {
        let cap: f64 = net.arcs.iter().filter(|a| a.tail == s).map(|a| a.capacity).sum();
        out.add_arc(n, s, cap, true);
    }
    for &t in sinks {
        let cap: f64 = net.arcs.iter().filter(|a| a.head == t).map(|a| a.capacity).sum();
        out.add_arc(t, n + 1, cap, true);
    }
    Ok(out)
}
