//! Path decomposition of arc flows by bottleneck peeling.

use crate::error::{input_err, Result};
use crate::network::FlowNetwork;
use crate::path::{Path, PathFlow};

/// Splits an s-t arc flow into at most |E| path flows. Flow on cycles is
/// cancelled and dropped.
pub fn path_decompose(net: &FlowNetwork, arc_flow: &[f64], tol: f64) -> Result<PathFlow> {
    if arc_flow.len() != net.arc_count() {
        return input_err("arc flow length does not match the network");
    }
    if arc_flow.iter().any(|f| !f.is_finite() || *f < -tol) {
        return input_err("arc flow has a negative or non-finite entry");
    }
    let mut balance = vec![0.0; net.node_count];
    for (a, &f) in net.arcs.iter().zip(arc_flow) {
        balance[a.tail] -= f;
        balance[a.head] += f;
    }
    for (v, b) in balance.iter().enumerate() {
        if v != net.source && v != net.sink && b.abs() > tol {
            return input_err(format!("flow conservation violated at node {v} by {b}"));
        }
    }

    let mut flow: Vec<f64> = arc_flow
        .iter()
        .map(|&f| if f > tol { f } else { 0.0 })
        .collect();
    let out = net.out_arcs();
    let mut result = PathFlow::new();
    let mut pos_in_walk = vec![usize::MAX; net.node_count];

    loop {
        // Walk from the source along positive arcs, cancelling any cycle met.
        let mut walk: Vec<usize> = Vec::new();
        let mut nodes = vec![net.source];
        pos_in_walk[net.source] = 0;
        let mut u = net.source;
        let mut exhausted = false;
        while u != net.sink {
            let Some(&e) = out[u].iter().find(|&&e| flow[e] > tol) else {
                if u == net.source {
                    exhausted = true;
                    break;
                }
                // Dead end left by rounding: drop the arc that led here.
                let last = walk.pop().unwrap();
                flow[last] = 0.0;
                pos_in_walk[u] = usize::MAX;
                nodes.pop();
                u = *nodes.last().unwrap();
                continue;
            };
            let v = net.arcs[e].head;
            if pos_in_walk[v] != usize::MAX {
                let start = pos_in_walk[v];
                let mut cycle = walk.split_off(start);
                cycle.push(e);
                let b = cycle.iter().map(|&c| flow[c]).fold(f64::INFINITY, f64::min);
                for &c in &cycle {
                    flow[c] -= b;
                    if flow[c] <= tol {
                        flow[c] = 0.0;
                    }
                }
                for &w in &nodes[start + 1..] {
                    pos_in_walk[w] = usize::MAX;
                }
                nodes.truncate(start + 1);
                u = v;
                continue;
            }
            walk.push(e);
            pos_in_walk[v] = nodes.len();
            nodes.push(v);
            u = v;
        }
        for &w in &nodes {
            pos_in_walk[w] = usize::MAX;
        }
        if exhausted {
            break;
        }
        let b = walk.iter().map(|&e| flow[e]).fold(f64::INFINITY, f64::min);
        for &e in &walk {
            flow[e] -= b;
            if flow[e] <= tol {
                flow[e] = 0.0;
            }
        }
        result.add(Path::from_arcs_unchecked(walk), b);
    }
    Ok(result)
}
