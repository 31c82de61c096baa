//! Exhaustive enumeration used by the oracles: simple s-t paths and
//! scenarios of a fixed size.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::network::{ArcId, FlowNetwork};
use crate::path::{Path, Scenario};

/// All simple s-t paths in lexicographic order of their arc sequences.
/// Fails instead of truncating when more than `limit` paths exist.
pub fn enumerate_simple_paths(net: &FlowNetwork, limit: usize) -> Result<Vec<Path>> {
    let out = net.out_arcs();
    let mut paths = Vec::new();
    let mut on_path = vec![false; net.node_count];
    let mut arcs: Vec<ArcId> = Vec::new();
    // Stack of (node, next out-arc position).
    let mut stack: Vec<(usize, usize)> = vec![(net.source, 0)];
    on_path[net.source] = true;
    while let Some(&mut (u, ref mut pos)) = stack.last_mut() {
        if *pos >= out[u].len() {
            stack.pop();
            on_path[u] = false;
            arcs.pop();
            continue;
        }
        let e = out[u][*pos];
        *pos += 1;
        let v = net.arcs[e].head;
        if on_path[v] {
            continue;
        }
        if v == net.sink {
            if paths.len() == limit {
                return Err(Error::Overflow { what: "simple path", limit });
            }
            let mut p = arcs.clone();
            p.push(e);
            paths.push(Path::from_arcs_unchecked(p));
            continue;
        }
        on_path[v] = true;
        arcs.push(e);
        stack.push((v, 0));
    }
    Ok(paths)
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Number of scenarios of size `k` (all interdictable arcs when fewer exist).
pub fn scenario_count(net: &FlowNetwork, k: usize) -> u128 {
    let m = net.interdictable().len();
    if k >= m {
        1
    } else {
        binomial(m, k)
    }
}

/// Every scenario of exactly `k` interdictable arcs, lexicographic. When
/// fewer than `k` arcs are interdictable the single all-arcs scenario is
/// returned.
pub fn enumerate_scenarios(net: &FlowNetwork, k: usize, limit: usize) -> Result<Vec<Scenario>> {
    let pool = net.interdictable();
    if scenario_count(net, k) > limit as u128 {
        return Err(Error::Overflow { what: "scenario", limit });
    }
    if k >= pool.len() {
        return Ok(vec![Scenario::from_sorted_unchecked(pool)]);
    }
    Ok(pool
        .into_iter()
        .combinations(k)
        .map(Scenario::from_sorted_unchecked)
        .collect())
}
