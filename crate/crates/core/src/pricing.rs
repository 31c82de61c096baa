//! Dual separation: find an s-t path whose reduced price
//! 1 - Σ_{e∈P} y_e - Σ_{η∩P≠∅} y_η is positive.
//!
//! Only scenarios with y_η > 0 matter. When there are few of them, every
//! subset of scenarios the path is allowed to hit is tried with one shortest
//! path each; otherwise a branch and bound over the scenario-hit decisions
//! solves one shortest path per node.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::config::{Limits, PATH_PENALTY};
use crate::decompose::path_decompose;
use crate::lp::{solve_mip, LinearProgram, MipOptions, Relation, Sense};
use crate::network::{ArcId, FlowNetwork};
use crate::path::{Path, Scenario};

/// Largest number of priced scenarios handled by subset enumeration.
pub const ENUMERATION_MAX_SCENARIOS: usize = 12;

/// Paths priced at or below this are not returned.
pub const PRICE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DualPrices {
    pub arcs: Vec<f64>,
    /// Scenarios with a positive dual only.
    pub scenarios: Vec<(Scenario, f64)>,
}

impl DualPrices {
    /// Keeps the scenarios whose dual exceeds `tol`; negative noise on arc
    /// duals is clipped to zero.
    pub fn new(arcs: Vec<f64>, scenarios: impl IntoIterator<Item = (Scenario, f64)>, tol: f64) -> Self {
        DualPrices {
            arcs: arcs.into_iter().map(|y| y.max(0.0)).collect(),
            scenarios: scenarios.into_iter().filter(|(_, y)| *y > tol).collect(),
        }
    }

    pub fn reduced_price(&self, path: &Path) -> f64 {
        let arc: f64 = path.arcs().iter().map(|&e| self.arcs[e]).sum();
        let scen: f64 = self
            .scenarios
            .iter()
            .filter(|(s, _)| path.hits(s))
            .map(|(_, y)| y)
            .sum();
        1.0 - arc - scen
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PricingBackend {
    /// Subset enumeration up to the scenario threshold, branching beyond it.
    #[default]
    Auto,
    Enumeration,
    /// Branch and bound on scenario-hit decisions with shortest-path nodes.
    Branching,
    /// LP-based branch and bound on the path integer program.
    Milp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PricedPath {
    pub path: Path,
    /// Unperturbed reduced price.
    pub price: f64,
    pub perturbed: bool,
}

/// Most profitable path under `prices`, if its price is positive.
///
/// With `used_arcs`, each listed arc costs an extra 1e-4 first; when that
/// perturbed problem finds no improving path the plain one is solved.
pub fn price_path(net: &FlowNetwork, prices: &DualPrices, used_arcs: Option<&[bool]>) -> Option<PricedPath> {
    price_path_with(net, prices, used_arcs, PricingBackend::Auto, &Limits::default())
}

pub fn price_path_with(
    net: &FlowNetwork,
    prices: &DualPrices,
    used_arcs: Option<&[bool]>,
    backend: PricingBackend,
    limits: &Limits,
) -> Option<PricedPath> {
    if let Some(used) = used_arcs {
        let costs: Vec<f64> = prices
            .arcs
            .iter()
            .zip(used)
            .map(|(&y, &u)| if u { y + PATH_PENALTY } else { y })
            .collect();
        if let Some(path) = best_path(net, &costs, &prices.scenarios, backend, limits) {
            let price = prices.reduced_price(&path);
            if price > PRICE_TOL {
                return Some(PricedPath {
                    path,
                    price,
                    perturbed: true,
                });
            }
        }
    }
    let path = best_path(net, &prices.arcs, &prices.scenarios, backend, limits)?;
    let price = prices.reduced_price(&path);
    (price > PRICE_TOL).then_some(PricedPath {
        path,
        price,
        perturbed: false,
    })
}

/// Hybrid pricing: duals of every class's scenario rows act together.
pub fn price_path_hybrid(
    net: &FlowNetwork,
    arc_duals: &[f64],
    class_duals: &[Vec<(Scenario, f64)>],
    used_arcs: Option<&[bool]>,
) -> Option<PricedPath> {
    let prices = DualPrices::new(
        arc_duals.to_vec(),
        class_duals.iter().flatten().cloned(),
        0.0,
    );
    price_path(net, &prices, used_arcs)
}

fn best_path(
    net: &FlowNetwork,
    costs: &[f64],
    scenarios: &[(Scenario, f64)],
    backend: PricingBackend,
    limits: &Limits,
) -> Option<Path> {
    match backend {
        PricingBackend::Auto if scenarios.len() <= ENUMERATION_MAX_SCENARIOS => by_enumeration(net, costs, scenarios),
        PricingBackend::Auto | PricingBackend::Branching => by_branching(net, costs, scenarios, limits.nodes),
        PricingBackend::Enumeration => by_enumeration(net, costs, scenarios),
        PricingBackend::Milp => by_milp(net, costs, scenarios, limits.nodes),
    }
}

fn score(costs: &[f64], scenarios: &[(Scenario, f64)], path: &Path) -> f64 {
    let arc: f64 = path.arcs().iter().map(|&e| costs[e]).sum();
    let scen: f64 = scenarios.iter().filter(|(s, _)| path.hits(s)).map(|(_, y)| y).sum();
    1.0 - arc - scen
}

fn better(cand: (&Path, f64), best: Option<&(Path, f64)>) -> bool {
    match best {
        None => true,
        Some((bp, bv)) => cand.1 > bv + 1e-12 || (cand.1 >= bv - 1e-12 && cand.0.arcs() < bp.arcs()),
    }
}

/// For every set A of priced scenarios, arcs of the others are forbidden and
/// a shortest path is found; the best actual price over all sets is optimal
/// because the optimal path avoids exactly the scenarios it does not hit.
fn by_enumeration(net: &FlowNetwork, costs: &[f64], scenarios: &[(Scenario, f64)]) -> Option<Path> {
    let m = scenarios.len();
    let out = net.out_arcs();
    let mut forbidden = vec![false; net.arc_count()];
    let mut best: Option<(Path, f64)> = None;
    for mask in 0u32..(1u32 << m) {
        // bit set = scenario may be hit
        forbidden.iter_mut().for_each(|f| *f = false);
        for (i, (s, _)) in scenarios.iter().enumerate() {
            if mask >> i & 1 == 0 {
                for &e in s.arcs() {
                    forbidden[e] = true;
                }
            }
        }
        if let Some(path) = shortest_path(net, &out, costs, &forbidden) {
            let v = score(costs, scenarios, &path);
            if better((&path, v), best.as_ref()) {
                best = Some((path, v));
            }
        }
    }
    best.map(|(p, _)| p)
}

/// Minimizes g(A) = SP(arcs of scenarios outside A removed) + Σ_{η∈A} y_η
/// over scenario sets A, whose minimum is the best path cost. A node fixes
/// some scenarios in or out of A; the shortest path avoiding the fixed-out
/// scenarios plus the fixed-in duals bounds g below. If that path meets no
/// undecided scenario it solves the node, otherwise the node branches on the
/// heaviest undecided scenario it meets.
fn by_branching(net: &FlowNetwork, costs: &[f64], scenarios: &[(Scenario, f64)], node_limit: usize) -> Option<Path> {
    #[derive(Clone)]
    struct Node {
        fixed_in: Vec<bool>,
        fixed_out: Vec<bool>,
        in_cost: f64,
    }
    let m = scenarios.len();
    let out = net.out_arcs();
    let mut best: Option<(Path, f64)> = None;
    let mut stack = vec![Node {
        fixed_in: vec![false; m],
        fixed_out: vec![false; m],
        in_cost: 0.0,
    }];
    let mut forbidden = vec![false; net.arc_count()];
    let mut nodes = 0;
    while let Some(node) = stack.pop() {
        nodes += 1;
        if nodes > node_limit {
            log::warn!("pricing branch and bound hit its node limit");
            break;
        }
        forbidden.iter_mut().for_each(|f| *f = false);
        for (i, (s, _)) in scenarios.iter().enumerate() {
            if node.fixed_out[i] {
                for &e in s.arcs() {
                    forbidden[e] = true;
                }
            }
        }
        let Some(path) = shortest_path(net, &out, costs, &forbidden) else {
            continue;
        };
        let arc_cost: f64 = path.arcs().iter().map(|&e| costs[e]).sum();
        let bound = 1.0 - arc_cost - node.in_cost;
        let v = score(costs, scenarios, &path);
        if better((&path, v), best.as_ref()) {
            best = Some((path.clone(), v));
        }
        if let Some((_, bv)) = &best {
            if bound <= bv + 1e-12 {
                continue;
            }
        }
        let pick = scenarios
            .iter()
            .enumerate()
            .filter(|(i, (s, _))| !node.fixed_in[*i] && !node.fixed_out[*i] && path.hits(s))
            .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i);
        let Some(i) = pick else { continue };
        let mut with = node.clone();
        with.fixed_in[i] = true;
        with.in_cost += scenarios[i].1;
        let mut without = node;
        without.fixed_out[i] = true;
        stack.push(with);
        stack.push(without);
    }
    best.map(|(p, _)| p)
}

/// Dijkstra over nonnegative costs; ties resolve to the lowest arc index.
pub(crate) fn shortest_path(
    net: &FlowNetwork,
    out: &[Vec<ArcId>],
    costs: &[f64],
    forbidden: &[bool],
) -> Option<Path> {
    let n = net.node_count;
    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<ArcId>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[net.source] = 0.0;
    heap.push(Reverse((Key(0.0), net.source)));
    while let Some(Reverse((Key(d), v))) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        if v == net.sink {
            break;
        }
        for &e in &out[v] {
            if forbidden[e] {
                continue;
            }
            let w = net.arcs[e].head;
            if done[w] {
                continue;
            }
            let nd = d + costs[e].max(0.0);
            if nd < dist[w] {
                dist[w] = nd;
                pred[w] = Some(e);
                heap.push(Reverse((Key(nd), w)));
            }
        }
    }
    if !done[net.sink] {
        return None;
    }
    let mut arcs = Vec::new();
    let mut v = net.sink;
    while v != net.source {
        let e = pred[v]?;
        arcs.push(e);
        v = net.arcs[e].tail;
    }
    arcs.reverse();
    Some(Path::from_arcs_unchecked(arcs))
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Key(f64);
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// min Σ c_e z_e + Σ y_η z_η over unit s-t flows z_e with z_e ≤ z_η for
/// e ∈ η, branching only on z_η. With z_η fixed the remaining LP is a
/// shortest path problem, so its vertices are paths.
fn by_milp(net: &FlowNetwork, costs: &[f64], scenarios: &[(Scenario, f64)], node_limit: usize) -> Option<Path> {
    let mut lp = LinearProgram::new(Sense::Minimize);
    let ze: Vec<usize> = costs.iter().map(|&c| lp.add_column(c.max(0.0), 0.0, 1.0)).collect();
    let zs: Vec<usize> = scenarios
        .iter()
        .map(|(_, y)| lp.add_integer_column(*y, 0.0, 1.0))
        .collect();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); net.node_count];
    for (e, a) in net.arcs.iter().enumerate() {
        rows[a.tail].push((ze[e], 1.0));
        rows[a.head].push((ze[e], -1.0));
    }
    for (v, coeffs) in rows.into_iter().enumerate() {
        if v == net.sink {
            continue;
        }
        let rhs = if v == net.source { 1.0 } else { 0.0 };
        lp.add_row(coeffs, Relation::Eq, rhs);
    }
    for ((s, _), &c) in scenarios.iter().zip(&zs) {
        for &e in s.arcs() {
            lp.add_row(vec![(ze[e], 1.0), (c, -1.0)], Relation::Le, 0.0);
        }
    }
    let opts = MipOptions {
        branch_set: Some(zs.clone()),
        node_limit,
        ..MipOptions::default()
    };
    let res = solve_mip(&lp, &opts);
    if res.primal.is_empty() || !res.objective.is_finite() {
        return None;
    }
    let flow: Vec<f64> = ze.iter().map(|&c| res.primal[c]).collect();
    let x = path_decompose(net, &flow, 1e-9).ok()?;
    let mut best: Option<(Path, f64)> = None;
    for p in x.paths() {
        let v = score(costs, scenarios, p);
        if better((p, v), best.as_ref()) {
            best = Some((p.clone(), v));
        }
    }
    best.map(|(p, _)| p)
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
    fn zero_prices_any_path() {
        let net = parallel(2);
        let prices = DualPrices::new(vec![0.0; 2], [], 0.0);
        let p = price_path(&net, &prices, None).unwrap();
        assert_eq!(p.price, 1.0);
    }

    #[test]
    fn fully_priced_arc_not_improving() {
        let net = parallel(1);
        let prices = DualPrices::new(vec![1.0], [], 0.0);
        assert!(price_path(&net, &prices, None).is_none());
    }

    #[test]
    fn scenario_dual_steers_path() {
        let net = parallel(2);
        let eta = Scenario::new(&net, vec![0]).unwrap();
        let prices = DualPrices::new(vec![0.0; 2], [(eta, 0.6)], 0.0);
        for backend in [PricingBackend::Enumeration, PricingBackend::Branching, PricingBackend::Milp] {
            let p = price_path_with(&net, &prices, None, backend, &Limits::default()).unwrap();
            assert_eq!(p.path.arcs(), &[1]);
            assert_eq!(p.price, 1.0);
        }
        let via0 = Path::new(&net, vec![0]).unwrap();
        assert!((prices.reduced_price(&via0) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn penalty_prefers_unused_arcs() {
        let net = parallel(2);
        let prices = DualPrices::new(vec![0.0; 2], [], 0.0);
        let used = [true, false];
        let p = price_path(&net, &prices, Some(&used)).unwrap();
        assert_eq!(p.path.arcs(), &[1]);
        assert!(p.perturbed);
        assert_eq!(p.price, 1.0);
    }

    #[test]
    fn penalty_keeps_plain_price() {
        let net = parallel(1);
        let prices = DualPrices::new(vec![0.99995], [], 0.0);
        // The penalized path is still judged by its plain price.
        let p = price_path(&net, &prices, Some(&[true])).unwrap();
        assert!((p.price - 0.00005).abs() < 1e-12);
        let prices = DualPrices::new(vec![1.0], [], 0.0);
        assert!(price_path(&net, &prices, Some(&[true])).is_none());
    }

    #[test]
    fn hybrid_classes_add_up() {
        let mut net = FlowNetwork::new(3, 0, 2);
        net.add_arc(0, 1, 1.0, false);
        net.add_arc(1, 2, 1.0, false);
        net.add_arc(0, 2, 1.0, false);
        let a = Scenario::new(&net, vec![0]).unwrap();
        let b = Scenario::new(&net, vec![2]).unwrap();
        let p = price_path_hybrid(
            &net,
            &[0.0, 0.1, 0.2],
            &[vec![(a, 0.5)], vec![(b, 0.1)]],
            None,
        )
        .unwrap();
        // via 0,1: 1 - 0.1 - 0.5 = 0.4; via 2: 1 - 0.2 - 0.1 = 0.7
        assert_eq!(p.path.arcs(), &[2]);
        assert!((p.price - 0.7).abs() < 1e-12);
    }
}
