//! Primal separation: for a fixed path flow, find the scenario that destroys
//! the most flow. This is a weighted maximum coverage problem: each arc covers
//! the paths through it, and a scenario picks arcs to maximize covered rate.

use crate::classes::ScenarioClass;
use crate::enumerate::scenario_count;
use crate::error::{Error, Result};
use crate::lp::{solve_lp, solve_mip, LinearProgram, MipOptions, Relation, Sense, Status};
use crate::maxflow::max_flow;
use crate::network::{ArcId, FlowNetwork};
use crate::path::{destroyed, PathFlow, Scenario};

/// Scenario sets up to this size are searched by plain enumeration.
const ENUMERATION_LIMIT: u128 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Backend {
    /// Depth-first search over arc subsets in lexicographic order, bounded by
    /// the sum of the best remaining marginal gains.
    #[default]
    Combinatorial,
    /// The coverage integer program solved by LP-based branch and bound.
    Milp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Separation {
    pub scenario: Scenario,
    /// Unperturbed destroyed flow of `scenario`.
    pub destroyed: f64,
    /// Whether the penalized model produced the scenario.
    pub perturbed: bool,
}

/// Penalizes arcs interdicted by earlier scenarios; only a scenario that still
/// destroys more than `lambda` counts as a success of the penalized model.
#[derive(Clone, Copy, Debug)]
pub struct Perturbation<'a> {
    pub previous: &'a [Scenario],
    pub lambda: f64,
}

struct Coverage {
    weights: Vec<f64>,
    paths_of_arc: Vec<Vec<usize>>,
    total: f64,
}

impl Coverage {
    fn new(x: &PathFlow, arc_count: usize) -> Self {
        let mut weights = Vec::with_capacity(x.len());
        let mut paths_of_arc = vec![Vec::new(); arc_count];
        for (i, (p, r)) in x.iter().enumerate() {
            weights.push(r);
            for &e in p.arcs() {
                paths_of_arc[e].push(i);
            }
        }
        let total = weights.iter().sum();
        Coverage {
            weights,
            paths_of_arc,
            total,
        }
    }

    fn tol(&self) -> f64 {
        1e-12 * self.total.max(1.0)
    }

    fn marginal(&self, e: ArcId, hits: &[u32]) -> f64 {
        self.paths_of_arc[e]
            .iter()
            .filter(|&&p| hits[p] == 0)
            .map(|&p| self.weights[p])
            .sum()
    }

    fn add(&self, e: ArcId, hits: &mut [u32]) -> f64 {
        let mut gain = 0.0;
        for &p in &self.paths_of_arc[e] {
            if hits[p] == 0 {
                gain += self.weights[p];
            }
            hits[p] += 1;
        }
        gain
    }

    fn remove(&self, e: ArcId, hits: &mut [u32]) {
        for &p in &self.paths_of_arc[e] {
            hits[p] -= 1;
        }
    }

    fn covered(&self, arcs: &[ArcId]) -> f64 {
        let mut hits = vec![0u32; self.weights.len()];
        arcs.iter().map(|&e| self.add(e, &mut hits)).sum()
    }
}

fn penalties(net: &FlowNetwork, class: &ScenarioClass, previous: &[Scenario]) -> Vec<f64> {
    let mut p = vec![0.0; net.arc_count()];
    let k = class.size();
    if k == 0 {
        return p;
    }
    for s in previous {
        for &e in s.arcs() {
            p[e] = 1.0 / k as f64;
        }
    }
    p
}

/// Greedy maximum coverage: `class.size()` picks, each maximizing the
/// marginal destroyed flow (ties to the lowest arc index).
pub fn greedy_coverage(net: &FlowNetwork, x: &PathFlow, class: &ScenarioClass) -> Scenario {
    let cov = Coverage::new(x, net.arc_count());
    let zero = vec![0.0; net.arc_count()];
    Scenario::from_sorted_unchecked(greedy(&cov, class, &zero))
}

fn greedy(cov: &Coverage, class: &ScenarioClass, pen: &[f64]) -> Vec<ArcId> {
    let mut hits = vec![0u32; cov.weights.len()];
    let mut quota: Vec<usize> = class.tiers().iter().map(|t| t.count).collect();
    let mut chosen: Vec<ArcId> = Vec::new();
    let mut taken = vec![false; pen.len()];
    loop {
        let mut best: Option<(ArcId, f64, usize)> = None;
        for (t, tier) in class.tiers().iter().enumerate() {
            if quota[t] == 0 {
                continue;
            }
            for &e in &tier.arcs {
                if taken[e] {
                    continue;
                }
                let g = cov.marginal(e, &hits) - pen[e];
                let better = match best {
                    None => true,
                    Some((be, bg, _)) => g > bg + cov.tol() || (g >= bg - cov.tol() && e < be),
                };
                if better {
                    best = Some((e, g, t));
                }
            }
        }
        let Some((e, _, t)) = best else { break };
        cov.add(e, &mut hits);
        taken[e] = true;
        quota[t] -= 1;
        chosen.push(e);
    }
    chosen.sort_unstable();
    chosen
}

struct Search<'a> {
    cov: &'a Coverage,
    class: &'a ScenarioClass,
    pen: &'a [f64],
    hits: Vec<u32>,
    chosen: Vec<ArcId>,
    best_value: f64,
    best: Option<Vec<ArcId>>,
    nodes: usize,
}

impl Search<'_> {
    /// Sum of the `r` largest entries of `vals`.
    fn top_sum(vals: &mut [f64], r: usize) -> f64 {
        if r == 0 {
            return 0.0;
        }
        if r >= vals.len() {
            return vals.iter().sum();
        }
        vals.select_nth_unstable_by(r - 1, |a, b| b.total_cmp(a));
        vals[..r].iter().sum()
    }

    fn dfs(&mut self, tier: usize, start: usize, left: usize, value: f64) {
        self.nodes += 1;
        let tiers = self.class.tiers();
        if tier == tiers.len() {
            if value > self.best_value + self.cov.tol() {
                self.best_value = value;
                let mut s = self.chosen.clone();
                s.sort_unstable();
                self.best = Some(s);
            }
            return;
        }
        if left == 0 {
            let next = tiers.get(tier + 1).map_or(0, |t| t.count);
            self.dfs(tier + 1, 0, next, value);
            return;
        }
        let pool = &tiers[tier].arcs;
        let gains: Vec<f64> = pool[start..]
            .iter()
            .map(|&e| self.cov.marginal(e, &self.hits) - self.pen[e])
            .collect();
        let later: f64 = tiers[tier + 1..]
            .iter()
            .map(|t| {
                let mut g: Vec<f64> = t
                    .arcs
                    .iter()
                    .map(|&e| self.cov.marginal(e, &self.hits) - self.pen[e])
                    .collect();
                Self::top_sum(&mut g, t.count)
            })
            .sum();
        // suffix[j] = best (left - 1) gains among positions after j.
        let n = gains.len();
        let mut suffix = vec![0.0; n];
        if left > 1 {
            let mut heap = std::collections::BinaryHeap::new();
            let mut sum = 0.0;
            for j in (0..n).rev() {
                suffix[j] = if heap.len() == left - 1 { sum } else { f64::NEG_INFINITY };
                let g = ordered(gains[j]);
                if heap.len() < left - 1 {
                    sum += gains[j];
                    heap.push(std::cmp::Reverse(g));
                } else if let Some(std::cmp::Reverse(min)) = heap.peek().copied() {
                    if g > min {
                        heap.pop();
                        sum += gains[j] - min.0;
                        heap.push(std::cmp::Reverse(g));
                    }
                }
            }
        }
        for j in 0..n {
            if n - j < left {
                break;
            }
            let bound = value + gains[j] + suffix[j] + later;
            if bound <= self.best_value + self.cov.tol() {
                continue;
            }
            let e = pool[start + j];
            let gain = self.cov.add(e, &mut self.hits);
            self.chosen.push(e);
            self.dfs(tier, start + j + 1, left - 1, value + gain - self.pen[e]);
            self.chosen.pop();
            self.cov.remove(e, &mut self.hits);
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Ordered(f64);
impl PartialEq for Ordered {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}
impl Eq for Ordered {}
impl PartialOrd for Ordered {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ordered {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}
fn ordered(v: f64) -> Ordered {
    Ordered(v)
}

fn combinatorial(cov: &Coverage, class: &ScenarioClass, pen: &[f64]) -> Vec<ArcId> {
    let seed = greedy(cov, class, pen);
    let seed_value = cov.covered(&seed) - seed.iter().map(|&e| pen[e]).sum::<f64>();
    let mut search = Search {
        cov,
        class,
        pen,
        hits: vec![0; cov.weights.len()],
        chosen: Vec::new(),
        best_value: seed_value - 2.0 * cov.tol(),
        best: None,
        nodes: 0,
    };
    let first = class.tiers().first().map_or(0, |t| t.count);
    search.dfs(0, 0, first, 0.0);
    log::trace!("interdiction search visited {} nodes", search.nodes);
    search.best.unwrap_or(seed)
}

/// The coverage program: minimize the surviving flow Σ x_P z_P plus penalties.
/// Columns are the class arcs followed by one z_P per path.
fn coverage_program(cov: &Coverage, class: &ScenarioClass, pen: &[f64], integral: bool) -> (LinearProgram, Vec<ArcId>) {
    let arcs: Vec<ArcId> = class.tiers().iter().flat_map(|t| t.arcs.iter().copied()).collect();
    let mut col_of = vec![usize::MAX; pen.len()];
    let mut lp = LinearProgram::new(Sense::Minimize);
    for &e in &arcs {
        col_of[e] = if integral {
            lp.add_integer_column(pen[e], 0.0, 1.0)
        } else {
            lp.add_column(pen[e], 0.0, 1.0)
        };
    }
    let zp: Vec<usize> = cov.weights.iter().map(|&w| lp.add_column(w, 0.0, 1.0)).collect();
    let mut rows: Vec<Vec<(usize, f64)>> = zp.iter().map(|&c| vec![(c, 1.0)]).collect();
    for &e in &arcs {
        for &p in &cov.paths_of_arc[e] {
            rows[p].push((col_of[e], 1.0));
        }
    }
    for coeffs in rows {
        lp.add_row(coeffs, Relation::Ge, 1.0);
    }
    for t in class.tiers() {
        lp.add_row(t.arcs.iter().map(|&e| (col_of[e], 1.0)).collect(), Relation::Eq, t.count as f64);
    }
    (lp, arcs)
}

fn milp(cov: &Coverage, class: &ScenarioClass, pen: &[f64], node_limit: usize) -> Vec<ArcId> {
    let (lp, arcs) = coverage_program(cov, class, pen, true);
    let seed = greedy(cov, class, pen);
    let mut start = vec![0.0; lp.num_cols()];
    for (c, e) in arcs.iter().enumerate() {
        if seed.binary_search(e).is_ok() {
            start[c] = 1.0;
        }
    }
    let mut hits = vec![0u32; cov.weights.len()];
    for &e in &seed {
        cov.add(e, &mut hits);
    }
    for (p, h) in hits.iter().enumerate() {
        start[arcs.len() + p] = if *h == 0 { 1.0 } else { 0.0 };
    }
    let opts = MipOptions {
        branch_set: Some((0..arcs.len()).collect()),
        node_limit,
        incumbent: Some(start),
        ..MipOptions::default()
    };
    let res = solve_mip(&lp, &opts);
    if res.status == Status::NodeLimit {
        log::warn!("interdiction MIP hit its node limit; using the incumbent");
    }
    let mut chosen: Vec<ArcId> = arcs
        .iter()
        .enumerate()
        .filter(|(c, _)| res.primal[*c] > 0.5)
        .map(|(_, &e)| e)
        .collect();
    chosen.sort_unstable();
    chosen
}

fn solve_penalized(cov: &Coverage, class: &ScenarioClass, pen: &[f64], backend: Backend) -> Vec<ArcId> {
    match backend {
        Backend::Combinatorial => combinatorial(cov, class, pen),
        Backend::Milp => milp(cov, class, pen, crate::config::Limits::default().nodes),
    }
}

/// Exact worst-case scenario of `class` for `x`.
///
/// With a perturbation, arcs used by earlier scenarios cost `1/|η|` each; if
/// the penalized optimum does not destroy more than `lambda`, the plain model
/// is solved instead.
pub fn separate_exact(
    net: &FlowNetwork,
    x: &PathFlow,
    class: &ScenarioClass,
    perturbation: Option<Perturbation<'_>>,
) -> Separation {
    separate_exact_with(net, x, class, perturbation, Backend::default())
}

pub fn separate_exact_with(
    net: &FlowNetwork,
    x: &PathFlow,
    class: &ScenarioClass,
    perturbation: Option<Perturbation<'_>>,
    backend: Backend,
) -> Separation {
    let cov = Coverage::new(x, net.arc_count());
    if let Some(pert) = perturbation.filter(|p| !p.previous.is_empty()) {
        let pen = penalties(net, class, pert.previous);
        let arcs = solve_penalized(&cov, class, &pen, backend);
        let scenario = Scenario::from_sorted_unchecked(arcs);
        let d = destroyed(x, &scenario);
        if d > pert.lambda + 1e-9 * cov.total.max(1.0) {
            return Separation {
                scenario,
                destroyed: d,
                perturbed: true,
            };
        }
    }
    let zero = vec![0.0; net.arc_count()];
    let scenario = Scenario::from_sorted_unchecked(solve_penalized(&cov, class, &zero, backend));
    let d = destroyed(x, &scenario);
    Separation {
        scenario,
        destroyed: d,
        perturbed: false,
    }
}

/// LP relaxation of the coverage program: fractional z_e per arc and the
/// resulting upper bound on destroyed flow.
pub fn separate_lp_relaxation(net: &FlowNetwork, x: &PathFlow, class: &ScenarioClass) -> (Vec<f64>, f64) {
    let cov = Coverage::new(x, net.arc_count());
    let mut z = vec![0.0; net.arc_count()];
    if cov.weights.is_empty() {
        return (z, 0.0);
    }
    let zero = vec![0.0; net.arc_count()];
    let (lp, arcs) = coverage_program(&cov, class, &zero, false);
    let res = solve_lp(&lp);
    for (c, &e) in arcs.iter().enumerate() {
        z[e] = res.primal[c];
    }
    (z, cov.total - res.objective)
}

/// Exact worst case of a cardinality class by plain enumeration.
pub fn worst_case_by_enumeration(x: &PathFlow, scenarios: &[Scenario]) -> Option<(Scenario, f64)> {
    let mut best: Option<(Scenario, f64)> = None;
    for s in scenarios {
        let d = destroyed(x, s);
        if best.as_ref().is_none_or(|(_, bd)| d > *bd + 1e-12) {
            best = Some((s.clone(), d));
        }
    }
    best
}

/// Worst-case surviving value min_η val_η(x) over scenarios of size `k`.
pub fn robust_value(net: &FlowNetwork, x: &PathFlow, k: usize) -> f64 {
    let class = ScenarioClass::cardinality(net, k);
    class_worst_value(net, x, &class)
}

/// min over the class of val_η(x).
pub fn class_worst_value(net: &FlowNetwork, x: &PathFlow, class: &ScenarioClass) -> f64 {
    if class.size() == 0 || x.is_empty() {
        return x.value();
    }
    let worst = if class.count() <= ENUMERATION_LIMIT {
        let all = class
            .enumerate(ENUMERATION_LIMIT as usize)
            .expect("count checked against the limit");
        worst_case_by_enumeration(x, &all).map_or(0.0, |(_, d)| d)
    } else {
        separate_exact(net, x, class, None).destroyed
    };
    (x.value() - worst).max(0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpperBoundMethod {
    ScenarioEnumeration,
    CutEnumeration,
}

#[derive(Clone, Debug)]
pub struct InterdictionBound {
    pub value: f64,
    pub scenario: Scenario,
    pub method: UpperBoundMethod,
}

/// Network interdiction value min_η maxflow(G - η), computed exactly either
/// by enumerating scenarios or by enumerating s-t node cuts, whichever is
/// smaller. Fails when both exceed `limit`.
pub fn interdiction_upper_bound(net: &FlowNetwork, k: usize, limit: usize) -> Result<InterdictionBound> {
    let scen = scenario_count(net, k);
    let inner = net.node_count.saturating_sub(2);
    let cuts: u128 = if inner >= 127 { u128::MAX } else { 1u128 << inner };
    if scen <= cuts && scen <= limit as u128 {
        interdiction_by_scenarios(net, k, limit)
    } else if cuts <= limit as u128 {
        Ok(interdiction_by_cuts(net, k))
    } else {
        Err(Error::Overflow {
            what: "interdiction scenario or cut",
            limit,
        })
    }
}

pub fn interdiction_by_scenarios(net: &FlowNetwork, k: usize, limit: usize) -> Result<InterdictionBound> {
    let class = ScenarioClass::cardinality(net, k);
    let mut best: Option<(Scenario, f64)> = None;
    for s in class.enumerate(limit)? {
        let v = max_flow(&net.with_arcs_removed(s.arcs()), None).value;
        if best.as_ref().is_none_or(|(_, bv)| v < *bv - 1e-12) {
            best = Some((s, v));
        }
    }
    let (scenario, value) = best.expect("a class always holds at least one scenario");
    Ok(InterdictionBound {
        value,
        scenario,
        method: UpperBoundMethod::ScenarioEnumeration,
    })
}

/// Uses maxflow(G - η) = min over cuts of the cut capacity left after η, so
/// the optimum removes the `k` largest interdictable arcs of some cut.
pub fn interdiction_by_cuts(net: &FlowNetwork, k: usize) -> InterdictionBound {
    let inner: Vec<usize> = (0..net.node_count)
        .filter(|&v| v != net.source && v != net.sink)
        .collect();
    let pool = net.interdictable();
    let k = k.min(pool.len());
    let mut best: Option<(Vec<ArcId>, f64)> = None;
    let mut side = vec![false; net.node_count];
    for mask in 0u128..(1u128 << inner.len()) {
        side.iter_mut().for_each(|s| *s = false);
        side[net.source] = true;
        for (b, &v) in inner.iter().enumerate() {
            side[v] = (mask >> b) & 1 == 1;
        }
        let mut cap = 0.0;
        let mut removable: Vec<(f64, ArcId)> = Vec::new();
        for (e, a) in net.arcs.iter().enumerate() {
            if side[a.tail] && !side[a.head] {
                cap += a.capacity;
                if !a.safe {
                    removable.push((a.capacity, e));
                }
            }
        }
        removable.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let take = k.min(removable.len());
        let cut_arcs: Vec<ArcId> = removable[..take].iter().map(|&(_, e)| e).collect();
        let left = cap - removable[..take].iter().map(|r| r.0).sum::<f64>();
        if best.as_ref().is_none_or(|(_, bv)| left < *bv - 1e-12) {
            best = Some((cut_arcs, left));
        }
    }
    let (mut arcs, value) = best.expect("at least one cut exists");
    for &e in &pool {
        if arcs.len() >= k {
            break;
        }
        if !arcs.contains(&e) {
            arcs.push(e);
        }
    }
    arcs.sort_unstable();
    InterdictionBound {
        value: value.max(0.0),
        scenario: Scenario::from_sorted_unchecked(arcs),
        method: UpperBoundMethod::CutEnumeration,
    }
}
