//! Best-bound branch and bound over LP relaxations.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::model::{LinearProgram, Sense, SolveResult, Status};
use super::simplex::solve_lp;

#[derive(Clone, Debug)]
pub struct MipOptions {
    /// Columns eligible for branching; all integer columns when `None`.
    pub branch_set: Option<Vec<usize>>,
    pub node_limit: usize,
    /// A known feasible solution used as the starting incumbent.
    pub incumbent: Option<Vec<f64>>,
    pub abs_gap: f64,
    pub rel_gap: f64,
    pub int_tol: f64,
}

impl Default for MipOptions {
    fn default() -> Self {
        MipOptions {
            branch_set: None,
            node_limit: 1_000_000,
            incumbent: None,
            abs_gap: 1e-9,
            rel_gap: 1e-6,
            int_tol: 1e-6,
        }
    }
}

struct Node {
    /// Relaxation value in minimization form.
    bound: f64,
    id: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    primal: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // Max-heap: smaller bound, then smaller id, pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Solves `lp` with integrality enforced by branching on the most fractional
/// column of the branch set (ties to the lowest index), exploring nodes in
/// best-bound order.
pub fn solve_mip(lp: &LinearProgram, options: &MipOptions) -> SolveResult {
    let n = lp.num_cols();
    let sign = match lp.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let branch_cols: Vec<usize> = match &options.branch_set {
        Some(set) => set.clone(),
        None => (0..n).filter(|&j| lp.integer[j]).collect(),
    };

    let mut incumbent: Option<(f64, Vec<f64>)> = options
        .incumbent
        .as_ref()
        .map(|x| (sign * lp.evaluate(x), x.clone()));

    let mut work = lp.clone();
    let mut nodes = 0usize;
    let mut branches = 0usize;
    let mut iterations = 0usize;
    let mut next_id = 0usize;

    let mut solve_node = |work: &mut LinearProgram, lower: Vec<f64>, upper: Vec<f64>, nodes: &mut usize| {
        work.lower.clone_from(&lower);
        work.upper.clone_from(&upper);
        *nodes += 1;
        let res = solve_lp(work);
        iterations += res.iterations;
        (res, lower, upper)
    };

    let (root, rl, ru) = solve_node(&mut work, lp.lower.clone(), lp.upper.clone(), &mut nodes);
    match root.status {
        Status::Optimal => {}
        Status::Infeasible if incumbent.is_none() => {
            let mut r = SolveResult::empty(Status::Infeasible, n, lp.num_rows());
            r.nodes = nodes;
            return r;
        }
        Status::Unbounded => {
            let mut r = SolveResult::empty(Status::Unbounded, n, lp.num_rows());
            r.nodes = nodes;
            return r;
        }
        _ => {}
    }

    let mut heap = BinaryHeap::new();
    if root.status == Status::Optimal {
        heap.push(Node {
            bound: sign * root.objective,
            id: next_id,
            lower: rl,
            upper: ru,
            primal: root.primal,
        });
        next_id += 1;
    }

    let prunable = |bound: f64, inc: &Option<(f64, Vec<f64>)>| match inc {
        Some((v, _)) => bound >= v - options.abs_gap.max(options.rel_gap * v.abs()),
        None => false,
    };

    let mut hit_limit = false;
    while let Some(node) = heap.pop() {
        if prunable(node.bound, &incumbent) {
            continue;
        }
        let frac = branch_cols
            .iter()
            .map(|&j| {
                let v = node.primal[j];
                (j, (v - v.floor()).min(v.ceil() - v))
            })
            .filter(|&(_, f)| f > options.int_tol)
            .fold(None::<(usize, f64)>, |best, (j, f)| match best {
                Some((_, bf)) if bf >= f => best,
                _ => Some((j, f)),
            });
        let Some((j, _)) = frac else {
            let mut x = node.primal;
            for &c in &branch_cols {
                x[c] = x[c].round();
            }
            incumbent = Some((node.bound, x));
            continue;
        };
        if nodes >= options.node_limit {
            heap.push(node);
            hit_limit = true;
            break;
        }
        branches += 1;
        let v = node.primal[j];
        let mut down_upper = node.upper.clone();
        down_upper[j] = v.floor();
        let mut up_lower = node.lower.clone();
        up_lower[j] = v.ceil();
        for (lo, hi) in [(node.lower.clone(), down_upper), (up_lower, node.upper.clone())] {
            let (res, lo, hi) = solve_node(&mut work, lo, hi, &mut nodes);
            if res.status != Status::Optimal {
                continue;
            }
            let bound = sign * res.objective;
            if prunable(bound, &incumbent) {
                continue;
            }
            heap.push(Node {
                bound,
                id: next_id,
                lower: lo,
                upper: hi,
                primal: res.primal,
            });
            next_id += 1;
        }
    }

    let open_bound = heap.iter().map(|nd| nd.bound).fold(f64::INFINITY, f64::min);
    let mut res = SolveResult::empty(Status::Infeasible, n, lp.num_rows());
    res.nodes = nodes;
    res.branches = branches;
    res.iterations = iterations;
    res.duals.clear();
    res.reduced_costs.clear();
    match incumbent {
        Some((v, x)) => {
            res.primal = x;
            res.objective = sign * v;
            res.best_bound = sign * open_bound.min(v);
            res.status = if hit_limit { Status::NodeLimit } else { Status::Optimal };
        }
        None => {
            res.best_bound = sign * open_bound;
            res.status = if hit_limit { Status::NodeLimit } else { Status::Infeasible };
        }
    }
    res
}
