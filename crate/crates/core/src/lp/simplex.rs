//! Bounded-variable revised simplex with an explicit dense basis inverse.
//!
//! Rows are turned into equalities with one slack per row whose bounds encode
//! the relation. Phase 1 minimizes the sum of artificials added for rows the
//! starting slack basis cannot satisfy. Data are equilibrated with
//! power-of-two factors so scaling never perturbs values.

use super::model::{Basis, BasisStatus, LinearProgram, Relation, Sense, SolveResult, Status};

const FEAS_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const PIV_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 100;
const DEGENERATE_SWITCH: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VarState {
    Basic,
    Lower,
    Upper,
    /// Nonbasic free variable held at zero.
    Zero,
}

enum Outcome {
    Optimal,
    Unbounded,
    IterationLimit,
}

#[derive(Clone)]
struct Simplex {
    m: usize,
    n: usize,
    col_start: Vec<usize>,
    row_idx: Vec<usize>,
    val: Vec<f64>,
    art_row: Vec<usize>,
    art_sign: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    b: Vec<f64>,
    x: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    binv: Vec<f64>,
    since_refactor: usize,
    iterations: usize,
    iteration_limit: usize,
    bland: bool,
    degenerate_run: usize,
}

impl Simplex {
    fn total(&self) -> usize {
        self.n + self.m + self.art_row.len()
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n + self.m
    }

    fn for_column(&self, j: usize, mut f: impl FnMut(usize, f64)) {
        if j < self.n {
            for k in self.col_start[j]..self.col_start[j + 1] {
                f(self.row_idx[k], self.val[k]);
            }
        } else if j < self.n + self.m {
            f(j - self.n, 1.0);
        } else {
            let a = j - self.n - self.m;
            f(self.art_row[a], self.art_sign[a]);
        }
    }

    fn column_dot(&self, j: usize, y: &[f64]) -> f64 {
        let mut s = 0.0;
        self.for_column(j, |r, v| s += y[r] * v);
        s
    }

    /// Binv * A_j.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        self.for_column(j, |r, v| {
            for (i, a) in alpha.iter_mut().enumerate() {
                *a += self.binv[i * m + r] * v;
            }
        });
        alpha
    }

    fn duals(&self) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for (i, &bv) in self.basis.iter().enumerate() {
            let c = self.cost[bv];
            if c != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for (yk, r) in y.iter_mut().zip(row) {
                    *yk += c * r;
                }
            }
        }
        y
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::Lower => self.lower[j],
            VarState::Upper => self.upper[j],
            _ => 0.0,
        }
    }

    fn park(&mut self, j: usize) {
        let (l, u) = (self.lower[j], self.upper[j]);
        let v = self.x[j];
        self.state[j] = if l.is_finite() && (!u.is_finite() || (v - l).abs() <= (u - v).abs()) {
            VarState::Lower
        } else if u.is_finite() {
            VarState::Upper
        } else {
            VarState::Zero
        };
        self.x[j] = self.nonbasic_value(j);
    }

    /// Rebuilds the basis inverse from scratch, swapping in slacks for
    /// dependent columns, then recomputes the basic values.
    fn refactor(&mut self) {
        let m = self.m;
        loop {
            let mut mat = vec![0.0; m * m];
            for (p, &j) in self.basis.iter().enumerate() {
                self.for_column(j, |r, v| mat[r * m + p] = v);
            }
            let mut inv = vec![0.0; m * m];
            for i in 0..m {
                inv[i * m + i] = 1.0;
            }
            let mut row_used = vec![false; m];
            let mut pivot_row = vec![usize::MAX; m];
            let mut deficient = Vec::new();
            for c in 0..m {
                let mut best = usize::MAX;
                let mut best_abs = 1e-11;
                for r in 0..m {
                    if !row_used[r] && mat[r * m + c].abs() > best_abs {
                        best_abs = mat[r * m + c].abs();
                        best = r;
                    }
                }
                if best == usize::MAX {
                    deficient.push(c);
                    continue;
                }
                row_used[best] = true;
                pivot_row[c] = best;
                let piv = mat[best * m + c];
                // The basis is mostly slack columns, so pivot rows stay sparse.
                let mut mat_nz = Vec::new();
                let mut inv_nz = Vec::new();
                for k in 0..m {
                    let a = &mut mat[best * m + k];
                    if *a != 0.0 {
                        *a /= piv;
                        mat_nz.push((k, *a));
                    }
                    let b = &mut inv[best * m + k];
                    if *b != 0.0 {
                        *b /= piv;
                        inv_nz.push((k, *b));
                    }
                }
                for r in 0..m {
                    if r == best {
                        continue;
                    }
                    let f = mat[r * m + c];
                    if f != 0.0 {
                        for &(k, v) in &mat_nz {
                            mat[r * m + k] -= f * v;
                        }
                        for &(k, v) in &inv_nz {
                            inv[r * m + k] -= f * v;
                        }
                    }
                }
            }
            if deficient.is_empty() {
                let mut binv = vec![0.0; m * m];
                for c in 0..m {
                    let r = pivot_row[c];
                    binv[c * m..(c + 1) * m].copy_from_slice(&inv[r * m..(r + 1) * m]);
                }
                self.binv = binv;
                break;
            }
            log::debug!("basis repair: replacing {} dependent columns", deficient.len());
            let mut free_rows = (0..m).filter(|&r| !row_used[r]);
            for c in deficient {
                let r = free_rows.next().expect("rank deficiency matches free rows");
                let old = self.basis[c];
                self.park(old);
                let slack = self.n + r;
                self.basis[c] = slack;
                self.state[slack] = VarState::Basic;
            }
        }
        self.since_refactor = 0;
        self.recompute_basic_values();
    }

    fn recompute_basic_values(&mut self) {
        let m = self.m;
        let mut rhs = self.b.clone();
        for j in 0..self.total() {
            if self.state[j] != VarState::Basic {
                let v = self.x[j];
                if v != 0.0 {
                    self.for_column(j, |r, a| rhs[r] -= a * v);
                }
            }
        }
        for i in 0..m {
            let row = &self.binv[i * m..(i + 1) * m];
            let v: f64 = row.iter().zip(&rhs).map(|(a, b)| a * b).sum();
            self.x[self.basis[i]] = v;
        }
    }

    fn choose_entering(&self, y: &[f64]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.total() {
            let st = self.state[j];
            if st == VarState::Basic || self.lower[j] == self.upper[j] {
                continue;
            }
            let d = self.cost[j] - self.column_dot(j, y);
            let eligible = match st {
                VarState::Lower => d < -OPT_TOL,
                VarState::Upper => d > OPT_TOL,
                VarState::Zero => d.abs() > OPT_TOL,
                VarState::Basic => false,
            };
            if !eligible {
                continue;
            }
            if self.bland {
                return Some((j, d));
            }
            if best.is_none_or(|(_, bd)| d.abs() > bd.abs()) {
                best = Some((j, d));
            }
        }
        best
    }

    fn pivot(&mut self, r: usize, alpha: &[f64]) {
        let m = self.m;
        let p = alpha[r];
        let (head, tail) = self.binv.split_at_mut(r * m);
        let (prow, tail) = tail.split_at_mut(m);
        for v in prow.iter_mut() {
            *v /= p;
        }
        for (i, row) in head.chunks_mut(m).chain(tail.chunks_mut(m)).enumerate() {
            let i = if i < r { i } else { i + 1 };
            let f = alpha[i];
            if f != 0.0 {
                for (a, b) in row.iter_mut().zip(prow.iter()) {
                    *a -= f * b;
                }
            }
        }
        self.since_refactor += 1;
    }

    fn run(&mut self) -> Outcome {
        loop {
            if self.iterations >= self.iteration_limit {
                return Outcome::IterationLimit;
            }
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor();
            }
            let y = self.duals();
            let Some((q, d)) = self.choose_entering(&y) else {
                if self.since_refactor > 0 {
                    // Confirm optimality on a fresh factorization.
                    self.refactor();
                    let y = self.duals();
                    if self.choose_entering(&y).is_none() {
                        return Outcome::Optimal;
                    }
                    continue;
                }
                return Outcome::Optimal;
            };
            self.iterations += 1;
            let dir = match self.state[q] {
                VarState::Lower => 1.0,
                VarState::Upper => -1.0,
                _ => {
                    if d < 0.0 {
                        1.0
                    } else {
                        -1.0
                    }
                }
            };
            let alpha = self.ftran(q);

            // Harris two-pass ratio test.
            let mut theta_max = f64::INFINITY;
            for (i, &a) in alpha.iter().enumerate() {
                let delta = -dir * a;
                let bv = self.basis[i];
                if delta < -PIV_TOL && self.lower[bv].is_finite() {
                    theta_max = theta_max.min((self.x[bv] - self.lower[bv] + FEAS_TOL) / -delta);
                } else if delta > PIV_TOL && self.upper[bv].is_finite() {
                    theta_max = theta_max.min((self.upper[bv] - self.x[bv] + FEAS_TOL) / delta);
                }
            }
            let mut leave: Option<(usize, f64)> = None;
            let mut best_mag = 0.0;
            for (i, &a) in alpha.iter().enumerate() {
                let delta = -dir * a;
                let bv = self.basis[i];
                let ratio = if delta < -PIV_TOL && self.lower[bv].is_finite() {
                    (self.x[bv] - self.lower[bv]) / -delta
                } else if delta > PIV_TOL && self.upper[bv].is_finite() {
                    (self.upper[bv] - self.x[bv]) / delta
                } else {
                    continue;
                };
                let ratio = ratio.max(0.0);
                if self.bland {
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - 1e-12 || (ratio <= lr + 1e-12 && bv < self.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                } else if ratio <= theta_max && delta.abs() > best_mag {
                    best_mag = delta.abs();
                    leave = Some((i, ratio));
                }
            }
            let flip = self.upper[q] - self.lower[q];
            let t = match leave {
                Some((_, ratio)) if ratio < flip => ratio,
                _ if flip.is_finite() => flip,
                _ => return Outcome::Unbounded,
            };
            if t <= 1e-12 {
                self.degenerate_run += 1;
                if self.degenerate_run > DEGENERATE_SWITCH {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
                self.bland = false;
            }

            self.x[q] += dir * t;
            for (i, &a) in alpha.iter().enumerate() {
                let bv = self.basis[i];
                self.x[bv] -= dir * a * t;
            }
            match leave {
                Some((r, ratio)) if ratio < flip => {
                    let bv = self.basis[r];
                    if -dir * alpha[r] < 0.0 {
                        self.state[bv] = VarState::Lower;
                        self.x[bv] = self.lower[bv];
                    } else {
                        self.state[bv] = VarState::Upper;
                        self.x[bv] = self.upper[bv];
                    }
                    self.basis[r] = q;
                    self.state[q] = VarState::Basic;
                    self.pivot(r, &alpha);
                }
                _ => {
                    self.state[q] = if dir > 0.0 {
                        VarState::Upper
                    } else {
                        VarState::Lower
                    };
                    self.x[q] = self.nonbasic_value(q);
                }
            }
        }
    }

    /// Installs `hint` as the basis with the true costs. Returns false when
    /// the hint does not fit or cannot be made primal feasible by the dual
    /// simplex.
    fn warm_start(&mut self, hint: &Basis, true_cost: &[f64]) -> bool {
        let (n, m) = (self.n, self.m);
        if hint.columns.len() != n || hint.rows.len() != m {
            return false;
        }
        for j in 0..n + m {
            self.cost[j] = if j < n { true_cost[j] } else { 0.0 };
        }
        let mut basis = Vec::with_capacity(m);
        for j in 0..n + m {
            let st = if j < n { hint.columns[j] } else { hint.rows[j - n] };
            let (l, u) = (self.lower[j].is_finite(), self.upper[j].is_finite());
            self.state[j] = match st {
                BasisStatus::Basic => {
                    basis.push(j);
                    VarState::Basic
                }
                BasisStatus::AtUpper if u => VarState::Upper,
                _ if l => VarState::Lower,
                _ if u => VarState::Upper,
                _ => VarState::Zero,
            };
            if self.state[j] != VarState::Basic {
                self.x[j] = self.nonbasic_value(j);
            }
        }
        if basis.len() != m {
            return false;
        }
        self.basis = basis;
        self.refactor();
        let infeasible = self.basis.iter().any(|&j| {
            self.x[j] < self.lower[j] - FEAS_TOL || self.x[j] > self.upper[j] + FEAS_TOL
        });
        if !infeasible {
            return true;
        }
        let y = self.duals();
        let dual_feasible = (0..n + m).all(|j| {
            let d = self.cost[j] - self.column_dot(j, &y);
            match self.state[j] {
                VarState::Basic => true,
                _ if self.lower[j] == self.upper[j] => true,
                VarState::Lower => d >= -1e-7,
                VarState::Upper => d <= 1e-7,
                VarState::Zero => d.abs() <= 1e-7,
            }
        });
        dual_feasible && self.dual_simplex()
    }

    /// Dual simplex from a dual feasible basis until the basic values are
    /// within bounds. Returns false on a limit or when the ratio test finds
    /// no entering column (primal infeasibility, left to the cold solver).
    fn dual_simplex(&mut self) -> bool {
        let m = self.m;
        loop {
            if self.iterations >= self.iteration_limit {
                return false;
            }
            if self.since_refactor >= REFACTOR_EVERY {
                self.refactor();
            }
            let mut leave: Option<(usize, f64)> = None;
            for (i, &bv) in self.basis.iter().enumerate() {
                let inf = if self.x[bv] < self.lower[bv] {
                    self.lower[bv] - self.x[bv]
                } else if self.x[bv] > self.upper[bv] {
                    self.x[bv] - self.upper[bv]
                } else {
                    0.0
                };
                if inf > FEAS_TOL && leave.is_none_or(|(_, b)| inf > b) {
                    leave = Some((i, inf));
                }
            }
            let Some((r, _)) = leave else { return true };
            let bv = self.basis[r];
            let to_lower = self.x[bv] < self.lower[bv];
            let y = self.duals();
            let rho: Vec<f64> = self.binv[r * m..(r + 1) * m].to_vec();
            let mut enter: Option<(usize, f64, f64)> = None;
            for j in 0..self.total() {
                let st = self.state[j];
                if st == VarState::Basic || self.lower[j] == self.upper[j] {
                    continue;
                }
                let alpha = self.column_dot(j, &rho);
                if alpha.abs() <= PIV_TOL {
                    continue;
                }
                // Raising x_j moves x_r by -alpha.
                let raise_helps = if to_lower { alpha < 0.0 } else { alpha > 0.0 };
                let eligible = match st {
                    VarState::Lower => raise_helps,
                    VarState::Upper => !raise_helps,
                    _ => true,
                };
                if !eligible {
                    continue;
                }
                let d = self.cost[j] - self.column_dot(j, &y);
                let ratio = d.abs() / alpha.abs();
                let better = match enter {
                    None => true,
                    Some((_, br, ba)) => ratio < br - 1e-12 || (ratio <= br + 1e-12 && alpha.abs() > ba),
                };
                if better {
                    enter = Some((j, ratio, alpha.abs()));
                }
            }
            let Some((q, _, _)) = enter else { return false };
            let alpha = self.ftran(q);
            let target = if to_lower { self.lower[bv] } else { self.upper[bv] };
            let step = (self.x[bv] - target) / alpha[r];
            self.x[q] += step;
            for (i, &a) in alpha.iter().enumerate() {
                let b = self.basis[i];
                self.x[b] -= a * step;
            }
            self.state[bv] = if to_lower { VarState::Lower } else { VarState::Upper };
            self.x[bv] = target;
            self.basis[r] = q;
            self.state[q] = VarState::Basic;
            self.pivot(r, &alpha);
            self.iterations += 1;
        }
    }

    /// Pivots basic artificials out where some other column can replace them.
    fn expel_artificials(&mut self) {
        let m = self.m;
        for r in 0..m {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let row: Vec<f64> = self.binv[r * m..(r + 1) * m].to_vec();
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.n + self.m {
                if self.state[j] == VarState::Basic {
                    continue;
                }
                let a = self.column_dot(j, &row);
                if a.abs() > 1e-7 && best.is_none_or(|(_, ba)| a.abs() > ba.abs()) {
                    best = Some((j, a));
                }
            }
            if let Some((j, _)) = best {
                let alpha = self.ftran(j);
                let art = self.basis[r];
                self.state[art] = VarState::Lower;
                self.x[art] = 0.0;
                self.basis[r] = j;
                self.state[j] = VarState::Basic;
                self.pivot(r, &alpha);
            }
        }
        self.refactor();
    }
}

fn pow2_round(v: f64) -> f64 {
    if !v.is_finite() || v <= 0.0 {
        return 1.0;
    }
    2f64.powi(v.log2().round().clamp(-60.0, 60.0) as i32)
}

struct Prepared {
    sx: Simplex,
    rs: Vec<f64>,
    cs: Vec<f64>,
    sign: f64,
    true_cost: Vec<f64>,
}

/// Scaled copy of `lp` with every variable nonbasic and no basis yet.
fn prepare(lp: &LinearProgram) -> Prepared {
    let n = lp.num_cols();
    let m = lp.num_rows();
    let sign = match lp.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };

    // Column-major copy of the matrix, merging duplicate entries.
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, row) in lp.rows.iter().enumerate() {
        for &(j, a) in &row.coeffs {
            if a == 0.0 {
                continue;
            }
            match cols[j].last_mut() {
                Some((r, v)) if *r == i => *v += a,
                _ => cols[j].push((i, a)),
            }
        }
    }

    // Equilibration.
    let mut rs = vec![1.0; m];
    let mut cs = vec![1.0; n];
    for _ in 0..4 {
        let mut rmax = vec![0.0f64; m];
        let mut rmin = vec![f64::INFINITY; m];
        for (j, col) in cols.iter().enumerate() {
            for &(i, a) in col {
                let v = (a * cs[j]).abs();
                rmax[i] = rmax[i].max(v);
                rmin[i] = rmin[i].min(v);
            }
        }
        for i in 0..m {
            if rmax[i] > 0.0 {
                rs[i] = 1.0 / (rmax[i] * rmin[i]).sqrt();
            }
        }
        for (j, col) in cols.iter().enumerate() {
            let mut cmax = 0.0f64;
            let mut cmin = f64::INFINITY;
            for &(i, a) in col {
                let v = (a * rs[i]).abs();
                cmax = cmax.max(v);
                cmin = cmin.min(v);
            }
            if cmax > 0.0 {
                cs[j] = 1.0 / (cmax * cmin).sqrt();
            }
        }
    }
    rs.iter_mut().for_each(|v| *v = pow2_round(*v));
    cs.iter_mut().for_each(|v| *v = pow2_round(*v));

    let mut col_start = Vec::with_capacity(n + 1);
    let mut row_idx = Vec::new();
    let mut val = Vec::new();
    col_start.push(0);
    for (j, col) in cols.iter().enumerate() {
        for &(i, a) in col {
            if a != 0.0 {
                row_idx.push(i);
                val.push(rs[i] * a * cs[j]);
            }
        }
        col_start.push(row_idx.len());
    }

    let total0 = n + m;
    let mut lower = Vec::with_capacity(total0);
    let mut upper = Vec::with_capacity(total0);
    for j in 0..n {
        lower.push(lp.lower[j] / cs[j]);
        upper.push(lp.upper[j] / cs[j]);
    }
    for row in &lp.rows {
        let (l, u) = match row.relation {
            Relation::Le => (0.0, f64::INFINITY),
            Relation::Ge => (f64::NEG_INFINITY, 0.0),
            Relation::Eq => (0.0, 0.0),
        };
        lower.push(l);
        upper.push(u);
    }
    let b: Vec<f64> = lp.rows.iter().zip(&rs).map(|(r, s)| r.rhs * s).collect();
    let true_cost: Vec<f64> = (0..n).map(|j| sign * lp.objective[j] * cs[j]).collect();

    let sx = Simplex {
        m,
        n,
        col_start,
        row_idx,
        val,
        art_row: Vec::new(),
        art_sign: Vec::new(),
        lower,
        upper,
        cost: vec![0.0; total0],
        b,
        x: vec![0.0; total0],
        state: vec![VarState::Zero; total0],
        basis: Vec::with_capacity(m),
        binv: Vec::new(),
        since_refactor: 0,
        iterations: 0,
        iteration_limit: 50_000 + 50 * (n + m),
        bland: false,
        degenerate_run: 0,
    };
    Prepared {
        sx,
        rs,
        cs,
        sign,
        true_cost,
    }
}

/// Solves the LP relaxation of `lp` (integrality flags are ignored).
pub fn solve_lp(lp: &LinearProgram) -> SolveResult {
    solve_lp_warm(lp, None)
}

/// Like [`solve_lp`], starting from `hint` when it is a usable basis: primal
/// simplex if it is primal feasible, dual simplex first if it is only dual
/// feasible. Anything else falls back to a cold start.
pub fn solve_lp_warm(lp: &LinearProgram, hint: Option<&Basis>) -> SolveResult {
    let n = lp.num_cols();
    let m = lp.num_rows();
    if lp.validate().is_err() {
        return SolveResult::empty(Status::Infeasible, n, m);
    }
    let prep = prepare(lp);
    if let Some(h) = hint {
        let mut sx = prep.sx.clone();
        if sx.warm_start(h, &prep.true_cost) {
            if let Outcome::Optimal = sx.run() {
                return finish(lp, &sx, &prep.rs, &prep.cs, prep.sign, Status::Optimal);
            }
        }
        log::debug!("warm start unusable; solving from a slack basis");
    }
    solve_cold(lp, prep)
}

fn solve_cold(lp: &LinearProgram, prep: Prepared) -> SolveResult {
    let Prepared {
        mut sx,
        rs,
        cs,
        sign,
        true_cost,
    } = prep;
    let n = sx.n;
    let m = sx.m;

    // Starting point: structurals at a bound, slacks basic where they fit.
    for j in 0..n {
        sx.state[j] = if sx.lower[j].is_finite() {
            VarState::Lower
        } else if sx.upper[j].is_finite() {
            VarState::Upper
        } else {
            VarState::Zero
        };
        sx.x[j] = sx.nonbasic_value(j);
    }
    let mut resid = sx.b.clone();
    for j in 0..n {
        let v = sx.x[j];
        if v != 0.0 {
            for k in sx.col_start[j]..sx.col_start[j + 1] {
                resid[sx.row_idx[k]] -= sx.val[k] * v;
            }
        }
    }
    let mut basis = vec![0; m];
    for i in 0..m {
        let s = n + i;
        let r = resid[i];
        let clamped = r.clamp(sx.lower[s], sx.upper[s]);
        if (r - clamped).abs() <= FEAS_TOL {
            sx.state[s] = VarState::Basic;
            sx.x[s] = r;
            basis[i] = s;
        } else {
            sx.x[s] = clamped;
            sx.state[s] = if clamped == sx.lower[s] {
                VarState::Lower
            } else {
                VarState::Upper
            };
            let gap = r - clamped;
            sx.art_row.push(i);
            sx.art_sign.push(gap.signum());
            sx.lower.push(0.0);
            sx.upper.push(f64::INFINITY);
            sx.cost.push(1.0);
            sx.x.push(gap.abs());
            sx.state.push(VarState::Basic);
            basis[i] = sx.total() - 1;
        }
    }
    sx.basis = basis;
    sx.binv = vec![0.0; m * m];
    for i in 0..m {
        let j = sx.basis[i];
        sx.binv[i * m + i] = if sx.is_artificial(j) {
            sx.art_sign[j - n - m]
        } else {
            1.0
        };
    }

    if !sx.art_row.is_empty() {
        match sx.run() {
            Outcome::IterationLimit => {
                return finish(lp, &sx, &rs, &cs, sign, Status::IterationLimit);
            }
            Outcome::Unbounded => unreachable!("phase 1 is bounded below"),
            Outcome::Optimal => {}
        }
        let infeas: f64 = (n + m..sx.total()).map(|j| sx.x[j]).sum();
        let scale = sx.b.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        if infeas > 1e-7 * scale {
            let mut res = SolveResult::empty(Status::Infeasible, n, m);
            res.iterations = sx.iterations;
            return res;
        }
        for j in n + m..sx.total() {
            sx.upper[j] = 0.0;
            if sx.state[j] != VarState::Basic {
                sx.state[j] = VarState::Lower;
                sx.x[j] = 0.0;
            }
        }
        sx.expel_artificials();
    }

    for j in 0..sx.total() {
        sx.cost[j] = if j < n { true_cost[j] } else { 0.0 };
    }
    sx.bland = false;
    sx.degenerate_run = 0;
    let status = match sx.run() {
        Outcome::Optimal => Status::Optimal,
        Outcome::Unbounded => Status::Unbounded,
        Outcome::IterationLimit => Status::IterationLimit,
    };
    finish(lp, &sx, &rs, &cs, sign, status)
}

fn finish(lp: &LinearProgram, sx: &Simplex, rs: &[f64], cs: &[f64], sign: f64, status: Status) -> SolveResult {
    let n = sx.n;
    let m = sx.m;
    let mut res = SolveResult::empty(status, n, m);
    res.iterations = sx.iterations;
    if status == Status::Infeasible {
        return res;
    }
    res.primal = (0..n).map(|j| sx.x[j] * cs[j]).collect();
    // Snap values within tolerance of a bound onto it.
    for j in 0..n {
        let v = &mut res.primal[j];
        let (lo, hi) = (lp.lower[j], lp.upper[j]);
        if lo.is_finite() && (*v - lo).abs() <= 1e-11 * (1.0 + lo.abs()) {
            *v = lo;
        } else if hi.is_finite() && (*v - hi).abs() <= 1e-11 * (1.0 + hi.abs()) {
            *v = lp.upper[j];
        }
    }
    let y = sx.duals();
    res.duals = (0..m).map(|i| sign * y[i] * rs[i]).collect();
    res.reduced_costs = (0..n)
        .map(|j| {
            if sx.state[j] == VarState::Basic {
                0.0
            } else {
                sign * (sx.cost[j] - sx.column_dot(j, &y)) / cs[j]
            }
        })
        .collect();
    res.objective = lp.evaluate(&res.primal);
    res.best_bound = res.objective;
    let status_of = |j: usize| match sx.state[j] {
        VarState::Basic => BasisStatus::Basic,
        VarState::Lower => BasisStatus::AtLower,
        VarState::Upper => BasisStatus::AtUpper,
        VarState::Zero => BasisStatus::Free,
    };
    res.basis = Some(Basis {
        columns: (0..n).map(status_of).collect(),
        rows: (n..n + m).map(status_of).collect(),
    });
    if status == Status::Optimal {
        let viol = lp.max_violation(&res.primal);
        if viol > 1e-7 {
            log::warn!("LP solution violates constraints by {viol:e}");
        }
    }
    res
}
