use std::fmt::Write as _;

use crate::error::{input_err, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A linear (or mixed-integer) program in row form with column bounds.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub integer: Vec<bool>,
    pub rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        LinearProgram {
            sense,
            objective: Vec::new(),
            lower: Vec::new(),
            upper: Vec::new(),
            integer: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn add_column(&mut self, objective: f64, lower: f64, upper: f64) -> usize {
        self.objective.push(objective);
        self.lower.push(lower);
        self.upper.push(upper);
        self.integer.push(false);
        self.objective.len() - 1
    }

    pub fn add_integer_column(&mut self, objective: f64, lower: f64, upper: f64) -> usize {
        let j = self.add_column(objective, lower, upper);
        self.integer[j] = true;
        j
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> usize {
        self.rows.push(Row {
            coeffs,
            relation,
            rhs,
        });
        self.rows.len() - 1
    }

    pub fn num_cols(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_cols();
        if self.lower.len() != n || self.upper.len() != n || self.integer.len() != n {
            return input_err("column data lengths disagree");
        }
        for j in 0..n {
            if !self.objective[j].is_finite() {
                return input_err(format!("objective coefficient {j} is not finite"));
            }
            if self.lower[j].is_nan() || self.upper[j].is_nan() || self.lower[j] > self.upper[j] {
                return input_err(format!("column {j} has bounds {} > {}", self.lower[j], self.upper[j]));
            }
            if self.lower[j] == f64::INFINITY || self.upper[j] == f64::NEG_INFINITY {
                return input_err(format!("column {j} has an empty bound interval"));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return input_err(format!("row {i} has a non-finite right-hand side"));
            }
            for &(j, a) in &row.coeffs {
                if j >= n || !a.is_finite() {
                    return input_err(format!("row {i} has a bad entry for column {j}"));
                }
            }
        }
        Ok(())
    }

    /// Objective value of `x` in the model's own sense.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest bound or row violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.num_cols() {
            worst = worst.max(self.lower[j] - x[j]).max(x[j] - self.upper[j]);
        }
        for row in &self.rows {
            let act: f64 = row.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
            let v = match row.relation {
                Relation::Le => act - row.rhs,
                Relation::Ge => row.rhs - act,
                Relation::Eq => (act - row.rhs).abs(),
            };
            worst = worst.max(v);
        }
        worst
    }

    /// Plain-text dump for inspection. One line per column and per row.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let sense = match self.sense {
            Sense::Maximize => "max",
            Sense::Minimize => "min",
        };
        let _ = writeln!(s, "sense {sense}");
        let _ = writeln!(s, "cols {}", self.num_cols());
        for j in 0..self.num_cols() {
            let _ = writeln!(
                s,
                "c {j} {} {} {} {}",
                self.objective[j],
                self.lower[j],
                self.upper[j],
                if self.integer[j] { "int" } else { "cont" }
            );
        }
        let _ = writeln!(s, "rows {}", self.num_rows());
        for (i, row) in self.rows.iter().enumerate() {
            let rel = match row.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            let _ = write!(s, "r {i} {rel} {}", row.rhs);
            for &(j, a) in &row.coeffs {
                let _ = write!(s, " {j}:{a}");
            }
            s.push('\n');
        }
        s
    }
}

/// Position of a column or row slack in a simplex basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable held at zero.
    Free,
}

/// A basis to restart from: one entry per column and one per row slack.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Basis {
    pub columns: Vec<BasisStatus>,
    pub rows: Vec<BasisStatus>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    NodeLimit,
    IterationLimit,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub status: Status,
    /// Objective in the model's sense; the incumbent value for MIPs.
    pub objective: f64,
    pub primal: Vec<f64>,
    /// Row duals as d(objective)/d(rhs). Empty for MIP results.
    pub duals: Vec<f64>,
    /// Column reduced costs, d(objective)/d(x_j) along nonbasic moves.
    pub reduced_costs: Vec<f64>,
    /// Best proven bound (equals `objective` for LPs solved to optimality).
    pub best_bound: f64,
    pub nodes: usize,
    pub branches: usize,
    pub iterations: usize,
    /// Final basis of an LP solve.
    pub basis: Option<Basis>,
}

impl SolveResult {
    pub(crate) fn empty(status: Status, n: usize, m: usize) -> Self {
        SolveResult {
            status,
            objective: f64::NAN,
            primal: vec![0.0; n],
            duals: vec![0.0; m],
            reduced_costs: vec![0.0; n],
            best_bound: f64::NAN,
            nodes: 0,
            branches: 0,
            iterations: 0,
            basis: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    /// Absolute incumbent/bound gap.
    pub fn gap(&self) -> f64 {
        (self.best_bound - self.objective).abs()
    }
}
