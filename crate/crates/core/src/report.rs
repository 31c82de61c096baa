//! Benchmark reporting: per-instance summary rows, the bound trace per
//! iteration and the per-call pricing log.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::driver::RobustSolution;

/// Nearest-rank quantile: the smallest value with at least `q` of the data
/// at or below it. Empty input gives 0.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = (q * v.len() as f64).ceil() as usize;
    v[rank.clamp(1, v.len()) - 1]
}

/// Four significant digits; exact zero prints as `0`.
pub fn sig4(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let digits = (3 - v.abs().log10().floor() as i32).max(0) as usize;
    let s = format!("{v:.digits$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Relative shortfall (optimum - other)/optimum, 0 for a zero optimum.
pub fn relative_gap(optimum: f64, other: f64) -> f64 {
    if optimum.abs() < 1e-12 {
        return 0.0;
    }
    let g = (optimum - other) / optimum;
    if g.abs() < 1e-9 {
        0.0
    } else {
        g
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub instance: String,
    pub k: usize,
    pub iterations: usize,
    pub paths_active: usize,
    pub paths_generated: usize,
    pub scenarios_active: usize,
    pub scenarios_generated: usize,
    pub value: f64,
    /// (optimum - heuristic value)/optimum.
    pub heuristic_gap: f64,
    /// (interdiction bound - optimum)/optimum; absent when not computed.
    pub interdiction_gap: Option<f64>,
    pub converged: bool,
    #[serde(skip)]
    pub pricing_q90: f64,
    #[serde(skip)]
    pub interdiction_q90: f64,
}

impl ReportRow {
    pub fn new(instance: impl Into<String>, k: usize, sol: &RobustSolution, upper_bound: Option<f64>) -> Self {
        let st = &sol.state;
        let pricing: Vec<f64> = st.pricing_calls.iter().map(|c| c.seconds).collect();
        ReportRow {
            instance: instance.into(),
            k,
            iterations: st.iterations,
            paths_active: st.active_paths(),
            paths_generated: st.paths.len(),
            scenarios_active: st.active_scenarios(),
            scenarios_generated: st.scenarios_generated(),
            value: sol.value,
            heuristic_gap: relative_gap(sol.value, st.heuristic_value),
            interdiction_gap: upper_bound.map(|ub| -relative_gap(sol.value, ub)).map(|g| if g == 0.0 { 0.0 } else { g }),
            converged: sol.converged(),
            pricing_q90: quantile(&pricing, 0.9),
            interdiction_q90: quantile(&st.interdiction_seconds, 0.9),
        }
    }

    /// Column-wise maximum over runs of one instance family.
    pub fn max_over(instance: impl Into<String>, rows: &[ReportRow]) -> Option<ReportRow> {
        let first = rows.first()?;
        let mut out = first.clone();
        out.instance = instance.into();
        for r in &rows[1..] {
            out.iterations = out.iterations.max(r.iterations);
            out.paths_active = out.paths_active.max(r.paths_active);
            out.paths_generated = out.paths_generated.max(r.paths_generated);
            out.scenarios_active = out.scenarios_active.max(r.scenarios_active);
            out.scenarios_generated = out.scenarios_generated.max(r.scenarios_generated);
            out.value = out.value.max(r.value);
            out.heuristic_gap = out.heuristic_gap.max(r.heuristic_gap);
            out.interdiction_gap = match (out.interdiction_gap, r.interdiction_gap) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            };
            out.converged &= r.converged;
            out.pricing_q90 = out.pricing_q90.max(r.pricing_q90);
            out.interdiction_q90 = out.interdiction_q90.max(r.interdiction_q90);
        }
        Some(out)
    }
}

const HEADER: [&str; 12] = [
    "instance",
    "k",
    "iterations",
    "paths_active",
    "paths_generated",
    "pricing_q90_s",
    "scenarios_active",
    "scenarios_generated",
    "interdiction_q90_s",
    "heuristic_gap",
    "interdiction_gap",
    "converged",
];

fn cells(r: &ReportRow, percent: bool) -> Vec<String> {
    let gap = |g: f64| if percent { format!("{}%", sig4(100.0 * g)) } else { sig4(g) };
    vec![
        r.instance.clone(),
        r.k.to_string(),
        r.iterations.to_string(),
        r.paths_active.to_string(),
        r.paths_generated.to_string(),
        sig4(r.pricing_q90),
        r.scenarios_active.to_string(),
        r.scenarios_generated.to_string(),
        sig4(r.interdiction_q90),
        gap(r.heuristic_gap),
        r.interdiction_gap.map_or("-".to_string(), gap),
        r.converged.to_string(),
    ]
}

pub fn rows_csv(rows: &[ReportRow], percent: bool) -> String {
    let mut out = HEADER.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&cells(r, percent).join(","));
        out.push('\n');
    }
    out
}

pub fn rows_table(rows: &[ReportRow], percent: bool) -> String {
    let body: Vec<Vec<String>> = rows.iter().map(|r| cells(r, percent)).collect();
    let widths: Vec<usize> = (0..HEADER.len())
        .map(|i| body.iter().map(|c| c[i].len()).chain([HEADER[i].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let line = |cols: Vec<&str>, out: &mut String| {
        let padded: Vec<String> = cols.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        out.push_str(padded.join("  ").trim_end());
        out.push('\n');
    };
    line(HEADER.to_vec(), &mut out);
    for c in &body {
        line(c.iter().map(|s| s.as_str()).collect(), &mut out);
    }
    out
}

/// Primal and dual bound after every iteration.
pub fn bound_trace_csv(sol: &RobustSolution) -> String {
    let mut out = String::from("iteration,primal_bound,dual_bound,paths_generated,scenarios_generated,pricing_calls,interdiction_calls\n");
    for r in &sol.state.log {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.iteration,
            r.primal_bound,
            r.dual_bound,
            r.paths_generated,
            r.scenarios_generated,
            r.pricing_calls,
            r.interdiction_calls
        );
    }
    out
}

/// One line per pricing call with its time and the running count of calls
/// that found a path of positive reduced price.
pub fn pricing_calls_csv(sol: &RobustSolution) -> String {
    let mut out = String::from("call,iteration,priced_scenarios,price,seconds,positive_so_far\n");
    let mut positive = 0;
    for (i, c) in sol.state.pricing_calls.iter().enumerate() {
        if c.price.is_some() {
            positive += 1;
        }
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            i + 1,
            c.iteration,
            c.priced_scenarios,
            c.price.map_or(String::new(), |p| p.to_string()),
            c.seconds,
            positive
        );
    }
    out
}

/// Parameter grid (n, m, M) searched for P3 instances with a heuristic gap.
pub fn p3_default_grid() -> Vec<(usize, usize, usize)> {
    let mut grid = Vec::new();
    for n in 1..=3 {
        for m in 1..=3 {
            for big_m in 1..=4 {
                grid.push((n, m, big_m));
            }
        }
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        assert_eq!(quantile(&[2.5], 0.9), 2.5);
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(quantile(&v, 0.9), 9.0);
        assert_eq!(quantile(&v, 0.95), 10.0);
        assert_eq!(quantile(&[], 0.9), 0.0);
    }

    #[test]
    fn significant_digits() {
        assert_eq!(sig4(0.0), "0");
        assert_eq!(sig4(0.0132), "0.0132");
        assert_eq!(sig4(0.123456), "0.1235");
        assert_eq!(sig4(12.3), "12.3");
        assert_eq!(sig4(123456.0), "123456");
    }

    #[test]
    fn gaps() {
        assert_eq!(relative_gap(0.0, 1.0), 0.0);
        assert!((relative_gap(4.0, 3.0) - 0.25).abs() < 1e-15);
        assert_eq!(relative_gap(2.0, 2.0), 0.0);
    }
}
