use proptest::prelude::*;

use super::*;

const INF: f64 = f64::INFINITY;

#[test]
fn single_bound_row() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    let x = lp.add_column(1.0, 0.0, INF);
    lp.add_row(vec![(x, 1.0)], Relation::Le, 3.0);
    let r = solve_lp(&lp);
    assert_eq!(r.status, Status::Optimal);
    assert!((r.objective - 3.0).abs() < 1e-12);
    assert!((r.duals[0] - 1.0).abs() < 1e-12);
}

#[test]
fn two_variables_one_row() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    let x = lp.add_column(1.0, 0.0, INF);
    let y = lp.add_column(1.0, 0.0, INF);
    lp.add_row(vec![(x, 1.0), (y, 1.0)], Relation::Le, 1.0);
    let r = solve_lp(&lp);
    assert!((r.objective - 1.0).abs() < 1e-12);
}

#[test]
fn infeasible_and_unbounded() {
    let mut lp = LinearProgram::new(Sense::Minimize);
    let x = lp.add_column(1.0, 0.0, INF);
    lp.add_row(vec![(x, 1.0)], Relation::Ge, 2.0);
    lp.add_row(vec![(x, 1.0)], Relation::Le, 1.0);
    assert_eq!(solve_lp(&lp).status, Status::Infeasible);

    let mut lp = LinearProgram::new(Sense::Maximize);
    let x = lp.add_column(1.0, 0.0, INF);
    let y = lp.add_column(0.0, 0.0, INF);
    lp.add_row(vec![(x, 1.0), (y, -1.0)], Relation::Le, 1.0);
    assert_eq!(solve_lp(&lp).status, Status::Unbounded);
}

#[test]
fn equality_and_free_columns() {
    // min x + 2y, x + y = 3, x - y >= -1, y free, x in [0, 2]
    let mut lp = LinearProgram::new(Sense::Minimize);
    let x = lp.add_column(1.0, 0.0, 2.0);
    let y = lp.add_column(2.0, -INF, INF);
    lp.add_row(vec![(x, 1.0), (y, 1.0)], Relation::Eq, 3.0);
    lp.add_row(vec![(x, 1.0), (y, -1.0)], Relation::Ge, -1.0);
    let r = solve_lp(&lp);
    assert_eq!(r.status, Status::Optimal);
    assert!((r.primal[0] - 2.0).abs() < 1e-9);
    assert!((r.primal[1] - 1.0).abs() < 1e-9);
    assert!((r.objective - 4.0).abs() < 1e-9);
}

#[test]
fn knapsack_mip() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    let a = lp.add_integer_column(2.0, 0.0, 1.0);
    let b = lp.add_integer_column(3.0, 0.0, 1.0);
    lp.add_row(vec![(a, 1.0), (b, 1.0)], Relation::Le, 1.0);
    let r = solve_mip(&lp, &MipOptions::default());
    assert_eq!(r.status, Status::Optimal);
    assert!((r.objective - 3.0).abs() < 1e-12);
}

#[test]
fn fractional_knapsack_needs_branching() {
    // max 5a + 4b + 3c, 2a + 3b + c <= 5, 4a + b + 2c <= 11, binary -> a=c=1... check by enumeration
    let mut lp = LinearProgram::new(Sense::Maximize);
    let w = [(5.0, 2.0, 4.0), (4.0, 3.0, 1.0), (3.0, 1.0, 2.0), (6.0, 4.0, 3.0)];
    let cols: Vec<usize> = w.iter().map(|&(c, _, _)| lp.add_integer_column(c, 0.0, 1.0)).collect();
    lp.add_row(cols.iter().zip(&w).map(|(&j, &(_, a, _))| (j, a)).collect(), Relation::Le, 5.5);
    lp.add_row(cols.iter().zip(&w).map(|(&j, &(_, _, a))| (j, a)).collect(), Relation::Le, 7.0);
    let r = solve_mip(&lp, &MipOptions::default());
    let mut best: f64 = 0.0;
    for mask in 0u32..16 {
        let x: Vec<f64> = (0..4).map(|i| ((mask >> i) & 1) as f64).collect();
        if lp.max_violation(&x) <= 1e-12 {
            best = best.max(lp.evaluate(&x));
        }
    }
    assert!((r.objective - best).abs() < 1e-9, "{} vs {best}", r.objective);
    assert!(r.objective <= r.best_bound + 1e-9);
}

#[test]
fn integral_relaxation_solves_at_root() {
    // Bipartite assignment: totally unimodular.
    let mut lp = LinearProgram::new(Sense::Maximize);
    let cost = [[3.0, 1.0], [2.0, 4.0]];
    let mut v = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            v[i][j] = lp.add_integer_column(cost[i][j], 0.0, 1.0);
        }
    }
    for i in 0..2 {
        lp.add_row(vec![(v[i][0], 1.0), (v[i][1], 1.0)], Relation::Le, 1.0);
        lp.add_row(vec![(v[0][i], 1.0), (v[1][i], 1.0)], Relation::Le, 1.0);
    }
    let r = solve_mip(&lp, &MipOptions::default());
    assert_eq!(r.branches, 0);
    assert!((r.objective - 7.0).abs() < 1e-9);
}

#[test]
fn node_limit_reports_bound() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    let cols: Vec<usize> = (0..8).map(|i| lp.add_integer_column(1.0 + i as f64 * 0.1, 0.0, 1.0)).collect();
    lp.add_row(cols.iter().map(|&j| (j, 2.0)).collect(), Relation::Le, 7.0);
    let opts = MipOptions {
        node_limit: 2,
        ..MipOptions::default()
    };
    let r = solve_mip(&lp, &opts);
    assert!(matches!(r.status, Status::NodeLimit | Status::Optimal));
    if r.status == Status::NodeLimit {
        assert!(r.best_bound >= r.objective - 1e-9 || r.objective.is_nan());
    }
}

#[test]
fn dump_lists_rows_and_columns() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    let x = lp.add_column(1.0, 0.0, 2.0);
    lp.add_row(vec![(x, 1.0)], Relation::Le, 3.0);
    let text = lp.dump();
    assert!(text.contains("sense max"));
    assert!(text.contains("r 0 <= 3 0:1"));
}

/// Checks optimality through an explicit dual certificate: primal feasible,
/// dual feasible with respect to relation signs and column bounds, and equal
/// objective values.
fn certify(lp: &LinearProgram, r: &SolveResult) {
    assert_eq!(r.status, Status::Optimal);
    let x = &r.primal;
    assert!(lp.max_violation(x) < 1e-7, "primal violation {}", lp.max_violation(x));
    let s = if lp.sense == Sense::Maximize { 1.0 } else { -1.0 };
    // Sign conditions: for max, Le rows have y >= 0, Ge rows y <= 0.
    for (row, &y) in lp.rows.iter().zip(&r.duals) {
        match row.relation {
            Relation::Le => assert!(s * y >= -1e-7, "dual sign {y}"),
            Relation::Ge => assert!(s * y <= 1e-7, "dual sign {y}"),
            Relation::Eq => {}
        }
    }
    // Reduced costs c - A^T y, sign consistent with the bound each column sits at.
    let mut dual_obj: f64 = lp.rows.iter().zip(&r.duals).map(|(row, y)| row.rhs * y).sum();
    for j in 0..lp.num_cols() {
        let aty: f64 = lp
            .rows
            .iter()
            .zip(&r.duals)
            .map(|(row, y)| row.coeffs.iter().filter(|(c, _)| *c == j).map(|(_, a)| a * y).sum::<f64>())
            .sum();
        let d = lp.objective[j] - aty;
        let dd = s * d;
        if dd > 1e-7 {
            assert!((x[j] - lp.upper[j]).abs() < 1e-7, "col {j} d={d} not at upper");
            dual_obj += d * lp.upper[j];
        } else if dd < -1e-7 {
            assert!((x[j] - lp.lower[j]).abs() < 1e-7, "col {j} d={d} not at lower");
            dual_obj += d * lp.lower[j];
        }
    }
    let scale = 1.0 + r.objective.abs();
    assert!(
        (dual_obj - r.objective).abs() <= 1e-6 * scale,
        "primal {} dual {}",
        r.objective,
        dual_obj
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn packing_lps_satisfy_strong_duality(
        m in 1usize..8,
        n in 1usize..10,
        seed in proptest::collection::vec(0.0f64..1.0, 200),
    ) {
        let mut it = seed.into_iter().cycle();
        let mut lp = LinearProgram::new(Sense::Maximize);
        for _ in 0..n {
            let c = it.next().unwrap() * 4.0 - 1.0;
            lp.add_column(c, 0.0, INF);
        }
        for _ in 0..m {
            let coeffs = (0..n)
                .filter_map(|j| {
                    let v = it.next().unwrap();
                    (v > 0.3).then_some((j, (v * 5.0).round()))
                })
                .collect();
            lp.add_row(coeffs, Relation::Le, 1.0 + it.next().unwrap() * 9.0);
        }
        // Keep it bounded.
        lp.add_row((0..n).map(|j| (j, 1.0)).collect(), Relation::Le, 20.0);
        let r = solve_lp(&lp);
        certify(&lp, &r);
    }

    #[test]
    fn mixed_relations_satisfy_strong_duality(
        m in 1usize..7,
        n in 1usize..8,
        seed in proptest::collection::vec(0.0f64..1.0, 300),
    ) {
        let mut it = seed.into_iter().cycle();
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x0: Vec<f64> = (0..n).map(|_| it.next().unwrap() * 3.0).collect();
        for _ in 0..n {
            let lo = if it.next().unwrap() < 0.2 { -INF } else { 0.0 };
            let hi = if it.next().unwrap() < 0.3 { 3.0 } else { INF };
            lp.add_column(it.next().unwrap() * 2.0 - 0.5, lo, hi);
        }
        for _ in 0..m {
            let coeffs: Vec<(usize, f64)> = (0..n)
                .filter_map(|j| {
                    let v = it.next().unwrap();
                    (v > 0.4).then_some((j, (v * 8.0 - 4.0).round()))
                })
                .collect();
            let act: f64 = coeffs.iter().map(|&(j, a)| a * x0[j]).sum();
            let pick = it.next().unwrap();
            let (rel, rhs) = if pick < 0.33 {
                (Relation::Le, act + it.next().unwrap())
            } else if pick < 0.66 {
                (Relation::Ge, act - it.next().unwrap())
            } else {
                (Relation::Eq, act)
            };
            lp.add_row(coeffs, rel, rhs);
        }
        // Box everything so the minimum exists.
        for j in 0..n {
            lp.add_row(vec![(j, 1.0)], Relation::Ge, -10.0);
            lp.add_row(vec![(j, 1.0)], Relation::Le, 10.0);
        }
        let r = solve_lp(&lp);
        certify(&lp, &r);
    }
}

fn extend_hint(b: &Basis, cols: usize, rows: usize) -> Basis {
    let mut h = b.clone();
    h.columns.resize(cols, BasisStatus::AtLower);
    h.rows.resize(rows, BasisStatus::Basic);
    h
}

#[test]
fn warm_start_after_adding_a_cut() {
    let mut lp = LinearProgram::new(Sense::Maximize);
    let x = lp.add_column(1.0, 0.0, INF);
    let y = lp.add_column(1.0, 0.0, INF);
    lp.add_row(vec![(x, 1.0)], Relation::Le, 2.0);
    lp.add_row(vec![(y, 1.0)], Relation::Le, 2.0);
    let first = solve_lp(&lp);
    assert!((first.objective - 4.0).abs() < 1e-12);
    lp.add_row(vec![(x, 1.0), (y, 1.0)], Relation::Le, 3.0);
    let hint = extend_hint(first.basis.as_ref().unwrap(), 2, 3);
    let warm = solve_lp_warm(&lp, Some(&hint));
    certify(&lp, &warm);
    assert!((warm.objective - 3.0).abs() < 1e-12);
    // A hint of the wrong shape is ignored.
    let bad = Basis::default();
    assert!((solve_lp_warm(&lp, Some(&bad)).objective - 3.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn warm_start_matches_cold_solve(
        m in 1usize..7,
        n in 1usize..8,
        add_cols in 0usize..3,
        add_rows in 0usize..3,
        seed in proptest::collection::vec(0.0f64..1.0, 300),
    ) {
        let mut it = seed.into_iter().cycle();
        let mut lp = LinearProgram::new(Sense::Maximize);
        let add_col = |lp: &mut LinearProgram, it: &mut dyn Iterator<Item = f64>| {
            let c = it.next().unwrap() * 3.0 - 0.5;
            lp.add_column(c, 0.0, if it.next().unwrap() < 0.2 { 4.0 } else { INF })
        };
        for _ in 0..n {
            add_col(&mut lp, &mut it);
        }
        let row = |ncols: usize, it: &mut dyn Iterator<Item = f64>| -> Vec<(usize, f64)> {
            (0..ncols)
                .filter_map(|j| {
                    let v = it.next().unwrap();
                    (v > 0.35).then_some((j, (v * 4.0).round() - 1.0))
                })
                .collect()
        };
        for _ in 0..m {
            let coeffs = row(n, &mut it);
            lp.add_row(coeffs, Relation::Le, it.next().unwrap() * 6.0);
        }
        lp.add_row((0..n).map(|j| (j, 1.0)).collect(), Relation::Le, 15.0);
        let first = solve_lp(&lp);
        prop_assume!(first.status == Status::Optimal);
        // New columns enter the bounding row so the LP stays bounded.
        let bound_row = m;
        for _ in 0..add_cols {
            let j = add_col(&mut lp, &mut it);
            lp.rows[bound_row].coeffs.push((j, 1.0));
        }
        let total = lp.num_cols();
        for _ in 0..add_rows {
            let coeffs = row(total, &mut it);
            lp.add_row(coeffs, Relation::Le, it.next().unwrap() * 2.0);
        }
        let cold = solve_lp(&lp);
        let hint = extend_hint(first.basis.as_ref().unwrap(), lp.num_cols(), lp.num_rows());
        let warm = solve_lp_warm(&lp, Some(&hint));
        prop_assert_eq!(cold.status, warm.status);
        if cold.status == Status::Optimal {
            certify(&lp, &warm);
            prop_assert!((cold.objective - warm.objective).abs() <= 1e-7 * (1.0 + cold.objective.abs()));
        }
    }
}
