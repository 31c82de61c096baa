mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robustflow_core::enumerate::enumerate_simple_paths;
use robustflow_core::heuristic::{approximation_bound, verify_guarantee};
use robustflow_core::hybrid::{
    bound_terms, generalization_bound, minimax_check, observe, weighted_worst_value, PartitionSpec,
};
use robustflow_core::instances::{gen_p2, gen_p3, gen_rmat, RmatParams};
use robustflow_core::interdiction::{
    interdiction_upper_bound, separate_exact, separate_lp_relaxation, worst_case_by_enumeration,
};
use robustflow_core::io::{read_dimacs, write_dimacs};
use robustflow_core::oracle::{run_hybrid_oracle, run_stochastic_oracle, OracleSolution};
use robustflow_core::pricing::{price_path, DualPrices, PRICE_TOL};
use robustflow_core::report::{p3_default_grid, relative_gap};
use robustflow_core::{
    run_oracle, solve_heuristic, solve_hybrid, solve_robust, FlowNetwork, Limits, PathFlow,
    RobustSolution, Scenario, ScenarioClass, SolverConfig,
};

type Outcome = Result<String, String>;

struct Case {
    net: FlowNetwork,
    k: usize,
    oracle: OracleSolution,
    solution: RobustSolution,
    seconds: f64,
}

const CASES: usize = 200;

fn cases() -> &'static [Case] {
    static CASES_CELL: OnceLock<Vec<Case>> = OnceLock::new();
    CASES_CELL.get_or_init(|| {
        (0..CASES)
            .map(|i| {
                let net = common::random_instance(1000 + i as u64, true);
                let k = 1 + i % 3;
                let oracle = run_oracle(&net, k, &Limits::default()).expect("oracle solves tiny instances");
                let start = Instant::now();
                let solution = solve_robust(&net, &SolverConfig::new(k)).expect("solver runs");
                Case {
                    net,
                    k,
                    oracle,
                    solution,
                    seconds: start.elapsed().as_secs_f64(),
                }
            })
            .collect()
    })
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let cases = cases();
    let mut worst: f64 = 0.0;
    for (i, c) in cases.iter().enumerate() {
        let diff = (c.solution.value - c.oracle.value).abs();
        worst = worst.max(diff);
        ensure(diff <= 1e-6, || {
            format!(
                "instance {i} (k={}): solver {} vs oracle {}",
                c.k, c.solution.value, c.oracle.value
            )
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}"))?;
    let solver: f64 = cases.iter().map(|c| c.seconds).sum();
    Ok(format!(
        "{} instances, max |diff| {worst:.2e}, solver time {solver:.2}s",
        cases.len()
    ))
}

fn heuristic_guarantee() -> Outcome {
    for i in 0..100u64 {
        let net = common::random_instance(5000 + i, false);
        let k = 1 + (i as usize) % 3;
        let h = solve_heuristic(&net, k);
        ensure(verify_guarantee(&net, &h.flow, k), || {
            format!("instance {i} (k={k}): worst case differs from |x| - k max load")
        })?;
    }
    Ok("100/100 instances".into())
}

fn approximation_ratio() -> Outcome {
    let mut checked = 0;
    let mut tightest = f64::INFINITY;
    for (i, c) in cases().iter().enumerate() {
        if c.oracle.value <= 1e-9 {
            continue;
        }
        let h = solve_heuristic(&c.net, c.k).value;
        let ratio = h / c.oracle.value;
        let bound = approximation_bound(c.k);
        tightest = tightest.min(ratio - bound);
        ensure(ratio >= bound - 1e-9, || {
            format!("instance {i} (k={}): ratio {ratio} below {bound}", c.k)
        })?;
        checked += 1;
    }
    Ok(format!("{checked} instances, smallest slack {tightest:.4}"))
}

fn gaps(net: &FlowNetwork, k: usize) -> (f64, f64, f64) {
    let sol = solve_robust(net, &SolverConfig::new(k)).expect("solver runs");
    assert!(sol.converged(), "solver did not converge: {:?}", sol.state.status);
    let heuristic = solve_heuristic(net, k).value;
    let upper = interdiction_upper_bound(net, k, 1_000_000).expect("bound is computable").value;
    (
        sol.value,
        relative_gap(sol.value, heuristic),
        relative_gap(sol.value, upper).abs(),
    )
}

fn gap_structure() -> Outcome {
    let mut p2 = Vec::new();
    for seed in 0..3 {
        let net = gen_p2(5, 20, seed).map_err(|e| e.to_string())?;
        let (value, hg, ig) = gaps(&net, 5);
        ensure(hg == 0.0 && ig == 0.0, || {
            format!("P2 seed {seed}: heuristic gap {hg}, interdiction gap {ig}")
        })?;
        p2.push(format!("{value:.2}"));
    }
    for k in [2, 3] {
        for (n, m, big_m) in p3_default_grid() {
            let net = gen_p3(n, m, big_m).map_err(|e| e.to_string())?;
            let (value, hg, ig) = gaps(&net, k);
            if hg > 0.0 && ig > 0.0 {
                return Ok(format!(
                    "P2 values [{}] with zero gaps; P3 n={n} m={m} M={big_m} k={k}: \
                     optimum {value:.4}, heuristic gap {:.2}%, interdiction gap {:.2}%",
                    p2.join(", "),
                    100.0 * hg,
                    100.0 * ig
                ));
            }
        }
    }
    Err("no P3 grid cell has both gaps positive".into())
}

fn bound_sandwich() -> Outcome {
    let mut iterations = 0;
    for (i, c) in cases().iter().enumerate() {
        let st = &c.solution.state;
        for log in &st.log {
            ensure(log.primal_bound <= log.dual_bound + 1e-9, || {
                format!(
                    "instance {i} iteration {}: primal {} above dual {}",
                    log.iteration, log.primal_bound, log.dual_bound
                )
            })?;
        }
        ensure(c.solution.converged() && st.gap() <= 1e-6, || {
            format!("instance {i}: status {:?}, gap {}", st.status, st.gap())
        })?;
        iterations += st.iterations;
        let mut config = SolverConfig::new(c.k);
        config.max_interdictions_per_iter = Some(10);
        let restricted = solve_robust(&c.net, &config).map_err(|e| e.to_string())?;
        let scale = c.solution.value.abs().max(1.0);
        ensure((restricted.value - c.solution.value).abs() <= 1e-4 * scale, || {
            format!(
                "instance {i}: restricted {} vs unrestricted {}",
                restricted.value, c.solution.value
            )
        })?;
    }
    Ok(format!("{} instances, {iterations} iterations in total", cases().len()))
}

fn random_flow(net: &FlowNetwork, rng: &mut ChaCha8Rng) -> PathFlow {
    let paths = enumerate_simple_paths(net, common::MAX_PATHS).expect("instances are small");
    PathFlow::from_pairs(
        paths
            .into_iter()
            .filter_map(|p| rng.random_bool(0.6).then(|| (p, rng.random_range(1..=4u32) as f64 / 4.0))),
    )
}

fn interdiction_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let ratio = 1.0 - (-1.0f64).exp();
    let mut checked = 0;
    for (i, c) in cases().iter().enumerate() {
        let class = ScenarioClass::cardinality(&c.net, c.k);
        if class.count() > 10_000 {
            continue;
        }
        let all = class.enumerate(10_000).map_err(|e| e.to_string())?;
        let flows = [
            c.oracle.flow.clone(),
            c.solution.flow.clone(),
            solve_heuristic(&c.net, c.k).flow,
            random_flow(&c.net, &mut rng),
        ];
        for x in &flows {
            let exact = separate_exact(&c.net, x, &class, None).destroyed;
            let brute = worst_case_by_enumeration(x, &all).map_or(0.0, |(_, d)| d);
            ensure((exact - brute).abs() <= 1e-9, || {
                format!("instance {i}: separation {exact} vs enumeration {brute}")
            })?;
            let (_, lp) = separate_lp_relaxation(&c.net, x, &class);
            ensure(lp >= exact - 1e-9 && exact >= ratio * lp - 1e-9, || {
                format!("instance {i}: exact {exact} outside [(1-1/e) {lp}, {lp}]")
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} flows checked"))
}

fn assert_no_better_path(net: &FlowNetwork, prices: &DualPrices, what: &str) -> Result<(), String> {
    let paths = enumerate_simple_paths(net, common::MAX_PATHS).map_err(|e| e.to_string())?;
    match paths.iter().map(|p| prices.reduced_price(p)).fold(None, |m: Option<f64>, v| {
        Some(m.map_or(v, |m| m.max(v)))
    }) {
        Some(best) if best > 1e-7 => Err(format!("{what}: no path returned but one has price {best}")),
        _ => Ok(()),
    }
}

fn pricing_certificate() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut none_cases = 0;
    let mut found = 0;
    for (i, c) in cases().iter().enumerate() {
        if let Some(master) = &c.solution.state.master {
            let scen = c.solution.state.scenarios[0].items();
            let prices = DualPrices::new(
                master.arc_duals.clone(),
                scen.iter().cloned().zip(master.scenario_duals[0].iter().copied()),
                PRICE_TOL,
            );
            if price_path(&c.net, &prices, None).is_none() {
                assert_no_better_path(&c.net, &prices, &format!("instance {i} final duals"))?;
                none_cases += 1;
            }
        }
        let pool = c.net.interdictable();
        for draw in 0..3 {
            let arcs: Vec<f64> = (0..c.net.arc_count())
                .map(|_| if rng.random_bool(0.5) { rng.random_range(0.0..0.6) } else { 0.0 })
                .collect();
            let mut scenarios = Vec::new();
            if !pool.is_empty() {
                for _ in 0..rng.random_range(0..6) {
                    let pick: Vec<usize> = (0..c.k.min(pool.len()))
                        .map(|_| pool[rng.random_range(0..pool.len())])
                        .collect::<std::collections::BTreeSet<_>>()
                        .into_iter()
                        .collect();
                    let s = Scenario::new(&c.net, pick).map_err(|e| e.to_string())?;
                    scenarios.push((s, rng.random_range(0.0..0.5)));
                }
            }
            let prices = DualPrices::new(arcs, scenarios, PRICE_TOL);
            match price_path(&c.net, &prices, None) {
                None => {
                    assert_no_better_path(&c.net, &prices, &format!("instance {i} draw {draw}"))?;
                    none_cases += 1;
                }
                Some(p) => {
                    ensure((prices.reduced_price(&p.path) - p.price).abs() <= 1e-9 && p.price > 0.0, || {
                        format!("instance {i} draw {draw}: reported price {} is wrong", p.price)
                    })?;
                    found += 1;
                }
            }
        }
    }
    Ok(format!("{none_cases} empty pricing results certified, {found} paths returned"))
}

fn minimax() -> Outcome {
    let partitions: [&[usize]; 4] = [&[1], &[0, 2], &[1, 2], &[0, 1, 2]];
    let weight_sets: [&[f64]; 8] = [
        &[1.0],
        &[1.0, 0.0],
        &[0.3, 0.7],
        &[0.0, 1.0],
        &[0.5, 0.5],
        &[0.2, 0.3, 0.5],
        &[0.0, 0.0, 1.0],
        &[1.0, 0.0, 0.0],
    ];
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    for i in 0..24u64 {
        let net = common::tiny_instance(i);
        let parts = partitions[i as usize % partitions.len()];
        let pool = net.interdictable().len();
        let parts: Vec<usize> = parts.iter().copied().filter(|&k| k <= pool).collect();
        let candidates: Vec<&[f64]> = weight_sets.iter().copied().filter(|w| w.len() == parts.len()).collect();
        let weights = candidates[(i as usize / partitions.len()) % candidates.len()];
        let classes = PartitionSpec::Cardinality(parts.clone())
            .classes(&net)
            .map_err(|e| e.to_string())?;
        let check = minimax_check(&net, &classes, weights, 1e-6, &Limits::default()).map_err(|e| e.to_string())?;
        worst = worst.max((check.lhs - check.rhs).abs());
        ensure(check.pass && (check.lhs - check.rhs).abs() <= 1e-6, || {
            format!(
                "instance {i} classes {parts:?} weights {weights:?}: lhs {} rhs {}",
                check.lhs, check.rhs
            )
        })?;
        checked += 1;
    }
    Ok(format!("{checked} instances, max |lhs - rhs| {worst:.2e}"))
}

fn six_arc_network() -> FlowNetwork {
    let mut net = FlowNetwork::new(4, 0, 3);
    net.add_arc(0, 1, 0.3, false);
    net.add_arc(0, 2, 0.25, false);
    net.add_arc(1, 3, 0.2, false);
    net.add_arc(2, 3, 0.3, false);
    net.add_arc(1, 2, 0.1, false);
    net.add_arc(0, 3, 0.15, false);
    net
}

fn generalization() -> Outcome {
    let net = six_arc_network();
    let classes = PartitionSpec::Cardinality(vec![0, 1, 2])
        .classes(&net)
        .map_err(|e| e.to_string())?;
    let truth = [0.5, 0.3, 0.2];
    let members: Vec<Vec<Scenario>> = classes
        .iter()
        .map(|c| c.enumerate(1000).expect("small classes"))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (n, delta, trials) = (200, 0.1, 500);
    let mut held = 0;
    for _ in 0..trials {
        let sample: Vec<Scenario> = (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                let c = if u < truth[0] {
                    0
                } else if u < truth[0] + truth[1] {
                    1
                } else {
                    2
                };
                members[c][rng.random_range(0..members[c].len())].clone()
            })
            .collect();
        let counts = observe(&classes, &sample).map_err(|e| e.to_string())?;
        let x = run_hybrid_oracle(&net, &classes, &counts.weights(), &Limits::default())
            .map_err(|e| e.to_string())?
            .flow;
        let bound = generalization_bound(&net, &x, &classes, &counts, delta).map_err(|e| e.to_string())?;
        if bound.bound <= weighted_worst_value(&net, &x, &classes, &truth) + 1e-12 {
            held += 1;
        }
    }
    let rate = held as f64 / trials as f64;
    ensure(rate >= 0.95, || format!("bound held in {held}/{trials} trials"))?;
    let lambdas: Vec<f64> = classes.iter().map(|c| c.lambda_star(&net)).collect();
    let (complexity, confidence) = bound_terms(&lambdas, &truth, 100_000_000, delta).map_err(|e| e.to_string())?;
    ensure(complexity + confidence <= 1e-3, || {
        format!("correction at N = 1e8 is {}", complexity + confidence)
    })?;
    Ok(format!(
        "bound held in {held}/{trials} trials; correction at N = 1e8 is {:.2e}",
        complexity + confidence
    ))
}

fn hybrid_consistency() -> Outcome {
    for (i, c) in cases().iter().take(50).enumerate() {
        let class = ScenarioClass::cardinality(&c.net, c.k);
        let h = solve_hybrid(&c.net, &[class], &[1.0], &SolverConfig::new(c.k)).map_err(|e| e.to_string())?;
        ensure((h.value - c.solution.value).abs() <= 1e-6, || {
            format!("instance {i}: hybrid {} vs robust {}", h.value, c.solution.value)
        })?;
    }
    let q = [0.5, 0.3, 0.2];
    let mut checked = 0;
    for i in 0..30u64 {
        let net = common::tiny_instance(100 + i);
        let pool = net.interdictable().len();
        if pool < 2 {
            continue;
        }
        let classes = PartitionSpec::Cardinality(vec![0, 1, 2])
            .classes(&net)
            .map_err(|e| e.to_string())?;
        let mut config = SolverConfig::new(2);
        config.seed = i;
        let hybrid = solve_hybrid(&net, &classes, &q, &config).map_err(|e| e.to_string())?;
        // Spread each class mass uniformly over its members.
        let mut distribution = Vec::new();
        for (class, &mass) in classes.iter().zip(&q) {
            let all = class.enumerate(1000).map_err(|e| e.to_string())?;
            let each = mass / all.len() as f64;
            distribution.extend(all.into_iter().map(|s| (s, each)));
        }
        let stochastic = run_stochastic_oracle(&net, &distribution, &Limits::default()).map_err(|e| e.to_string())?;
        ensure(hybrid.value <= stochastic.value + 1e-6, || {
            format!("instance {i}: hybrid {} above stochastic {}", hybrid.value, stochastic.value)
        })?;
        checked += 1;
    }
    Ok(format!("50 single-class instances match; hybrid below stochastic on {checked} instances"))
}

fn reproducibility() -> Outcome {
    let a = gen_p2(5, 20, 11).map_err(|e| e.to_string())?;
    let b = gen_p2(5, 20, 11).map_err(|e| e.to_string())?;
    ensure(write_dimacs(&a) == write_dimacs(&b), || "P2 instances differ".into())?;
    let r1 = gen_rmat(64, 200, RmatParams::RMAT_A, 4).map_err(|e| e.to_string())?;
    let r2 = gen_rmat(64, 200, RmatParams::RMAT_A, 4).map_err(|e| e.to_string())?;
    ensure(write_dimacs(&r1) == write_dimacs(&r2), || "R-MAT instances differ".into())?;

    let small = gen_p2(4, 6, 5).map_err(|e| e.to_string())?;
    let config = SolverConfig::new(3);
    let s1 = solve_robust(&small, &config).map_err(|e| e.to_string())?;
    let s2 = solve_robust(&small, &config).map_err(|e| e.to_string())?;
    let log = |s: &RobustSolution| serde_json::to_string(&(&s.state.log, &s.state.pricing_calls)).unwrap();
    ensure(log(&s1) == log(&s2), || "iteration logs differ between runs".into())?;

    let mut nets = vec![a, r1, small];
    nets.extend((0..20).map(|i| common::random_instance(i, true)));
    for (i, net) in nets.iter().enumerate() {
        let text = write_dimacs(net);
        let back = read_dimacs(&text).map_err(|e| e.to_string())?;
        ensure(&back == net && write_dimacs(&back) == text, || {
            format!("network {i} changed in a DIMACS round trip")
        })?;
    }
    Ok(format!(
        "instances and {} log entries identical; {} DIMACS round trips exact",
        s1.state.log.len(),
        nets.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("oracle equivalence", oracle_equivalence),
        ("heuristic guarantee", heuristic_guarantee),
        ("approximation ratio", approximation_ratio),
        ("gap structure", gap_structure),
        ("bound sandwich and convergence", bound_sandwich),
        ("interdiction exactness", interdiction_exactness),
        ("pricing certificate", pricing_certificate),
        ("minimax equality", minimax),
        ("generalization bound", generalization),
        ("hybrid consistency", hybrid_consistency),
        ("reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}; {secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({detail}; {secs:.1}s)", i + 1)
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
