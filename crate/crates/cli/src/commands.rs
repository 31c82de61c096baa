use std::fmt::Write as _;
use std::fs;
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use robustflow_core::decompose::path_decompose;
use robustflow_core::hybrid::{generalization_bound, observe, EmpiricalWeights, PartitionSpec};
use robustflow_core::instances::{gen_p1, gen_p2, gen_p3, gen_rmat, RmatParams};
use robustflow_core::interdiction::{
    interdiction_upper_bound, separate_exact, separate_lp_relaxation, UpperBoundMethod,
};
use robustflow_core::io::{read_dimacs, read_json, read_observations, read_observations_json, write_dimacs, write_json};
use robustflow_core::maxflow::max_flow;
use robustflow_core::report::{bound_trace_csv, pricing_calls_csv, rows_csv, rows_table, ReportRow};
use robustflow_core::{
    run_oracle, solve_heuristic, solve_hybrid, solve_robust, FlowNetwork, Limits, Path, PathFlow,
    RobustSolution, ScenarioClass, SolverConfig,
};

use crate::args::*;

pub enum Failure {
    /// Bad flags, unreadable or malformed input.
    Usage(String),
    Failed(String),
    NotConverged(Value),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Failed(_) => 1,
            Failure::Usage(_) => 2,
            Failure::NotConverged(_) => 3,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Failure::Usage(m) => json!({"error": "usage", "message": m}),
            Failure::Failed(m) => json!({"error": "failed", "message": m}),
            Failure::NotConverged(v) => json!({"error": "not_converged", "detail": v}),
        }
    }
}

impl From<robustflow_core::Error> for Failure {
    fn from(e: robustflow_core::Error) -> Self {
        match e {
            robustflow_core::Error::Overflow { .. } => Failure::Failed(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Res<T> = Result<T, Failure>;

pub fn run(cmd: Command) -> Res<()> {
    match cmd {
        Command::Solve(a) => solve(a),
        Command::Hybrid(a) => hybrid(a),
        Command::Heuristic(a) => heuristic(a),
        Command::Interdict(a) => interdict(a),
        Command::Oracle(a) => oracle(a),
        Command::Gen(a) => generate(a),
        Command::Bound(a) => bound(a),
        Command::Bench(a) => bench(a),
    }
}

fn read_file(path: &FsPath) -> Res<String> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &FsPath, text: &str) -> Res<()> {
    fs::write(path, text).map_err(|e| Failure::Failed(format!("cannot write {}: {e}", path.display())))
}

fn is_json(path: &FsPath) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn load(io: &InputArgs) -> Res<FlowNetwork> {
    let text = read_file(&io.input)?;
    let format = io
        .format
        .unwrap_or(if is_json(&io.input) { Format::Json } else { Format::Dimacs });
    let net = match format {
        Format::Dimacs => read_dimacs(&text),
        Format::Json => read_json(&text),
    };
    net.map_err(|e| Failure::Usage(format!("{}: {e}", io.input.display())))
}

fn limits(io: &InputArgs) -> Limits {
    io.limits.unwrap_or_default()
}

fn config(k: usize, run: &LoopArgs, limits: Limits) -> Res<SolverConfig> {
    let mut c = SolverConfig::new(k);
    c.gap_tolerance = run.tol;
    c.max_interdictions_per_iter = run.max_interdictions_per_iter;
    c.seed = run.seed;
    c.limits = limits;
    if let Some(m) = run.max_iterations {
        c.max_iterations = m;
    }
    c.validate()?;
    Ok(c)
}

#[derive(Serialize, Deserialize)]
struct FlowEntry {
    arcs: Vec<usize>,
    rate: f64,
}

fn flow_entries(x: &PathFlow) -> Vec<FlowEntry> {
    x.iter()
        .map(|(p, r)| FlowEntry {
            arcs: p.arcs().to_vec(),
            rate: r,
        })
        .collect()
}

fn flow_lines(x: &PathFlow, out: &mut String) {
    for (p, r) in x.iter() {
        let _ = writeln!(out, "  {r:<12} {:?}", p.arcs());
    }
}

fn table(pairs: &[(&str, String)]) -> String {
    let w = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in pairs {
        let _ = writeln!(out, "{k:<w$}  {v}");
    }
    out
}

fn write_traces(run: &LoopArgs, sol: &RobustSolution) -> Res<()> {
    if let Some(p) = &run.trace {
        write_file(p, &bound_trace_csv(sol))?;
    }
    if let Some(p) = &run.pricing_trace {
        write_file(p, &pricing_calls_csv(sol))?;
    }
    Ok(())
}

fn solution_json(sol: &RobustSolution) -> Value {
    let st = &sol.state;
    json!({
        "status": st.status,
        "value": sol.value,
        "primal_bound": st.primal_bound,
        "dual_bound": st.dual_bound,
        "iterations": st.iterations,
        "separation_calls": st.separation_calls,
        "paths_active": st.active_paths(),
        "paths_generated": st.paths.len(),
        "scenarios_active": st.active_scenarios(),
        "scenarios_generated": st.scenarios_generated(),
        "heuristic_value": st.heuristic_value,
        "flow": flow_entries(&sol.flow),
        "log": st.log,
    })
}

fn solution_table(sol: &RobustSolution, extra: &[(&str, String)]) -> String {
    let st = &sol.state;
    let mut pairs = vec![
        ("status", serde_json::to_value(st.status).unwrap().as_str().unwrap_or_default().to_string()),
        ("value", sol.value.to_string()),
        ("primal bound", st.primal_bound.to_string()),
        ("dual bound", st.dual_bound.to_string()),
        ("iterations", st.iterations.to_string()),
        ("paths", format!("{} active / {} generated", st.active_paths(), st.paths.len())),
        (
            "scenarios",
            format!("{} active / {} generated", st.active_scenarios(), st.scenarios_generated()),
        ),
        ("heuristic value", st.heuristic_value.to_string()),
    ];
    pairs.extend(extra.iter().cloned());
    let mut out = table(&pairs);
    out.push_str("flow\n");
    flow_lines(&sol.flow, &mut out);
    out
}

fn check_converged(sol: &RobustSolution) -> Res<()> {
    if sol.converged() {
        return Ok(());
    }
    Err(Failure::NotConverged(json!({
        "status": sol.state.status,
        "primal_bound": sol.state.primal_bound,
        "dual_bound": sol.state.dual_bound,
        "iterations": sol.state.iterations,
    })))
}

fn solve(a: SolveArgs) -> Res<()> {
    let io = &a.base.io;
    let net = load(io)?;
    let k = a.base.k;
    let config = config(k, &a.run, limits(io))?;
    let sol = solve_robust(&net, &config)?;
    let ub = if a.upper_bound {
        Some(interdiction_upper_bound(&net, k, limits(io).scenarios)?.value)
    } else {
        None
    };
    write_traces(&a.run, &sol)?;
    let text = match io.output {
        Output::Json => {
            let mut v = solution_json(&sol);
            v["interdiction_bound"] = json!(ub);
            format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
        }
        Output::Csv => rows_csv(&[ReportRow::new(io.input.display().to_string(), k, &sol, ub)], false),
        Output::Table => {
            let extra: Vec<(&str, String)> = ub.iter().map(|u| ("interdiction bound", u.to_string())).collect();
            solution_table(&sol, &extra)
        }
    };
    print!("{text}");
    check_converged(&sol)
}

fn parse_classes(net: &FlowNetwork, a: &HybridArgs) -> Res<Vec<ScenarioClass>> {
    let mut plain = Vec::new();
    let mut pairs = Vec::new();
    for c in &a.classes {
        let bad = || Failure::Usage(format!("bad class {c:?}: expected k or j:k"));
        match c.split_once(':') {
            None => plain.push(c.trim().parse::<usize>().map_err(|_| bad())?),
            Some((j, k)) => pairs.push((
                j.trim().parse::<usize>().map_err(|_| bad())?,
                k.trim().parse::<usize>().map_err(|_| bad())?,
            )),
        }
    }
    let spec = match (plain.is_empty(), pairs.is_empty()) {
        (false, true) => PartitionSpec::Cardinality(plain),
        (true, false) => {
            let exposed = a
                .exposed
                .clone()
                .ok_or_else(|| Failure::Usage("two-tier classes need --exposed".into()))?;
            let regular = net.interdictable().into_iter().filter(|e| !exposed.contains(e)).collect();
            PartitionSpec::TwoTier {
                regular,
                exposed,
                pairs,
            }
        }
        _ => return Err(Failure::Usage("classes mix k and j:k forms".into())),
    };
    Ok(spec.classes(net)?)
}

fn hybrid(a: HybridArgs) -> Res<()> {
    let net = load(&a.io)?;
    let classes = parse_classes(&net, &a)?;
    let counts: Option<EmpiricalWeights> = match &a.observations {
        Some(p) => {
            let text = read_file(p)?;
            let obs = if is_json(p) {
                read_observations_json(&net, &text)
            } else {
                read_observations(&net, &text)
            }
            .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            Some(observe(&classes, &obs)?)
        }
        None => None,
    };
    let weights = match (&a.weights, &counts) {
        (Some(w), _) => w.clone(),
        (None, Some(c)) => c.weights(),
        (None, None) => return Err(Failure::Usage("give --weights or --observations".into())),
    };
    let k = classes.iter().map(|c| c.size()).max().unwrap_or(0);
    let config = config(k, &a.run, limits(&a.io))?;
    let sol = solve_hybrid(&net, &classes, &weights, &config)?;
    let bound = match (a.delta, &counts) {
        (Some(delta), Some(c)) => Some(generalization_bound(&net, &sol.flow, &classes, c, delta)?),
        _ => None,
    };
    write_traces(&a.run, &sol)?;
    let text = match a.io.output {
        Output::Json => {
            let mut v = solution_json(&sol);
            v["weights"] = json!(weights);
            v["generalization_bound"] = json!(bound);
            format!("{}\n", serde_json::to_string_pretty(&v).unwrap())
        }
        Output::Csv => rows_csv(&[ReportRow::new(a.io.input.display().to_string(), k, &sol, None)], false),
        Output::Table => {
            let mut extra = vec![("weights", format!("{weights:?}"))];
            if let Some(b) = &bound {
                extra.push(("empirical value", b.empirical.to_string()));
                extra.push(("complexity term", b.complexity.to_string()));
                extra.push(("confidence term", b.confidence.to_string()));
                extra.push(("lower bound", b.bound.to_string()));
            }
            solution_table(&sol, &extra)
        }
    };
    print!("{text}");
    check_converged(&sol)
}

fn emit(output: Output, value: Value, pairs: &[(&str, String)], flow: Option<&PathFlow>) {
    match output {
        Output::Json => println!("{}", serde_json::to_string_pretty(&value).unwrap()),
        Output::Csv => {
            let keys: Vec<&str> = pairs.iter().map(|(k, _)| *k).collect();
            let vals: Vec<&str> = pairs.iter().map(|(_, v)| v.as_str()).collect();
            println!("{}\n{}", keys.join(","), vals.join(","));
        }
        Output::Table => {
            let mut out = table(pairs);
            if let Some(x) = flow {
                out.push_str("flow\n");
                flow_lines(x, &mut out);
            }
            print!("{out}");
        }
    }
}

fn heuristic(a: KArgs) -> Res<()> {
    let net = load(&a.io)?;
    net.validate()?;
    let h = solve_heuristic(&net, a.k);
    let load_max = h.flow.max_interdictable_load(&net);
    emit(
        a.io.output,
        json!({
            "value": h.value,
            "theta": h.theta,
            "flow_value": h.flow.value(),
            "max_interdictable_load": load_max,
            "flow": flow_entries(&h.flow),
        }),
        &[
            ("value", h.value.to_string()),
            ("theta", h.theta.to_string()),
            ("flow_value", h.flow.value().to_string()),
            ("max_interdictable_load", load_max.to_string()),
        ],
        Some(&h.flow),
    );
    Ok(())
}

fn read_flow(net: &FlowNetwork, path: &FsPath) -> Res<PathFlow> {
    let bad = |m: String| Failure::Usage(format!("{}: {m}", path.display()));
    let mut v: Value = serde_json::from_str(&read_file(path)?).map_err(|e| bad(e.to_string()))?;
    if let Some(f) = v.get_mut("flow") {
        v = f.take();
    }
    let entries: Vec<FlowEntry> = serde_json::from_value(v).map_err(|e| bad(e.to_string()))?;
    let mut x = PathFlow::new();
    for e in entries {
        if !(e.rate >= 0.0) {
            return Err(bad(format!("negative rate {}", e.rate)));
        }
        x.add(Path::new(net, e.arcs).map_err(|e| bad(e.to_string()))?, e.rate);
    }
    Ok(x)
}

fn interdict(a: InterdictArgs) -> Res<()> {
    let io = &a.base.io;
    let net = load(io)?;
    net.validate()?;
    let x = match &a.flow {
        Some(p) => read_flow(&net, p)?,
        None => {
            let mf = max_flow(&net, None);
            path_decompose(&net, &mf.arc_flow, 1e-12 * net.total_capacity().max(1.0))?
        }
    };
    let class = ScenarioClass::cardinality(&net, a.base.k);
    let sep = separate_exact(&net, &x, &class, None);
    let (_, lp) = separate_lp_relaxation(&net, &x, &class);
    let surviving = x.value() - sep.destroyed;
    emit(
        io.output,
        json!({
            "scenario": sep.scenario.arcs(),
            "destroyed": sep.destroyed,
            "surviving": surviving,
            "flow_value": x.value(),
            "lp_bound": lp,
        }),
        &[
            ("scenario", format!("{:?}", sep.scenario.arcs())),
            ("destroyed", sep.destroyed.to_string()),
            ("surviving", surviving.to_string()),
            ("flow_value", x.value().to_string()),
            ("lp_bound", lp.to_string()),
        ],
        None,
    );
    Ok(())
}

fn oracle(a: KArgs) -> Res<()> {
    let net = load(&a.io)?;
    let sol = run_oracle(&net, a.k, &limits(&a.io))?;
    emit(
        a.io.output,
        json!({"value": sol.value, "flow": flow_entries(&sol.flow)}),
        &[("value", sol.value.to_string())],
        Some(&sol.flow),
    );
    Ok(())
}

fn bound(a: KArgs) -> Res<()> {
    let net = load(&a.io)?;
    net.validate()?;
    let b = interdiction_upper_bound(&net, a.k, limits(&a.io).scenarios)?;
    let method = match b.method {
        UpperBoundMethod::ScenarioEnumeration => "scenario_enumeration",
        UpperBoundMethod::CutEnumeration => "cut_enumeration",
    };
    emit(
        a.io.output,
        json!({"value": b.value, "scenario": b.scenario.arcs(), "method": method}),
        &[
            ("value", b.value.to_string()),
            ("scenario", format!("{:?}", b.scenario.arcs())),
            ("method", method.to_string()),
        ],
        None,
    );
    Ok(())
}

/// Instance label, whether it depends on the seed, and a generator.
fn family(f: &FamilyArgs) -> (String, bool, impl Fn(u64) -> robustflow_core::Result<FlowNetwork> + '_) {
    let label = match f.family {
        Family::P1 => format!("P1 M={} n={}", f.big_m.unwrap_or(50), f.n.unwrap_or(20)),
        Family::P2 => format!("P2 n={} m0={}", f.n.unwrap_or(5), f.m0.unwrap_or(20)),
        Family::P3 => format!("P3 n={} m={} M={}", f.n.unwrap_or(1), f.m.unwrap_or(1), f.big_m.unwrap_or(2)),
        Family::Rmat => format!("R-MAT {}x{}", f.nodes.unwrap_or(1000), f.arcs.unwrap_or(2000)),
    };
    let seeded = matches!(f.family, Family::P2 | Family::Rmat);
    let build = move |seed: u64| match f.family {
        Family::P1 => gen_p1(f.big_m.unwrap_or(50), f.n.unwrap_or(20)),
        Family::P2 => gen_p2(f.n.unwrap_or(5), f.m0.unwrap_or(20), seed),
        Family::P3 => gen_p3(f.n.unwrap_or(1), f.m.unwrap_or(1), f.big_m.unwrap_or(2)),
        Family::Rmat => gen_rmat(
            f.nodes.unwrap_or(1000),
            f.arcs.unwrap_or(2000),
            f.rmat.unwrap_or(RmatParams::RMAT_A),
            seed,
        ),
    };
    (label, seeded, build)
}

fn generate(a: GenArgs) -> Res<()> {
    let (_, _, build) = family(&a.family);
    let net = build(a.seed)?;
    let text = match a.format {
        Format::Dimacs => write_dimacs(&net),
        Format::Json => format!("{}\n", write_json(&net)),
    };
    match &a.out {
        Some(p) => write_file(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn bench(a: BenchArgs) -> Res<()> {
    let (label, seeded, build) = family(&a.family);
    let seeds: Vec<u64> = if seeded { (0..a.seeds.max(1)).collect() } else { vec![0] };
    let limits = a.limits.unwrap_or_default();
    if let Some(dir) = &a.trace_dir {
        fs::create_dir_all(dir).map_err(|e| Failure::Failed(format!("cannot create {}: {e}", dir.display())))?;
    }
    let mut rows = Vec::new();
    for &k in &a.k {
        let mut runs = Vec::new();
        for &seed in &seeds {
            let net = build(seed)?;
            let mut config = SolverConfig::new(k);
            config.gap_tolerance = a.tol;
            config.max_interdictions_per_iter = a.max_interdictions_per_iter;
            config.limits = limits;
            config.seed = seed;
            config.validate()?;
            let sol = solve_robust(&net, &config)?;
            let ub = if a.no_upper_bound {
                None
            } else {
                match interdiction_upper_bound(&net, k, limits.scenarios) {
                    Ok(b) => Some(b.value),
                    Err(e) => {
                        log::warn!("{label} seed {seed}: no interdiction bound: {e}");
                        None
                    }
                }
            };
            log::info!("{label} k={k} seed {seed}: value {} in {} iterations", sol.value, sol.state.iterations);
            if let Some(dir) = &a.trace_dir {
                let stem = format!("{}_k{k}_s{seed}", label.replace([' ', '='], "_"));
                write_file(&dir.join(format!("{stem}_bounds.csv")), &bound_trace_csv(&sol))?;
                write_file(&dir.join(format!("{stem}_pricing.csv")), &pricing_calls_csv(&sol))?;
            }
            runs.push(ReportRow::new(format!("{label} seed={seed}"), k, &sol, ub));
        }
        rows.extend(ReportRow::max_over(label.clone(), &runs));
    }
    let text = match a.output {
        Output::Table => rows_table(&rows, a.percent),
        Output::Csv => rows_csv(&rows, a.percent),
        Output::Json => format!("{}\n", serde_json::to_string_pretty(&rows).unwrap()),
    };
    print!("{text}");
    if rows.iter().all(|r| r.converged) {
        Ok(())
    } else {
        Err(Failure::NotConverged(json!({
            "unconverged": rows.iter().filter(|r| !r.converged).map(|r| json!({"instance": r.instance, "k": r.k})).collect::<Vec<_>>(),
        })))
    }
}
