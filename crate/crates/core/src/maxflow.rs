//! Dinic's maximum flow on the arc list of a `FlowNetwork`.

use std::collections::VecDeque;

use crate::network::FlowNetwork;

#[derive(Clone, Debug)]
pub struct MaxFlow {
    pub value: f64,
    /// Flow per original arc.
    pub arc_flow: Vec<f64>,
    /// Nodes reachable from the source in the final residual graph.
    pub source_side: Vec<bool>,
}

impl MaxFlow {
    /// Arcs leaving the source side of the minimum cut.
    pub fn cut_arcs(&self, net: &FlowNetwork) -> Vec<usize> {
        net.arcs
            .iter()
            .enumerate()
            .filter(|(_, a)| self.source_side[a.tail] && !self.source_side[a.head])
            .map(|(i, _)| i)
            .collect()
    }
}

struct Residual {
    head: Vec<usize>,
    cap: Vec<f64>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    fn push_edge(&mut self, u: usize, v: usize, c: f64) {
        self.adj[u].push(self.head.len());
        self.head.push(v);
        self.cap.push(c);
        self.adj[v].push(self.head.len());
        self.head.push(u);
        self.cap.push(0.0);
    }
}

/// Maximum s-t flow. `cap_override` replaces the arc capacities when given.
pub fn max_flow(net: &FlowNetwork, cap_override: Option<&[f64]>) -> MaxFlow {
    let n = net.node_count;
    let caps: Vec<f64> = match cap_override {
        Some(c) => c.to_vec(),
        None => net.capacities(),
    };
    let scale = caps.iter().cloned().fold(1.0, f64::max);
    let eps = 1e-13 * scale;

    let mut g = Residual {
        head: Vec::with_capacity(2 * net.arcs.len()),
        cap: Vec::with_capacity(2 * net.arcs.len()),
        adj: vec![Vec::new(); n],
    };
    for (a, &c) in net.arcs.iter().zip(&caps) {
        g.push_edge(a.tail, a.head, c.max(0.0));
    }

    let (s, t) = (net.source, net.sink);
    let mut value = 0.0;
    let mut level = vec![usize::MAX; n];
    let mut next = vec![0usize; n];
    loop {
        level.iter_mut().for_each(|l| *l = usize::MAX);
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &id in &g.adj[u] {
                let v = g.head[id];
                if g.cap[id] > eps && level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if level[t] == usize::MAX {
            break;
        }
        next.iter_mut().for_each(|x| *x = 0);
        loop {
            let pushed = augment(&mut g, &level, &mut next, s, t, eps);
            if pushed <= 0.0 {
                break;
            }
            value += pushed;
        }
    }

    let arc_flow = (0..net.arcs.len()).map(|i| g.cap[2 * i + 1]).collect();
    MaxFlow {
        value,
        arc_flow,
        source_side: level.iter().map(|&l| l != usize::MAX).collect(),
    }
}

/// One blocking-flow augmentation along a level-graph path, iterative DFS.
fn augment(g: &mut Residual, level: &[usize], next: &mut [usize], s: usize, t: usize, eps: f64) -> f64 {
    let mut stack: Vec<usize> = Vec::new();
    let mut u = s;
    loop {
        if u == t {
            let bottleneck = stack.iter().map(|&id| g.cap[id]).fold(f64::INFINITY, f64::min);
            for &id in &stack {
                g.cap[id] -= bottleneck;
                g.cap[id ^ 1] += bottleneck;
            }
            return bottleneck;
        }
        let mut advanced = false;
        while next[u] < g.adj[u].len() {
            let id = g.adj[u][next[u]];
            let v = g.head[id];
            if g.cap[id] > eps && level[v] == level[u] + 1 {
                stack.push(id);
                u = v;
                advanced = true;
                break;
            }
            next[u] += 1;
        }
        if !advanced {
            if u == s {
                return 0.0;
            }
            let id = stack.pop().expect("nonempty stack away from source");
            u = g.head[id ^ 1];
            next[u] += 1;
        }
    }
}
