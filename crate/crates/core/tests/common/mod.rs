#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robustflow_core::enumerate::enumerate_simple_paths;
use robustflow_core::FlowNetwork;

pub const MAX_ARCS: usize = 12;
pub const MAX_PATHS: usize = 40;

/// Random network with at most 12 arcs and between 1 and 40 simple s-t
/// paths. Capacities are multiples of 1/2 in [0.5, 4].
pub fn random_instance(seed: u64, allow_safe: bool) -> FlowNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let nodes = rng.random_range(2..=6usize);
        let arcs = rng.random_range(2..=MAX_ARCS);
        let mut net = FlowNetwork::new(nodes, 0, nodes - 1);
        for _ in 0..arcs {
            let tail = rng.random_range(0..nodes - 1);
            let mut head = rng.random_range(1..nodes);
            if head == tail {
                head = nodes - 1;
            }
            let cap = rng.random_range(1..=8u32) as f64 / 2.0;
            let safe = allow_safe && rng.random_bool(0.15);
            net.add_arc(tail, head, cap, safe);
        }
        match enumerate_simple_paths(&net, MAX_PATHS) {
            Ok(paths) if !paths.is_empty() => return net,
            _ => continue,
        }
    }
}

/// Acyclic network on at most 4 nodes and 6 arcs.
pub fn tiny_instance(seed: u64) -> FlowNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    loop {
        let nodes = rng.random_range(2..=4usize);
        let arcs = rng.random_range(2..=6usize);
        let mut net = FlowNetwork::new(nodes, 0, nodes - 1);
        for _ in 0..arcs {
            let tail = rng.random_range(0..nodes - 1);
            let head = rng.random_range(tail + 1..nodes);
            let cap = rng.random_range(1..=6u32) as f64 / 2.0;
            net.add_arc(tail, head, cap, false);
        }
        if enumerate_simple_paths(&net, 20).is_ok_and(|p| !p.is_empty()) {
            return net;
        }
    }
}
