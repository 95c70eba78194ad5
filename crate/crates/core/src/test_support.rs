//! Random inputs shared by the unit tests.

use std::collections::BTreeMap;

use rand::Rng;

use crate::comparison::ConductancePair;
use crate::graph::{Network, VertexFunction};

/// Random spanning tree plus extra edges, weights uniform in `[0.1, 10]`.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize) -> Network {
    let mut edges = BTreeMap::new();
    for v in 1..n {
        let parent = rng.random_range(0..v);
        edges.insert((parent, v), rng.random_range(0.1..=10.0));
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(0.3) {
                edges
                    .entry((i, j))
                    .or_insert_with(|| rng.random_range(0.1..=10.0));
            }
        }
    }
    let vertices = (0..n).map(|i| format!("v{i}")).collect();
    Network::from_indexed(vertices, rng.random_range(0..n), edges)
}

/// Random `b <= c` with `b` still connected; some non-tree edges vanish under `b`.
pub fn random_pair<R: Rng>(rng: &mut R, n: usize) -> ConductancePair {
    let c = random_connected(rng, n);
    let b = loop {
        let b = c.map_conductances(|_, _, w| {
            if rng.random_bool(0.2) {
                0.0
            } else {
                w * rng.random_range(0.05..=1.0)
            }
        });
        if b.is_connected() {
            break b;
        }
    };
    ConductancePair::new(b, c).expect("same vertex set")
}

pub fn random_function<R: Rng>(rng: &mut R, network: &Network) -> VertexFunction {
    let values = (0..network.len())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    network.function(values).expect("matching length")
}
