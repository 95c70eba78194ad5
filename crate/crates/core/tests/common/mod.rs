//! Random inputs and independent dense oracles for the integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use potnet::comparison::ConductancePair;
use potnet::{Network, VertexFunction};
use rand::Rng;

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
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let triples: Vec<(String, String, f64)> = edges
        .into_iter()
        .map(|((i, j), c)| (names[i].clone(), names[j].clone(), c))
        .collect();
    let origin = names[rng.random_range(0..n)].clone();
    Network::new(&names, &origin, &triples).expect("valid by construction")
}

/// Random `b <= c` with `b` connected; a fifth of the edges vanish under `b`.
pub fn random_pair<R: Rng>(rng: &mut R, n: usize) -> ConductancePair {
    let c = random_connected(rng, n);
    loop {
        let b = c.map_conductances(|_, _, w| {
            if rng.random_bool(0.2) {
                0.0
            } else {
                w * rng.random_range(0.05..=1.0)
            }
        });
        if b.is_connected() {
            return ConductancePair::new(b, c).expect("same vertex set");
        }
    }
}

pub fn random_function<R: Rng>(rng: &mut R, network: &Network) -> VertexFunction {
    let values = (0..network.len())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    network.function(values).expect("matching length")
}

/// Moore-Penrose pseudo-inverse of a connected Laplacian from its eigenpairs.
pub fn pinv(laplacian: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(laplacian.clone());
    let n = laplacian.nrows();
    let top = eig.eigenvalues.amax();
    let mut out = DMatrix::zeros(n, n);
    for k in 0..n {
        let lam = eig.eigenvalues[k];
        if lam > 1e-12 * top {
            let phi = eig.eigenvectors.column(k);
            out += phi * phi.transpose() / lam;
        }
    }
    out
}

pub fn pinv_resistance(lplus: &DMatrix<f64>, i: usize, j: usize) -> f64 {
    lplus[(i, i)] + lplus[(j, j)] - 2.0 * lplus[(i, j)]
}

/// Probability that the walk from `x` hits `target` before returning to `x`,
/// from the absorbing Markov chain with states `x` and `target` absorbing.
pub fn absorption_escape(network: &Network, x: usize, target: usize) -> f64 {
    let n = network.len();
    let degree = |z: usize| network.degree_at(z);
    let free: Vec<usize> = (0..n).filter(|&z| z != x && z != target).collect();
    let m = free.len();
    // h(z) = P_z[hit target before x] solves (I - P_FF) h = P_{F,target}
    let mut a = DMatrix::identity(m, m);
    let mut rhs = DVector::zeros(m);
    for (r, &z) in free.iter().enumerate() {
        for (s, &w) in free.iter().enumerate() {
            a[(r, s)] -= network.conductance(z, w) / degree(z);
        }
        rhs[r] = network.conductance(z, target) / degree(z);
    }
    let h = if m > 0 {
        a.lu().solve(&rhs).expect("absorbing chain is transient")
    } else {
        rhs
    };
    let mut p = network.conductance(x, target) / degree(x);
    for (r, &z) in free.iter().enumerate() {
        p += network.conductance(x, z) / degree(x) * h[r];
    }
    p
}
