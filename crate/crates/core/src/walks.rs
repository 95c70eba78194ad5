//! Conductance-weighted random walks and escape probabilities.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::energy::resistance_at;
use crate::error::{Error, Result};
use crate::graph::Network;
use crate::linalg::BlockSolver;

/// Walks longer than this are abandoned and counted as censored.
pub const STEP_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WalkMethod {
    Exact,
    MonteCarlo {
        trials: u64,
        standard_error: f64,
        seed: u64,
        /// Trials stopped at [`STEP_CAP`]; counted as failures.
        censored: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkResult {
    pub probability: f64,
    pub method: WalkMethod,
}

/// `p(x, y) = c_xy / c(x)`.
pub fn transition_probability(network: &Network, x: &str, y: &str) -> Result<f64> {
    let (xi, yi) = (network.index_of(x)?, network.index_of(y)?);
    let deg = network.degree_at(xi);
    if deg == 0.0 {
        return Err(Error::IsolatedVertex(x.to_string()));
    }
    Ok(network.conductance(xi, yi) / deg)
}

/// Probability that the walk from `x` reaches `target` before returning to `x`.
///
/// With `q(z)` the probability of hitting `target` before `x` from `z`
/// (`q(target) = 1`, `q(x) = 0`, harmonic elsewhere), the answer is the
/// first-step average `Σ_z p(x, z) q(z)`.
pub fn escape_probability_exact(network: &Network, x: &str, target: &str) -> Result<WalkResult> {
    let (xi, ti) = (network.index_of(x)?, network.index_of(target)?);
    Ok(WalkResult {
        probability: escape_exact_at(network, xi, ti)?,
        method: WalkMethod::Exact,
    })
}

pub(crate) fn escape_exact_at(network: &Network, x: usize, target: usize) -> Result<f64> {
    if x == target {
        return Err(Error::SameVertex(network.vertex(x).to_string()));
    }
    network.ensure_connected()?;
    let free: Vec<usize> = (0..network.len())
        .filter(|&z| z != x && z != target)
        .collect();
    let mut q = DVector::zeros(network.len());
    q[target] = 1.0;
    if !free.is_empty() {
        let l = network.laplacian();
        let solver = BlockSolver::new(network, &l, &[x, target])?;
        q = solver.solve(&(-l.column(target).into_owned()));
        q[target] = 1.0;
    }
    let deg = network.degree_at(x);
    Ok(network
        .neighbors(x)
        .iter()
        .map(|&(z, c)| c / deg * q[z])
        .sum())
}

/// Monte Carlo estimate of the escape probability.
///
/// Trial `i` draws from its own ChaCha8 stream `(seed, i)`, so the estimate
/// does not depend on how trials are scheduled across threads.
pub fn escape_probability_mc(
    network: &Network,
    x: &str,
    target: &str,
    trials: u64,
    seed: u64,
) -> Result<WalkResult> {
    let (xi, ti) = (network.index_of(x)?, network.index_of(target)?);
    if xi == ti {
        return Err(Error::SameVertex(x.to_string()));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "trials must be at least 1".to_string(),
        ));
    }
    network.ensure_connected()?;
    let cumulative: Vec<Vec<(usize, f64)>> = (0..network.len())
        .map(|z| {
            let deg = network.degree_at(z);
            let mut acc = 0.0;
            network
                .neighbors(z)
                .iter()
                .map(|&(w, c)| {
                    acc += c / deg;
                    (w, acc)
                })
                .collect()
        })
        .collect();

    let (hits, censored) = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            match run_walk(&cumulative, xi, ti, &mut rng) {
                Some(true) => (1u64, 0u64),
                Some(false) => (0, 0),
                None => (0, 1),
            }
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let p = hits as f64 / trials as f64;
    Ok(WalkResult {
        probability: p,
        method: WalkMethod::MonteCarlo {
            trials,
            standard_error: (p * (1.0 - p) / trials as f64).sqrt(),
            seed,
            censored,
        },
    })
}

/// `Some(true)` if the walk reaches `target` before returning to `start`.
fn run_walk(
    cumulative: &[Vec<(usize, f64)>],
    start: usize,
    target: usize,
    rng: &mut ChaCha8Rng,
) -> Option<bool> {
    let mut at = start;
    for _ in 0..STEP_CAP {
        let r: f64 = rng.random();
        let row = &cumulative[at];
        at = row
            .iter()
            .find(|&&(_, acc)| r < acc)
            .map(|&(w, _)| w)
            .unwrap_or_else(|| row[row.len() - 1].0);
        if at == target {
            return Some(true);
        }
        if at == start {
            return Some(false);
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reciprocity {
    /// Exact escape probability.
    pub lhs: f64,
    /// `1 / (c(x) R(x, o))`.
    pub rhs: f64,
    pub gap: f64,
}

pub fn reciprocity_report(network: &Network, x: &str, target: &str) -> Result<Reciprocity> {
    let (xi, ti) = (network.index_of(x)?, network.index_of(target)?);
    reciprocity_at(network, xi, ti)
}

pub(crate) fn reciprocity_at(network: &Network, x: usize, target: usize) -> Result<Reciprocity> {
    let lhs = escape_exact_at(network, x, target)?;
    let rhs = 1.0 / (network.degree_at(x) * resistance_at(network, x, target)?);
    Ok(Reciprocity {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
    })
}
