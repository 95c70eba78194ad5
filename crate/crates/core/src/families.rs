//! Deterministic network families and closed-form reference functions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Network, VertexFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    /// Vertices `0..=n`, unit edges `(k-1, k)`.
    Path { n: usize },
    /// `n` vertices in a unit ring.
    Cycle { n: usize },
    /// `K_n` with unit conductances.
    Complete { n: usize },
    /// Complete binary tree of the given depth, heap-indexed, unit edges.
    BinaryTree { depth: usize },
    /// Binary tree plus edges of weight `level_weights[k-1]` joining the
    /// vertices of level `k` in level order, closed into a ring when the
    /// level has at least three vertices.
    HorizontallyConnectedTree {
        depth: usize,
        level_weights: Vec<f64>,
    },
    /// Vertices `-n..=n`, edge `(k-1, k)` with conductance `base^max(|k|, |k-1|)`.
    GeometricIntegers { n: usize, base: f64 },
}

impl Family {
    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidFamily(msg));
        match self {
            Family::Path { n }
            | Family::BinaryTree { depth: n }
            | Family::GeometricIntegers { n, .. }
                if *n < 1 =>
            {
                bad(format!("size parameter must be at least 1, got {n}"))
            }
            Family::Cycle { n } if *n < 3 => {
                bad(format!("a cycle needs at least 3 vertices, got {n}"))
            }
            Family::Complete { n } if *n < 2 => bad(format!(
                "a complete graph needs at least 2 vertices, got {n}"
            )),
            Family::GeometricIntegers { base, .. } if !(base.is_finite() && *base > 1.0) => {
                bad(format!("geometric base must exceed 1, got {base}"))
            }
            Family::HorizontallyConnectedTree {
                depth,
                level_weights,
            } => {
                if *depth < 1 {
                    return bad(format!("depth must be at least 1, got {depth}"));
                }
                if level_weights.len() != *depth {
                    return bad(format!(
                        "expected {depth} level weights, got {}",
                        level_weights.len()
                    ));
                }
                if let Some(w) = level_weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
                    return bad(format!("level weights must be positive, got {w}"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn generate(&self) -> Result<Network> {
        self.check()?;
        let mut edges = BTreeMap::new();
        let vertices: Vec<String> = match self {
            Family::Path { n } => {
                for k in 1..=*n {
                    edges.insert((k - 1, k), 1.0);
                }
                (0..=*n).map(|k| k.to_string()).collect()
            }
            Family::Cycle { n } => {
                for k in 1..*n {
                    edges.insert((k - 1, k), 1.0);
                }
                edges.insert((0, n - 1), 1.0);
                (0..*n).map(|k| k.to_string()).collect()
            }
            Family::Complete { n } => {
                for i in 0..*n {
                    for j in i + 1..*n {
                        edges.insert((i, j), 1.0);
                    }
                }
                (0..*n).map(|k| k.to_string()).collect()
            }
            Family::BinaryTree { depth } => {
                tree_edges(*depth, &mut edges);
                (0..tree_size(*depth)).map(|k| k.to_string()).collect()
            }
            Family::HorizontallyConnectedTree {
                depth,
                level_weights,
            } => {
                tree_edges(*depth, &mut edges);
                for (k, &w) in (1..=*depth).zip(level_weights) {
                    let first = (1usize << k) - 1;
                    let width = 1usize << k;
                    for i in 1..width {
                        edges.insert((first + i - 1, first + i), w);
                    }
                    if width >= 3 {
                        edges.insert((first, first + width - 1), w);
                    }
                }
                (0..tree_size(*depth)).map(|k| k.to_string()).collect()
            }
            Family::GeometricIntegers { n, base } => {
                let n = *n as i64;
                // vertex k sits at index k + n
                for k in (-n + 1)..=n {
                    let exp = k.abs().max((k - 1).abs());
                    edges.insert(
                        ((k - 1 + n) as usize, (k + n) as usize),
                        base.powi(exp as i32),
                    );
                }
                (-n..=n).map(|k| k.to_string()).collect()
            }
        };
        let origin = match self {
            Family::GeometricIntegers { n, .. } => *n,
            _ => 0,
        };
        Ok(Network::from_indexed(vertices, origin, edges))
    }

    /// Vertices at which harmonicity is imposed when extracting the harmonic
    /// subspace of a truncation: everything except the two ends for paths and
    /// geometric integers, every vertex otherwise.
    pub fn natural_interior(&self) -> Vec<String> {
        match self {
            Family::Path { n } => (1..*n).map(|k| k.to_string()).collect(),
            Family::GeometricIntegers { n, .. } => {
                let n = *n as i64;
                ((-n + 1)..n).map(|k| k.to_string()).collect()
            }
            other => other
                .generate()
                .map(|net| net.vertices().to_vec())
                .unwrap_or_default(),
        }
    }
}

fn tree_size(depth: usize) -> usize {
    (1usize << (depth + 1)) - 1
}

fn tree_edges(depth: usize, edges: &mut BTreeMap<(usize, usize), f64>) {
    for child in 1..tree_size(depth) {
        edges.insert(((child - 1) / 2, child), 1.0);
    }
}

/// `h_b(k) = sgn(k) / (2 sqrt(b-1)) * (1 - b^{-|k|})` on `-n..=n`, in the
/// vertex order of [`Family::GeometricIntegers`].
pub fn closed_form_harmonic(base: f64, n: usize) -> Result<VertexFunction> {
    let net = Family::GeometricIntegers { n, base }.generate()?;
    let scale = 1.0 / (2.0 * (base - 1.0).sqrt());
    let values = (-(n as i64)..=n as i64)
        .map(|k| (k.signum() as f64) * scale * (1.0 - base.powi(-(k.abs() as i32))))
        .collect();
    net.function(values)
}

/// Unit-current potential from vertex `target` to the origin on the
/// geometric integers: `Σ_{j=1}^{min(k, target)} base^{-j}` for `k > 0`,
/// zero on the other half-line, mirrored for negative `target`.
pub fn closed_form_dipole(base: f64, n: usize, target: i64) -> Result<VertexFunction> {
    let net = Family::GeometricIntegers { n, base }.generate()?;
    if target == 0 || target.unsigned_abs() as usize > n {
        return Err(Error::InvalidArgument(format!(
            "dipole target must satisfy 0 < |target| <= {n}, got {target}"
        )));
    }
    let sign = target.signum();
    let reach = target.abs();
    let values = (-(n as i64)..=n as i64)
        .map(|k| {
            let along = k * sign;
            (1..=along.min(reach)).map(|j| base.powi(-(j as i32))).sum()
        })
        .collect();
    net.function(values)
}
