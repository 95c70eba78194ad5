//! Weighted networks, grounded vertex functions and the energy form.
//!
//! A [`Network`] stores each conductance once per unordered vertex pair, so
//! symmetry holds by construction. Vertex functions stand for classes modulo
//! constants and are always kept grounded: their value at the origin is zero.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Absolute tolerance used for floating comparisons unless stated otherwise.
pub const DEFAULT_TOL: f64 = 1e-9;

/// One violated network invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DuplicateVertex(String),
    MissingOrigin(String),
    UnknownVertex {
        u: String,
        v: String,
        vertex: String,
    },
    SelfLoop(String),
    InvalidConductance {
        u: String,
        v: String,
        c: f64,
    },
    Asymmetric {
        u: String,
        v: String,
        forward: f64,
        backward: f64,
    },
    DuplicateEdge {
        u: String,
        v: String,
    },
    NotConnected {
        components: Vec<Vec<String>>,
    },
    Empty,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateVertex(x) => write!(f, "duplicate vertex {x}"),
            Violation::MissingOrigin(o) => write!(f, "origin {o} is not a vertex"),
            Violation::UnknownVertex { u, v, vertex } => {
                write!(f, "edge ({u},{v}) references unknown vertex {vertex}")
            }
            Violation::SelfLoop(x) => write!(f, "self-loop at {x}"),
            Violation::InvalidConductance { u, v, c } => {
                write!(f, "invalid conductance {c} on ({u},{v})")
            }
            Violation::Asymmetric {
                u,
                v,
                forward,
                backward,
            } => write!(
                f,
                "asymmetric conductance ({u},{v}): {forward} vs {backward}"
            ),
            Violation::DuplicateEdge { u, v } => write!(f, "duplicate edge ({u},{v})"),
            Violation::NotConnected { components } => {
                let parts: Vec<String> = components
                    .iter()
                    .map(|c| format!("{{{}}}", c.join(", ")))
                    .collect();
                write!(f, "not connected: {}", parts.join(" "))
            }
            Violation::Empty => write!(f, "network has no vertices"),
        }
    }
}

/// Vertex set with symmetric nonnegative conductances and a distinguished origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    vertices: Vec<String>,
    index: HashMap<String, usize>,
    origin: usize,
    /// keyed by (i, j) with i < j; only strictly positive conductances are kept
    edges: BTreeMap<(usize, usize), f64>,
    neighbors: Vec<Vec<(usize, f64)>>,
}

/// Checks raw network input, including connectivity, without building it.
///
/// Each edge entry is read as the directed conductance `c_uv`. Listing the
/// reverse direction with the same weight is accepted; a different weight is
/// reported as an asymmetry.
pub fn validate<S, T>(vertices: &[S], origin: &str, edges: &[(T, T, f64)]) -> Vec<Violation>
where
    S: AsRef<str>,
    T: AsRef<str>,
{
    let (mut violations, parsed) = check_structure(vertices, origin, edges);
    if violations.is_empty() {
        if let Some(net) = parsed {
            violations.extend(net.validate());
        }
    }
    violations
}

type Parsed = Option<Network>;

fn check_structure<S, T>(
    vertices: &[S],
    origin: &str,
    edges: &[(T, T, f64)],
) -> (Vec<Violation>, Parsed)
where
    S: AsRef<str>,
    T: AsRef<str>,
{
    let mut violations = Vec::new();
    if vertices.is_empty() {
        violations.push(Violation::Empty);
    }
    let mut index = HashMap::with_capacity(vertices.len());
    let mut names = Vec::with_capacity(vertices.len());
    for v in vertices {
        let v = v.as_ref();
        if index.contains_key(v) {
            violations.push(Violation::DuplicateVertex(v.to_string()));
        } else {
            index.insert(v.to_string(), names.len());
            names.push(v.to_string());
        }
    }
    let origin_idx = index.get(origin).copied();
    if origin_idx.is_none() && !vertices.is_empty() {
        violations.push(Violation::MissingOrigin(origin.to_string()));
    }

    // directed entries as given, keyed by (from, to)
    let mut directed: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (u, v, c) in edges {
        let (u, v, c) = (u.as_ref(), v.as_ref(), *c);
        let mut known = true;
        for w in [u, v] {
            if !index.contains_key(w) {
                violations.push(Violation::UnknownVertex {
                    u: u.to_string(),
                    v: v.to_string(),
                    vertex: w.to_string(),
                });
                known = false;
            }
        }
        if !c.is_finite() || c < 0.0 {
            violations.push(Violation::InvalidConductance {
                u: u.to_string(),
                v: v.to_string(),
                c,
            });
            continue;
        }
        if !known {
            continue;
        }
        if u == v {
            if c != 0.0 {
                violations.push(Violation::SelfLoop(u.to_string()));
            }
            continue;
        }
        let key = (index[u], index[v]);
        if directed.insert(key, c).is_some() {
            violations.push(Violation::DuplicateEdge {
                u: u.to_string(),
                v: v.to_string(),
            });
        }
    }

    let mut undirected: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (&(i, j), &c) in &directed {
        if let Some(&back) = directed.get(&(j, i)) {
            if i > j {
                continue;
            }
            if back != c {
                violations.push(Violation::Asymmetric {
                    u: names[i].clone(),
                    v: names[j].clone(),
                    forward: c,
                    backward: back,
                });
                continue;
            }
        }
        let key = (i.min(j), i.max(j));
        if c > 0.0 {
            undirected.insert(key, c);
        }
    }

    if !violations.is_empty() {
        return (violations, None);
    }
    let net = Network::from_indexed(names, origin_idx.unwrap_or(0), undirected);
    (violations, Some(net))
}

impl Network {
    /// Builds a network from vertex ids, an origin and undirected edges `(u, v, c_uv)`.
    ///
    /// Structural violations (unknown vertices, loops, asymmetric or invalid
    /// conductances) are rejected. Disconnected networks are accepted here and
    /// reported by [`Network::validate`]; operations that need connectivity fail
    /// with [`Error::Disconnected`].
    pub fn new<S, T>(vertices: &[S], origin: &str, edges: &[(T, T, f64)]) -> Result<Self>
    where
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let (violations, parsed) = check_structure(vertices, origin, edges);
        match parsed {
            Some(net) if violations.is_empty() => Ok(net),
            _ => Err(Error::InvalidNetwork(violations)),
        }
    }

    pub(crate) fn from_indexed(
        vertices: Vec<String>,
        origin: usize,
        edges: BTreeMap<(usize, usize), f64>,
    ) -> Self {
        let index = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let mut neighbors = vec![Vec::new(); vertices.len()];
        for (&(i, j), &c) in &edges {
            neighbors[i].push((j, c));
            neighbors[j].push((i, c));
        }
        Network {
            vertices,
            index,
            origin,
            edges,
            neighbors,
        }
    }

    /// Same vertices and origin, conductances replaced by `f(i, j, c_ij)`.
    /// Non-positive results drop the edge.
    pub fn map_conductances(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> Network {
        let edges = self
            .edges
            .iter()
            .map(|(&(i, j), &c)| ((i, j), f(i, j, c)))
            .filter(|&(_, c)| c > 0.0)
            .collect();
        Network::from_indexed(self.vertices.clone(), self.origin, edges)
    }

    /// All conductances multiplied by `alpha > 0`.
    pub fn scaled(&self, alpha: f64) -> Network {
        self.map_conductances(|_, _, c| alpha * c)
    }

    /// Same vertex set and edge set with every conductance set to one.
    pub fn unit_conductances(&self) -> Network {
        self.map_conductances(|_, _, _| 1.0)
    }

    /// Invariants that can still fail on a constructed network (connectivity).
    pub fn validate(&self) -> Vec<Violation> {
        let components = self.components();
        if components.len() > 1 {
            vec![Violation::NotConnected {
                components: self.component_names(&components),
            }]
        } else {
            Vec::new()
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &str {
        &self.vertices[i]
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn origin_id(&self) -> &str {
        &self.vertices[self.origin]
    }

    pub fn index_of(&self, x: &str) -> Result<usize> {
        self.index
            .get(x)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(x.to_string()))
    }

    pub fn indices_of<S: AsRef<str>>(&self, xs: &[S]) -> Result<Vec<usize>> {
        xs.iter().map(|x| self.index_of(x.as_ref())).collect()
    }

    /// `c_ij`, zero when the vertices are not adjacent.
    pub fn conductance(&self, i: usize, j: usize) -> f64 {
        let key = (i.min(j), i.max(j));
        self.edges.get(&key).copied().unwrap_or(0.0)
    }

    /// Edges as `(i, j, c_ij)` with `i < j`, in index order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges.iter().map(|(&(i, j), &c)| (i, j, c))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.neighbors[i]
    }

    /// c(x) = sum of conductances at `x`.
    pub fn degree(&self, x: &str) -> Result<f64> {
        Ok(self.degree_at(self.index_of(x)?))
    }

    pub fn degree_at(&self, i: usize) -> f64 {
        self.neighbors[i].iter().map(|&(_, c)| c).sum()
    }

    pub fn min_conductance(&self) -> Option<f64> {
        self.edges.values().copied().reduce(f64::min)
    }

    /// Dense Laplacian matrix `L = D - C`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut l = DMatrix::zeros(n, n);
        for (&(i, j), &c) in &self.edges {
            l[(i, j)] -= c;
            l[(j, i)] -= c;
            l[(i, i)] += c;
            l[(j, j)] += c;
        }
        l
    }

    /// Pointwise `(Δv)(x) = Σ_y c_xy (v(x) - v(y))` without re-grounding.
    pub fn laplacian_action(&self, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.len(),
            (0..self.len()).map(|x| {
                self.neighbors[x]
                    .iter()
                    .map(|&(y, c)| c * (v[x] - v[y]))
                    .sum::<f64>()
            }),
        )
    }

    /// Connected components through positive conductances, each sorted by index.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        // start from the origin so that its component comes first
        let order = std::iter::once(self.origin).chain((0..n).filter(|&i| i != self.origin));
        for start in order {
            if seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(x) = queue.pop_front() {
                comp.push(x);
                for &(y, _) in &self.neighbors[x] {
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    pub(crate) fn component_names(&self, components: &[Vec<usize>]) -> Vec<Vec<String>> {
        components
            .iter()
            .map(|c| c.iter().map(|&i| self.vertices[i].clone()).collect())
            .collect()
    }

    pub(crate) fn ensure_connected(&self) -> Result<()> {
        let components = self.components();
        if components.len() > 1 {
            Err(Error::Disconnected(self.component_names(&components)))
        } else {
            Ok(())
        }
    }

    /// Grounded function from values given in vertex order.
    pub fn function(&self, values: Vec<f64>) -> Result<VertexFunction> {
        if values.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: values.len(),
            });
        }
        Ok(VertexFunction::grounded(
            DVector::from_vec(values),
            self.origin,
        ))
    }

    /// Grounded function from a vertex-id map; missing vertices read as zero.
    pub fn function_from_map(&self, values: &HashMap<String, f64>) -> Result<VertexFunction> {
        for key in values.keys() {
            self.index_of(key)?;
        }
        let raw = self
            .vertices
            .iter()
            .map(|v| values.get(v).copied().unwrap_or(0.0))
            .collect();
        self.function(raw)
    }

    pub fn zero_function(&self) -> VertexFunction {
        VertexFunction::grounded(DVector::zeros(self.len()), self.origin)
    }

    /// Grounded representative of the indicator of vertex `x`.
    pub fn delta(&self, x: usize) -> VertexFunction {
        let mut v = DVector::zeros(self.len());
        v[x] = 1.0;
        VertexFunction::grounded(v, self.origin)
    }

    /// Grounded representative of `δ_x - δ_y`.
    pub fn source(&self, x: usize, y: usize) -> VertexFunction {
        let mut v = DVector::zeros(self.len());
        v[x] += 1.0;
        v[y] -= 1.0;
        VertexFunction::grounded(v, self.origin)
    }

    pub(crate) fn check(&self, u: &VertexFunction) -> Result<()> {
        if u.len() != self.len() {
            Err(Error::DimensionMismatch {
                expected: self.len(),
                found: u.len(),
            })
        } else {
            Ok(())
        }
    }
}

/// Real function on the vertices, grounded so that its value at the origin is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFunction {
    values: DVector<f64>,
    origin: usize,
}

impl VertexFunction {
    /// Subtracts the value at `origin` from every entry.
    pub fn grounded(mut values: DVector<f64>, origin: usize) -> Self {
        let shift = values[origin];
        if shift != 0.0 {
            values.add_scalar_mut(-shift);
        }
        VertexFunction { values, origin }
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn into_values(self) -> DVector<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn scale(&self, alpha: f64) -> VertexFunction {
        VertexFunction {
            values: &self.values * alpha,
            origin: self.origin,
        }
    }

    pub fn add(&self, other: &VertexFunction) -> VertexFunction {
        VertexFunction::grounded(&self.values + &other.values, self.origin)
    }

    pub fn sub(&self, other: &VertexFunction) -> VertexFunction {
        VertexFunction::grounded(&self.values - &other.values, self.origin)
    }

    /// Largest entrywise difference between two grounded functions.
    pub fn max_abs_diff(&self, other: &VertexFunction) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.amax()
    }

    /// `sup_{x,y} |u(x) - u(y)|`, i.e. max minus min.
    pub fn sup_seminorm(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.max() - self.values.min()
    }
}

/// `Δu`, re-grounded at the origin.
pub fn apply_laplacian(network: &Network, u: &VertexFunction) -> Result<VertexFunction> {
    network.check(u)?;
    Ok(VertexFunction::grounded(
        network.laplacian_action(u.values()),
        network.origin(),
    ))
}

/// Energy form `½ Σ_{x,y} c_xy (u(x)-u(y))(v(x)-v(y))`, summed once per edge.
pub fn energy_form(network: &Network, u: &VertexFunction, v: &VertexFunction) -> Result<f64> {
    network.check(u)?;
    network.check(v)?;
    Ok(energy_raw(network, u.values(), v.values()))
}

pub(crate) fn energy_raw(network: &Network, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    network
        .edges()
        .map(|(i, j, c)| c * ((u[i] - u[j]) * (v[i] - v[j])))
        .sum()
}

/// Energy norm `sqrt(E(u, u))`.
pub fn energy_norm(network: &Network, u: &VertexFunction) -> Result<f64> {
    Ok(energy_form(network, u, u)?.max(0.0).sqrt())
}

pub fn sup_seminorm(u: &VertexFunction) -> f64 {
    u.sup_seminorm()
}
