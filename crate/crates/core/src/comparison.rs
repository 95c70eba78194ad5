//! Comparison of two conductance functions `b <= c` on a common vertex set.
//!
//! The identity on functions maps the `c`-energy space contractively into the
//! `b`-energy space. Its adjoint `I*` is computed as the grounded solve
//! `L_c w = L_b u`, which is characterized by `⟨I*u, v⟩_c = ⟨u, v⟩_b` for all
//! `v`.

use std::collections::VecDeque;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::energy::{boundary_extensions, boundary_flux, energy_kernel, harmonic_subspace};
use crate::error::{Error, Result};
use crate::families::Family;
use crate::graph::{apply_laplacian, energy_raw, Network, VertexFunction};
use crate::linalg::{delete_row_col, largest_generalized_eigenvalue, GroundedSolver};

#[derive(Debug, Clone, PartialEq)]
pub enum PairViolation {
    NotDominated {
        u: String,
        v: String,
        b: f64,
        c: f64,
    },
    BDisconnected(Vec<Vec<String>>),
    CDisconnected(Vec<Vec<String>>),
}

impl fmt::Display for PairViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairViolation::NotDominated { u, v, b, c } => {
                write!(f, "b ≰ c at ({u},{v}): b = {b}, c = {c}")
            }
            PairViolation::BDisconnected(parts) => {
                write!(f, "(G,b) not connected: {} components", parts.len())
            }
            PairViolation::CDisconnected(parts) => {
                write!(f, "(G,c) not connected: {} components", parts.len())
            }
        }
    }
}

/// Two conductance functions on one vertex set with one origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ConductancePair {
    b: Network,
    c: Network,
}

impl ConductancePair {
    /// Pairs two networks over identical vertex lists and origin. Domination
    /// and connectivity are checked by [`validate_pair`].
    pub fn new(b: Network, c: Network) -> Result<Self> {
        if b.vertices() != c.vertices() {
            return Err(Error::InvalidPair("vertex lists differ".to_string()));
        }
        if b.origin() != c.origin() {
            return Err(Error::InvalidPair(format!(
                "origins differ: `{}` vs `{}`",
                b.origin_id(),
                c.origin_id()
            )));
        }
        Ok(ConductancePair { b, c })
    }

    /// `b = alpha * c`.
    pub fn scalar(c: Network, alpha: f64) -> Self {
        ConductancePair {
            b: c.scaled(alpha),
            c,
        }
    }

    /// Geometric integers truncated at `n` with bases `b_base <= c_base`.
    pub fn geometric(n: usize, b_base: f64, c_base: f64) -> Result<Self> {
        let b = Family::GeometricIntegers { n, base: b_base }.generate()?;
        let c = Family::GeometricIntegers { n, base: c_base }.generate()?;
        ConductancePair::new(b, c)
    }

    pub fn b(&self) -> &Network {
        &self.b
    }

    pub fn c(&self) -> &Network {
        &self.c
    }
}

pub fn validate_pair(pair: &ConductancePair) -> Vec<PairViolation> {
    let (b, c) = (&pair.b, &pair.c);
    let mut out = Vec::new();
    for (i, j, bij) in b.edges() {
        let cij = c.conductance(i, j);
        if bij > cij {
            out.push(PairViolation::NotDominated {
                u: b.vertex(i).to_string(),
                v: b.vertex(j).to_string(),
                b: bij,
                c: cij,
            });
        }
    }
    let parts = b.components();
    if parts.len() > 1 {
        out.push(PairViolation::BDisconnected(b.component_names(&parts)));
    }
    let parts = c.components();
    if parts.len() > 1 {
        out.push(PairViolation::CDisconnected(c.component_names(&parts)));
    }
    out
}

/// Precomputed `c`-solver for repeated applications of `I*`.
pub struct Adjoint<'a> {
    pair: &'a ConductancePair,
    solver: GroundedSolver,
}

impl<'a> Adjoint<'a> {
    pub fn new(pair: &'a ConductancePair) -> Result<Self> {
        Ok(Adjoint {
            pair,
            solver: GroundedSolver::new(&pair.c)?,
        })
    }

    pub fn apply(&self, u: &VertexFunction) -> Result<VertexFunction> {
        self.pair.b.check(u)?;
        Ok(self.apply_raw(u.values()))
    }

    fn apply_raw(&self, u: &DVector<f64>) -> VertexFunction {
        let rhs = self.pair.b.laplacian_action(u);
        VertexFunction::grounded(self.solver.solve(&rhs), self.pair.c.origin())
    }
}

/// `I* u`, the adjoint of the contractive inclusion.
pub fn adjoint_inclusion(pair: &ConductancePair, u: &VertexFunction) -> Result<VertexFunction> {
    Adjoint::new(pair)?.apply(u)
}

/// Result of transferring edge differences by the ratios `b_xy / c_xy`.
#[derive(Debug, Clone)]
pub struct EdgeTransfer {
    /// Least-squares potential fitting the prescribed differences.
    pub function: VertexFunction,
    /// Largest mismatch of the prescribed differences around a fundamental cycle.
    pub consistency_residual: f64,
}

/// Builds `w` with `w(x) - w(y) = (b_xy / c_xy)(u(x) - u(y))` on every edge of `c`.
///
/// Exact on trees. On graphs with cycles the prescribed differences need not
/// be integrable; the least-squares potential is returned together with the
/// largest fundamental-cycle mismatch.
pub fn edge_ratio_transfer(pair: &ConductancePair, u: &VertexFunction) -> Result<EdgeTransfer> {
    let c = &pair.c;
    c.check(u)?;
    c.ensure_connected()?;
    let n = c.len();
    let target = |x: usize, y: usize| {
        let ratio = pair.b.conductance(x, y) / c.conductance(x, y);
        ratio * (u.get(x) - u.get(y))
    };

    // integrate along a BFS tree from the origin
    let mut potential = vec![0.0; n];
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let o = c.origin();
    seen[o] = true;
    let mut queue = VecDeque::from([o]);
    while let Some(x) = queue.pop_front() {
        for &(y, _) in c.neighbors(x) {
            if !seen[y] {
                seen[y] = true;
                parent[y] = x;
                potential[y] = potential[x] - target(x, y);
                queue.push_back(y);
            }
        }
    }
    let consistency_residual = c
        .edges()
        .filter(|&(i, j, _)| parent[i] != j && parent[j] != i)
        .map(|(i, j, _)| (potential[i] - potential[j] - target(i, j)).abs())
        .fold(0.0, f64::max);

    let function = if consistency_residual == 0.0 {
        VertexFunction::grounded(DVector::from_vec(potential), o)
    } else {
        // normal equations of min Σ_e (w_x - w_y - t_xy)^2
        let unit = c.unit_conductances();
        let mut div = DVector::zeros(n);
        for (i, j, _) in c.edges() {
            let t = target(i, j);
            div[i] += t;
            div[j] -= t;
        }
        VertexFunction::grounded(GroundedSolver::new(&unit)?.solve(&div), o)
    };
    Ok(EdgeTransfer {
        function,
        consistency_residual,
    })
}

/// `sup_u sqrt(E_b(u) / E_c(u))` over nonconstant `u`, for any two networks on
/// the same vertices with `c` connected.
pub fn embedding_norm_between(b: &Network, c: &Network) -> Result<f64> {
    c.ensure_connected()?;
    if b.len() != c.len() {
        return Err(Error::DimensionMismatch {
            expected: c.len(),
            found: b.len(),
        });
    }
    if c.len() < 2 {
        return Ok(0.0);
    }
    let o = c.origin();
    let lb = delete_row_col(&b.laplacian(), o);
    let lc = delete_row_col(&c.laplacian(), o);
    Ok(largest_generalized_eigenvalue(&lb, &lc)?.max(0.0).sqrt())
}

/// Operator norm of the inclusion `H_c -> H_b`.
pub fn embedding_norm(pair: &ConductancePair) -> Result<f64> {
    embedding_norm_between(&pair.b, &pair.c)
}

/// `max_x ‖Δ_b v_x^(b) - Δ_c I* v_x^(b)‖_∞` over the `b`-kernel.
pub fn conjugation_identity_residual(pair: &ConductancePair) -> Result<f64> {
    let kernel = energy_kernel(&pair.b)?;
    let adjoint = Adjoint::new(pair)?;
    let mut worst = 0.0f64;
    for vx in kernel.dipoles() {
        let direct = apply_laplacian(&pair.b, vx)?;
        let conjugated = apply_laplacian(&pair.c, &adjoint.apply(vx)?)?;
        worst = worst.max(direct.max_abs_diff(&conjugated));
    }
    Ok(worst)
}

/// `Δ^(b,c) = L_c⁺ L_b L_c` as a matrix acting on grounded vectors.
#[derive(Debug, Clone)]
pub struct CrossAdjoint {
    matrix: DMatrix<f64>,
    origin: usize,
}

impl CrossAdjoint {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, u: &VertexFunction) -> Result<VertexFunction> {
        if u.len() != self.matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.ncols(),
                found: u.len(),
            });
        }
        Ok(VertexFunction::grounded(
            &self.matrix * u.values(),
            self.origin,
        ))
    }
}

pub fn cross_adjoint(pair: &ConductancePair) -> Result<CrossAdjoint> {
    let adjoint = Adjoint::new(pair)?;
    let n = pair.c.len();
    let o = pair.c.origin();
    let mut matrix = DMatrix::zeros(n, n);
    for j in (0..n).filter(|&j| j != o) {
        let mut e = DVector::zeros(n);
        e[j] = 1.0;
        let col = adjoint.apply_raw(&pair.c.laplacian_action(&e));
        matrix.set_column(j, col.values());
    }
    Ok(CrossAdjoint { matrix, origin: o })
}

/// `|⟨M u, v⟩_c - ⟨u, Δ_b v⟩_c|` for the cross-adjoint `M`.
pub fn adjoint_relation_residual(
    pair: &ConductancePair,
    m: &CrossAdjoint,
    u: &VertexFunction,
    v: &VertexFunction,
) -> Result<f64> {
    let mu = m.apply(u)?;
    let lbv = apply_laplacian(&pair.b, v)?;
    let c = &pair.c;
    Ok((energy_raw(c, mu.values(), v.values()) - energy_raw(c, u.values(), lbv.values())).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    /// Smallest conductance present.
    pub epsilon: f64,
    /// `1 / sqrt(epsilon)`.
    pub bound: f64,
    /// Measured norm of the inclusion into the unit-conductance space on the same edges.
    pub measured_norm: f64,
}

impl LowerBound {
    pub fn holds(&self, tol: f64) -> bool {
        self.measured_norm <= self.bound + tol
    }
}

pub fn lower_bound_criterion(network: &Network) -> Result<LowerBound> {
    let epsilon = network
        .min_conductance()
        .ok_or_else(|| Error::InvalidArgument("network has no edges".to_string()))?;
    let measured_norm = embedding_norm_between(&network.unit_conductances(), network)?;
    Ok(LowerBound {
        epsilon,
        bound: 1.0 / epsilon.sqrt(),
        measured_norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicInvariant {
    /// `‖I* h_b‖_c / ‖h_b‖_b`.
    pub k: f64,
    /// `|⟨I* h_b, h_c⟩_c| / (‖I* h_b‖_c ‖h_c‖_c)`.
    pub alignment: f64,
}

/// Scaling factor of `I*` on a one-dimensional harmonic subspace.
pub fn harmonic_transfer_invariant<S: AsRef<str>>(
    pair: &ConductancePair,
    interior: &[S],
) -> Result<HarmonicInvariant> {
    let harm_b = harmonic_subspace(&pair.b, interior)?;
    let harm_c = harmonic_subspace(&pair.c, interior)?;
    if harm_b.len() != 1 || harm_c.len() != 1 {
        return Err(Error::HarmonicDimension {
            dim_b: harm_b.len(),
            dim_c: harm_c.len(),
        });
    }
    let (hb, hc) = (&harm_b[0], &harm_c[0]);
    // I* h_b = L_c⁺ f with f = L_b h_b supported on the boundary. Then
    // ‖I* h_b‖_c² = f·(I* h_b) and ⟨I* h_b, h_c⟩_c = f·h_c, which only read
    // values at boundary vertices.
    let (boundary, extensions) = boundary_extensions(&pair.b, interior)?;
    let flux = boundary_flux(&pair.b, &boundary, &extensions, hb);
    let image = GroundedSolver::new(&pair.c)?.solve(&flux);
    let image_norm = flux.dot(&image).max(0.0).sqrt();
    let hb_norm = energy_raw(&pair.b, hb.values(), hb.values()).sqrt();
    let hc_norm = energy_raw(&pair.c, hc.values(), hc.values()).sqrt();
    let overlap = flux.dot(hc.values()).abs();
    Ok(HarmonicInvariant {
        k: image_norm / hb_norm,
        alignment: overlap / (image_norm * hc_norm),
    })
}

/// `sqrt((b-1)/(c-1))`, the scaling of `I*` on the harmonic line of the
/// geometric integers.
pub fn geometric_invariant(b_base: f64, c_base: f64) -> f64 {
    ((b_base - 1.0) / (c_base - 1.0)).sqrt()
}
