//! Spectral calculus of the Laplacian in the energy inner product.
//!
//! Eigenvectors `φ_i` of the Laplacian (ℓ²-orthonormal, zero mode dropped) are
//! rescaled to `ψ_i = φ_i / sqrt(λ_i)`, which makes them orthonormal for the
//! energy form. The spectral measure of `u` puts mass `⟨u, ψ_i⟩_E²` at `λ_i`.

use crate::comparison::{Adjoint, ConductancePair};
use crate::error::{Error, Result};
use crate::graph::{apply_laplacian, energy_form, energy_raw, Network, VertexFunction};
use crate::linalg::{sorted_eigen, GroundedSolver};

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<VertexFunction>,
}

impl SpectralDecomposition {
    /// Nonzero eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Energy-orthonormal grounded eigenvectors, matching [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &[VertexFunction] {
        &self.eigenvectors
    }

    pub fn largest(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn smallest(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn measure(&self, network: &Network, u: &VertexFunction) -> Result<DiscreteMeasure> {
        network.check(u)?;
        let atoms = self
            .eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .map(|(&lam, psi)| {
                let a = energy_raw(network, u.values(), psi.values());
                (lam, a * a)
            })
            .collect();
        Ok(DiscreteMeasure { atoms })
    }
}

pub fn eigensystem(network: &Network) -> Result<SpectralDecomposition> {
    network.ensure_connected()?;
    let (values, vectors) = sorted_eigen(network.laplacian());
    let o = network.origin();
    let mut eigenvalues = Vec::with_capacity(values.len().saturating_sub(1));
    let mut eigenvectors = Vec::with_capacity(values.len().saturating_sub(1));
    // the first eigenpair is the constant mode
    for (k, &lam) in values.iter().enumerate().skip(1) {
        let phi = vectors.column(k).into_owned();
        let mut psi = VertexFunction::grounded(phi / lam.sqrt(), o);
        let scale = psi.max_abs();
        if let Some(first) = psi.values().iter().find(|v| v.abs() > 1e-12 * scale) {
            if *first < 0.0 {
                psi = psi.scale(-1.0);
            }
        }
        eigenvalues.push(lam);
        eigenvectors.push(psi);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Finite list of `(λ, weight)` atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    pub atoms: Vec<(f64, f64)>,
}

impl DiscreteMeasure {
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|&(_, w)| w).sum()
    }

    pub fn moment(&self, k: u32) -> f64 {
        self.atoms
            .iter()
            .map(|&(lam, w)| lam.powi(k as i32) * w)
            .sum()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms.iter().map(|&(lam, w)| f(lam) * w).sum()
    }
}

pub fn spectral_measure(network: &Network, u: &VertexFunction) -> Result<DiscreteMeasure> {
    eigensystem(network)?.measure(network, u)
}

/// `Δ^k u` by repeated pointwise application.
pub fn laplacian_power(network: &Network, u: &VertexFunction, k: u32) -> Result<VertexFunction> {
    let mut w = u.clone();
    for _ in 0..k {
        w = apply_laplacian(network, &w)?;
    }
    Ok(w)
}

/// `m_k(u) = ⟨u, Δ^k u⟩_E`.
pub fn moment(network: &Network, u: &VertexFunction, k: u32) -> Result<f64> {
    let w = laplacian_power(network, u, k)?;
    energy_form(network, u, &w)
}

/// Largest eigenvalue of the Laplacian.
pub fn operator_norm(network: &Network) -> Result<f64> {
    Ok(eigensystem(network)?.largest())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentGaps {
    /// `m_1^(c)(I*u) - m_1^(b)(u)`; zero up to roundoff.
    pub m1_gap: f64,
    /// `m_2^(c)(I*u) - m_2^(b)(u)`; nonnegative.
    pub m2_gap: f64,
}

pub fn monotonicity_check(pair: &ConductancePair, u: &VertexFunction) -> Result<MomentGaps> {
    let adjoint = Adjoint::new(pair)?;
    monotonicity_with(pair, &adjoint, u)
}

pub(crate) fn monotonicity_with(
    pair: &ConductancePair,
    adjoint: &Adjoint<'_>,
    u: &VertexFunction,
) -> Result<MomentGaps> {
    let image = adjoint.apply(u)?;
    let (b, c) = (pair.b(), pair.c());
    Ok(MomentGaps {
        m1_gap: moment(c, &image, 1)? - moment(b, u, 1)?,
        m2_gap: moment(c, &image, 2)? - moment(b, u, 2)?,
    })
}

/// Log-spaced trapezoid rule for `∫_0^∞ e^{-tΔ} u dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatQuadrature {
    pub nodes: usize,
    /// Lower limit is `lower / λ_max`; the piece `[0, lower/λ_max]` is added as a rectangle.
    pub lower: f64,
    /// Upper limit is `upper / λ_min`.
    pub upper: f64,
}

impl Default for HeatQuadrature {
    fn default() -> Self {
        HeatQuadrature {
            nodes: 200,
            lower: 1e-6,
            upper: 50.0,
        }
    }
}

impl HeatQuadrature {
    /// Quadrature approximation of `∫_0^∞ e^{-tλ} dt = 1/λ`.
    pub fn laplace_transform(&self, lam: f64, lam_min: f64, lam_max: f64) -> f64 {
        let t0 = self.lower / lam_max;
        let t1 = self.upper / lam_min;
        let (s0, s1) = (t0.ln(), t1.ln());
        let m = self.nodes.max(2);
        let h = (s1 - s0) / (m - 1) as f64;
        let mut total = 0.0;
        for k in 0..m {
            let t = (s0 + h * k as f64).exp();
            let w = if k == 0 || k == m - 1 { 0.5 * h } else { h };
            // dt = t ds
            total += w * t * (-t * lam).exp();
        }
        total + t0
    }
}

#[derive(Debug, Clone)]
pub struct HeatInverse {
    pub solution: VertexFunction,
    pub direct: VertexFunction,
    /// `‖solution - direct‖_∞ / ‖direct‖_∞`.
    pub relative_error: f64,
    pub warning: Option<String>,
}

/// Solves `Δw = u` through the heat semigroup and compares with the direct solve.
pub fn inverse_via_heat(
    network: &Network,
    u: &VertexFunction,
    quadrature: &HeatQuadrature,
) -> Result<HeatInverse> {
    network.check(u)?;
    if quadrature.nodes < 2 || !(quadrature.lower > 0.0 && quadrature.upper > 0.0) {
        return Err(Error::InvalidArgument(
            "quadrature needs at least two nodes and positive limits".to_string(),
        ));
    }
    let spec = eigensystem(network)?;
    let (lam_min, lam_max) = (spec.smallest(), spec.largest());
    let mut solution = network.zero_function();
    for (&lam, psi) in spec.eigenvalues().iter().zip(spec.eigenvectors()) {
        let coeff = energy_raw(network, u.values(), psi.values());
        let transform = quadrature.laplace_transform(lam, lam_min, lam_max);
        solution = solution.add(&psi.scale(coeff * transform));
    }
    let direct = VertexFunction::grounded(
        GroundedSolver::new(network)?.solve(u.values()),
        network.origin(),
    );
    let scale = direct.max_abs();
    let relative_error = if scale > 0.0 {
        solution.max_abs_diff(&direct) / scale
    } else {
        solution.max_abs()
    };
    let warning = (relative_error > 1e-3)
        .then(|| format!("heat quadrature relative error {relative_error:.3e} exceeds 1e-3"));
    Ok(HeatInverse {
        solution,
        direct,
        relative_error,
        warning,
    })
}
