//! # potnet
//!
//! Discrete potential theory on finite weighted resistance networks.
//!
//! A network carries symmetric conductances `c_xy` and an origin `o`. Its
//! energy space is the space of vertex functions modulo constants with the
//! Dirichlet form `E(u, v) = ½ Σ c_xy (u(x)-u(y))(v(x)-v(y))`; functions are
//! represented grounded at `o`.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`graph`] | [`Network`], [`VertexFunction`], Laplacian, energy form |
//! | [`families`] | paths, cycles, complete graphs, trees, geometric integers, closed forms |
//! | [`energy`] | dipoles, energy kernel, effective resistance, Schur reduction, harmonic subspace |
//! | [`comparison`] | pairs `b <= c`: adjoint inclusion, embedding norm, conjugation and cross-adjoint checks |
//! | [`spectral`] | energy-orthonormal eigensystems, spectral measures, moments, heat-kernel inverse |
//! | [`walks`] | transition probabilities, exact and Monte Carlo escape probabilities |
//! | [`io`] | JSON network and pair files |
//!
//! ```
//! use potnet::{energy, families::Family};
//!
//! let k4 = Family::Complete { n: 4 }.generate().unwrap();
//! let r = energy::effective_resistance(&k4, "0", "1").unwrap();
//! assert!((r - 0.5).abs() < 1e-12);
//! ```

pub mod comparison;
pub mod energy;
pub mod error;
pub mod families;
pub mod graph;
pub mod io;
mod linalg;
pub mod spectral;
pub mod walks;

#[cfg(test)]
mod test_support;

pub use comparison::ConductancePair;
pub use error::{Error, Result};
pub use graph::{Network, VertexFunction};
