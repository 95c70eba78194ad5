//! Dense helpers for grounded Laplacian systems.

use std::collections::VecDeque;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::Network;

/// Factorization of the Laplacian block on a set of unknowns, the remaining
/// vertices being held at zero.
///
/// Elimination is subtraction-free: each unknown carries its conductance to
/// the already-fixed part of the network, and pivots are rebuilt as sums of
/// positive terms instead of as differences of the original diagonal. Plain
/// Cholesky loses everything below `eps * max c` in a pivot, which is fatal
/// once conductances span many orders of magnitude.
pub(crate) struct BlockSolver {
    n: usize,
    order: Vec<usize>,
    /// `mult[(k, j)] = c_kj / d_k` at the time unknown `k` is eliminated, `j > k`.
    mult: DMatrix<f64>,
    pivots: Vec<f64>,
}

impl BlockSolver {
    pub fn new(network: &Network, laplacian: &DMatrix<f64>, fixed: &[usize]) -> Result<Self> {
        let n = network.len();
        let order = elimination_order(network, fixed);
        let m = order.len();
        let mut pos = vec![usize::MAX; n];
        for (k, &i) in order.iter().enumerate() {
            pos[i] = k;
        }
        // conductances among unknowns, and from each unknown to the fixed set
        let mut cond = DMatrix::from_fn(m, m, |a, b| {
            if a == b {
                0.0
            } else {
                -laplacian[(order[a], order[b])]
            }
        });
        let mut slack: Vec<f64> = order
            .iter()
            .map(|&i| {
                (0..n)
                    .filter(|&j| pos[j] == usize::MAX && j != i)
                    .map(|j| -laplacian[(i, j)])
                    .sum()
            })
            .collect();

        let mut pivots = vec![0.0; m];
        let mut mult = DMatrix::zeros(m, m);
        for k in 0..m {
            let d = slack[k] + (k + 1..m).map(|j| cond[(k, j)]).sum::<f64>();
            if d.is_nan() || d <= 0.0 {
                return Err(Error::Numerical(format!(
                    "vertex `{}` has no path to a fixed vertex",
                    network.vertex(order[k])
                )));
            }
            pivots[k] = d;
            for j in k + 1..m {
                mult[(k, j)] = cond[(k, j)] / d;
            }
            for a in k + 1..m {
                let ca = cond[(a, k)];
                if ca == 0.0 {
                    continue;
                }
                slack[a] += ca * slack[k] / d;
                for b in k + 1..m {
                    if b != a {
                        cond[(a, b)] += ca * mult[(k, b)];
                    }
                }
            }
        }
        Ok(BlockSolver {
            n,
            order,
            mult,
            pivots,
        })
    }

    /// Solves the block system for a full-length right-hand side; entries at
    /// fixed vertices are ignored on input and zero on output.
    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let m = self.order.len();
        let mut f: Vec<f64> = self.order.iter().map(|&i| rhs[i]).collect();
        for k in 0..m {
            for j in k + 1..m {
                f[j] += self.mult[(k, j)] * f[k];
            }
        }
        let mut x = vec![0.0; m];
        for k in (0..m).rev() {
            let later: f64 = (k + 1..m).map(|j| self.mult[(k, j)] * x[j]).sum();
            x[k] = f[k] / self.pivots[k] + later;
        }
        let mut out = DVector::zeros(self.n);
        for (k, &i) in self.order.iter().enumerate() {
            out[i] = x[k];
        }
        out
    }
}

/// Vertices outside `fixed`, by decreasing graph distance from `fixed`.
fn elimination_order(network: &Network, fixed: &[usize]) -> Vec<usize> {
    let n = network.len();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for &f in fixed {
        if dist[f] != 0 {
            dist[f] = 0;
            queue.push_back(f);
        }
    }
    while let Some(x) = queue.pop_front() {
        for &(y, _) in network.neighbors(x) {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).filter(|&i| dist[i] != 0).collect();
    order.sort_by(|&a, &b| dist[b].cmp(&dist[a]).then(a.cmp(&b)));
    order
}

/// Solves `L w = f` for grounded `w`.
///
/// The right-hand side is read modulo constants: it is centred to zero mean
/// first, which is the only representative in the range of `L`. This
/// realizes the pseudo-inverse on the grounded space.
pub(crate) struct GroundedSolver {
    block: BlockSolver,
}

impl GroundedSolver {
    pub fn new(network: &Network) -> Result<Self> {
        network.ensure_connected()?;
        let block = BlockSolver::new(network, &network.laplacian(), &[network.origin()])?;
        Ok(GroundedSolver { block })
    }

    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let mean = rhs.mean();
        self.block.solve(&rhs.add_scalar(-mean))
    }
}

pub(crate) fn delete_row_col(m: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    m.clone().remove_row(k).remove_column(k)
}

/// Symmetric eigendecomposition with eigenvalues sorted ascending.
pub(crate) fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (values, vectors)
}

/// Largest `λ` with `A x = λ B x`, for symmetric `A` and positive definite `B`.
pub(crate) fn largest_generalized_eigenvalue(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    let chol = Cholesky::new(b.clone())
        .ok_or_else(|| Error::Numerical("metric matrix is not positive definite".to_string()))?;
    let l = chol.l();
    // C = L^{-1} A L^{-T}
    let linv_a = l
        .solve_lower_triangular(a)
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".to_string()))?;
    let c = l
        .solve_lower_triangular(&linv_a.transpose())
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".to_string()))?;
    let sym = (&c + c.transpose()) * 0.5;
    let (values, _) = sorted_eigen(sym);
    Ok(values.last().copied().unwrap_or(0.0))
}
