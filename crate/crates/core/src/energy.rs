//! Energy kernel, effective resistance, Schur reduction and the harmonic subspace.

use std::collections::{BTreeMap, HashSet};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{energy_form, energy_raw, Network, VertexFunction};
use crate::linalg::{BlockSolver, GroundedSolver};

/// Grounded `v` with `Δv = δ_x - δ_y`; the zero function when `x == y`.
pub fn dipole(network: &Network, x: &str, y: &str) -> Result<VertexFunction> {
    let (xi, yi) = (network.index_of(x)?, network.index_of(y)?);
    dipole_at(network, xi, yi)
}

pub(crate) fn dipole_at(network: &Network, x: usize, y: usize) -> Result<VertexFunction> {
    if x == y {
        network.ensure_connected()?;
        return Ok(network.zero_function());
    }
    let solver = GroundedSolver::new(network)?;
    Ok(solve_source(network, &solver, x, y))
}

fn solve_source(network: &Network, solver: &GroundedSolver, x: usize, y: usize) -> VertexFunction {
    let mut rhs = DVector::zeros(network.len());
    rhs[x] += 1.0;
    rhs[y] -= 1.0;
    VertexFunction::grounded(solver.solve(&rhs), network.origin())
}

/// Reproducing kernel `{v_x}` of the energy space: `⟨v_x, u⟩_E = u(x) - u(o)`.
#[derive(Debug, Clone)]
pub struct EnergyKernel {
    dipoles: Vec<VertexFunction>,
}

impl EnergyKernel {
    /// `v_x` by vertex index.
    pub fn get(&self, x: usize) -> &VertexFunction {
        &self.dipoles[x]
    }

    pub fn dipoles(&self) -> &[VertexFunction] {
        &self.dipoles
    }

    pub fn len(&self) -> usize {
        self.dipoles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dipoles.is_empty()
    }

    /// Largest `|⟨v_x, u⟩_E - (u(x) - u(o))|` over all vertices.
    pub fn reproducing_error(&self, network: &Network, u: &VertexFunction) -> Result<f64> {
        network.check(u)?;
        let o = network.origin();
        Ok(self
            .dipoles
            .iter()
            .enumerate()
            .map(|(x, vx)| {
                (energy_raw(network, vx.values(), u.values()) - (u.get(x) - u.get(o))).abs()
            })
            .fold(0.0, f64::max))
    }
}

pub fn energy_kernel(network: &Network) -> Result<EnergyKernel> {
    let solver = GroundedSolver::new(network)?;
    let o = network.origin();
    let dipoles = (0..network.len())
        .into_par_iter()
        .map(|x| {
            if x == o {
                network.zero_function()
            } else {
                solve_source(network, &solver, x, o)
            }
        })
        .collect();
    Ok(EnergyKernel { dipoles })
}

/// Free effective resistance `R(x, y) = E(v_x - v_y)`.
pub fn effective_resistance(network: &Network, x: &str, y: &str) -> Result<f64> {
    let (xi, yi) = (network.index_of(x)?, network.index_of(y)?);
    resistance_at(network, xi, yi)
}

pub(crate) fn resistance_at(network: &Network, x: usize, y: usize) -> Result<f64> {
    let w = dipole_at(network, x, y)?;
    energy_form(network, &w, &w)
}

/// All pairwise effective resistances from a single factorization.
pub fn resistance_matrix(network: &Network) -> Result<DMatrix<f64>> {
    let kernel = energy_kernel(network)?;
    let n = network.len();
    // R(x,y) = v_x(x) + v_y(y) - 2 v_x(y) by reproduction
    Ok(DMatrix::from_fn(n, n, |x, y| {
        if x == y {
            0.0
        } else {
            kernel.get(x).get(x) + kernel.get(y).get(y) - 2.0 * kernel.get(x).get(y)
        }
    }))
}

/// Eliminates every vertex outside `keep`, producing the network whose
/// Laplacian is the Schur complement onto `keep`.
///
/// The origin stays if it is kept; otherwise `new_origin` (or the first kept
/// vertex in network order) becomes the origin.
pub fn schur_reduce<S: AsRef<str>>(
    network: &Network,
    keep: &[S],
    new_origin: Option<&str>,
) -> Result<Network> {
    if keep.is_empty() {
        return Err(Error::InvalidArgument(
            "keep set must be nonempty".to_string(),
        ));
    }
    network.ensure_connected()?;
    let keep_set: HashSet<usize> = network.indices_of(keep)?.into_iter().collect();
    let kept: Vec<usize> = (0..network.len())
        .filter(|i| keep_set.contains(i))
        .collect();
    let dropped: Vec<usize> = (0..network.len())
        .filter(|i| !keep_set.contains(i))
        .collect();

    let origin = match new_origin {
        Some(o) => {
            let oi = network.index_of(o)?;
            if !keep_set.contains(&oi) {
                return Err(Error::InvalidArgument(format!(
                    "new origin `{o}` is not kept"
                )));
            }
            oi
        }
        None if keep_set.contains(&network.origin()) => network.origin(),
        None => kept[0],
    };

    let l = network.laplacian();
    let mut schur = DMatrix::from_fn(kept.len(), kept.len(), |i, j| l[(kept[i], kept[j])]);
    if !dropped.is_empty() {
        let solver = BlockSolver::new(network, &l, &kept)?;
        // columns of L_EE^{-1} L_EK, laid out over the full vertex set
        let eliminated: Vec<DVector<f64>> = kept
            .iter()
            .map(|&k| solver.solve(&l.column(k).into_owned()))
            .collect();
        for (i, &ki) in kept.iter().enumerate() {
            for (j, x) in eliminated.iter().enumerate() {
                schur[(i, j)] -= dropped.iter().map(|&e| l[(ki, e)] * x[e]).sum::<f64>();
            }
        }
    }

    let mut edges = BTreeMap::new();
    for i in 0..kept.len() {
        for j in i + 1..kept.len() {
            // symmetrize away roundoff before reading off the conductance
            let c = -0.5 * (schur[(i, j)] + schur[(j, i)]);
            if c > 0.0 {
                edges.insert((i, j), c);
            }
        }
    }
    let vertices = kept
        .iter()
        .map(|&i| network.vertex(i).to_string())
        .collect();
    let origin_pos = kept.iter().position(|&i| i == origin).unwrap_or(0);
    Ok(Network::from_indexed(vertices, origin_pos, edges))
}

/// Energy-orthonormal basis of the grounded functions harmonic at every
/// vertex of `interior`.
///
/// Built from the harmonic extensions of the boundary indicators, then
/// orthonormalized by modified Gram-Schmidt in the energy inner product.
/// The result has dimension one less than the boundary.
pub fn harmonic_subspace<S: AsRef<str>>(
    network: &Network,
    interior: &[S],
) -> Result<Vec<VertexFunction>> {
    let (boundary, extensions) = boundary_extensions(network, interior)?;
    if boundary.is_empty() {
        return Ok(Vec::new());
    }

    // the extensions sum to the constant 1, so one of them is redundant after
    // grounding; drop the origin's own, or the last one if the origin is inside
    let skip = boundary
        .iter()
        .position(|&b| b == network.origin())
        .unwrap_or(boundary.len() - 1);
    let mut basis: Vec<VertexFunction> = Vec::new();
    for (k, ext) in extensions.into_iter().enumerate() {
        if k == skip {
            continue;
        }
        let mut w = VertexFunction::grounded(ext, network.origin());
        let initial = energy_raw(network, w.values(), w.values()).sqrt();
        for q in &basis {
            let proj = energy_raw(network, q.values(), w.values());
            w = w.sub(&q.scale(proj));
        }
        let norm = energy_raw(network, w.values(), w.values()).sqrt();
        if initial > 0.0 && norm > 1e-10 * initial {
            basis.push(w.scale(1.0 / norm));
        }
    }
    Ok(basis)
}

/// Boundary vertices of `interior` with the harmonic extension of each
/// boundary indicator (ungrounded).
pub(crate) fn boundary_extensions<S: AsRef<str>>(
    network: &Network,
    interior: &[S],
) -> Result<(Vec<usize>, Vec<DVector<f64>>)> {
    network.ensure_connected()?;
    let inner: HashSet<usize> = network.indices_of(interior)?.into_iter().collect();
    let boundary: Vec<usize> = (0..network.len()).filter(|i| !inner.contains(i)).collect();
    let l = network.laplacian();
    let extensions = if inner.is_empty() || boundary.is_empty() {
        boundary
            .iter()
            .map(|&b| {
                let mut e = DVector::zeros(network.len());
                e[b] = 1.0;
                e
            })
            .collect()
    } else {
        let solver = BlockSolver::new(network, &l, &boundary)?;
        boundary
            .iter()
            .map(|&b| {
                let mut e = solver.solve(&(-l.column(b).into_owned()));
                e[b] = 1.0;
                e
            })
            .collect()
    };
    Ok((boundary, extensions))
}

/// `L h` for `h` harmonic on the interior, read off as `E(h, g_β)` for the
/// boundary extensions `g_β`. Pointwise differencing loses every digit once
/// conductances are large enough to flatten `h` below one ulp; the energy
/// pairing does not.
pub(crate) fn boundary_flux(
    network: &Network,
    boundary: &[usize],
    extensions: &[DVector<f64>],
    h: &VertexFunction,
) -> DVector<f64> {
    let mut flux = DVector::zeros(network.len());
    for (&b, g) in boundary.iter().zip(extensions) {
        flux[b] = energy_raw(network, h.values(), g);
    }
    flux
}

/// Split of `u` into its finite-energy part and its energy-orthogonal
/// projection onto the interior-harmonic subspace.
#[derive(Debug, Clone)]
pub struct RoydenParts {
    pub fin: VertexFunction,
    pub harm: VertexFunction,
}

pub fn royden_project<S: AsRef<str>>(
    network: &Network,
    u: &VertexFunction,
    interior: &[S],
) -> Result<RoydenParts> {
    network.check(u)?;
    let basis = harmonic_subspace(network, interior)?;
    let mut harm = network.zero_function();
    for h in &basis {
        harm = harm.add(&h.scale(energy_raw(network, h.values(), u.values())));
    }
    Ok(RoydenParts {
        fin: u.sub(&harm),
        harm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{closed_form_harmonic, Family};
    use crate::graph::{apply_laplacian, energy_norm};
    use crate::test_support::{random_connected, random_function};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn triangle() -> Network {
        Family::Complete { n: 3 }.generate().unwrap()
    }

    /// Effective resistance through the Moore-Penrose pseudo-inverse of the
    /// full Laplacian, independent of the grounded solver.
    fn pinv_resistance(net: &Network, x: usize, y: usize) -> f64 {
        let eig = nalgebra::SymmetricEigen::new(net.laplacian());
        let top = eig.eigenvalues.amax();
        let mut r = 0.0;
        for k in 0..net.len() {
            let lam = eig.eigenvalues[k];
            if lam > 1e-12 * top {
                let d = eig.eigenvectors[(x, k)] - eig.eigenvectors[(y, k)];
                r += d * d / lam;
            }
        }
        r
    }

    #[test]
    fn path_dipole_is_ramp() {
        let net = Family::Path { n: 2 }.generate().unwrap();
        let v = dipole(&net, "2", "0").unwrap();
        assert!(v.max_abs_diff(&net.function(vec![0.0, 1.0, 2.0]).unwrap()) < 1e-12);
        assert_eq!(dipole(&net, "1", "1").unwrap().max_abs(), 0.0);
    }

    #[test]
    fn triangle_dipole_and_resistance() {
        let net = triangle();
        let v = dipole(&net, "1", "2").unwrap();
        assert!((v.get(1) - v.get(2) - 2.0 / 3.0).abs() < 1e-12);
        assert!((pinv_resistance(&net, 1, 2) - 2.0 / 3.0).abs() < 1e-12);

        let kernel = energy_kernel(&net).unwrap();
        let vx = kernel.get(1);
        assert!((energy_form(&net, vx, vx).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(kernel.get(0).max_abs(), 0.0);
    }

    #[test]
    fn kernel_symmetry_and_span() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let net = random_connected(&mut rng, 7);
        let kernel = energy_kernel(&net).unwrap();
        let o = net.origin();
        for x in 0..net.len() {
            for y in 0..net.len() {
                let lhs = energy_form(&net, kernel.get(x), kernel.get(y)).unwrap();
                assert!((lhs - (kernel.get(y).get(x) - kernel.get(y).get(o))).abs() < 1e-9);
            }
        }
        // Gram matrix of {v_x : x != o} has full rank |V| - 1
        let idx: Vec<usize> = (0..net.len()).filter(|&x| x != o).collect();
        let gram = DMatrix::from_fn(idx.len(), idx.len(), |i, j| {
            energy_form(&net, kernel.get(idx[i]), kernel.get(idx[j])).unwrap()
        });
        assert_eq!(gram.rank(1e-10), net.len() - 1);
    }

    #[test]
    fn resistance_examples() {
        let path = Family::Path { n: 6 }.generate().unwrap();
        assert!((effective_resistance(&path, "0", "6").unwrap() - 6.0).abs() < 1e-12);
        assert_eq!(effective_resistance(&path, "3", "3").unwrap(), 0.0);
        for n in 2..8 {
            let k = Family::Complete { n }.generate().unwrap();
            let r = effective_resistance(&k, "0", "1").unwrap();
            assert!((r - 2.0 / n as f64).abs() < 1e-12);
            assert!((pinv_resistance(&k, 0, 1) - 2.0 / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn resistance_matrix_matches_pairwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let net = random_connected(&mut rng, 8);
        let rm = resistance_matrix(&net).unwrap();
        for x in 0..net.len() {
            for y in 0..net.len() {
                assert!((rm[(x, y)] - resistance_at(&net, x, y).unwrap()).abs() < 1e-9);
                assert!((rm[(x, y)] - pinv_resistance(&net, x, y)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn schur_examples() {
        let path = Family::Path { n: 2 }.generate().unwrap();
        let red = schur_reduce(&path, &["0", "2"], None).unwrap();
        assert_eq!(red.edge_count(), 1);
        assert!((red.conductance(0, 1) - 0.5).abs() < 1e-12);

        let k4 = Family::Complete { n: 4 }.generate().unwrap();
        let red = schur_reduce(&k4, &["1", "3"], None).unwrap();
        assert_eq!(red.origin_id(), "1");
        assert!((red.conductance(0, 1) - 2.0).abs() < 1e-12);
        assert!((effective_resistance(&red, "1", "3").unwrap() - 0.5).abs() < 1e-12);

        assert!(schur_reduce(&k4, &["9"], None).is_err());
        assert!(schur_reduce(&k4, &["1", "2"], Some("3")).is_err());
        let empty: [&str; 0] = [];
        assert!(schur_reduce(&k4, &empty, None).is_err());
    }

    #[test]
    fn schur_preserves_resistance() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let n = rng.random_range(3..11);
            let net = random_connected(&mut rng, n);
            let keep: Vec<String> = net
                .vertices()
                .iter()
                .filter(|_| rng.random_bool(0.5))
                .cloned()
                .collect();
            if keep.len() < 2 {
                continue;
            }
            let red = schur_reduce(&net, &keep, None).unwrap();
            assert!(red.edges().all(|(_, _, c)| c > 0.0));
            for a in &keep {
                for b in &keep {
                    let direct = effective_resistance(&net, a, b).unwrap();
                    let reduced = effective_resistance(&red, a, b).unwrap();
                    assert!((direct - reduced).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn kernel_positivity_and_boundedness() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let net = random_connected(&mut rng, 9);
            let kernel = energy_kernel(&net).unwrap();
            let o = net.origin();
            for x in (0..net.len()).filter(|&x| x != o) {
                let vx = kernel.get(x);
                for y in (0..net.len()).filter(|&y| y != o) {
                    assert!(vx.get(y) > 0.0);
                }
                let r = resistance_at(&net, x, o).unwrap();
                assert!(vx.sup_seminorm() <= r + 1e-9);
            }
        }
    }

    #[test]
    fn green_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let net = random_connected(&mut rng, 8);
        let kernel = energy_kernel(&net).unwrap();
        let o = net.origin();
        for x in (0..net.len()).filter(|&x| x != o) {
            for y in (0..net.len()).filter(|&y| y != o) {
                let lv = apply_laplacian(&net, kernel.get(y)).unwrap();
                let val = energy_form(&net, kernel.get(x), &lv).unwrap();
                let expected = if x == y { 2.0 } else { 1.0 };
                assert!((val - expected).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn harmonic_subspace_dimensions() {
        let tri = triangle();
        assert!(harmonic_subspace(&tri, tri.vertices()).unwrap().is_empty());

        let fam = Family::GeometricIntegers { n: 6, base: 2.0 };
        let net = fam.generate().unwrap();
        assert_eq!(
            harmonic_subspace(&net, &fam.natural_interior())
                .unwrap()
                .len(),
            1
        );

        let fam = Family::Path { n: 5 };
        let net = fam.generate().unwrap();
        let basis = harmonic_subspace(&net, &fam.natural_interior()).unwrap();
        assert_eq!(basis.len(), 1);
        let ramp = net.function((0..=5).map(f64::from).collect()).unwrap();
        let ramp = ramp.scale(1.0 / energy_norm(&net, &ramp).unwrap());
        let h = &basis[0];
        let aligned = if h.get(5) < 0.0 {
            h.scale(-1.0)
        } else {
            h.clone()
        };
        assert!(aligned.max_abs_diff(&ramp) < 1e-12);

        // three boundary vertices leave two degrees of freedom
        let basis = harmonic_subspace(&net, &["1", "2", "4"]).unwrap();
        assert_eq!(basis.len(), 2);
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let e = energy_form(&net, a, b).unwrap();
                assert!((e - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn royden_examples() {
        let fam = Family::Path { n: 5 };
        let net = fam.generate().unwrap();
        let ramp = net
            .function((0..=5).map(|k| 2.0 * k as f64).collect())
            .unwrap();
        let parts = royden_project(&net, &ramp, &fam.natural_interior()).unwrap();
        assert!(parts.fin.max_abs() < 1e-12);

        let tri = triangle();
        let u = tri.function(vec![0.0, 1.0, -2.0]).unwrap();
        let parts = royden_project(&tri, &u, tri.vertices()).unwrap();
        assert_eq!(parts.harm.max_abs(), 0.0);
        assert_eq!(parts.fin, u);

        let fam = Family::GeometricIntegers { n: 40, base: 2.0 };
        let net = fam.generate().unwrap();
        let h = closed_form_harmonic(2.0, 40).unwrap();
        let parts = royden_project(&net, &h, &fam.natural_interior()).unwrap();
        assert!(energy_norm(&net, &parts.fin).unwrap() <= 1e-3);
    }

    #[test]
    fn royden_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..10 {
            let net = random_connected(&mut rng, 10);
            let interior: Vec<String> = net.vertices()[3..].to_vec();
            let u = random_function(&mut rng, &net);
            let parts = royden_project(&net, &u, &interior).unwrap();
            assert!(energy_form(&net, &parts.fin, &parts.harm).unwrap().abs() <= 1e-9);
            let total = energy_form(&net, &u, &u).unwrap();
            let split = energy_form(&net, &parts.fin, &parts.fin).unwrap()
                + energy_form(&net, &parts.harm, &parts.harm).unwrap();
            assert!((total - split).abs() <= 1e-8);
            let lap = net.laplacian_action(parts.harm.values());
            for x in 3..net.len() {
                assert!(lap[x].abs() < 1e-9);
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn reproducing_property(seed in any::<u64>(), n in 2usize..12) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let net = random_connected(&mut rng, n);
                let kernel = energy_kernel(&net).unwrap();
                let u = random_function(&mut rng, &net);
                prop_assert!(kernel.reproducing_error(&net, &u).unwrap() <= 1e-8);
            }

            #[test]
            fn resistance_is_a_metric(seed in any::<u64>(), n in 3usize..10) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let net = random_connected(&mut rng, n);
                let r = resistance_matrix(&net).unwrap();
                for x in 0..n {
                    for y in 0..n {
                        prop_assert!((r[(x, y)] - r[(y, x)]).abs() < 1e-9);
                        prop_assert_eq!(r[(x, y)] == 0.0, x == y);
                        for z in 0..n {
                            prop_assert!(r[(x, z)] <= r[(x, y)] + r[(y, z)] + 1e-9);
                        }
                    }
                }
            }
        }
    }
}
