use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, ComplexMatrix, HermitianMatrix};
use crate::observables::OperatorTuple;
use crate::scalar::{Real, C};
use crate::tolerances::TOL;

/// Approximate simultaneous diagonalization `T_j ≈ U D_j U†` with the basis grouped into
/// clusters of nearby joint diagonal values.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct DigitalDecomposition<T: Real> {
    #[serde(skip)]
    pub u: ComplexMatrix<T>,
    /// Rotated diagonals: `diagonals[i][j] = (U†T_jU)_ii`.
    pub diagonals: Vec<Vec<T>>,
    /// Partition of `0..dim`, each cluster sorted, clusters ordered by smallest index.
    pub clusters: Vec<Vec<usize>>,
    /// Mean of `diagonals` over each cluster.
    pub cluster_points: Vec<Vec<T>>,
    /// `√(Σ_j ‖offdiag(U†T_jU)‖_F²)`.
    pub residual: T,
    /// Residual before the first sweep and after each sweep.
    pub residual_history: Vec<T>,
    pub sweeps: usize,
}

impl<T: Real> DigitalDecomposition<T> {
    /// Index of the cluster point closest to `lambda` (first on ties).
    pub fn nearest_cluster(&self, lambda: &[T]) -> Option<usize> {
        let mut best: Option<(usize, T)> = None;
        for (k, p) in self.cluster_points.iter().enumerate() {
            let d = p.iter().zip(lambda).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((k, d));
            }
        }
        best.map(|(k, _)| k)
    }

    /// Orthogonal projection onto the span of a cluster's basis vectors.
    pub fn projection(&self, cluster: usize) -> ComplexMatrix<T> {
        let cols: Vec<Vec<C<T>>> = self.clusters[cluster].iter().map(|&i| self.u.column(i)).collect();
        let v = ComplexMatrix::from_columns(&cols);
        v.matmul(&v.adjoint())
    }
}

fn off_energy<T: Real>(mats: &[ComplexMatrix<T>]) -> T {
    mats.iter().map(|m| m.off_diagonal_norm().powi(2)).sum::<T>()
}

/// Jacobi sweeps over all pairs `(p, q)`, each applying the single complex rotation that
/// minimizes the summed `(p, q)` off-diagonal energy, followed by single-linkage
/// clustering of the rotated diagonals with radius `cluster_radius`.
///
/// Stops when a sweep lowers the residual by less than `tol` or after `max_sweeps`.
pub fn joint_diagonalize<T: Real>(
    tuple: &OperatorTuple<T>,
    max_sweeps: usize,
    tol: T,
    cluster_radius: T,
) -> Result<DigitalDecomposition<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    if !(cluster_radius >= T::zero()) {
        return Err(Error::InvalidParameter(format!("cluster radius must be non-negative, got {cluster_radius}")));
    }
    let dim = tuple.dim();
    let mut mats: Vec<ComplexMatrix<T>> = tuple.ops().iter().map(|op| op.as_matrix().clone()).collect();
    let mut u = ComplexMatrix::identity(dim);
    let scale = T::one().max(tuple.bound());
    let tiny = (T::epsilon() * scale).powi(2);

    let mut residual = off_energy(&mats).sqrt();
    let mut history = vec![residual];
    let mut sweeps = 0;
    while sweeps < max_sweeps && residual > T::zero() {
        for p in 0..dim {
            for q in p + 1..dim {
                if let Some((c, s)) = rotation(&mats, p, q, tiny)? {
                    for m in mats.iter_mut() {
                        rotate(m, p, q, c, s);
                    }
                    rotate_columns(&mut u, p, q, c, s);
                }
            }
        }
        sweeps += 1;
        let next = off_energy(&mats).sqrt();
        debug_assert!(
            next <= residual + T::tol(1e-12) * scale,
            "joint diagonalization residual increased: {residual} -> {next}"
        );
        let improvement = residual - next;
        residual = next;
        history.push(residual);
        if improvement < tol {
            break;
        }
    }

    let diagonals: Vec<Vec<T>> = (0..dim).map(|i| mats.iter().map(|m| m[(i, i)].re).collect()).collect();
    let clusters = single_linkage(&diagonals, cluster_radius);
    let cluster_points = clusters
        .iter()
        .map(|c| {
            let inv = T::one() / T::count(c.len());
            (0..tuple.n())
                .map(|j| c.iter().map(|&i| diagonals[i][j]).sum::<T>() * inv)
                .collect()
        })
        .collect();

    Ok(DigitalDecomposition {
        u,
        diagonals,
        clusters,
        cluster_points,
        residual,
        residual_history: history,
        sweeps,
    })
}

/// Rotation `R = [[c, −s̄], [s, c]]` on the `(p, q)` plane, or `None` when the pair is
/// already diagonal for every matrix.
///
/// Each 2×2 block is `m·I + x σ_x + y σ_y + z σ_z`; conjugation by `R` rotates `(x, y, z)`
/// and the remaining off-diagonal energy is `Σ (x² + y² + z²) − (u·r)²` where `u` is
/// sent to the `z` axis. The best `u` is the top eigenvector of `G = Σ r rᵀ`.
fn rotation<T: Real>(mats: &[ComplexMatrix<T>], p: usize, q: usize, tiny: T) -> Result<Option<(T, C<T>)>> {
    let half = T::lit(0.5);
    let mut g = [[T::zero(); 3]; 3];
    let mut off = T::zero();
    for m in mats {
        let b = m[(p, q)];
        let r = [b.re, -b.im, (m[(p, p)].re - m[(q, q)].re) * half];
        off = off + b.norm_sqr();
        for a in 0..3 {
            for c in 0..3 {
                g[a][c] = g[a][c] + r[a] * r[c];
            }
        }
    }
    if off <= tiny {
        return Ok(None);
    }
    let gm = ComplexMatrix::from_fn(3, 3, |a, c| C::new(g[a][c], T::zero()));
    let e = eig_hermitian(&HermitianMatrix::symmetrize(&gm))?;
    let top = e.eigenvector(2);
    // G is real, but the eigenvector may carry a global complex phase
    let pivot = top.iter().fold(top[0], |acc, z| if z.norm() > acc.norm() { *z } else { acc });
    let unphase = pivot.unscale(pivot.norm()).conj();
    let mut u = [(top[0] * unphase).re, (top[1] * unphase).re, (top[2] * unphase).re];
    let len = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
    if !(len > T::zero()) {
        return Ok(None);
    }
    for x in u.iter_mut() {
        *x = *x / len;
    }
    if u[2] < T::zero() {
        for x in u.iter_mut() {
            *x = -*x;
        }
    }
    let c = ((T::one() + u[2]) * half).sqrt();
    let s = C::new(u[0], u[1]).unscale(T::lit(2.0) * c);
    if s.norm() <= T::epsilon() {
        return Ok(None);
    }
    Ok(Some((c, s)))
}

/// `A ← R† A R`.
fn rotate<T: Real>(a: &mut ComplexMatrix<T>, p: usize, q: usize, c: T, s: C<T>) {
    rotate_columns(a, p, q, c, s);
    let n = a.cols();
    for j in 0..n {
        let (bp, bq) = (a[(p, j)], a[(q, j)]);
        a[(p, j)] = bp.scale(c) + s.conj() * bq;
        a[(q, j)] = -(s * bp) + bq.scale(c);
    }
}

/// `A ← A R`.
fn rotate_columns<T: Real>(a: &mut ComplexMatrix<T>, p: usize, q: usize, c: T, s: C<T>) {
    for i in 0..a.rows() {
        let (ap, aq) = (a[(i, p)], a[(i, q)]);
        a[(i, p)] = ap.scale(c) + aq * s;
        a[(i, q)] = -(ap * s.conj()) + aq.scale(c);
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Single-linkage clusters of `points` at `radius`; the smaller index becomes the root.
fn single_linkage<T: Real>(points: &[Vec<T>], radius: T) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let r2 = radius * radius + T::tol(TOL.unit);
    for i in 0..n {
        for k in i + 1..n {
            let d2 = points[i].iter().zip(&points[k]).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>();
            if d2 <= r2 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, k));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = clusters.len();
            clusters.push(Vec::new());
        }
        clusters[slot[root]].push(i);
    }
    clusters
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, random_unitary, SplitMix64};

    fn conjugated(u: &ComplexMatrix<f64>, d: &[f64]) -> HermitianMatrix<f64> {
        let mut m = u.clone();
        m.scale_cols(d);
        HermitianMatrix::symmetrize(&m.matmul(&u.adjoint()))
    }

    fn unitarity(u: &ComplexMatrix<f64>) -> f64 {
        u.adjoint_matmul(u).sub(&ComplexMatrix::identity(u.cols())).max_abs()
    }

    #[test]
    fn single_rotation_diagonalizes_2x2() {
        let a = HermitianMatrix::new(ComplexMatrix::from_row_major(
            2,
            2,
            vec![C::new(0.3, 0.0), C::new(0.2, -0.7), C::new(0.2, 0.7), C::new(-0.1, 0.0)],
        )
        .unwrap())
        .unwrap();
        let tuple = OperatorTuple::new(vec![a]).unwrap();
        let dec = joint_diagonalize(&tuple, 1, 1e-14, 0.0).unwrap();
        assert!(dec.residual < 1e-14, "{}", dec.residual);
    }

    #[test]
    fn commuting_pair_is_diagonalized() {
        let u = random_unitary::<f64>(&mut SplitMix64::new(9), 6);
        let d1 = [0.1, -0.5, 0.7, 0.2, 0.2, -0.9];
        let d2 = [0.3, 0.3, -0.9, 0.0, 0.8, 0.4];
        let tuple = OperatorTuple::new(vec![conjugated(&u, &d1), conjugated(&u, &d2)]).unwrap();
        let dec = joint_diagonalize(&tuple, 50, 1e-14, 0.05).unwrap();
        assert!(dec.residual <= 1e-8, "{}", dec.residual);
        assert!(unitarity(&dec.u) < 1e-9);
        assert_eq!(dec.clusters.len(), 6);
        let mut got: Vec<Vec<f64>> = dec.cluster_points.clone();
        let mut want: Vec<Vec<f64>> = d1.iter().zip(&d2).map(|(&a, &b)| vec![a, b]).collect();
        let key = |p: &Vec<f64>| (p[0] * 1e6).round() as i64 * 10_000_000 + (p[1] * 1e6).round() as i64;
        got.sort_by_key(key);
        want.sort_by_key(key);
        for (g, w) in got.iter().zip(&want) {
            assert!((g[0] - w[0]).abs() < 1e-8 && (g[1] - w[1]).abs() < 1e-8);
        }
    }

    #[test]
    fn single_observable_matches_eigendecomposition() {
        let a = random_hermitian::<f64>(&mut SplitMix64::new(2), 8);
        let tuple = OperatorTuple::new(vec![a.clone()]).unwrap();
        let dec = joint_diagonalize(&tuple, 50, 1e-14, 0.0).unwrap();
        assert!(dec.residual <= 1e-10);
        let mut diag: Vec<f64> = dec.diagonals.iter().map(|d| d[0]).collect();
        diag.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let ev = eig_hermitian(&a).unwrap().eigenvalues;
        for (x, y) in diag.iter().zip(&ev) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn perturbed_pair_residual_bounded_and_monotone() {
        let mut rng = SplitMix64::new(17);
        let u = random_unitary::<f64>(&mut rng, 10);
        let d1: Vec<f64> = (0..10).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let d2: Vec<f64> = (0..10).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let e1 = random_hermitian::<f64>(&mut rng, 10).scale(0.01);
        let e2 = random_hermitian::<f64>(&mut rng, 10).scale(0.01);
        let pert = (e1.as_matrix().frobenius_norm().powi(2) + e2.as_matrix().frobenius_norm().powi(2)).sqrt();
        let tuple = OperatorTuple::new(vec![conjugated(&u, &d1).add(&e1), conjugated(&u, &d2).add(&e2)]).unwrap();
        let dec = joint_diagonalize(&tuple, 100, 1e-14, 0.1).unwrap();
        assert!(dec.residual <= 5.0 * pert, "{} vs {}", dec.residual, pert);
        assert!(dec.residual_history.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!(unitarity(&dec.u) < 1e-9);
        // clusters partition the basis
        let mut all: Vec<usize> = dec.clusters.concat();
        all.sort();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn single_linkage_chains_and_orders() {
        let pts = vec![vec![0.0], vec![5.0], vec![0.4], vec![0.8], vec![5.3]];
        let c = single_linkage(&pts, 0.45);
        assert_eq!(c, vec![vec![0, 2, 3], vec![1, 4]]);
        let c = single_linkage(&pts, 0.1);
        assert_eq!(c.len(), 5);
    }

    #[test]
    fn projections_are_idempotent() {
        let u = random_unitary::<f64>(&mut SplitMix64::new(5), 4);
        let tuple = OperatorTuple::new(vec![conjugated(&u, &[0.0, 0.0, 1.0, 1.0])]).unwrap();
        let dec = joint_diagonalize(&tuple, 30, 1e-14, 0.5).unwrap();
        assert_eq!(dec.clusters.len(), 2);
        for k in 0..2 {
            let p = dec.projection(k);
            assert!(p.matmul(&p).sub(&p).max_abs() < 1e-10);
        }
    }
}
