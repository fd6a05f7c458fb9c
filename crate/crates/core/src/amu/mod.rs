//! AMU state search: ground states of the localization operator
//! `Q(λ) = Σ_j (T_j − λ_j)²`, approximate joint diagonalization, and superpositions
//! aimed at convex-hull targets.

mod jacobi;
mod superpose;

pub use jacobi::{joint_diagonalize, DigitalDecomposition};
pub use superpose::{simplex_least_squares, superpose, SuperpositionPlan};

use crate::error::{Error, Result};
use crate::linalg::{inner, lowest_eigenpair, ComplexMatrix, HermitianMatrix};
use crate::observables::{amu_check, AmuCertificate, OperatorTuple, VectorState};
use crate::scalar::Real;

/// `Q(λ)` for one point `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationOperator<T: Real> {
    pub lambda: Vec<T>,
    pub q: HermitianMatrix<T>,
}

impl<T: Real> LocalizationOperator<T> {
    /// Builds `Σ_j (T_j − λ_j I)²` term by term.
    pub fn new(tuple: &OperatorTuple<T>, lambda: &[T]) -> Result<Self> {
        check_lambda(tuple, lambda)?;
        let dim = tuple.dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (op, &l) in tuple.ops().iter().zip(lambda) {
            let centered = op.shift(-l);
            acc = acc.add(centered.square().as_matrix());
        }
        Ok(Self {
            lambda: lambda.to_vec(),
            q: HermitianMatrix::symmetrize(&acc),
        })
    }

    /// `⟨Q v, v⟩`.
    pub fn energy(&self, state: &VectorState<T>) -> T {
        let qv = self.q.as_matrix().mul_vec(state.amplitudes());
        inner(&qv, state.amplitudes()).re
    }
}

fn check_lambda<T: Real>(tuple: &OperatorTuple<T>, lambda: &[T]) -> Result<()> {
    if lambda.len() != tuple.n() {
        return Err(Error::DimensionMismatch {
            expected: tuple.n(),
            found: lambda.len(),
        });
    }
    if let Some(bad) = lambda.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda has a non-finite coordinate {bad}")));
    }
    Ok(())
}

/// Reusable state for many `λ` on one tuple: `Σ_j T_j²` is formed once and
/// `Q(λ) = ΣT_j² − 2Σλ_jT_j + |λ|²` is assembled per point.
#[derive(Debug, Clone)]
pub struct Localizer<'a, T: Real> {
    tuple: &'a OperatorTuple<T>,
    sum_sq: ComplexMatrix<T>,
}

impl<'a, T: Real> Localizer<'a, T> {
    pub fn new(tuple: &'a OperatorTuple<T>) -> Self {
        let dim = tuple.dim();
        let sum_sq = tuple
            .ops()
            .iter()
            .fold(ComplexMatrix::zeros(dim, dim), |acc, op| acc.add(op.square().as_matrix()));
        Self { tuple, sum_sq }
    }

    pub fn tuple(&self) -> &OperatorTuple<T> {
        self.tuple
    }

    pub fn operator(&self, lambda: &[T]) -> Result<LocalizationOperator<T>> {
        check_lambda(self.tuple, lambda)?;
        let two = T::lit(2.0);
        let mut q = self.sum_sq.clone();
        for (op, &l) in self.tuple.ops().iter().zip(lambda) {
            q = q.sub(&op.as_matrix().scale_real(two * l));
        }
        let shift = lambda.iter().map(|&l| l * l).sum::<T>();
        Ok(LocalizationOperator {
            lambda: lambda.to_vec(),
            q: HermitianMatrix::symmetrize(&q.shift_diag(shift)),
        })
    }

    /// Lowest eigenvector of `Q(λ)` and its energy `⟨Qv, v⟩`.
    ///
    /// The energy is the Rayleigh quotient of the returned vector rather than the computed
    /// eigenvalue, so that `Σ_j var_j(v) ≤ energy` holds for the vector actually returned.
    pub fn ground_state(&self, lambda: &[T]) -> Result<(VectorState<T>, T)> {
        let loc = self.operator(lambda)?;
        let (min_eig, v) = lowest_eigenpair(&loc.q)?;
        let scale = T::one().max(loc.q.as_matrix().max_abs());
        debug_assert!(
            min_eig >= -T::tol(1e-9) * scale,
            "Q(λ) is not positive semidefinite: {min_eig}"
        );
        let state = VectorState::from_unnormalized(v)?;
        let energy = loc.energy(&state).max(T::zero());
        Ok((state, energy))
    }

    /// Ground state followed by the AMU check; the certificate is returned whatever
    /// its flags say.
    pub fn amu_at(&self, lambda: &[T], sigma: T, eps: T) -> Result<AmuCertificate<T>> {
        let (state, _) = self.ground_state(lambda)?;
        amu_check(self.tuple, &state, lambda, sigma, eps)
    }

    /// Best certificate among the ground state of `Q(λ)` and, when a decomposition is
    /// given, the rotated basis vectors of the cluster nearest `λ`.
    ///
    /// Certified candidates beat uncertified ones, then smaller `max sd`, then smaller
    /// `max |exp − λ|`; ties keep the ground state.
    pub fn amu_search(
        &self,
        lambda: &[T],
        sigma: T,
        eps: T,
        decomposition: Option<&DigitalDecomposition<T>>,
    ) -> Result<AmuCertificate<T>> {
        let mut best = self.amu_at(lambda, sigma, eps)?;
        let Some(dec) = decomposition else {
            return Ok(best);
        };
        if dec.u.rows() != self.tuple.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.tuple.dim(),
                found: dec.u.rows(),
            });
        }
        if let Some(c) = dec.nearest_cluster(lambda) {
            for &i in &dec.clusters[c] {
                let state = VectorState::from_unnormalized(dec.u.column(i))?;
                let cand = amu_check(self.tuple, &state, lambda, sigma, eps)?;
                if better(&cand, &best, lambda) {
                    best = cand;
                }
            }
        }
        Ok(best)
    }
}

fn better<T: Real>(a: &AmuCertificate<T>, b: &AmuCertificate<T>, lambda: &[T]) -> bool {
    if a.certified() != b.certified() {
        return a.certified();
    }
    let (sa, sb) = (a.report.max_sd(), b.report.max_sd());
    if sa != sb {
        return sa < sb;
    }
    a.report.max_deviation(lambda) < b.report.max_deviation(lambda)
}

/// Lowest eigenvector of `Q(λ)` with energy `⟨Q(λ)v, v⟩`.
pub fn ground_state<T: Real>(tuple: &OperatorTuple<T>, lambda: &[T]) -> Result<(VectorState<T>, T)> {
    Localizer::new(tuple).ground_state(lambda)
}

/// Ground state of `Q(λ)` checked against `σ` and `ε`.
pub fn amu_at<T: Real>(tuple: &OperatorTuple<T>, lambda: &[T], sigma: T, eps: T) -> Result<AmuCertificate<T>> {
    Localizer::new(tuple).amu_at(lambda, sigma, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{measure, variance_paths};
    use crate::random::{random_hermitian, random_unitary, SplitMix64};
    use crate::scalar::C;

    fn shift_pair(dim: usize) -> OperatorTuple<f64> {
        let a1 = ComplexMatrix::from_fn(dim, dim, |i, j| {
            if i.abs_diff(j) == 1 {
                C::new(0.5, 0.0)
            } else {
                C::new(0.0, 0.0)
            }
        });
        let a2 = ComplexMatrix::from_fn(dim, dim, |i, j| {
            if i == j + 1 {
                C::new(0.0, 0.5)
            } else if j == i + 1 {
                C::new(0.0, -0.5)
            } else {
                C::new(0.0, 0.0)
            }
        });
        OperatorTuple::new(vec![HermitianMatrix::new(a1).unwrap(), HermitianMatrix::new(a2).unwrap()]).unwrap()
    }

    #[test]
    fn commuting_joint_eigenvalue_has_zero_energy() {
        let u = random_unitary::<f64>(&mut SplitMix64::new(4), 4);
        let conj = |d: &[f64]| {
            let mut m = u.clone();
            m.scale_cols(d);
            HermitianMatrix::symmetrize(&m.matmul(&u.adjoint()))
        };
        let tuple = OperatorTuple::new(vec![conj(&[0.1, -0.5, 0.7, 0.2]), conj(&[0.3, 0.3, -0.9, 0.0])]).unwrap();
        let (v, energy) = ground_state(&tuple, &[-0.5, 0.3]).unwrap();
        assert!(energy < 1e-12);
        let overlap = inner(v.amplitudes(), &u.column(1)).norm();
        assert!((overlap - 1.0).abs() < 1e-10);
        let cert = amu_at(&tuple, &[-0.5, 0.3], 1e-3, 1e-3).unwrap();
        assert!(cert.amu_member && cert.expectation_close);
    }

    #[test]
    fn far_lambda_energy_dominates_basis_oracle() {
        let tuple = OperatorTuple::new(vec![
            HermitianMatrix::<f64>::from_real_diag(&[0.0, 1.0, 0.5]),
            HermitianMatrix::from_real_diag(&[0.0, 0.0, 1.0]),
        ])
        .unwrap();
        let lambda = [5.0, -4.0];
        let (_, energy) = ground_state(&tuple, &lambda).unwrap();
        // commuting diagonal: the minimum over basis states is exact
        let oracle = (0..3)
            .map(|i| {
                let s = VectorState::basis(3, i);
                LocalizationOperator::new(&tuple, &lambda).unwrap().energy(&s)
            })
            .fold(f64::INFINITY, f64::min);
        assert!((energy - oracle).abs() < 1e-10);
        // distance to the joint numerical range is at least dist to the box [0,1]²
        assert!(energy >= 4.0 * 4.0 + 4.0 * 4.0 - 1e-9);
    }

    #[test]
    fn variance_domination_and_translation() {
        let mut rng = SplitMix64::new(31);
        for _ in 0..20 {
            let dim = rng.range_inclusive(2, 12);
            let ops: Vec<HermitianMatrix<f64>> = (0..3).map(|_| random_hermitian(&mut rng, dim)).collect();
            let tuple = OperatorTuple::new(ops.clone()).unwrap();
            let lambda: Vec<f64> = (0..3).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let (v, energy) = ground_state(&tuple, &lambda).unwrap();
            let rep = measure(&tuple, &v).unwrap();
            assert!(rep.total_variance() <= energy + 1e-10);
            for op in tuple.ops() {
                let (a, b) = variance_paths(op, &v).unwrap();
                assert!((a - b).abs() < 1e-10);
            }
            let shifted =
                OperatorTuple::new(ops.iter().zip(&lambda).map(|(op, &l)| op.shift(-l)).collect()).unwrap();
            let (_, e0) = ground_state(&shifted, &[0.0; 3]).unwrap();
            assert!((e0 - energy).abs() < 1e-10);
            // both assemblies of Q agree
            let direct = LocalizationOperator::new(&tuple, &lambda).unwrap();
            let fast = Localizer::new(&tuple).operator(&lambda).unwrap();
            assert!(direct.q.as_matrix().sub(fast.q.as_matrix()).max_abs() < 1e-12);
        }
    }

    #[test]
    fn shift_pair_circle_points_have_small_energy() {
        let tuple = shift_pair(64);
        let loc = Localizer::new(&tuple);
        for t in 0..8 {
            let th = t as f64 * std::f64::consts::PI / 4.0;
            let (_, energy) = loc.ground_state(&[th.cos(), th.sin()]).unwrap();
            assert!(energy < 0.05, "θ = {th}: {energy}");
        }
        let cert = loc.amu_at(&[1.0, 0.0], 0.2, 0.2).unwrap();
        assert!(cert.certified());
    }

    #[test]
    fn lambda_dimension_checked() {
        let tuple = shift_pair(4);
        assert!(matches!(ground_state(&tuple, &[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn search_with_decomposition_never_worse() {
        let mut rng = SplitMix64::new(12);
        let base = [0.2, -0.4, 0.6, 0.0, 0.9, -0.9];
        let tuple = OperatorTuple::new(vec![
            HermitianMatrix::from_real_diag(&base).add(&random_hermitian(&mut rng, 6).scale(0.01)),
            HermitianMatrix::from_real_diag(&[0.5, 0.5, -0.5, -0.5, 0.0, 0.1]).add(&random_hermitian(&mut rng, 6).scale(0.01)),
        ])
        .unwrap();
        let dec = joint_diagonalize(&tuple, 30, 1e-12, 0.1).unwrap();
        let loc = Localizer::new(&tuple);
        for lambda in [[0.2, 0.5], [0.9, 0.0], [0.3, 0.3]] {
            let plain = loc.amu_at(&lambda, 0.05, 0.05).unwrap();
            let best = loc.amu_search(&lambda, 0.05, 0.05, Some(&dec)).unwrap();
            assert!(!better(&plain, &best, &lambda));
        }
    }
}
