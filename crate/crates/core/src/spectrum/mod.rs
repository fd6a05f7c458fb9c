//! η-synthetic spectra: the lattice scan of `‖Θ_{ξ,η}‖ ≥ 1 − η` and Hausdorff distances
//! between the resulting point sets.

mod grid;

pub use grid::{subdivision_for, GridSpec};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calculus::{AxisWeights, ThetaEngine};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::observables::OperatorTuple;
use crate::scalar::Real;
use crate::tolerances::{DEFAULT_GRID_CAP, TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    /// Replaces the default subdivision `k(η)`.
    pub k_override: Option<u64>,
    pub grid_cap: u64,
    /// Accept when `‖Θ‖ ≥ 1 − η − slack`.
    pub slack: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            k_override: None,
            grid_cap: DEFAULT_GRID_CAP,
            slack: TOL.scan_slack,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct AcceptedPoint<T: Real> {
    pub point: Vec<T>,
    pub norm: T,
}

/// Accepted lattice points with their `‖Θ‖`; the spectrum itself is the union of
/// closed `η`-balls around them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SyntheticSpectrumResult<T: Real> {
    pub eta: T,
    #[serde(rename = "M")]
    pub bound: T,
    pub n: usize,
    pub k: u64,
    pub slack: T,
    pub accepted: Vec<AcceptedPoint<T>>,
}

impl<T: Real> SyntheticSpectrumResult<T> {
    pub fn grid(&self) -> GridSpec<T> {
        GridSpec {
            n: self.n,
            bound: self.bound,
            k: self.k,
        }
    }

    /// Radius of the balls making up the spectrum.
    pub fn radius(&self) -> T {
        self.eta
    }

    pub fn points(&self) -> Vec<Vec<T>> {
        self.accepted.iter().map(|a| a.point.clone()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.accepted.is_empty()
    }

    /// Whether `z` lies in the union of closed `η`-balls.
    pub fn covers(&self, z: &[T]) -> bool {
        self.accepted.iter().any(|a| euclidean(&a.point, z) <= self.eta)
    }

    /// Whether this result's lattice is contained in `other`'s lattice.
    pub fn grid_nested_in(&self, other: &Self) -> bool {
        self.grid().is_subgrid_of(&other.grid())
    }
}

/// Scans `D^η` with default options.
pub fn scan<T: Real>(tuple: &OperatorTuple<T>, eta: T) -> Result<SyntheticSpectrumResult<T>> {
    scan_with(tuple, eta, &ScanOptions::default())
}

/// Evaluates `‖Θ_{ξ,η}‖` at every lattice point and keeps those with norm at least
/// `1 − η − slack`, in lexicographic order.
///
/// The lattice is walked depth-first by coordinate so the partial products over the
/// first coordinates are shared; a prefix whose norm bound is already below the
/// threshold prunes its whole subtree (the remaining factors are contractions).
/// Parallel work is split over the first coordinate and concatenated in order, so the
/// output does not depend on the thread count.
pub fn scan_with<T: Real>(tuple: &OperatorTuple<T>, eta: T, opts: &ScanOptions) -> Result<SyntheticSpectrumResult<T>> {
    let grid = match opts.k_override {
        Some(k) => {
            if !(eta > T::zero() && eta < T::one()) {
                return Err(Error::InvalidParameter(format!("eta must lie in (0, 1), got {eta}")));
            }
            GridSpec::with_k(tuple.n(), tuple.bound(), k)?
        }
        None => GridSpec::for_eta(tuple.n(), tuple.bound(), eta)?,
    };
    grid.check_cap(opts.grid_cap)?;

    let engine = ThetaEngine::new(tuple)?;
    let values = grid.axis_values();
    let tables: Vec<Vec<AxisWeights<T>>> = (0..tuple.n())
        .map(|j| values.iter().map(|&x| engine.axis_weights(j, x, eta)).collect())
        .collect();
    let slack = T::lit(opts.slack);
    let threshold = T::one() - eta - slack;

    let walker = Walker {
        engine: &engine,
        tables: &tables,
        values: &values,
        threshold,
    };
    let accepted: Vec<AcceptedPoint<T>> = (0..values.len())
        .into_par_iter()
        .flat_map_iter(|a0| {
            let mut out = Vec::new();
            walker.start(a0, &mut out);
            out
        })
        .collect();

    Ok(SyntheticSpectrumResult {
        eta,
        bound: grid.bound,
        n: grid.n,
        k: grid.k,
        slack,
        accepted,
    })
}

struct Walker<'e, 'a, T: Real> {
    engine: &'e ThetaEngine<'a, T>,
    tables: &'e [Vec<AxisWeights<T>>],
    values: &'e [T],
    threshold: T,
}

impl<T: Real> Walker<'_, '_, T> {
    fn start(&self, a0: usize, out: &mut Vec<AcceptedPoint<T>>) {
        let axis = &self.tables[0][a0];
        if axis.support.is_empty() || axis.max < self.threshold {
            return;
        }
        let chain = self.engine.chain_start(axis);
        let mut idx = vec![a0];
        self.descend(&chain, &mut idx, out);
    }

    fn descend(&self, chain: &ComplexMatrix<T>, idx: &mut Vec<usize>, out: &mut Vec<AcceptedPoint<T>>) {
        let depth = idx.len();
        if depth == self.tables.len() {
            let norm = ThetaEngine::chain_norm(chain);
            if norm >= self.threshold {
                out.push(AcceptedPoint {
                    point: idx.iter().map(|&a| self.values[a]).collect(),
                    norm,
                });
            }
            return;
        }
        let prev = &self.tables[depth - 1][idx[depth - 1]];
        for (a, next) in self.tables[depth].iter().enumerate() {
            if next.support.is_empty() || next.max < self.threshold {
                continue;
            }
            let extended = self.engine.chain_extend(chain, depth - 1, prev, next);
            if extended.norm_upper_bound() < self.threshold {
                continue;
            }
            idx.push(a);
            self.descend(&extended, idx, out);
            idx.pop();
        }
    }
}

fn euclidean<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>().sqrt()
}

/// `sup_{x∈X} min_{y∈Y} ‖x − y‖₂`.
pub fn directed_hausdorff<T: Real>(x: &[Vec<T>], y: &[Vec<T>]) -> Result<T> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(x.iter()
        .map(|p| y.iter().map(|q| euclidean(p, q)).fold(T::infinity(), T::min))
        .fold(T::zero(), T::max))
}

/// Hausdorff distance between two nonempty finite point sets.
pub fn hausdorff<T: Real>(x: &[Vec<T>], y: &[Vec<T>]) -> Result<T> {
    Ok(directed_hausdorff(x, y)?.max(directed_hausdorff(y, x)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::theta_product;
    use crate::linalg::HermitianMatrix;
    use crate::random::{random_hermitian, SplitMix64};

    fn pts(v: &[f64]) -> Vec<Vec<f64>> {
        v.iter().map(|&x| vec![x]).collect()
    }

    #[test]
    fn hausdorff_examples() {
        let x = vec![vec![0.0, 1.0], vec![2.0, -1.0]];
        assert_eq!(hausdorff(&x, &x).unwrap(), 0.0);
        assert_eq!(hausdorff(&pts(&[0.0]), &pts(&[1.0])).unwrap(), 1.0);
        assert_eq!(hausdorff(&pts(&[0.0, 1.0]), &pts(&[0.0])).unwrap(), 1.0);
        assert_eq!(directed_hausdorff(&pts(&[0.0]), &pts(&[0.0, 1.0])).unwrap(), 0.0);
        assert!(matches!(hausdorff::<f64>(&[], &pts(&[1.0])), Err(Error::EmptySet)));
    }

    #[test]
    fn zero_tuple_accepts_origin_neighbourhood() {
        let tuple = OperatorTuple::new(vec![HermitianMatrix::<f64>::zeros(3), HermitianMatrix::zeros(3)]).unwrap();
        let eta = 0.5;
        let r = scan(&tuple, eta).unwrap();
        assert!(r.accepted.iter().any(|a| a.point == vec![0.0, 0.0] && a.norm == 1.0));
        // exactly the points with every coordinate within 3η/4 of 0 have Θ = I
        for p in r.grid().points() {
            let inside = p.iter().all(|x| x.abs() <= 0.75 * eta);
            let acc = r.accepted.iter().any(|a| a.point == p);
            if inside {
                assert!(acc, "{p:?} should be accepted");
            }
        }
    }

    #[test]
    fn commuting_joint_eigenvalues_are_covered() {
        let tuple = OperatorTuple::new(vec![
            HermitianMatrix::from_real_diag(&[0.3, -0.8, 0.55, 0.0]),
            HermitianMatrix::from_real_diag(&[-0.2, 0.9, 0.55, 0.0]),
        ])
        .unwrap();
        let r = scan(&tuple, 0.35).unwrap();
        for z in [[0.3, -0.2], [-0.8, 0.9], [0.55, 0.55], [0.0, 0.0]] {
            assert!(r.covers(&z), "{z:?}");
        }
    }

    #[test]
    fn scan_matches_brute_force_direct_products() {
        let mut rng = SplitMix64::new(91);
        let tuple = OperatorTuple::new(vec![
            random_hermitian::<f64>(&mut rng, 5).scale(0.45),
            random_hermitian::<f64>(&mut rng, 5).scale(0.45),
        ])
        .unwrap();
        let eta = 0.6;
        let r = scan(&tuple, eta).unwrap();
        let mut brute = Vec::new();
        for p in r.grid().points() {
            let nrm = theta_product(&tuple, &p, eta).unwrap().norm();
            if nrm >= 1.0 - eta - 1e-9 {
                brute.push((p, nrm));
            }
        }
        assert_eq!(brute.len(), r.accepted.len());
        for ((p, nrm), a) in brute.iter().zip(&r.accepted) {
            assert_eq!(p, &a.point);
            assert!((nrm - a.norm).abs() < 1e-9);
        }
    }

    #[test]
    fn json_shape() {
        let tuple = OperatorTuple::new(vec![HermitianMatrix::<f64>::zeros(2)]).unwrap();
        let r = scan_with(&tuple, 0.5, &ScanOptions { k_override: Some(2), ..Default::default() }).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in ["eta", "M", "n", "k", "accepted", "slack"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["accepted"][0]["point"], serde_json::json!([0.0]));
        let back: SyntheticSpectrumResult<f64> = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn grid_cap_propagates() {
        let tuple = OperatorTuple::new(vec![HermitianMatrix::<f64>::zeros(2); 3]).unwrap();
        let opts = ScanOptions { grid_cap: 1000, ..Default::default() };
        assert!(matches!(scan_with(&tuple, 0.5, &opts), Err(Error::GridTooLarge { .. })));
    }
}
