use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{gram_schmidt, inner};
use crate::observables::{measure, AmuCertificate, MeasurementReport, OperatorTuple, VectorState};
use crate::scalar::{czero, Real, C};
use crate::tolerances::TOL;

/// Composite state `x = Σ_k √α_k v_k` aimed at a target `μ = Σ_k α_k ξ_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SuperpositionPlan<T: Real> {
    pub target: Vec<T>,
    pub weights: Vec<T>,
    /// Expectation vectors `ξ_k` of the (orthonormal) source states.
    pub points: Vec<Vec<T>>,
    pub states: Vec<VectorState<T>>,
    /// Whether the certificate states had to be orthonormalized first.
    pub orthogonalized: bool,
    /// `‖μ − Σ α_k ξ_k‖₂` at the optimal weights.
    pub hull_distance: T,
    pub composite: VectorState<T>,
    pub report: MeasurementReport<T>,
    /// `‖μ − exp(x)‖₂`.
    pub gap: T,
}

impl<T: Real> SuperpositionPlan<T> {
    /// `Σ_k α_k ξ_k`.
    pub fn mixture(&self) -> Vec<T> {
        let n = self.target.len();
        (0..n)
            .map(|j| self.weights.iter().zip(&self.points).map(|(&a, p)| a * p[j]).sum())
            .collect()
    }

    /// Bound on `|exp_j(x) − Σ_k α_k ξ_{k,j}|` from the cross terms:
    /// `((Σ_k √α_k)² − 1) · max_k sd_j(v_k)`.
    pub fn cross_term_bound(&self, sd: &[Vec<T>]) -> Vec<T> {
        let root_sum: T = self.weights.iter().map(|a| a.sqrt()).sum();
        let factor = (root_sum * root_sum - T::one()).max(T::zero());
        (0..self.target.len())
            .map(|j| factor * sd.iter().map(|s| s[j]).fold(T::zero(), T::max))
            .collect()
    }
}

/// Minimizes `‖μ − Σ_k α_k ξ_k‖₂` over the probability simplex by pairwise Frank–Wolfe
/// with exact line search, started from the vertex nearest `μ`. Returns the weights and
/// the attained distance.
pub fn simplex_least_squares<T: Real>(points: &[Vec<T>], target: &[T]) -> Result<(Vec<T>, T)> {
    if points.is_empty() {
        return Err(Error::NoCertificates);
    }
    for p in points {
        if p.len() != target.len() {
            return Err(Error::DimensionMismatch {
                expected: target.len(),
                found: p.len(),
            });
        }
    }
    let dot = |a: &[T], b: &[T]| a.iter().zip(b).map(|(&x, &y)| x * y).sum::<T>();
    let dist2 = |p: &[T]| p.iter().zip(target).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>();

    let k = points.len();
    let start = (0..k).fold(0, |best, i| if dist2(&points[i]) < dist2(&points[best]) { i } else { best });
    let mut alpha = vec![T::zero(); k];
    alpha[start] = T::one();
    let scale = points.iter().flatten().chain(target).fold(T::one(), |m, x| m.max(x.abs()));
    let stop = T::epsilon() * T::epsilon() * scale * scale;

    let mixture = |alpha: &[T]| -> Vec<T> {
        (0..target.len())
            .map(|j| alpha.iter().zip(points).map(|(&a, p)| a * p[j]).sum())
            .collect()
    };
    for _ in 0..100_000 {
        let y = mixture(&alpha);
        let r: Vec<T> = y.iter().zip(target).map(|(&a, &b)| a - b).collect();
        let g: Vec<T> = points.iter().map(|p| dot(p, &r)).collect();
        let s = (0..k).fold(0, |b, i| if g[i] < g[b] { i } else { b });
        let Some(a) = (0..k).filter(|&i| alpha[i] > T::zero()).reduce(|b, i| if g[i] > g[b] { i } else { b }) else {
            break;
        };
        if g[a] - g[s] <= stop || a == s {
            break;
        }
        let d: Vec<T> = points[s].iter().zip(&points[a]).map(|(&x, &y)| x - y).collect();
        let dd = dot(&d, &d);
        if dd <= T::zero() {
            break;
        }
        let gamma = (-dot(&r, &d) / dd).min(alpha[a]);
        if !(gamma > T::zero()) {
            break;
        }
        alpha[s] = alpha[s] + gamma;
        alpha[a] = if gamma == alpha[a] { T::zero() } else { alpha[a] - gamma };
    }
    let distance = dist2(&mixture(&alpha)).sqrt();
    Ok((alpha, distance))
}

/// Builds the superposition of certificate states whose expectation mixture is nearest
/// `mu`.
///
/// States that are not pairwise orthogonal to within the tolerance are orthonormalized
/// in order; expectations `ξ_k` are always re-measured against `tuple`. Targets farther
/// than the hull tolerance from the convex hull of the `ξ_k` are rejected.
pub fn superpose<T: Real>(
    tuple: &OperatorTuple<T>,
    certs: &[AmuCertificate<T>],
    mu: &[T],
) -> Result<SuperpositionPlan<T>> {
    if certs.is_empty() {
        return Err(Error::NoCertificates);
    }
    if mu.len() != tuple.n() {
        return Err(Error::DimensionMismatch {
            expected: tuple.n(),
            found: mu.len(),
        });
    }
    for c in certs {
        if c.state.dim() != tuple.dim() {
            return Err(Error::DimensionMismatch {
                expected: tuple.dim(),
                found: c.state.dim(),
            });
        }
    }

    let raw: Vec<Vec<C<T>>> = certs.iter().map(|c| c.state.amplitudes().to_vec()).collect();
    let orth_tol = T::tol(TOL.superpose_orth);
    let overlapping = (0..raw.len()).any(|i| (i + 1..raw.len()).any(|j| inner(&raw[i], &raw[j]).norm() > orth_tol));
    let states: Vec<VectorState<T>> = if overlapping {
        gram_schmidt(&raw)?
            .into_iter()
            .map(VectorState::from_unnormalized)
            .collect::<Result<_>>()?
    } else {
        certs.iter().map(|c| c.state.clone()).collect()
    };
    let points: Vec<Vec<T>> = states
        .iter()
        .map(|s| measure(tuple, s).map(|r| r.exp))
        .collect::<Result<_>>()?;

    let (weights, hull_distance) = simplex_least_squares(&points, mu)?;
    if hull_distance > T::tol(TOL.hull) {
        return Err(Error::OutsideHull {
            distance: hull_distance.as_f64(),
        });
    }

    let mut x = vec![czero(); tuple.dim()];
    for (s, &a) in states.iter().zip(&weights) {
        let w = a.sqrt();
        for (xi, &vi) in x.iter_mut().zip(s.amplitudes()) {
            *xi = *xi + vi.scale(w);
        }
    }
    let composite = VectorState::from_unnormalized(x)?;
    let report = measure(tuple, &composite)?;
    let gap = report
        .exp
        .iter()
        .zip(mu)
        .map(|(&e, &m)| (e - m) * (e - m))
        .sum::<T>()
        .sqrt();

    Ok(SuperpositionPlan {
        target: mu.to_vec(),
        weights,
        points,
        states,
        orthogonalized: overlapping,
        hull_distance,
        composite,
        report,
        gap,
    })
}
