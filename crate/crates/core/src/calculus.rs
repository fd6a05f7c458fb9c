//! Trapezoidal bumps, Hermitian functional calculus and the ordered product
//! `Θ_{ξ,η}(a₁,…,aₙ) = θ_{ξ₁,η}(a₁) θ_{ξ₂,η}(a₂) ⋯ θ_{ξₙ,η}(aₙ)`.
//!
//! Two routes compute `‖Θ‖`. The direct route multiplies the `dim × dim` factors. The
//! spectral route uses `θ(a_j) = U_j W_j U_j†` with `W_j` diagonal, so
//!
//! ```text
//! ‖Θ‖ = ‖W₁ (U₁†U₂) W₂ (U₂†U₃) ⋯ Wₙ‖
//! ```
//!
//! and only the rows/columns where some `W_j` is nonzero take part. The scan uses the
//! spectral route; tests check the two agree.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, inner, operator_norm, ComplexMatrix, EigenDecomposition, HermitianMatrix};
use crate::observables::{OperatorTuple, VectorState};
use crate::scalar::Real;

/// `θ_{λ,η}`: 1 on `|t − λ| ≤ 3η/4`, 0 on `|t − λ| ≥ η`, linear in between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump<T: Real> {
    pub center: T,
    pub width: T,
}

impl<T: Real> Bump<T> {
    pub fn new(center: T, width: T) -> Result<Self> {
        if !(width > T::zero() && width <= T::one()) {
            return Err(Error::InvalidParameter(format!("bump width must lie in (0, 1], got {width}")));
        }
        Ok(Self { center, width })
    }

    #[inline]
    pub fn eval(&self, t: T) -> T {
        let d = (t - self.center).abs();
        let plateau = self.width * T::lit(0.75);
        if d <= plateau {
            T::one()
        } else if d >= self.width {
            T::zero()
        } else {
            (self.width - d) * T::lit(4.0) / self.width
        }
    }
}

/// `f(A) = U diag(f(λ_i)) U†`, symmetrized.
pub fn apply_function<T: Real>(f: impl Fn(T) -> T, a: &HermitianMatrix<T>) -> Result<HermitianMatrix<T>> {
    let e = eig_hermitian(a)?;
    Ok(HermitianMatrix::symmetrize(&e.reconstruct_with(f)))
}

/// The matrix `Θ_{ξ,η}(a₁,…,aₙ)` (generally not Hermitian).
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaProduct<T: Real> {
    pub centers: Vec<T>,
    pub eta: T,
    pub value: ComplexMatrix<T>,
}

impl<T: Real> ThetaProduct<T> {
    pub fn norm(&self) -> T {
        operator_norm(&self.value)
    }
}

type FactorKey = (usize, u64, u64);

/// Bump weights of one observable at one center: the eigen-indices where the weight is
/// nonzero, the weights there, and their maximum (= `‖θ(a_j)‖`).
#[derive(Debug, Clone, Default)]
pub struct AxisWeights<T: Real> {
    pub support: Vec<usize>,
    pub weights: Vec<T>,
    pub max: T,
}

/// Eigendecompositions of a tuple plus the cached factors `θ_{λ,η}(a_j)`.
///
/// The factor cache is guarded by a read-write lock; entries are deterministic functions
/// of their key, so concurrent fills give identical results regardless of interleaving.
#[derive(Debug)]
pub struct ThetaEngine<'a, T: Real> {
    tuple: &'a OperatorTuple<T>,
    spectra: Vec<EigenDecomposition<T>>,
    links: Vec<ComplexMatrix<T>>,
    cache: RwLock<HashMap<FactorKey, Arc<ComplexMatrix<T>>>>,
}

impl<'a, T: Real> ThetaEngine<'a, T> {
    pub fn new(tuple: &'a OperatorTuple<T>) -> Result<Self> {
        let spectra = tuple.ops().iter().map(eig_hermitian).collect::<Result<Vec<_>>>()?;
        let links = spectra
            .windows(2)
            .map(|w| w[0].eigenvectors.adjoint_matmul(&w[1].eigenvectors))
            .collect();
        Ok(Self {
            tuple,
            spectra,
            links,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn tuple(&self) -> &OperatorTuple<T> {
        self.tuple
    }

    pub fn spectrum(&self, j: usize) -> &EigenDecomposition<T> {
        &self.spectra[j]
    }

    pub fn cached_factors(&self) -> usize {
        self.cache.read().expect("factor cache poisoned").len()
    }

    /// `θ_{λ,η}(a_j)`, computed once per `(j, λ, η)`.
    pub fn factor(&self, j: usize, lambda: T, eta: T) -> Arc<ComplexMatrix<T>> {
        let key = (j, lambda.as_f64().to_bits(), eta.as_f64().to_bits());
        if let Some(f) = self.cache.read().expect("factor cache poisoned").get(&key) {
            return Arc::clone(f);
        }
        let bump = Bump { center: lambda, width: eta };
        let value = Arc::new(self.spectra[j].reconstruct_with(|t| bump.eval(t)));
        let mut cache = self.cache.write().expect("factor cache poisoned");
        Arc::clone(cache.entry(key).or_insert(value))
    }

    /// Direct route: the full ordered product, factors left to right by index.
    pub fn theta_product(&self, xi: &[T], eta: T) -> Result<ThetaProduct<T>> {
        self.check_point(xi)?;
        let mut value = (*self.factor(0, xi[0], eta)).clone();
        for (j, &x) in xi.iter().enumerate().skip(1) {
            value = value.matmul(&self.factor(j, x, eta));
        }
        Ok(ThetaProduct {
            centers: xi.to_vec(),
            eta,
            value,
        })
    }

    pub fn axis_weights(&self, j: usize, lambda: T, eta: T) -> AxisWeights<T> {
        let bump = Bump { center: lambda, width: eta };
        let mut out = AxisWeights {
            support: Vec::new(),
            weights: Vec::new(),
            max: T::zero(),
        };
        for (i, &ev) in self.spectra[j].eigenvalues.iter().enumerate() {
            let w = bump.eval(ev);
            if w > T::zero() {
                out.support.push(i);
                out.weights.push(w);
                out.max = out.max.max(w);
            }
        }
        out
    }

    /// Spectral route for `‖Θ_{ξ,η}‖`.
    pub fn theta_norm(&self, xi: &[T], eta: T) -> Result<T> {
        self.check_point(xi)?;
        let axes: Vec<AxisWeights<T>> = xi
            .iter()
            .enumerate()
            .map(|(j, &x)| self.axis_weights(j, x, eta))
            .collect();
        let refs: Vec<&AxisWeights<T>> = axes.iter().collect();
        Ok(self.norm_from_axes(&refs, T::neg_infinity()).unwrap_or_else(T::zero))
    }

    /// Spectral route with early rejection: returns `None` as soon as an upper bound on
    /// `‖Θ‖` falls below `threshold`, otherwise the norm itself.
    pub fn norm_from_axes(&self, axes: &[&AxisWeights<T>], threshold: T) -> Option<T> {
        debug_assert_eq!(axes.len(), self.tuple.n());
        let mut ceiling = T::infinity();
        for a in axes {
            if a.support.is_empty() {
                return (threshold <= T::zero()).then(T::zero);
            }
            ceiling = ceiling.min(a.max);
        }
        if ceiling < threshold {
            return None;
        }
        let mut chain = self.chain_start(axes[0]);
        for (j, pair) in axes.windows(2).enumerate() {
            chain = self.chain_extend(&chain, j, pair[0], pair[1]);
            if chain.norm_upper_bound() < threshold {
                return None;
            }
        }
        let norm = Self::chain_norm(&chain);
        (norm >= threshold).then_some(norm)
    }

    /// `W₁` restricted to its support.
    pub fn chain_start(&self, first: &AxisWeights<T>) -> ComplexMatrix<T> {
        ComplexMatrix::from_real_diag(&first.weights)
    }

    /// `chain · (U_j†U_{j+1})[S_j, S_{j+1}] · W_{j+1}`.
    pub fn chain_extend(
        &self,
        chain: &ComplexMatrix<T>,
        j: usize,
        prev: &AxisWeights<T>,
        next: &AxisWeights<T>,
    ) -> ComplexMatrix<T> {
        let mut link = self.links[j].select(&prev.support, &next.support);
        link.scale_cols(&next.weights);
        chain.matmul(&link)
    }

    /// Spectral norm of a finished chain. When the column-norm lower bound and the
    /// `min(‖·‖_F, √(‖·‖₁‖·‖_∞))` upper bound coincide to rounding (monomial chains, as
    /// for commuting diagonal tuples) the bound is the norm and no eigensolve is needed.
    pub fn chain_norm(chain: &ComplexMatrix<T>) -> T {
        let upper = chain.norm_upper_bound();
        let lower = chain.norm_lower_bound();
        if upper - lower <= T::lit(8.0) * T::epsilon() * upper {
            lower
        } else {
            operator_norm(chain)
        }
    }

    fn check_point(&self, xi: &[T]) -> Result<()> {
        if xi.len() != self.tuple.n() {
            return Err(Error::DimensionMismatch {
                expected: self.tuple.n(),
                found: xi.len(),
            });
        }
        Ok(())
    }
}

/// Builds `Θ_{ξ,η}` for a tuple directly.
pub fn theta_product<T: Real>(tuple: &OperatorTuple<T>, xi: &[T], eta: T) -> Result<ThetaProduct<T>> {
    if !(eta > T::zero() && eta < T::one()) {
        return Err(Error::InvalidParameter(format!("eta must lie in (0, 1), got {eta}")));
    }
    ThetaEngine::new(tuple)?.theta_product(xi, eta)
}

/// `Re⟨Θx, x⟩ > 1 − η`. A passing `x` certifies `‖Θ‖ ≥ 1 − η`.
pub fn witness_test<T: Real>(theta: &ThetaProduct<T>, x: &VectorState<T>, eta: T) -> Result<bool> {
    if theta.value.cols() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: theta.value.cols(),
            found: x.dim(),
        });
    }
    let tx = theta.value.mul_vec(x.amplitudes());
    Ok(inner(&tx, x.amplitudes()).re > T::one() - eta)
}
