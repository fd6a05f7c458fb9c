//! Observable tuples, vector states and the measurement functionals
//! `exp_T(v) = ⟨Tv, v⟩`, `var_T(v) = ‖(T − exp_T(v))v‖²`, `sd_T(v) = √var_T(v)`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_norm, inner, norm, operator_norm, HermitianMatrix};
use crate::scalar::{Real, C};
use crate::tolerances::TOL;

/// `n` Hermitian observables of a common dimension, each with norm at most `bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorTuple<T: Real> {
    ops: Vec<HermitianMatrix<T>>,
    bound: T,
}

impl<T: Real> OperatorTuple<T> {
    /// Tuple with bound `M = max(1, max_j ‖T_j‖)`.
    pub fn new(ops: Vec<HermitianMatrix<T>>) -> Result<Self> {
        Self::check_shapes(&ops)?;
        let mut bound = T::one();
        for op in &ops {
            bound = bound.max(hermitian_norm(op)?);
        }
        Ok(Self { ops, bound })
    }

    /// Tuple with an explicit bound, checked against every observable's norm.
    pub fn with_bound(ops: Vec<HermitianMatrix<T>>, bound: T) -> Result<Self> {
        Self::check_shapes(&ops)?;
        if !(bound > T::zero() && bound.is_finite()) {
            return Err(Error::InvalidParameter(format!("norm bound must be positive, got {bound}")));
        }
        let slack = T::tol(TOL.bound_slack);
        for (index, op) in ops.iter().enumerate() {
            let norm = hermitian_norm(op)?;
            if norm > bound + slack {
                return Err(Error::BoundExceeded {
                    index,
                    norm: norm.as_f64(),
                    bound: bound.as_f64(),
                });
            }
        }
        Ok(Self { ops, bound })
    }

    fn check_shapes(ops: &[HermitianMatrix<T>]) -> Result<()> {
        let first = ops.first().ok_or(Error::EmptyTuple)?;
        for op in ops {
            if op.dim() != first.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    found: op.dim(),
                });
            }
        }
        Ok(())
    }

    /// Number of observables.
    #[inline]
    pub fn n(&self) -> usize {
        self.ops.len()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    #[inline]
    pub fn bound(&self) -> T {
        self.bound
    }

    #[inline]
    pub fn ops(&self) -> &[HermitianMatrix<T>] {
        &self.ops
    }

    #[inline]
    pub fn op(&self, j: usize) -> &HermitianMatrix<T> {
        &self.ops[j]
    }

    pub fn into_ops(self) -> Vec<HermitianMatrix<T>> {
        self.ops
    }

    /// Principal compression of every observable to the index range `start..end`,
    /// keeping this tuple's bound (compressions never increase norms).
    pub fn compress(&self, start: usize, end: usize) -> Self {
        Self {
            ops: self.ops.iter().map(|op| op.compress(start, end)).collect(),
            bound: self.bound,
        }
    }

    pub fn cast<U: Real>(&self) -> OperatorTuple<U> {
        OperatorTuple {
            ops: self.ops.iter().map(HermitianMatrix::cast).collect(),
            bound: U::lit(self.bound.as_f64()),
        }
    }
}

/// A unit vector `v`, `‖v‖ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorState<T: Real> {
    amplitudes: Vec<C<T>>,
}

impl<T: Real> VectorState<T> {
    /// Accepts `v` only if it is already normalized.
    pub fn new(amplitudes: Vec<C<T>>) -> Result<Self> {
        let n = norm(&amplitudes);
        if amplitudes.is_empty() || (n - T::one()).abs() > T::tol(TOL.unit) {
            return Err(Error::NotNormalized { norm: n.as_f64() });
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes `v`; fails on the zero vector.
    pub fn from_unnormalized(amplitudes: Vec<C<T>>) -> Result<Self> {
        let n = norm(&amplitudes);
        if !(n > T::zero() && n.is_finite()) {
            return Err(Error::NotNormalized { norm: n.as_f64() });
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z.unscale(n)).collect(),
        })
    }

    /// Standard basis vector `e_i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut amplitudes = vec![C::new(T::zero(), T::zero()); dim];
        amplitudes[i] = C::new(T::one(), T::zero());
        Self { amplitudes }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C<T>> {
        self.amplitudes
    }

    /// Interleaved `[re₀, im₀, re₁, im₁, …]`.
    pub fn to_interleaved(&self) -> Vec<T> {
        self.amplitudes.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    pub fn from_interleaved(values: &[T]) -> Result<Self> {
        if values.len() % 2 != 0 {
            return Err(Error::InvalidParameter("interleaved state has odd length".into()));
        }
        Self::new(values.chunks_exact(2).map(|p| C::new(p[0], p[1])).collect())
    }
}

impl<T: Real> Serialize for VectorState<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_interleaved().serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for VectorState<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<T>::deserialize(d)?;
        Self::from_interleaved(&values).map_err(D::Error::custom)
    }
}

/// Per-observable expectation, variance and standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MeasurementReport<T: Real> {
    pub exp: Vec<T>,
    pub var: Vec<T>,
    pub sd: Vec<T>,
}

impl<T: Real> MeasurementReport<T> {
    pub fn max_sd(&self) -> T {
        self.sd.iter().copied().fold(T::zero(), T::max)
    }

    /// `max_j |exp_j − λ_j|`.
    pub fn max_deviation(&self, lambda: &[T]) -> T {
        self.exp
            .iter()
            .zip(lambda)
            .map(|(&e, &l)| (e - l).abs())
            .fold(T::zero(), T::max)
    }

    pub fn total_variance(&self) -> T {
        self.var.iter().copied().sum()
    }
}

/// Witness for membership of a state in `AMU({T_j}; σ)` near a target point `λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct AmuCertificate<T: Real> {
    pub lambda: Vec<T>,
    pub state: VectorState<T>,
    pub report: MeasurementReport<T>,
    pub sigma: T,
    pub eps: T,
    /// `max_j sd_j < σ`.
    pub amu_member: bool,
    /// `max_j |exp_j − λ_j| < ε`.
    pub expectation_close: bool,
}

impl<T: Real> AmuCertificate<T> {
    pub fn certified(&self) -> bool {
        self.amu_member && self.expectation_close
    }
}

fn check_dim<T: Real>(t: &HermitianMatrix<T>, s: &VectorState<T>) -> Result<()> {
    if t.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            found: s.dim(),
        });
    }
    Ok(())
}

/// `Re⟨Tv, v⟩`.
pub fn expectation<T: Real>(t: &HermitianMatrix<T>, s: &VectorState<T>) -> Result<T> {
    check_dim(t, s)?;
    let tv = t.as_matrix().mul_vec(s.amplitudes());
    let q = inner(&tv, s.amplitudes());
    debug_assert!(
        q.im.abs() <= T::tol(TOL.imag) * T::one().max(q.re.abs()),
        "⟨Tv, v⟩ has imaginary part {}",
        q.im
    );
    Ok(q.re)
}

/// Variance by two routes: `‖(T − e)v‖²` and the quadratic form `⟨(T − e)²v, v⟩`.
pub fn variance_paths<T: Real>(t: &HermitianMatrix<T>, s: &VectorState<T>) -> Result<(T, T)> {
    let e = expectation(t, s)?;
    let centered = t.shift(-e);
    let w = centered.as_matrix().mul_vec(s.amplitudes());
    let via_norm = w.iter().map(|z| z.norm_sqr()).sum::<T>();
    let ww = centered.as_matrix().mul_vec(&w);
    let via_form = inner(&ww, s.amplitudes()).re;
    Ok((via_norm, via_form))
}

/// `(var, sd)`; the variance is taken from the norm route and cross-checked against the
/// quadratic form.
pub fn variance_sd<T: Real>(t: &HermitianMatrix<T>, s: &VectorState<T>) -> Result<(T, T)> {
    let (via_norm, via_form) = variance_paths(t, s)?;
    let scale = T::one().max(via_norm.abs());
    debug_assert!(
        (via_norm - via_form).abs() <= T::tol(1e-10) * scale,
        "variance routes disagree: {via_norm} vs {via_form}"
    );
    let var = via_norm.max(T::zero());
    Ok((var, var.sqrt()))
}

pub fn measure<T: Real>(tuple: &OperatorTuple<T>, s: &VectorState<T>) -> Result<MeasurementReport<T>> {
    let mut report = MeasurementReport {
        exp: Vec::with_capacity(tuple.n()),
        var: Vec::with_capacity(tuple.n()),
        sd: Vec::with_capacity(tuple.n()),
    };
    for op in tuple.ops() {
        check_dim(op, s)?;
        let tv = op.as_matrix().mul_vec(s.amplitudes());
        let e = inner(&tv, s.amplitudes()).re;
        let var = tv
            .iter()
            .zip(s.amplitudes())
            .map(|(&a, &b)| (a - b.scale(e)).norm_sqr())
            .sum::<T>()
            .max(T::zero());
        report.exp.push(e);
        report.var.push(var);
        report.sd.push(var.sqrt());
    }
    Ok(report)
}

/// Measures `s` and sets the AMU flags with the strict inequalities `sd_j < σ` and
/// `|exp_j − λ_j| < ε`.
pub fn amu_check<T: Real>(
    tuple: &OperatorTuple<T>,
    s: &VectorState<T>,
    lambda: &[T],
    sigma: T,
    eps: T,
) -> Result<AmuCertificate<T>> {
    if lambda.len() != tuple.n() {
        return Err(Error::DimensionMismatch {
            expected: tuple.n(),
            found: lambda.len(),
        });
    }
    if !(sigma > T::zero() && eps > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "tolerances must be positive (sigma = {sigma}, eps = {eps})"
        )));
    }
    let report = measure(tuple, s)?;
    let amu_member = report.sd.iter().all(|&sd| sd < sigma);
    let expectation_close = report.exp.iter().zip(lambda).all(|(&e, &l)| (e - l).abs() < eps);
    Ok(AmuCertificate {
        lambda: lambda.to_vec(),
        state: s.clone(),
        report,
        sigma,
        eps,
        amu_member,
        expectation_close,
    })
}

/// Symmetric matrix of commutator norms `‖T_iT_j − T_jT_i‖`, zero on the diagonal.
pub fn commutator_profile<T: Real>(tuple: &OperatorTuple<T>) -> Vec<Vec<T>> {
    let n = tuple.n();
    let mut out = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = commutator_norm(tuple.op(i), tuple.op(j));
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}

/// `‖AB − BA‖`; for Hermitian `A`, `B` the commutator is `AB − (AB)†`.
pub fn commutator_norm<T: Real>(a: &HermitianMatrix<T>, b: &HermitianMatrix<T>) -> T {
    let ab = a.as_matrix().matmul(b.as_matrix());
    operator_norm(&ab.sub(&ab.adjoint()))
}
