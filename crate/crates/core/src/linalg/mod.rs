//! Dense complex linear algebra: matrices, the Hermitian eigensolver, norms and
//! orthonormalization.

mod eigen;
mod matrix;

pub use eigen::{eig_hermitian, eigenvalues_hermitian, lowest_eigenpair, EigenDecomposition};
pub use matrix::{ComplexMatrix, HermitianMatrix};

use crate::error::{Error, Result};
use crate::scalar::{czero, Real, C};
use crate::tolerances::TOL;

/// `⟨x, y⟩ = Σ x_i · conj(y_i)`, linear in the first argument.
pub fn inner<T: Real>(x: &[C<T>], y: &[C<T>]) -> C<T> {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).fold(czero(), |acc, (&a, b)| acc + a * b.conj())
}

pub fn norm<T: Real>(x: &[C<T>]) -> T {
    x.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Returns `x / ‖x‖`, or `None` for the zero vector.
pub fn normalized<T: Real>(x: &[C<T>]) -> Option<Vec<C<T>>> {
    let n = norm(x);
    (n > T::zero()).then(|| x.iter().map(|z| z.unscale(n)).collect())
}

/// Largest singular value, the square root of the top eigenvalue of `A†A` (or `AA†`,
/// whichever is smaller).
pub fn try_operator_norm<T: Real>(a: &ComplexMatrix<T>) -> Result<T> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(T::zero());
    }
    let gram = if a.rows() >= a.cols() {
        a.adjoint_matmul(a)
    } else {
        a.matmul(&a.adjoint())
    };
    let top = eigenvalues_hermitian(&HermitianMatrix::symmetrize(&gram))?
        .last()
        .copied()
        .unwrap_or_else(T::zero);
    Ok(top.max(T::zero()).sqrt())
}

/// Spectral norm. The QL iteration cap is never reached for finite input, so failure
/// here is treated as a bug.
pub fn operator_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    try_operator_norm(a).expect("operator norm: eigensolver failed on finite input")
}

/// `max |λ|` over the eigenvalues; equals [`operator_norm`] for Hermitian input.
pub fn hermitian_norm<T: Real>(a: &HermitianMatrix<T>) -> Result<T> {
    let ev = eigenvalues_hermitian(a)?;
    Ok(ev.first().unwrap().abs().max(ev.last().unwrap().abs()))
}

fn gram_matrix<T: Real>(vectors: &[Vec<C<T>>]) -> HermitianMatrix<T> {
    let units: Vec<Vec<C<T>>> = vectors
        .iter()
        .map(|v| normalized(v).unwrap_or_else(|| v.clone()))
        .collect();
    let k = units.len();
    let g = ComplexMatrix::from_fn(k, k, |i, j| inner(&units[j], &units[i]));
    HermitianMatrix::symmetrize(&g)
}

/// Orthonormalizes `vectors` in order (modified Gram–Schmidt, applied twice).
///
/// Independence is checked on the Gram matrix of the normalized inputs: the first index
/// at which the leading Gram block's smallest eigenvalue drops below the independence
/// tolerance is reported.
pub fn gram_schmidt<T: Real>(vectors: &[Vec<C<T>>]) -> Result<Vec<Vec<C<T>>>> {
    let Some(first) = vectors.first() else {
        return Ok(Vec::new());
    };
    let dim = first.len();
    for v in vectors {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
    }

    let tol = T::tol(TOL.independence);
    let gram = gram_matrix(vectors);
    let min_eig = eigenvalues_hermitian(&gram)?[0];
    if min_eig < tol {
        for k in 1..=vectors.len() {
            let lead = gram.compress(0, k);
            let m = eigenvalues_hermitian(&lead)?[0];
            if m < tol {
                return Err(Error::LinearlyDependent {
                    index: k - 1,
                    min_eigenvalue: m.as_f64(),
                });
            }
        }
    }

    let mut out: Vec<Vec<C<T>>> = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = inner(&w, q);
                for (wi, &qi) in w.iter_mut().zip(q) {
                    *wi = *wi - qi * c;
                }
            }
        }
        match normalized(&w) {
            Some(u) => out.push(u),
            None => {
                return Err(Error::LinearlyDependent {
                    index,
                    min_eigenvalue: 0.0,
                })
            }
        }
    }
    Ok(out)
}
