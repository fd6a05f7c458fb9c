//! Hermitian eigensolver.
//!
//! The matrix is reduced to a complex Hermitian tridiagonal form with Householder
//! reflections, the off-diagonal phases are absorbed into a diagonal unitary so the
//! tridiagonal becomes real symmetric, and that is diagonalized with implicit-shift QL.
//! Eigenvectors are `Q · Φ · Z` where `Q` accumulates the reflections, `Φ` holds the
//! phases and `Z` is the real QL basis.

use crate::error::{Error, Result};
use crate::linalg::matrix::{ComplexMatrix, HermitianMatrix};
use crate::scalar::{cone, czero, Real, C};

/// Eigenvalues in ascending order with the matching unitary eigenvector matrix (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition<T: Real> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, i: usize) -> Vec<C<T>> {
        self.eigenvectors.column(i)
    }

    /// `U · diag(λ) · U†`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.reconstruct_with(|x| x)
    }

    /// `U · diag(f(λ)) · U†`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let fl: Vec<T> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut scaled = self.eigenvectors.clone();
        scaled.scale_cols(&fl);
        scaled.matmul(&self.eigenvectors.adjoint())
    }
}

struct Tridiagonal<T: Real> {
    diag: Vec<T>,
    /// `off[i]` couples `i` and `i + 1`; nonnegative after the phase change.
    off: Vec<T>,
    /// `Q · Φ`, present only when eigenvectors were requested.
    basis: Option<ComplexMatrix<T>>,
}

fn tridiagonalize<T: Real>(a: &HermitianMatrix<T>, want_basis: bool) -> Tridiagonal<T> {
    let n = a.dim();
    let mut w = a.as_matrix().clone();
    let mut q = want_basis.then(|| ComplexMatrix::identity(n));
    let two = T::lit(2.0);
    let half = T::lit(0.5);

    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let x: Vec<C<T>> = (0..len).map(|i| w[(k + 1 + i, k)]).collect();
        let tail: T = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == T::zero() {
            continue;
        }
        let xnorm = (x[0].norm_sqr() + tail).sqrt();
        let x0abs = x[0].norm();
        let phase = if x0abs == T::zero() { cone() } else { x[0].unscale(x0abs) };
        let alpha = -phase.scale(xnorm);

        let mut v = x;
        v[0] = v[0] - alpha;
        let vnorm2: T = v.iter().map(|z| z.norm_sqr()).sum();
        let tau = two / vnorm2;

        // p = τ A22 v
        let mut p = vec![czero::<T>(); len];
        for (i, pi) in p.iter_mut().enumerate() {
            let row = &w.row(k + 1 + i)[k + 1..];
            let mut acc = czero();
            for (&aij, &vj) in row.iter().zip(&v) {
                acc = acc + aij * vj;
            }
            *pi = acc.scale(tau);
        }
        let vp: C<T> = v.iter().zip(&p).fold(czero(), |acc, (vi, &pi)| acc + vi.conj() * pi);
        let kk = vp.re * tau * half;
        let wv: Vec<C<T>> = p.iter().zip(&v).map(|(&pi, &vi)| pi - vi.scale(kk)).collect();

        // A22 ← A22 − v w† − w v†
        for i in 0..len {
            let (vi, wi) = (v[i], wv[i]);
            for j in 0..len {
                let upd = vi * wv[j].conj() + wi * v[j].conj();
                let z = &mut w[(k + 1 + i, k + 1 + j)];
                *z = *z - upd;
            }
        }
        w[(k + 1, k)] = alpha;
        w[(k, k + 1)] = alpha.conj();
        for i in k + 2..n {
            w[(i, k)] = czero();
            w[(k, i)] = czero();
        }

        if let Some(q) = q.as_mut() {
            // Q ← Q H,  H = I − τ v v† on indices k+1..n
            for r in 0..n {
                let row = &q.row(r)[k + 1..];
                let mut s = czero();
                for (&qr, &vi) in row.iter().zip(&v) {
                    s = s + qr * vi;
                }
                let s = s.scale(tau);
                for (i, vi) in v.iter().enumerate() {
                    let z = &mut q[(r, k + 1 + i)];
                    *z = *z - s * vi.conj();
                }
            }
        }
    }

    let diag: Vec<T> = (0..n).map(|i| w[(i, i)].re).collect();
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    let mut phases = Vec::with_capacity(n);
    if n > 0 {
        phases.push(cone::<T>());
    }
    for k in 0..n.saturating_sub(1) {
        let e = w[(k + 1, k)];
        let m = e.norm();
        off.push(m);
        let next = if m == T::zero() { phases[k] } else { phases[k] * e.unscale(m) };
        phases.push(next);
    }
    let basis = q.map(|mut q| {
        for r in 0..n {
            for (c, ph) in phases.iter().enumerate() {
                q[(r, c)] = q[(r, c)] * *ph;
            }
        }
        q
    });
    Tridiagonal { diag, off, basis }
}

const QL_MAX_ITER: usize = 100;

/// Implicit-shift QL on a real symmetric tridiagonal matrix. When `zt` is given it
/// holds the eigenvector basis transposed (row `i` is eigenvector `i`) and is rotated
/// along. Eigenvalues are left unsorted.
fn tql<T: Real>(d: &mut [T], off: &[T], mut zt: Option<&mut Vec<T>>) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let mut e = vec![T::zero(); n];
    e[..n - 1].copy_from_slice(off);
    let eps = T::epsilon();
    let mut f = T::zero();
    let mut tst1 = T::zero();

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_MAX_ITER {
                    return Err(Error::NoConvergence {
                        iterations: iter,
                        residual: e[l].abs().as_f64(),
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (T::lit(2.0) * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    if let Some(z) = zt.as_deref_mut() {
                        let (lo, hi) = z.split_at_mut((i + 1) * n);
                        let row_i = &mut lo[i * n..];
                        let row_i1 = &mut hi[..n];
                        for (a, b) in row_i.iter_mut().zip(row_i1.iter_mut()) {
                            let hb = *b;
                            *b = s * *a + c * hb;
                            *a = c * *a - s * hb;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = T::zero();
    }
    Ok(())
}

fn ascending_order<T: Real>(values: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite eigenvalues"));
    idx
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eig_hermitian<T: Real>(a: &HermitianMatrix<T>) -> Result<EigenDecomposition<T>> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::InvalidParameter("eigendecomposition of an empty matrix".into()));
    }
    let tri = tridiagonalize(a, true);
    let mut d = tri.diag;
    let mut zt = vec![T::zero(); n * n];
    for i in 0..n {
        zt[i * n + i] = T::one();
    }
    tql(&mut d, &tri.off, Some(&mut zt))?;
    let order = ascending_order(&d);
    let basis = tri.basis.expect("basis requested");

    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let z = &zt[src * n..(src + 1) * n];
        for r in 0..n {
            let mut acc = czero();
            for (&b, &zk) in basis.row(r).iter().zip(z) {
                acc = acc + b.scale(zk);
            }
            vectors[(r, col)] = acc;
        }
    }
    Ok(EigenDecomposition {
        eigenvalues: order.iter().map(|&i| d[i]).collect(),
        eigenvectors: vectors,
    })
}

/// Eigenvalues only, ascending.
pub fn eigenvalues_hermitian<T: Real>(a: &HermitianMatrix<T>) -> Result<Vec<T>> {
    if a.dim() == 0 {
        return Err(Error::InvalidParameter("eigenvalues of an empty matrix".into()));
    }
    let tri = tridiagonalize(a, false);
    let mut d = tri.diag;
    tql(&mut d, &tri.off, None)?;
    d.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(d)
}

/// Lowest eigenvalue and a unit eigenvector for it.
///
/// Eigenvalues come from QL without vector accumulation; the vector comes from inverse
/// iteration on the real tridiagonal form, mapped back through the reflections. Within a
/// degenerate lowest eigenspace any unit vector of that space may be returned.
pub fn lowest_eigenpair<T: Real>(a: &HermitianMatrix<T>) -> Result<(T, Vec<C<T>>)> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::InvalidParameter("eigenpair of an empty matrix".into()));
    }
    let tri = tridiagonalize(a, true);
    let mut d = tri.diag.clone();
    tql(&mut d, &tri.off, None)?;
    let lambda = d.iter().copied().fold(T::infinity(), T::min);

    let scale = tri
        .diag
        .iter()
        .map(|x| x.abs())
        .chain(tri.off.iter().map(|x| x.abs()))
        .fold(T::one(), T::max);
    let z = inverse_iteration(&tri.diag, &tri.off, lambda, scale);

    let basis = tri.basis.expect("basis requested");
    let v: Vec<C<T>> = (0..n)
        .map(|r| {
            basis
                .row(r)
                .iter()
                .zip(&z)
                .fold(czero(), |acc, (&b, &zk)| acc + b.scale(zk))
        })
        .collect();
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt();
    Ok((lambda, v.into_iter().map(|x| x.unscale(norm)).collect()))
}

fn inverse_iteration<T: Real>(diag: &[T], off: &[T], lambda: T, scale: T) -> Vec<T> {
    let n = diag.len();
    if n == 1 {
        return vec![T::one()];
    }
    // deterministic, non-degenerate start
    let mut z: Vec<T> = (0..n)
        .map(|i| T::one() + T::lit(0.5) * (T::count(i) * T::lit(0.618_033_988_749_895)).fract())
        .collect();
    for _ in 0..4 {
        solve_shifted_tridiagonal(diag, off, lambda, scale, &mut z);
        let norm = z.iter().map(|x| *x * *x).sum::<T>().sqrt();
        if !(norm.is_finite() && norm > T::zero()) {
            break;
        }
        for x in &mut z {
            *x = *x / norm;
        }
    }
    z
}

/// Solves `(T − σI) x = rhs` in place by Gaussian elimination with partial pivoting;
/// zero pivots are replaced by `ε · scale`, as inverse iteration expects.
fn solve_shifted_tridiagonal<T: Real>(diag: &[T], off: &[T], shift: T, scale: T, rhs: &mut [T]) {
    let n = diag.len();
    let tiny = T::epsilon() * scale;
    let mut dd: Vec<T> = diag.iter().map(|&x| x - shift).collect();
    let mut du: Vec<T> = off.to_vec();
    let dl: Vec<T> = off.to_vec();
    let mut du2 = vec![T::zero(); n.saturating_sub(2)];

    for i in 0..n - 1 {
        if dd[i].abs() >= dl[i].abs() {
            if dd[i] == T::zero() {
                dd[i] = tiny;
            }
            let mult = dl[i] / dd[i];
            dd[i + 1] = dd[i + 1] - mult * du[i];
            rhs[i + 1] = rhs[i + 1] - mult * rhs[i];
        } else {
            let mult = dd[i] / dl[i];
            dd[i] = dl[i];
            let old_d1 = dd[i + 1];
            dd[i + 1] = du[i] - mult * old_d1;
            if i < n - 2 {
                du2[i] = du[i + 1];
                du[i + 1] = -mult * du2[i];
            }
            du[i] = old_d1;
            rhs.swap(i, i + 1);
            rhs[i + 1] = rhs[i + 1] - mult * rhs[i];
        }
    }
    if dd[n - 1] == T::zero() {
        dd[n - 1] = tiny;
    }
    rhs[n - 1] = rhs[n - 1] / dd[n - 1];
    rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / dd[n - 2];
    for i in (0..n.saturating_sub(2)).rev() {
        rhs[i] = (rhs[i] - du[i] * rhs[i + 1] - du2[i] * rhs[i + 2]) / dd[i];
    }
}
