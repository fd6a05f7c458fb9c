use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::{cone, czero, Real, C};
use crate::tolerances::TOL;

/// Dense complex matrix, row-major.
///
/// Most matrices in this crate are square; rectangular shapes appear only as
/// intermediate blocks (compressed Θ products, column selections).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![czero(); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = cone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        let m = Self { rows, cols, data };
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C::new(d, T::zero());
        }
        m
    }

    pub fn check_finite(&self) -> Result<()> {
        for (idx, z) in self.data.iter().enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite {
                    row: idx / self.cols.max(1),
                    col: idx % self.cols.max(1),
                });
            }
        }
        Ok(())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Side length of a square matrix.
    #[inline]
    pub fn dim(&self) -> usize {
        debug_assert_eq!(self.rows, self.cols);
        self.rows
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn from_columns(columns: &[Vec<C<T>>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols, |i, j| columns[j][i])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        let n = rhs.cols;
        for i in 0..self.rows {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o = *o + a * b;
                }
            }
        }
        out
    }

    /// `self† · rhs` without materializing the adjoint.
    pub fn adjoint_matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows, "adjoint_matmul shape mismatch");
        let mut out = Self::zeros(self.cols, rhs.cols);
        let n = rhs.cols;
        for k in 0..self.rows {
            let rhs_row = rhs.row(k);
            for (i, a) in self.row(k).iter().enumerate() {
                let a = a.conj();
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let out_row = &mut out.data[i * n..(i + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o = *o + a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.cols, v.len(), "mul_vec shape mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(czero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(C::new(s, T::zero()))
    }

    /// Adds `s` to every diagonal entry.
    pub fn shift_diag(&self, s: T) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows.min(self.cols) {
            out[(i, i)].re = out[(i, i)].re + s;
        }
        out
    }

    /// Extracts the block with rows `r0..r1` and columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Selects the given rows and columns, in order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// `max_{ij} |A_ij − conj(A_ji)|`; meaningless for rectangular input.
    pub fn max_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Frobenius norm of the strictly off-diagonal part.
    pub fn off_diagonal_norm(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    acc = acc + self[(i, j)].norm_sqr();
                }
            }
        }
        acc.sqrt()
    }

    /// Cheap upper bound on the spectral norm: `min(‖A‖_F, √(‖A‖₁‖A‖_∞))`.
    pub fn norm_upper_bound(&self) -> T {
        let (one, inf) = self.one_inf_norms();
        self.frobenius_norm().min((one * inf).sqrt())
    }

    /// Largest column 2-norm, a lower bound on the spectral norm.
    pub fn norm_lower_bound(&self) -> T {
        let mut cols = vec![T::zero(); self.cols];
        for i in 0..self.rows {
            for (c, z) in cols.iter_mut().zip(self.row(i)) {
                *c = *c + z.norm_sqr();
            }
        }
        cols.into_iter().fold(T::zero(), T::max).sqrt()
    }

    fn one_inf_norms(&self) -> (T, T) {
        let mut col_sums = vec![T::zero(); self.cols];
        let mut inf = T::zero();
        for i in 0..self.rows {
            let mut row_sum = T::zero();
            for (c, z) in col_sums.iter_mut().zip(self.row(i)) {
                let a = z.norm();
                row_sum = row_sum + a;
                *c = *c + a;
            }
            inf = inf.max(row_sum);
        }
        (col_sums.into_iter().fold(T::zero(), T::max), inf)
    }

    /// Scales row `i` by `d[i]` (left multiplication by a real diagonal).
    pub fn scale_rows(&mut self, d: &[T]) {
        assert_eq!(d.len(), self.rows);
        for (i, &s) in d.iter().enumerate() {
            for z in &mut self.data[i * self.cols..(i + 1) * self.cols] {
                *z = z.scale(s);
            }
        }
    }

    /// Scales column `j` by `d[j]` (right multiplication by a real diagonal).
    pub fn scale_cols(&mut self, d: &[T]) {
        assert_eq!(d.len(), self.cols);
        for i in 0..self.rows {
            for (z, &s) in self.data[i * self.cols..(i + 1) * self.cols].iter_mut().zip(d) {
                *z = z.scale(s);
            }
        }
    }

    /// Entry-wise cast into another scalar type.
    pub fn cast<U: Real>(&self) -> ComplexMatrix<U> {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| C::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64())))
                .collect(),
        }
    }
}

impl<T: Real> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = C<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// A Hermitian matrix, stored symmetrized so that `A = A†` holds entry-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix<T: Real> {
    inner: ComplexMatrix<T>,
}

impl<T: Real> HermitianMatrix<T> {
    /// Accepts `a` if it is square, finite and Hermitian to within the construction
    /// tolerance, then stores `(A + A†)/2`.
    pub fn new(a: ComplexMatrix<T>) -> Result<Self> {
        Self::with_tolerance(a, T::tol(TOL.hermitian))
    }

    pub fn with_tolerance(a: ComplexMatrix<T>, tol: T) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        a.check_finite()?;
        let asym = a.max_asymmetry();
        if asym > tol {
            return Err(Error::NotHermitian {
                max_asymmetry: asym.as_f64(),
            });
        }
        Ok(Self::symmetrize(&a))
    }

    /// `(A + A†)/2` with no tolerance check.
    pub fn symmetrize(a: &ComplexMatrix<T>) -> Self {
        let half = T::lit(0.5);
        let n = a.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = C::new(a[(i, i)].re, T::zero());
            for j in i + 1..n {
                let z = (a[(i, j)] + a[(j, i)].conj()).scale(half);
                out[(i, j)] = z;
                out[(j, i)] = z.conj();
            }
        }
        Self { inner: out }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            inner: ComplexMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: ComplexMatrix::identity(dim),
        }
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        Self {
            inner: ComplexMatrix::from_real_diag(diag),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    #[inline]
    pub fn as_matrix(&self) -> &ComplexMatrix<T> {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.inner
    }

    /// `A + sI`.
    pub fn shift(&self, s: T) -> Self {
        Self {
            inner: self.inner.shift_diag(s),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            inner: self.inner.scale_real(s),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            inner: self.inner.add(&rhs.inner),
        }
    }

    /// `A²`, symmetrized.
    pub fn square(&self) -> Self {
        Self::symmetrize(&self.inner.matmul(&self.inner))
    }

    /// Principal submatrix on the index range `start..end`.
    pub fn compress(&self, start: usize, end: usize) -> Self {
        Self {
            inner: self.inner.block(start, end, start, end),
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.inner[(i, i)].re).collect()
    }

    pub fn cast<U: Real>(&self) -> HermitianMatrix<U> {
        HermitianMatrix::symmetrize(&self.inner.cast())
    }
}

impl<T: Real> Index<(usize, usize)> for HermitianMatrix<T> {
    type Output = C<T>;

    #[inline]
    fn index(&self, idx: (usize, usize)) -> &C<T> {
        &self.inner[idx]
    }
}

impl<T: Real> AsRef<ComplexMatrix<T>> for HermitianMatrix<T> {
    fn as_ref(&self) -> &ComplexMatrix<T> {
        &self.inner
    }
}
