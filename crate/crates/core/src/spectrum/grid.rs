use crate::error::{Error, Result};
use crate::scalar::Real;

/// The lattice `P_k^M = {(m₁/k, …, mₙ/k) : |m_j| ≤ Mk, m_j ∈ ℤ}`.
///
/// Points are enumerated lexicographically (first coordinate most significant), which is
/// also the order of every scan result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T: Real> {
    pub n: usize,
    pub bound: T,
    pub k: u64,
}

impl<T: Real> GridSpec<T> {
    pub fn with_k(n: usize, bound: T, k: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("grid dimension must be positive".into()));
        }
        if k == 0 {
            return Err(Error::InvalidParameter("grid subdivision k must be positive".into()));
        }
        if !(bound > T::zero() && bound.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid bound must be positive, got {bound}")));
        }
        Ok(Self { n, bound, k })
    }

    /// `D^η`: the lattice with `k` the least `l` such that `(M + 1)/l < η/(2√n)`.
    pub fn for_eta(n: usize, bound: T, eta: T) -> Result<Self> {
        if !(eta > T::zero() && eta < T::one()) {
            return Err(Error::InvalidParameter(format!("eta must lie in (0, 1), got {eta}")));
        }
        if !(bound >= T::one()) {
            return Err(Error::InvalidParameter(format!("grid bound must be at least 1, got {bound}")));
        }
        Self::with_k(n, bound, subdivision_for(n, bound, eta))
    }

    /// Largest `|m_j|`, i.e. `⌊Mk⌋`.
    pub fn half_width(&self) -> i64 {
        (self.bound * T::lit(self.k as f64)).floor().to_i64().expect("grid half-width fits in i64")
    }

    pub fn axis_len(&self) -> u64 {
        2 * self.half_width() as u64 + 1
    }

    /// `(2⌊Mk⌋ + 1)ⁿ`, saturating.
    pub fn point_count(&self) -> u64 {
        let axis = self.axis_len();
        (0..self.n).fold(1u64, |acc, _| acc.saturating_mul(axis))
    }

    pub fn pitch(&self) -> T {
        T::one() / T::lit(self.k as f64)
    }

    pub fn check_cap(&self, cap: u64) -> Result<()> {
        let points = self.point_count();
        if points > cap {
            return Err(Error::GridTooLarge { points, cap });
        }
        Ok(())
    }

    /// Coordinate value of axis position `a` (`0 ≤ a < axis_len`), i.e. `(a − ⌊Mk⌋)/k`.
    pub fn axis_value(&self, a: u64) -> T {
        let m = a as i64 - self.half_width();
        T::lit(m as f64) / T::lit(self.k as f64)
    }

    pub fn axis_values(&self) -> Vec<T> {
        (0..self.axis_len()).map(|a| self.axis_value(a)).collect()
    }

    /// The `index`-th point in lexicographic order.
    pub fn point(&self, index: u64) -> Vec<T> {
        let axis = self.axis_len();
        let mut digits = vec![0u64; self.n];
        let mut rest = index;
        for d in digits.iter_mut().rev() {
            *d = rest % axis;
            rest /= axis;
        }
        digits.into_iter().map(|a| self.axis_value(a)).collect()
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<T>> + '_ {
        (0..self.point_count()).map(move |i| self.point(i))
    }

    /// Whether `p` is exactly a lattice point.
    pub fn contains(&self, p: &[T]) -> bool {
        if p.len() != self.n {
            return false;
        }
        let h = self.half_width();
        p.iter().all(|&x| {
            let m = (x * T::lit(self.k as f64)).round();
            match m.to_i64() {
                Some(m) if m.abs() <= h => T::lit(m as f64) / T::lit(self.k as f64) == x,
                _ => false,
            }
        })
    }

    /// Exact lattice inclusion `self ⊆ other`: every `m/k` with `|m| ≤ ⌊Mk⌋` must equal some
    /// `m'/k'` with `|m'| ≤ ⌊Mk'⌋`.
    pub fn is_subgrid_of(&self, other: &Self) -> bool {
        if self.n != other.n {
            return false;
        }
        let (k, k2) = (self.k as i128, other.k as i128);
        let h2 = other.half_width() as i128;
        (-(self.half_width() as i128)..=self.half_width() as i128).all(|m| {
            let num = m * k2;
            num % k == 0 && (num / k).abs() <= h2
        })
    }
}

/// Least `l ∈ ℕ` with `(M + 1)/l < η/(2√n)`.
pub fn subdivision_for<T: Real>(n: usize, bound: T, eta: T) -> u64 {
    let target = eta / (T::lit(2.0) * T::count(n).sqrt());
    let holds = |l: u64| (bound + T::one()) / T::lit(l as f64) < target;
    let mut l = ((bound + T::one()) / target).ceil().to_u64().unwrap_or(1).max(1);
    while !holds(l) {
        l += 1;
    }
    while l > 1 && holds(l - 1) {
        l -= 1;
    }
    l
}
