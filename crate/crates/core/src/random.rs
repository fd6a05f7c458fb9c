//! Seeded pseudo-random generation.
//!
//! The generator is SplitMix64 (Steele, Lea & Flood): the state advances by the golden
//! gamma `0x9E3779B97F4A7C15` and each output is the state passed through the
//! `(30, 27, 31)` xor-shift/multiply finalizer. Uniform doubles use the top 53 bits;
//! normals use Box–Muller with both outputs consumed in order. Everything here is fixed
//! so that generated models are reproducible across platforms and languages.

use crate::linalg::{gram_schmidt, ComplexMatrix, HermitianMatrix};
use crate::scalar::{Real, C};

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
    spare_normal: Option<f64>,
}

impl SplitMix64 {
    pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

    pub fn new(seed: u64) -> Self {
        Self {
            state: seed,
            spare_normal: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(Self::GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn range_inclusive(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as usize
    }

    /// Standard normal via Box–Muller.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare_normal = Some(r * s);
        r * c
    }

    pub fn complex_normal<T: Real>(&mut self) -> C<T> {
        let re = self.normal();
        let im = self.normal();
        C::new(T::lit(re), T::lit(im))
    }
}

/// Hermitian matrix `(G + G†)/(2√dim)` with `G` complex Gaussian; spectrum roughly in `[−2, 2]`.
pub fn random_hermitian<T: Real>(rng: &mut SplitMix64, dim: usize) -> HermitianMatrix<T> {
    let s = T::one() / T::count(dim).sqrt();
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| rng.complex_normal::<T>().scale(s));
    HermitianMatrix::symmetrize(&g)
}

/// Gaussian vector normalized to unit length.
pub fn random_unit_vector<T: Real>(rng: &mut SplitMix64, dim: usize) -> Vec<C<T>> {
    let v: Vec<C<T>> = (0..dim).map(|_| rng.complex_normal()).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    v.into_iter().map(|z| z.unscale(n)).collect()
}

/// Unitary from orthonormalized Gaussian columns.
pub fn random_unitary<T: Real>(rng: &mut SplitMix64, dim: usize) -> ComplexMatrix<T> {
    loop {
        let cols: Vec<Vec<C<T>>> = (0..dim)
            .map(|_| (0..dim).map(|_| rng.complex_normal()).collect())
            .collect();
        if let Ok(q) = gram_schmidt(&cols) {
            return ComplexMatrix::from_columns(&q);
        }
    }
}
