//! Numerical tolerances used across the crate, in one place.

/// Tolerance record. Values are absolute unless the field says otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max-entry asymmetry accepted when constructing a Hermitian matrix.
    pub hermitian: f64,
    /// Eigen-residual factor: `‖AU − UΛ‖_F ≤ eig · dim · ‖A‖`.
    pub eig: f64,
    /// Relative accuracy of the operator norm.
    pub norm_rel: f64,
    /// Smallest Gram eigenvalue accepted as linear independence.
    pub independence: f64,
    /// Pairwise inner products after orthonormalization.
    pub orthonormal: f64,
    /// Unit-norm slack for vector states.
    pub unit: f64,
    /// Imaginary part allowed in `⟨Tv, v⟩`.
    pub imag: f64,
    /// Slack on the `‖Θ‖ ≥ 1 − η` acceptance test.
    pub scan_slack: f64,
    /// Slack on operator-norm bounds of a tuple.
    pub bound_slack: f64,
    /// Pairwise overlap below which states count as orthogonal in superpositions.
    pub superpose_orth: f64,
    /// Distance below which a target counts as inside a convex hull.
    pub hull: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-12,
        eig: 1e-10,
        norm_rel: 1e-9,
        independence: 1e-8,
        orthonormal: 1e-10,
        unit: 1e-12,
        imag: 1e-10,
        scan_slack: 1e-9,
        bound_slack: 1e-9,
        superpose_orth: 1e-6,
        hull: 1e-6,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Crate-wide defaults.
pub const TOL: Tolerances = Tolerances::DEFAULT;

/// Default cap on the number of synthetic-spectrum grid points.
pub const DEFAULT_GRID_CAP: u64 = 2_000_000;
