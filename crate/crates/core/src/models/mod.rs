//! Seeded generators for the example operator families, and tuple persistence.

mod io;

pub use io::{
    load_tuple, load_tuple_file, read_tuple, save_tuple, save_tuple_file, spectrum_csv, write_spectrum_csv,
    write_tuple, Format, TupleFile,
};

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix};
use crate::observables::{commutator_profile, OperatorTuple};
use crate::random::{random_hermitian, random_unitary, SplitMix64};
use crate::scalar::C;
use crate::Tuple;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `A₁ = (S + S*)/2`, `A₂ = −(S − S*)/(2i)` for the truncated forward shift `S`.
    Shift,
    /// Random real diagonal observables.
    CommutingDiag,
    /// A commuting tuple in a random basis plus a Hermitian perturbation.
    PerturbedCommuting,
    /// `(Re U, Im U, (V + V†)/2)` for the clock `U` and cyclic shift `V`.
    Clock,
    /// Read from a tuple file.
    Custom,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Shift,
        Family::CommutingDiag,
        Family::PerturbedCommuting,
        Family::Clock,
        Family::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Shift => "shift",
            Family::CommutingDiag => "commuting-diag",
            Family::PerturbedCommuting => "perturbed-commuting",
            Family::Clock => "clock",
            Family::Custom => "custom",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        let family = match key.as_str() {
            "shift" | "shift-pair" => Family::Shift,
            "commuting-diag" | "diag" => Family::CommutingDiag,
            "perturbed-commuting" | "perturbed" => Family::PerturbedCommuting,
            "clock" | "clock-shift" | "clock-shift-triple" => Family::Clock,
            "custom" | "custom-file" => Family::Custom,
            _ => return Err(Error::UnknownFamily(s.to_string())),
        };
        Ok(family)
    }
}

/// Everything that determines a generated tuple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: Family,
    pub dim: usize,
    pub seed: u64,
    /// Number of observables for the random families.
    pub n: usize,
    /// Operator norm of the perturbation in `perturbed-commuting`.
    pub perturbation: f64,
    /// Range of the diagonal entries.
    pub range: (f64, f64),
    /// Source file for `custom`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl ModelSpec {
    pub fn new(family: Family, dim: usize) -> Self {
        Self {
            family,
            dim,
            seed: 0,
            n: 2,
            perturbation: 0.01,
            range: (-1.0, 1.0),
            path: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.family == Family::Custom {
            return match self.path {
                Some(_) => Ok(()),
                None => Err(Error::InvalidParameter("custom family needs an input path".into())),
            };
        }
        if self.dim < 2 {
            return Err(Error::InvalidParameter(format!("dim must be at least 2, got {}", self.dim)));
        }
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        if !(self.perturbation >= 0.0 && self.perturbation.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "perturbation must be non-negative, got {}",
                self.perturbation
            )));
        }
        let (lo, hi) = self.range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidParameter(format!("bad eigenvalue range [{lo}, {hi}]")));
        }
        Ok(())
    }
}

/// Generation provenance stored next to a tuple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub spec: ModelSpec,
    pub commutator_profile: Vec<Vec<f64>>,
    pub max_commutator: f64,
}

/// Builds the tuple for `spec`; a pure function of the spec.
pub fn generate(spec: &ModelSpec) -> Result<Tuple> {
    spec.validate()?;
    let mut rng = SplitMix64::new(spec.seed);
    match spec.family {
        Family::Shift => shift_pair(spec.dim),
        Family::Clock => clock_shift_triple(spec.dim),
        Family::CommutingDiag => {
            let ops = (0..spec.n).map(|_| random_diag(&mut rng, spec)).collect();
            OperatorTuple::new(ops)
        }
        Family::PerturbedCommuting => {
            let u = random_unitary::<f64>(&mut rng, spec.dim);
            let diags: Vec<HermitianMatrix<f64>> = (0..spec.n).map(|_| random_diag(&mut rng, spec)).collect();
            let ops = diags
                .iter()
                .map(|d| {
                    let base = HermitianMatrix::symmetrize(&u.matmul(d.as_matrix()).matmul(&u.adjoint()));
                    let e = random_hermitian::<f64>(&mut rng, spec.dim);
                    let norm = crate::linalg::hermitian_norm(&e)?;
                    let scale = if norm > 0.0 { spec.perturbation / norm } else { 0.0 };
                    Ok(base.add(&e.scale(scale)))
                })
                .collect::<Result<Vec<_>>>()?;
            OperatorTuple::new(ops)
        }
        Family::Custom => {
            let path = spec.path.as_ref().expect("validated");
            Ok(load_tuple_file(path)?.tuple)
        }
    }
}

/// Tuple together with its provenance metadata.
pub fn generate_with_meta(spec: &ModelSpec) -> Result<(Tuple, ModelMeta)> {
    let tuple = generate(spec)?;
    let profile = commutator_profile(&tuple);
    let max_commutator = profile.iter().flatten().copied().fold(0.0, f64::max);
    let meta = ModelMeta {
        spec: spec.clone(),
        commutator_profile: profile,
        max_commutator,
    };
    Ok((tuple, meta))
}

fn random_diag(rng: &mut SplitMix64, spec: &ModelSpec) -> HermitianMatrix<f64> {
    let (lo, hi) = spec.range;
    let d: Vec<f64> = (0..spec.dim).map(|_| rng.uniform(lo, hi)).collect();
    HermitianMatrix::from_real_diag(&d)
}

/// Truncated shift pair on `C^dim` with `S e_k = e_{k+1}` (`S e_dim = 0`).
pub fn shift_pair(dim: usize) -> Result<Tuple> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!("dim must be at least 2, got {dim}")));
    }
    let s = ComplexMatrix::from_fn(dim, dim, |i, j| {
        if i == j + 1 {
            C::new(1.0, 0.0)
        } else {
            C::new(0.0, 0.0)
        }
    });
    let st = s.adjoint();
    let a1 = s.add(&st).scale_real(0.5);
    // −(S − S*)/(2i) = i(S − S*)/2
    let a2 = s.sub(&st).scale(C::new(0.0, 0.5));
    OperatorTuple::new(vec![HermitianMatrix::new(a1)?, HermitianMatrix::new(a2)?])
}

/// Clock `U = diag(ω^k)` and cyclic shift `V e_k = e_{k+1 mod dim}` with `ω = e^{2πi/dim}`,
/// so `UV = ωVU`; returns `(Re U, Im U, (V + V†)/2)`.
pub fn clock_shift_triple(dim: usize) -> Result<Tuple> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!("dim must be at least 2, got {dim}")));
    }
    let angle = |k: usize| 2.0 * std::f64::consts::PI * k as f64 / dim as f64;
    let re: Vec<f64> = (0..dim).map(|k| angle(k).cos()).collect();
    let im: Vec<f64> = (0..dim).map(|k| angle(k).sin()).collect();
    let v = ComplexMatrix::from_fn(dim, dim, |i, j| {
        if i == (j + 1) % dim {
            C::new(1.0, 0.0)
        } else {
            C::new(0.0, 0.0)
        }
    });
    let h = v.add(&v.adjoint()).scale_real(0.5);
    OperatorTuple::new(vec![
        HermitianMatrix::from_real_diag(&re),
        HermitianMatrix::from_real_diag(&im),
        HermitianMatrix::new(h)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_pair_dim2_entries() {
        let t = shift_pair(2).unwrap();
        let a1 = t.op(0);
        let a2 = t.op(1);
        assert_eq!(a1[(0, 1)], C::new(0.5, 0.0));
        assert_eq!(a1[(1, 0)], C::new(0.5, 0.0));
        assert_eq!(a1[(0, 0)], C::new(0.0, 0.0));
        // S = e₂e₁†: (S − S*)/(2i) has [0][1] = i/2, so A₂ = −that has [0][1] = −i/2
        assert_eq!(a2[(0, 1)], C::new(0.0, -0.5));
        assert_eq!(a2[(1, 0)], C::new(0.0, 0.5));
    }

    #[test]
    fn shift_pair_commutator_is_half() {
        for dim in [2, 3, 7, 32] {
            let p = commutator_profile(&shift_pair(dim).unwrap());
            assert!((p[0][1] - 0.5).abs() < 1e-12, "dim {dim}: {}", p[0][1]);
        }
    }

    #[test]
    fn clock_triple_commutators_bounded() {
        let t = clock_shift_triple(32).unwrap();
        let p = commutator_profile(&t);
        let bound = 2.0 * (std::f64::consts::PI / 32.0).sin();
        assert!(p.iter().flatten().all(|&x| x <= bound + 1e-12));
        assert_eq!(p[0][1], 0.0);
        assert!(p[0][2] > 0.0);
    }

    #[test]
    fn clock_relation_holds() {
        let dim = 8;
        let t = clock_shift_triple(dim).unwrap();
        let u = t.op(0).as_matrix().add(&t.op(1).as_matrix().scale(C::new(0.0, 1.0)));
        let v = ComplexMatrix::from_fn(dim, dim, |i, j| C::new(if i == (j + 1) % dim { 1.0 } else { 0.0 }, 0.0));
        let w = C::from_polar(1.0, 2.0 * std::f64::consts::PI / dim as f64);
        let lhs = u.matmul(&v);
        let rhs = v.matmul(&u).scale(w);
        assert!(lhs.sub(&rhs).max_abs() < 1e-12);
    }

    #[test]
    fn commuting_and_perturbed_families() {
        let mut spec = ModelSpec::new(Family::CommutingDiag, 12);
        spec.n = 3;
        spec.seed = 4;
        let (t, meta) = generate_with_meta(&spec).unwrap();
        assert_eq!(t.n(), 3);
        assert_eq!(meta.max_commutator, 0.0);
        assert_eq!(generate(&spec).unwrap(), t);

        spec.family = Family::PerturbedCommuting;
        spec.perturbation = 0.05;
        let (_, meta) = generate_with_meta(&spec).unwrap();
        assert!(meta.max_commutator > 0.0 && meta.max_commutator <= 4.0 * 0.05 + 2.0 * 0.05 * 0.05);
        spec.perturbation = 0.0;
        assert!(generate_with_meta(&spec).unwrap().1.max_commutator < 1e-12);
    }

    #[test]
    fn family_names_parse() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert_eq!("shift_pair".parse::<Family>().unwrap(), Family::Shift);
        let err = "circle".parse::<Family>().unwrap_err().to_string();
        assert!(err.contains("shift") && err.contains("clock"));
    }

    #[test]
    fn invalid_specs() {
        assert!(generate(&ModelSpec::new(Family::Shift, 1)).is_err());
        let mut s = ModelSpec::new(Family::PerturbedCommuting, 4);
        s.perturbation = -1.0;
        assert!(generate(&s).is_err());
        assert!(generate(&ModelSpec::new(Family::Custom, 4)).is_err());
    }
}
