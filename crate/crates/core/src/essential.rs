//! Behaviour "at infinity" of a finite tuple: compressions away from the first `m` basis
//! vectors (and optionally the last `m`), synthetic spectra of those compressions, and
//! AMU states supported in growing windows.

use serde::{Deserialize, Serialize};

use crate::amu::Localizer;
use crate::error::{Error, Result};
use crate::linalg::{operator_norm, ComplexMatrix};
use crate::observables::{amu_check, measure, AmuCertificate, MeasurementReport, OperatorTuple, VectorState};
use crate::scalar::{czero, Real};
use crate::spectrum::{hausdorff, scan_with, ScanOptions, SyntheticSpectrumResult};

/// Which basis vectors a cut `m` removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowKind {
    /// Keep `m..dim`.
    Tail,
    /// Keep `m..dim−m`, dropping both ends.
    #[default]
    Interior,
}

impl WindowKind {
    /// Half-open index window kept by cut `m`.
    pub fn window(self, m: usize, dim: usize) -> Result<(usize, usize)> {
        let end = match self {
            WindowKind::Tail => dim,
            WindowKind::Interior => dim.saturating_sub(m),
        };
        if m >= dim || end < m + 2 {
            return Err(Error::CutOutOfRange { cut: m, dim });
        }
        Ok((m, end))
    }
}

/// The compression of every observable to a window of the basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TailCompression<T: Real> {
    pub cut: usize,
    pub window: (usize, usize),
    pub tuple: OperatorTuple<T>,
}

impl<T: Real> TailCompression<T> {
    pub fn new(tuple: &OperatorTuple<T>, cut: usize, kind: WindowKind) -> Result<Self> {
        let window = kind.window(cut, tuple.dim())?;
        Ok(Self {
            cut,
            window,
            tuple: tuple.compress(window.0, window.1),
        })
    }

    pub fn dim(&self) -> usize {
        self.window.1 - self.window.0
    }
}

/// `‖K(1 − p_m)‖`, where `p_m` projects onto the first `m` basis vectors.
pub fn tail_norm<T: Real>(k: &ComplexMatrix<T>, m: usize) -> Result<T> {
    if m >= k.cols() {
        return Err(Error::CutOutOfRange { cut: m, dim: k.cols() });
    }
    Ok(operator_norm(&k.block(0, k.rows(), m, k.cols())))
}

/// `max_{i<j} ‖[T_i, T_j](1 − p_m)‖` for each cut.
pub fn tail_commutator_decay<T: Real>(tuple: &OperatorTuple<T>, cuts: &[usize]) -> Result<Vec<(usize, T)>> {
    let dim = tuple.dim();
    if let Some(&cut) = cuts.iter().find(|&&m| m >= dim) {
        return Err(Error::CutOutOfRange { cut, dim });
    }
    let mut commutators = Vec::new();
    for i in 0..tuple.n() {
        for j in i + 1..tuple.n() {
            let ab = tuple.op(i).as_matrix().matmul(tuple.op(j).as_matrix());
            commutators.push(ab.sub(&ab.adjoint()));
        }
    }
    cuts.iter()
        .map(|&m| {
            let worst = commutators
                .iter()
                .map(|k| tail_norm(k, m))
                .collect::<Result<Vec<T>>>()?
                .into_iter()
                .fold(T::zero(), T::max);
            Ok((m, worst))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EssentialLevel<T: Real> {
    pub cut: usize,
    /// Half-open window `[start, end)` of kept basis indices.
    pub window: [usize; 2],
    pub result: SyntheticSpectrumResult<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EssentialSpectrumEstimate<T: Real> {
    pub eta: T,
    pub k: u64,
    /// Grid pitch `1/k`, the stabilization threshold.
    pub pitch: T,
    pub window_kind: WindowKind,
    pub levels: Vec<EssentialLevel<T>>,
    /// Accepted points of the last level.
    pub stabilized: Vec<Vec<T>>,
    /// Hausdorff distance between the accepted sets of the last two levels; absent when
    /// either is empty.
    pub stability: Option<T>,
    /// `stability ≤ pitch`.
    pub is_stable: bool,
}

/// Scans the compression of `tuple` at each cut. Cuts must be strictly increasing and
/// there must be at least two; an empty accepted set at some level is recorded, not an
/// error. All levels share the tuple's norm bound and hence the same lattice.
pub fn essential_spectrum_estimate<T: Real>(
    tuple: &OperatorTuple<T>,
    eta: T,
    cuts: &[usize],
    kind: WindowKind,
    opts: &ScanOptions,
) -> Result<EssentialSpectrumEstimate<T>> {
    if cuts.len() < 2 {
        return Err(Error::InvalidParameter("need at least two cuts".into()));
    }
    if cuts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("cuts must be strictly increasing".into()));
    }
    let compressions = cuts
        .iter()
        .map(|&m| TailCompression::new(tuple, m, kind))
        .collect::<Result<Vec<_>>>()?;

    let mut levels = Vec::with_capacity(cuts.len());
    for c in compressions {
        let result = scan_with(&c.tuple, eta, opts)?;
        levels.push(EssentialLevel {
            cut: c.cut,
            window: [c.window.0, c.window.1],
            result,
        });
    }
    let last = &levels[levels.len() - 1].result;
    let prev = &levels[levels.len() - 2].result;
    let pitch = T::one() / T::lit(last.k as f64);
    let stability = if last.is_empty() || prev.is_empty() {
        None
    } else {
        Some(hausdorff(&last.points(), &prev.points())?)
    };
    let is_stable = stability.is_some_and(|s| s <= pitch + T::tol(1e-12));

    Ok(EssentialSpectrumEstimate {
        eta,
        k: last.k,
        pitch,
        window_kind: kind,
        stabilized: last.points(),
        stability,
        is_stable,
        levels,
    })
}

/// One step of an AMU sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SequenceStep<T: Real> {
    pub cut: usize,
    pub window: [usize; 2],
    /// Window-supported state measured against the full tuple.
    pub certificate: AmuCertificate<T>,
    /// The same state measured against the compressed tuple.
    pub window_report: MeasurementReport<T>,
    /// `‖B_j v‖` with `B_j` the rows of `T_j` outside the window, columns inside.
    pub boundary: Vec<T>,
    /// `‖B_j‖`.
    pub boundary_norm: Vec<T>,
}

/// Window for cut `m` in an AMU sequence: `[m, min(2m, dim − m))`, doubling with `m`.
pub fn sequence_window(m: usize, dim: usize) -> Result<(usize, usize)> {
    let end = (2 * m).min(dim.saturating_sub(m));
    if m == 0 || end < m + 2 {
        return Err(Error::CutOutOfRange { cut: m, dim });
    }
    Ok((m, end))
}

/// For each cut, the ground state of `Q(λ)` on the compressed window, zero-padded back
/// to the full space and measured against the original tuple.
///
/// `sigma_schedule` gives `σ` per cut (a single value applies to every cut); the same
/// value is used for `ε`.
pub fn amu_sequence<T: Real>(
    tuple: &OperatorTuple<T>,
    lambda: &[T],
    cuts: &[usize],
    sigma_schedule: &[T],
) -> Result<Vec<SequenceStep<T>>> {
    if sigma_schedule.len() != 1 && sigma_schedule.len() != cuts.len() {
        return Err(Error::InvalidParameter(format!(
            "sigma schedule has {} entries for {} cuts",
            sigma_schedule.len(),
            cuts.len()
        )));
    }
    let dim = tuple.dim();
    let mut out = Vec::with_capacity(cuts.len());
    for (idx, &m) in cuts.iter().enumerate() {
        let sigma = sigma_schedule[if sigma_schedule.len() == 1 { 0 } else { idx }];
        let (start, end) = sequence_window(m, dim)?;
        let inner_tuple = tuple.compress(start, end);
        let (local, _) = Localizer::new(&inner_tuple).ground_state(lambda)?;

        let mut padded = vec![czero(); dim];
        padded[start..end].copy_from_slice(local.amplitudes());
        let state = VectorState::from_unnormalized(padded)?;
        let certificate = amu_check(tuple, &state, lambda, sigma, sigma)?;
        let window_report = measure(&inner_tuple, &local)?;

        let outside: Vec<usize> = (0..start).chain(end..dim).collect();
        let inside: Vec<usize> = (start..end).collect();
        let mut boundary = Vec::with_capacity(tuple.n());
        let mut boundary_norm = Vec::with_capacity(tuple.n());
        for op in tuple.ops() {
            let b = op.as_matrix().select(&outside, &inside);
            let bv = b.mul_vec(local.amplitudes());
            boundary.push(bv.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt());
            boundary_norm.push(operator_norm(&b));
        }
        out.push(SequenceStep {
            cut: m,
            window: [start, end],
            certificate,
            window_report,
            boundary,
            boundary_norm,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::HermitianMatrix;
    use crate::scalar::C;

    fn shift_pair(dim: usize) -> OperatorTuple<f64> {
        let a1 = ComplexMatrix::from_fn(dim, dim, |i, j| {
            C::new(if i.abs_diff(j) == 1 { 0.5 } else { 0.0 }, 0.0)
        });
        let a2 = ComplexMatrix::from_fn(dim, dim, |i, j| {
            C::new(0.0, if i == j + 1 { 0.5 } else if j == i + 1 { -0.5 } else { 0.0 })
        });
        OperatorTuple::new(vec![HermitianMatrix::new(a1).unwrap(), HermitianMatrix::new(a2).unwrap()]).unwrap()
    }

    #[test]
    fn windows() {
        assert_eq!(WindowKind::Tail.window(3, 10).unwrap(), (3, 10));
        assert_eq!(WindowKind::Interior.window(3, 10).unwrap(), (3, 7));
        assert!(WindowKind::Interior.window(5, 10).is_err());
        assert!(WindowKind::Tail.window(9, 10).is_err());
        assert_eq!(sequence_window(32, 512).unwrap(), (32, 64));
        assert_eq!(sequence_window(300, 512).unwrap_err().to_string(), "cut 300 is out of range for dimension 512");
    }

    #[test]
    fn commuting_decay_is_zero() {
        let t = OperatorTuple::new(vec![
            HermitianMatrix::<f64>::from_real_diag(&[1.0, 2.0, 3.0]),
            HermitianMatrix::from_real_diag(&[0.0, -1.0, 0.5]),
        ])
        .unwrap();
        for (_, v) in tail_commutator_decay(&t, &[0, 1, 2]).unwrap() {
            assert_eq!(v, 0.0);
        }
        assert!(matches!(tail_commutator_decay(&t, &[3]), Err(Error::CutOutOfRange { .. })));
    }

    #[test]
    fn shift_pair_keeps_boundary_term() {
        let t = shift_pair(16);
        for (m, v) in tail_commutator_decay(&t, &[0, 1, 5, 15]).unwrap() {
            assert!((v - 0.5).abs() < 1e-12, "m = {m}: {v}");
        }
    }

    #[test]
    fn rank_one_tail_norm_vanishes() {
        let mut k = ComplexMatrix::<f64>::zeros(5, 5);
        k[(0, 0)] = C::new(1.0, 0.0);
        assert_eq!(tail_norm(&k, 0).unwrap(), 1.0);
        for m in 1..5 {
            assert_eq!(tail_norm(&k, m).unwrap(), 0.0);
        }
    }

    #[test]
    fn isolated_first_eigenvalue_leaves_the_tail() {
        let mut d1 = vec![0.9];
        let mut d2 = vec![0.9];
        d1.extend(std::iter::repeat(-0.5).take(7));
        d2.extend(std::iter::repeat(-0.5).take(7));
        let t = OperatorTuple::new(vec![HermitianMatrix::from_real_diag(&d1), HermitianMatrix::from_real_diag(&d2)])
            .unwrap();
        let est = essential_spectrum_estimate(&t, 0.4, &[1, 2], WindowKind::Tail, &ScanOptions::default()).unwrap();
        for level in &est.levels {
            assert!(!level.result.covers(&[0.9, 0.9]));
            assert!(level.result.covers(&[-0.5, -0.5]));
        }
        assert_eq!(est.stability, Some(0.0));
        assert!(est.is_stable);
        let full = crate::spectrum::scan(&t, 0.4).unwrap();
        assert!(full.covers(&[0.9, 0.9]));
    }

    #[test]
    fn identity_levels_sit_at_ones() {
        let t = OperatorTuple::new(vec![HermitianMatrix::<f64>::identity(10); 2]).unwrap();
        let est = essential_spectrum_estimate(&t, 0.5, &[1, 2, 3], WindowKind::Interior, &ScanOptions::default()).unwrap();
        for level in &est.levels {
            assert!(level.result.covers(&[1.0, 1.0]));
            assert!(!level.result.covers(&[0.0, 0.0]));
        }
    }

    #[test]
    fn estimate_rejects_bad_cuts() {
        let t = shift_pair(8);
        let o = ScanOptions::default();
        assert!(essential_spectrum_estimate(&t, 0.5, &[1], WindowKind::Interior, &o).is_err());
        assert!(essential_spectrum_estimate(&t, 0.5, &[2, 1], WindowKind::Interior, &o).is_err());
        assert!(matches!(
            essential_spectrum_estimate(&t, 0.5, &[1, 4], WindowKind::Interior, &o),
            Err(Error::CutOutOfRange { cut: 4, dim: 8 })
        ));
    }

    #[test]
    fn sequence_support_and_boundary_identity() {
        let t = shift_pair(128);
        let steps = amu_sequence(&t, &[1.0, 0.0], &[8, 16, 32], &[0.3]).unwrap();
        let mut last = f64::INFINITY;
        for s in &steps {
            let amps = s.certificate.state.amplitudes();
            let [a, b] = s.window;
            assert!(amps[..a].iter().chain(&amps[b..]).all(|z| *z == C::new(0.0, 0.0)));
            for j in 0..2 {
                let full = s.certificate.report.sd[j];
                let tail = s.window_report.sd[j];
                assert!((full * full - tail * tail - s.boundary[j] * s.boundary[j]).abs() < 1e-12);
                assert!((full - tail).abs() <= s.boundary_norm[j] + 1e-12);
            }
            let sd = s.certificate.report.max_sd();
            assert!(sd < last);
            last = sd;
        }
    }

    #[test]
    fn commuting_sequence_has_zero_sd() {
        let d: Vec<f64> = (0..16).map(|i| if i == 5 { 0.7 } else { -0.2 }).collect();
        let t = OperatorTuple::new(vec![HermitianMatrix::from_real_diag(&d)]).unwrap();
        let steps = amu_sequence(&t, &[0.7], &[4], &[0.1]).unwrap();
        assert!(steps[0].certificate.report.sd[0] < 1e-12);
        assert!(steps[0].certificate.certified());
    }
}
