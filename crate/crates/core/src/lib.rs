//! Synthetic spectra and approximately macroscopically unique (AMU) states for tuples of
//! almost-commuting Hermitian matrices.
//!
//! The numerical core is generic over the real scalar ([`Real`], implemented for `f32`
//! and `f64`); the aliases at the crate root fix it to `f64`, which is what the file
//! formats and the command-line front end use.

pub mod amu;
pub mod calculus;
pub mod cli;
pub mod error;
pub mod essential;
pub mod linalg;
pub mod models;
pub mod observables;
pub mod random;
pub mod scalar;
pub mod spectrum;
pub mod tolerances;

pub use error::{Error, Result};
pub use scalar::{Real, C};
pub use tolerances::{Tolerances, TOL};

pub type Complex64 = C<f64>;
pub type Matrix = linalg::ComplexMatrix<f64>;
pub type Hermitian = linalg::HermitianMatrix<f64>;
pub type Eigen = linalg::EigenDecomposition<f64>;
pub type Tuple = observables::OperatorTuple<f64>;
pub type State = observables::VectorState<f64>;
pub type Report = observables::MeasurementReport<f64>;
pub type Certificate = observables::AmuCertificate<f64>;
pub type Spectrum = spectrum::SyntheticSpectrumResult<f64>;
pub type Grid = spectrum::GridSpec<f64>;
pub type Decomposition = amu::DigitalDecomposition<f64>;
pub type Plan = amu::SuperpositionPlan<f64>;
pub type EssentialEstimate = essential::EssentialSpectrumEstimate<f64>;



