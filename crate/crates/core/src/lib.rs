//! Decision procedures for recurrence, rigidity and uniform rigidity of
//! linear operators, with a numerical orbit engine to cross-check them.
//!
//! Everything is generic over the real scalar (`f32` or `f64`); the aliases
//! below fix `f64`.

pub mod composition;
pub mod diophantine;
pub mod error;
pub mod io;
pub mod laws;
pub mod linalg;
pub mod matrix_dynamics;
pub mod multiplication;
pub mod orbit;
pub mod scalar;
pub mod sequence;
pub mod taxonomy;

pub use error::{Error, Result};
pub use taxonomy::{Evidence, Level, RecurrenceVerdict, RigiditySequence};

pub type Complex = num_complex::Complex64;
pub type Matrix = linalg::ComplexMatrix<f64>;
pub type Tol = taxonomy::Tolerance<f64>;
pub type Lfm = composition::LinearFractionalMap<f64>;
pub type Angles = sequence::AngleSequence<f64>;
pub type Weights = sequence::WeightSequence<f64>;
pub type Record = orbit::ReturnRecord<f64>;
