//! Partial shadow tomography for registers of up to four qubits.
//!
//! Dense linear algebra, ensembles of measurement unitaries, inverse maps,
//! partial shadow estimators and the benchmark harness built on them.

pub mod bench;
pub mod channels;
pub mod eigen;
pub mod ensembles;
pub mod error;
pub mod gates;
pub mod linalg;
pub mod metrics;
pub mod operators;
pub mod rng;
pub mod shadow;
pub mod state;
pub mod validation;

#[cfg(test)]
mod testutil;

pub use error::{PqstError, Result};
pub use linalg::{Operator, C64};
pub use operators::{ActivityPattern, Observable, PauliString};
pub use shadow::PartialShadowEstimator;
pub use state::{Bitstring, DensityMatrix};
