pub mod degree;
pub mod error;
pub mod experiments;
pub mod games;
pub mod geometry;
pub mod pauli;
pub mod quantum;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision statevector, the default everywhere.
pub type StateVector = quantum::StateVec<f64>;
pub type StateVectorF32 = quantum::StateVec<f32>;
/// Exact win rates and classical values.
pub type WinRate = num_rational::Ratio<u64>;
