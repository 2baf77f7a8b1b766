//! Discrete-mode simulator for many-polariton scattering by lossy objects.
//!
//! Each frequency sector carries a block unitary mapping ingoing scattering
//! (s), electric (e) and magnetic (m) polaritons to outgoing ones. Amplitudes
//! between multi-polariton states are permanents of sub-matrices; the
//! scattered radiation is described by a reduced density matrix obtained
//! either in closed form or by tracing out the e/m polaritons explicitly.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`). The
//! aliases at the crate root fix the scalar to `f64`.

pub mod dense;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod modespace;
pub mod num;
pub mod reduce;
pub mod scatmat;
pub mod scatter;

pub use error::{Error, Result};
pub use fock::{OccupationState, PermanentAlgorithm, PolaritonTuple, Signature};
pub use modespace::{Character, FrequencySector, ModeLabel, ModeSpace};
pub use num::{Complex, Real};
pub use scatmat::ToyModel;
pub use scatter::{Limits, Tolerances};

pub type C64 = Complex<f64>;
pub type CMatrix64 = num::CMatrix<f64>;
pub type CVector64 = num::CVector<f64>;
pub type BlockScatteringMatrix = scatmat::BlockScatteringMatrix<f64>;
pub type KernelSet = scatmat::KernelSet<f64>;
pub type AmplitudeTensor = fock::AmplitudeTensor<f64>;
pub type PolaritonState = fock::PolaritonState<f64>;
pub type ScatteringScenario = scatter::ScatteringScenario<f64>;
pub type ReducedDensityMatrix = reduce::ReducedDensityMatrix<f64>;
pub type DecoherenceReport = reduce::DecoherenceReport<f64>;
pub type OnePolariton = reduce::OnePolariton<f64>;
pub type TwoPolariton = reduce::TwoPolariton<f64>;
pub type EntangledPairEigen = reduce::EntangledPairEigen<f64>;
