//! Excitation transport and Feynman clocked computation on disordered
//! tight-binding chains.
//!
//! * [`chain`]: free, disordered and tilted chain Hamiltonians, their
//!   spectra and localization diagnostics.
//! * [`unitary`]: exact closed-system propagation.
//! * [`lindblad`]: thermal-bath dynamics in the energy representation.
//! * [`feynman`]: the CNOT switch circuit, its computational subspaces and
//!   the register it drives.

// `!(x > 0.0)` rejects NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod eigen;
pub mod error;
pub mod feynman;
pub mod lindblad;
pub mod series;
pub mod unitary;

pub use chain::{ChainSpec, DisorderRealization, HamiltonianOperator, PotentialProfile};
pub use eigen::EigenSystem;
pub use error::{Error, Result};
pub use lindblad::{BathSpec, DensityMatrix, EnergyRepDensity, TransitionRates};
pub use series::ObservableSeries;
pub use unitary::PureState;
