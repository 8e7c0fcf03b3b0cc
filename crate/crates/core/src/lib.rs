//! Variational eigensolver workbench for small molecular Hamiltonians.
//!
//! The crate is organised bottom-up:
//!
//! - [`pauli`]: Pauli strings, real-weighted Pauli sums and the folded-spectrum square.
//! - [`fermion`]: FCIDUMP ingestion, spin-orbital integrals, frozen core and Jordan-Wigner.
//! - [`sim`]: exact statevector simulation, expectation values and adjoint gradients.
//! - [`ansatz`]: QCCSD, UCCSD and strongly entangled circuits plus resource accounting.
//! - [`tapering`]: Z2 symmetry detection and qubit tapering.
//! - [`optim`]: gradient descent, Adam and quantum natural gradient.
//! - [`drivers`]: VQE, VQD, weighted SSVQE and their folded-spectrum variants.
//! - [`exact`]: sector-resolved exact diagonalization used as ground truth.
//! - [`experiment`]: configuration, sweeps and CSV reporting behind the `vqex` binary.

pub mod ansatz;
pub mod drivers;
mod error;
pub mod exact;
pub mod experiment;
pub mod fermion;
pub mod optim;
pub mod pauli;
pub mod sim;
pub mod tapering;

pub use error::{Error, Result};
pub use num_complex::Complex64;
