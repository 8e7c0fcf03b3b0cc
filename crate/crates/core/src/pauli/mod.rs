//! Pauli strings in symplectic form and real-weighted Pauli sums.
//!
//! A string on `n` qubits is stored as an X mask and a Z mask, one bit per qubit:
//! I=(0,0), X=(1,0), Y=(1,1), Z=(0,1). Qubit `j` is bit `j` of both masks. In the
//! textual form the leftmost letter is qubit 0, so `ZIXY` is Z on qubit 0 and Y on
//! qubit 3.

mod phase;
mod poly;
mod string;
mod sum;

pub use phase::Phase;
pub use poly::PauliPolynomial;
pub use string::{commutes, multiply, PauliString, MAX_QUBITS};
pub use sum::{fold, PauliSum, PauliTerm, DEFAULT_DROP_TOL, DEFAULT_ORACLE_CAP};
