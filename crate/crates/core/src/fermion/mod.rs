//! Molecular Hamiltonians: FCIDUMP input, spin-orbital integrals and the
//! Jordan-Wigner mapping.
//!
//! Spin orbitals are interleaved: index `2p` is spatial orbital `p` with spin up,
//! `2p + 1` is the same orbital with spin down. Qubit `j` represents spin orbital `j`.

mod fcidump;
mod integrals;
mod metadata;
mod operators;

pub use fcidump::{parse_fcidump, read_fcidump, FciDump};
pub use integrals::{freeze, jordan_wigner, to_spin_orbitals, ActiveSpace, SpinOrbitalIntegrals};
pub use metadata::{FixtureMetadata, MolecularFixture};
pub use operators::{
    hartree_fock_index, number_operator, s2_operator, spin_penalty_operator, sz_operator,
};

/// Spin projection of spin orbital `j` in units of 1/2: `+1` for up, `-1` for down.
pub fn twice_spin(j: usize) -> i32 {
    if j % 2 == 0 {
        1
    } else {
        -1
    }
}
