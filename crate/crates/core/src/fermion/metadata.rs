use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{freeze, jordan_wigner, read_fcidump, to_spin_orbitals, ActiveSpace, FciDump, SpinOrbitalIntegrals};
use crate::pauli::PauliSum;
use crate::{Error, Result};

/// Sidecar written next to each FCIDUMP fixture by the fixture generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureMetadata {
    #[serde(default)]
    pub molecule: String,
    pub bond_length_angstrom: f64,
    pub reference_ground_ha: f64,
    #[serde(default)]
    pub reference_excited_ha: Vec<f64>,
    #[serde(default)]
    pub reference_s2: Vec<f64>,
    #[serde(default)]
    pub n_orbitals: Option<usize>,
    #[serde(default)]
    pub n_electrons: Option<usize>,
    #[serde(default)]
    pub hf_energy_ha: Option<f64>,
    pub basis: String,
    pub generator_tool: String,
    pub generator_version: String,
}

impl FixtureMetadata {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        toml::from_str(&text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start].lines().count().max(1)).unwrap_or(0);
            Error::Parse { line, message: e.message().to_string() }.in_file(path)
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("metadata serializes")
    }
}

/// An FCIDUMP file together with its sidecar (same stem, `.toml` extension).
#[derive(Clone, Debug)]
pub struct MolecularFixture {
    pub path: PathBuf,
    pub dump: FciDump,
    pub metadata: FixtureMetadata,
}

impl MolecularFixture {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let dump = read_fcidump(&path)?;
        let metadata = FixtureMetadata::read(path.with_extension("toml"))?;
        Ok(MolecularFixture { path, dump, metadata })
    }

    pub fn bond_length(&self) -> f64 {
        self.metadata.bond_length_angstrom
    }

    /// Spin-orbital integrals after removing `active`'s frozen and virtual orbitals.
    pub fn integrals(&self, active: &ActiveSpace) -> Result<SpinOrbitalIntegrals> {
        freeze(&to_spin_orbitals(&self.dump), active)
    }

    /// Jordan-Wigner qubit Hamiltonian of the active space.
    pub fn hamiltonian(&self, active: &ActiveSpace) -> Result<PauliSum> {
        jordan_wigner(&self.integrals(active)?)
    }
}
