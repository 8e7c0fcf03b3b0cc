use ndarray::{Array2, Array4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FciDump;
use crate::pauli::{PauliPolynomial, PauliSum, DEFAULT_DROP_TOL};
use crate::{Error, Result};

/// Integrals of `H = sum h1[i,j] a+_i a_j + 1/2 sum h2[i,j,k,l] a+_i a+_j a_k a_l + constant`
/// over interleaved spin orbitals.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinOrbitalIntegrals {
    pub n_spin_orbitals: usize,
    pub h1: Array2<f64>,
    pub h2: Array4<f64>,
    pub constant: f64,
    pub n_electrons: usize,
}

/// Spatial orbitals removed from the correlated problem.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveSpace {
    #[serde(default)]
    pub frozen_occupied: Vec<usize>,
    #[serde(default)]
    pub removed_virtual: Vec<usize>,
}

impl ActiveSpace {
    pub fn is_empty(&self) -> bool {
        self.frozen_occupied.is_empty() && self.removed_virtual.is_empty()
    }

    pub fn frozen_core(n: usize) -> Self {
        ActiveSpace { frozen_occupied: (0..n).collect(), removed_virtual: Vec::new() }
    }
}

/// Chemist-notation spatial integrals to physicist-ordered spin-orbital integrals:
/// `h2[i,j,k,l] = (pr|qs)` for `i=2p+s, j=2q+t, k=2s'+t, l=2r+s`.
pub fn to_spin_orbitals(f: &FciDump) -> SpinOrbitalIntegrals {
    let n = f.norb;
    let m = 2 * n;
    let mut h1 = Array2::<f64>::zeros((m, m));
    let mut h2 = Array4::<f64>::zeros((m, m, m, m));
    for p in 0..n {
        for q in 0..n {
            for s in 0..2 {
                h1[[2 * p + s, 2 * q + s]] = f.one_body[[p, q]];
            }
        }
    }
    for p in 0..n {
        for r in 0..n {
            for q in 0..n {
                for s in 0..n {
                    let v = f.two_body[[p, r, q, s]];
                    if v == 0.0 {
                        continue;
                    }
                    for sig in 0..2 {
                        for tau in 0..2 {
                            h2[[2 * p + sig, 2 * q + tau, 2 * s + tau, 2 * r + sig]] = v;
                        }
                    }
                }
            }
        }
    }
    SpinOrbitalIntegrals {
        n_spin_orbitals: m,
        h1,
        h2,
        constant: f.core_energy,
        n_electrons: f.nelec,
    }
}

/// Restricts the integrals to the active spin orbitals. Frozen occupied orbitals
/// contribute their mean-field energy to the constant and a Coulomb/exchange
/// correction to the one-body block.
pub fn freeze(s: &SpinOrbitalIntegrals, active: &ActiveSpace) -> Result<SpinOrbitalIntegrals> {
    if active.is_empty() {
        return Ok(s.clone());
    }
    let n_spatial = s.n_spin_orbitals / 2;
    let mut frozen = active.frozen_occupied.clone();
    let mut removed = active.removed_virtual.clone();
    frozen.sort_unstable();
    frozen.dedup();
    removed.sort_unstable();
    removed.dedup();
    if frozen.iter().chain(&removed).any(|&p| p >= n_spatial) {
        return Err(Error::ActiveSpace(format!("orbital index beyond {n_spatial} spatial orbitals")));
    }
    if frozen.iter().any(|p| removed.contains(p)) {
        return Err(Error::ActiveSpace("an orbital is both frozen and removed".into()));
    }
    if s.n_electrons < 2 * frozen.len() {
        return Err(Error::ActiveSpace(format!(
            "freezing {} orbitals needs {} electrons, only {} present",
            frozen.len(),
            2 * frozen.len(),
            s.n_electrons
        )));
    }
    let n_occ_spatial = s.n_electrons / 2;
    if let Some(p) = frozen.iter().find(|&&p| p >= n_occ_spatial) {
        return Err(Error::ActiveSpace(format!("frozen orbital {p} is not doubly occupied in the reference")));
    }

    let frozen_so: Vec<usize> = frozen.iter().flat_map(|&p| [2 * p, 2 * p + 1]).collect();
    let active_so: Vec<usize> = (0..n_spatial)
        .filter(|p| !frozen.contains(p) && !removed.contains(p))
        .flat_map(|p| [2 * p, 2 * p + 1])
        .collect();
    let m = active_so.len();
    if m == 0 {
        return Err(Error::ActiveSpace("no active orbitals left".into()));
    }

    let mut constant = s.constant;
    for &f in &frozen_so {
        constant += s.h1[[f, f]];
        for &g in &frozen_so {
            constant += 0.5 * (s.h2[[f, g, g, f]] - s.h2[[f, g, f, g]]);
        }
    }

    let mut h1 = Array2::<f64>::zeros((m, m));
    for (a, &i) in active_so.iter().enumerate() {
        for (b, &j) in active_so.iter().enumerate() {
            let mut v = s.h1[[i, j]];
            for &f in &frozen_so {
                v += s.h2[[i, f, f, j]] - s.h2[[i, f, j, f]];
            }
            h1[[a, b]] = v;
        }
    }
    let mut h2 = Array4::<f64>::zeros((m, m, m, m));
    for (a, &i) in active_so.iter().enumerate() {
        for (b, &j) in active_so.iter().enumerate() {
            for (c, &k) in active_so.iter().enumerate() {
                for (d, &l) in active_so.iter().enumerate() {
                    h2[[a, b, c, d]] = s.h2[[i, j, k, l]];
                }
            }
        }
    }
    Ok(SpinOrbitalIntegrals {
        n_spin_orbitals: m,
        h1,
        h2,
        constant,
        n_electrons: s.n_electrons - 2 * frozen.len(),
    })
}

/// Jordan-Wigner image of the second-quantized Hamiltonian on `n_spin_orbitals` qubits.
pub fn jordan_wigner(s: &SpinOrbitalIntegrals) -> Result<PauliSum> {
    let m = s.n_spin_orbitals;
    if m > crate::pauli::MAX_QUBITS {
        return Err(Error::Resource(format!("{m} spin orbitals exceed the qubit limit")));
    }
    let create: Vec<PauliPolynomial> = (0..m).map(|j| PauliPolynomial::creation(m, j)).collect();
    let annihilate: Vec<PauliPolynomial> = (0..m).map(|j| PauliPolynomial::annihilation(m, j)).collect();

    let mut h = PauliPolynomial::identity(m).scale(Complex64::new(s.constant, 0.0));
    for i in 0..m {
        for j in 0..m {
            let v = s.h1[[i, j]];
            if v != 0.0 {
                h.add_scaled(&create[i].mul(&annihilate[j]), Complex64::new(v, 0.0));
            }
        }
    }
    let pair_annihilate: Vec<Vec<PauliPolynomial>> = (0..m)
        .map(|k| (0..m).map(|l| annihilate[k].mul(&annihilate[l])).collect())
        .collect();
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            let pair_create = create[i].mul(&create[j]);
            for k in 0..m {
                for l in 0..m {
                    if k == l {
                        continue;
                    }
                    let v = s.h2[[i, j, k, l]];
                    if v == 0.0 {
                        continue;
                    }
                    let op = pair_create.mul(&pair_annihilate[k][l]);
                    h.add_scaled(&op, Complex64::new(0.5 * v, 0.0));
                }
            }
        }
    }
    h.into_hermitian(DEFAULT_DROP_TOL)
}
