//! Ground-truth diagonalization restricted to particle-number and spin sectors.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fermion::{s2_operator, twice_spin, SpinOrbitalIntegrals};
use crate::pauli::{PauliSum, DEFAULT_ORACLE_CAP};
use crate::sim::{expectation, StateVector};
use crate::{Error, Result};

/// Largest register the in-sector dense solver accepts.
pub const SECTOR_QUBIT_CAP: usize = 14;

/// Joint `(N, S_z)` constraint on computational basis states. `None` leaves a
/// quantum number unconstrained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SectorSpec {
    pub n_particles: Option<usize>,
    pub s_z: Option<f64>,
}

impl SectorSpec {
    pub fn all() -> Self {
        SectorSpec::default()
    }

    pub fn new(n_particles: usize, s_z: f64) -> Self {
        SectorSpec { n_particles: Some(n_particles), s_z: Some(s_z) }
    }

    pub fn is_unconstrained(&self) -> bool {
        self.n_particles.is_none() && self.s_z.is_none()
    }

    /// Whether basis state `b` of an interleaved up/down register lies in the sector.
    pub fn contains(&self, b: usize) -> bool {
        if let Some(n) = self.n_particles {
            if b.count_ones() as usize != n {
                return false;
            }
        }
        if let Some(sz) = self.s_z {
            if twice_sz_of(b) != (2.0 * sz).round() as i64 {
                return false;
            }
        }
        true
    }

    /// Sector members in ascending order.
    pub fn basis(&self, n_qubits: usize) -> Result<Vec<usize>> {
        if self.s_z.is_some() && n_qubits % 2 != 0 {
            return Err(Error::Convention(format!("S_z sector on odd register of {n_qubits} qubits")));
        }
        if let Some(sz) = self.s_z {
            if ((2.0 * sz).round() - 2.0 * sz).abs() > 1e-9 {
                return Err(Error::Sector(format!("S_z = {sz} is not a half-integer")));
            }
        }
        let states: Vec<usize> = (0..1usize << n_qubits).filter(|&b| self.contains(b)).collect();
        if states.is_empty() {
            return Err(Error::Sector(format!("sector {self:?} is empty on {n_qubits} qubits")));
        }
        Ok(states)
    }
}

fn twice_sz_of(b: usize) -> i64 {
    let mut t = 0i64;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros() as usize;
        t += twice_spin(j) as i64;
        rest &= rest - 1;
    }
    t
}

#[derive(Clone, Debug)]
pub struct EigenSolution {
    /// Ascending, Hartree.
    pub eigenvalues: Vec<f64>,
    /// Full-register eigenvectors matching `eigenvalues`.
    pub eigenvectors: Vec<StateVector>,
    /// `<S^2>` per eigenvector, when the register has interleaved spins.
    pub s2: Option<Vec<f64>>,
}

fn check_size(h: &PauliSum) -> Result<()> {
    if h.n_qubits() > SECTOR_QUBIT_CAP {
        return Err(Error::Resource(format!(
            "{} qubits exceed the exact-diagonalization cap of {SECTOR_QUBIT_CAP}",
            h.n_qubits()
        )));
    }
    Ok(())
}

/// `H` restricted to the span of `basis` (which must be sorted).
fn sector_matrix(h: &PauliSum, basis: &[usize]) -> DMatrix<Complex64> {
    let dim = basis.len();
    let mut position = vec![usize::MAX; 1 << h.n_qubits()];
    for (i, &b) in basis.iter().enumerate() {
        position[b] = i;
    }
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for t in h.terms() {
        for (col, &b) in basis.iter().enumerate() {
            let (phase, target) = t.string.apply_to_basis(b);
            let row = position[target];
            if row != usize::MAX {
                m[(row, col)] += phase.to_complex() * t.coeff;
            }
        }
    }
    m
}

fn solve(h: &PauliSum, basis: &[usize], vectors: bool) -> (Vec<f64>, Option<DMatrix<Complex64>>) {
    let m = sector_matrix(h, basis);
    if vectors {
        let eig = SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vecs = DMatrix::from_fn(basis.len(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
        (values, Some(vecs))
    } else {
        let mut values: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        (values, None)
    }
}

/// Lowest `how_many` eigenpairs of `h` inside `sector`.
pub fn sector_spectrum(h: &PauliSum, sector: SectorSpec, how_many: usize) -> Result<EigenSolution> {
    check_size(h)?;
    let n = h.n_qubits();
    let basis = sector.basis(n)?;
    if how_many > basis.len() {
        return Err(Error::Sector(format!(
            "requested {how_many} states from a sector of dimension {}",
            basis.len()
        )));
    }
    let (values, vecs) = solve(h, &basis, true);
    let vecs = vecs.expect("vectors requested");
    let mut eigenvectors = Vec::with_capacity(how_many);
    for c in 0..how_many {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        for (r, &b) in basis.iter().enumerate() {
            amps[b] = vecs[(r, c)];
        }
        eigenvectors.push(StateVector::from_amplitudes(n, amps)?);
    }
    let s2 = if n % 2 == 0 {
        let op = s2_operator(n)?;
        Some(eigenvectors.iter().map(|v| expectation(v, &op)).collect::<Result<Vec<_>>>()?)
    } else {
        None
    };
    Ok(EigenSolution { eigenvalues: values[..how_many].to_vec(), eigenvectors, s2 })
}

/// All eigenvalues of `h` in `sector`, ascending.
pub fn sector_eigenvalues(h: &PauliSum, sector: SectorSpec) -> Result<Vec<f64>> {
    check_size(h)?;
    let basis = sector.basis(h.n_qubits())?;
    Ok(solve(h, &basis, false).0)
}

/// Every eigenvalue of `h`, ascending, assembled from the `N` sectors (which `h`
/// must conserve for the result to be exact).
pub fn full_spectrum(h: &PauliSum) -> Result<Vec<f64>> {
    check_size(h)?;
    let mut all = Vec::with_capacity(1 << h.n_qubits());
    for n in 0..=h.n_qubits() {
        all.extend(sector_eigenvalues(h, SectorSpec { n_particles: Some(n), s_z: None })?);
    }
    all.sort_by(f64::total_cmp);
    Ok(all)
}

/// Every eigenvalue of `h` from one dense diagonalization, with no symmetry assumed.
pub fn dense_spectrum(h: &PauliSum) -> Result<Vec<f64>> {
    let m = h.to_matrix_capped(DEFAULT_ORACLE_CAP)?;
    let mut values: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// The `m` sector eigenvalues closest to `omega`, nearest first.
pub fn nearest_eigenvalues(h: &PauliSum, omega: f64, sector: SectorSpec, m: usize) -> Result<Vec<f64>> {
    let mut values = sector_eigenvalues(h, sector)?;
    if m > values.len() {
        return Err(Error::Sector(format!(
            "requested {m} eigenvalues from a sector of dimension {}",
            values.len()
        )));
    }
    values.sort_by(|a, b| (a - omega).abs().total_cmp(&(b - omega).abs()));
    values.truncate(m);
    Ok(values)
}

/// `|computed - exact| / |exact|`.
pub fn relative_error(computed: f64, exact: f64) -> Result<f64> {
    if exact == 0.0 {
        return Err(Error::Numeric("relative error against an exact value of zero".into()));
    }
    Ok(((computed - exact) / exact).abs())
}

/// Hamiltonian matrix built directly in the occupation-number basis by applying
/// creation and annihilation operators to bitstrings, without any qubit mapping.
pub fn occupation_matrix(s: &SpinOrbitalIntegrals) -> Result<DMatrix<f64>> {
    let n = s.n_spin_orbitals;
    if n > DEFAULT_ORACLE_CAP {
        return Err(Error::Resource(format!("{n} spin orbitals exceed the oracle cap")));
    }
    let dim = 1usize << n;
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for b in 0..dim {
        m[(b, b)] += s.constant;
        for i in 0..n {
            for j in 0..n {
                let v = s.h1[[i, j]];
                if v == 0.0 {
                    continue;
                }
                if let Some((sign, t)) = apply_ladder(b, &[(true, i), (false, j)]) {
                    m[(t, b)] += sign * v;
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = s.h2[[i, j, k, l]];
                        if v == 0.0 {
                            continue;
                        }
                        let ops = [(true, i), (true, j), (false, k), (false, l)];
                        if let Some((sign, t)) = apply_ladder(b, &ops) {
                            m[(t, b)] += 0.5 * sign * v;
                        }
                    }
                }
            }
        }
    }
    Ok(m)
}

/// Applies a product of ladder operators (rightmost first) to an occupation
/// bitstring. `(true, q)` is a creation operator on mode `q`.
fn apply_ladder(mut b: usize, ops: &[(bool, usize)]) -> Option<(f64, usize)> {
    let mut sign = 1.0;
    for &(create, q) in ops.iter().rev() {
        let bit = 1usize << q;
        if (b & bit != 0) == create {
            return None;
        }
        if (b & (bit - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        b ^= bit;
    }
    Some((sign, b))
}
