//! Qubit reduction from Z2 symmetries.
//!
//! Symmetry generators are found as the GF(2) kernel of the Hamiltonian's
//! symplectic parity-check matrix, reduced to Z-type strings. Each generator `tau`
//! is paired with a qubit `q` whose single X anticommutes with `tau` only; the
//! Clifford `U = prod (X_q + tau)/sqrt(2)` turns every `tau` into `X_q`, which is
//! then replaced by its eigenvalue and the qubit deleted.

use std::collections::HashMap;

use crate::pauli::{commutes, multiply, PauliString, PauliSum, PauliTerm, DEFAULT_DROP_TOL};
use crate::sim::{Circuit, CircuitBuilder, Gate};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Z2Symmetries {
    pub n_qubits: usize,
    /// Mutually commuting Z-type strings commuting with every Hamiltonian term.
    pub generators: Vec<PauliString>,
    /// `chosen_qubits[i]` carries Z in `generators[i]` and identity in all others.
    pub chosen_qubits: Vec<usize>,
}

impl Z2Symmetries {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn reduced_qubits(&self) -> usize {
        self.n_qubits - self.generators.len()
    }

    /// Removed qubits in ascending order.
    pub fn removed_qubits(&self) -> Vec<usize> {
        let mut q = self.chosen_qubits.clone();
        q.sort_unstable();
        q
    }

    /// Whether `p` commutes with every generator.
    pub fn preserves(&self, p: &PauliString) -> bool {
        self.generators.iter().all(|g| commutes(g, p).unwrap_or(false))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaperingResult {
    pub reduced: PauliSum,
    /// `+1` or `-1` per generator.
    pub sector: Vec<i8>,
    pub removed_qubits: Vec<usize>,
}

/// Row-reduces `rows` (bitsets over `width` columns) with columns visited in
/// `order`; returns the reduced rows and their pivot columns.
fn row_reduce(mut rows: Vec<u128>, order: &[usize]) -> (Vec<u128>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for &c in order {
        let bit = 1u128 << c;
        let Some(p) = (r..rows.len()).find(|&i| rows[i] & bit != 0) else {
            continue;
        };
        rows.swap(r, p);
        let pivot_row = rows[r];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && *row & bit != 0 {
                *row ^= pivot_row;
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Symplectic vectors `(x | z)` orthogonal to every term of `h`; bit `j` holds
/// `x_j` and bit `n + j` holds `z_j`.
fn symplectic_kernel(h: &PauliSum) -> Vec<u128> {
    let n = h.n_qubits();
    let width = 2 * n;
    // A candidate (vx, vz) commutes with (x, z) iff x.vz + z.vx = 0, so the
    // constraint row stores z on the x columns and x on the z columns.
    let rows: Vec<u128> = h
        .terms()
        .iter()
        .filter(|t| !t.string.is_identity())
        .map(|t| t.string.z_mask() as u128 | (t.string.x_mask() as u128) << n)
        .collect();
    let order: Vec<usize> = (0..width).collect();
    let (rref, pivots) = row_reduce(rows, &order);
    let free: Vec<usize> = order.iter().copied().filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = 1u128 << f;
            for (row, &p) in rref.iter().zip(&pivots) {
                if row >> f & 1 == 1 {
                    v |= 1u128 << p;
                }
            }
            v
        })
        .collect()
}

/// Z-type symmetry generators of `h` and their paired qubits. An empty result is
/// valid and means no qubit can be removed.
pub fn find_symmetries(h: &PauliSum) -> Result<Z2Symmetries> {
    let n = h.n_qubits();
    if 2 * n > 128 {
        return Err(Error::Resource(format!("{n} qubits exceed the tapering limit of 64")));
    }
    let kernel = symplectic_kernel(h);
    let x_bits = (1u128 << n) - 1;
    // Eliminate on the X columns first; rows left without X content span the
    // Z-type part of the kernel.
    let x_first: Vec<usize> = (0..2 * n).collect();
    let (rows, _) = row_reduce(kernel, &x_first);
    let z_rows: Vec<u128> = rows.into_iter().filter(|r| r & x_bits == 0).map(|r| r >> n).collect();
    let (z_rows, pivots) = row_reduce(z_rows, &(0..n).collect::<Vec<_>>());
    let generators = z_rows
        .iter()
        .map(|&z| PauliString::z_type(n, z as u64))
        .collect::<Result<Vec<_>>>()?;
    let syms = Z2Symmetries { n_qubits: n, generators, chosen_qubits: pivots };
    debug_assert!(h.terms().iter().all(|t| syms.preserves(&t.string)));
    Ok(syms)
}

/// Generator eigenvalues of computational basis state `index`.
pub fn sector_of(index: usize, syms: &Z2Symmetries) -> Result<Vec<i8>> {
    syms.generators
        .iter()
        .map(|g| {
            if !g.is_z_type() {
                return Err(Error::Unsupported(format!("generator {g} is not Z-type")));
            }
            Ok(if (index as u64 & g.z_mask()).count_ones() % 2 == 0 { 1 } else { -1 })
        })
        .collect()
}

/// `U P U` for the tapering Clifford, as a sign and a string.
fn conjugate(p: &PauliString, syms: &Z2Symmetries) -> Result<(f64, PauliString)> {
    let mut sign = 1.0;
    let mut cur = *p;
    for (tau, &q) in syms.generators.iter().zip(&syms.chosen_qubits) {
        if !commutes(tau, &cur)? {
            return Err(Error::Consistency(format!("term {p} anticommutes with symmetry {tau}")));
        }
        let x = PauliString::single(syms.n_qubits, q, 'X')?;
        if commutes(&x, &cur)? {
            continue;
        }
        // (X + tau) P (X + tau) / 2 = -P X tau when P anticommutes with X only.
        let (ph1, px) = multiply(&cur, &x)?;
        let (ph2, pxt) = multiply(&px, tau)?;
        let phase = ph1 * ph2;
        let s = phase
            .real_sign()
            .ok_or_else(|| Error::Consistency(format!("non-Hermitian image of {p} under tapering")))?;
        sign *= -s;
        cur = pxt;
    }
    Ok((sign, cur))
}

fn check_sector(syms: &Z2Symmetries, sector: &[i8]) -> Result<()> {
    if sector.len() != syms.len() {
        return Err(Error::dim(format!(
            "sector has {} entries for {} generators",
            sector.len(),
            syms.len()
        )));
    }
    if sector.iter().any(|&s| s != 1 && s != -1) {
        return Err(Error::Sector(format!("sector entries must be +1 or -1, got {sector:?}")));
    }
    Ok(())
}

/// Tapers any operator commuting with the symmetries (Hamiltonian, penalty, S_z).
pub fn taper_operator(op: &PauliSum, syms: &Z2Symmetries, sector: &[i8]) -> Result<PauliSum> {
    if op.n_qubits() != syms.n_qubits {
        return Err(Error::dim(format!(
            "operator on {} qubits, symmetries on {}",
            op.n_qubits(),
            syms.n_qubits
        )));
    }
    check_sector(syms, sector)?;
    let removed = syms.removed_qubits();
    let mut terms = Vec::with_capacity(op.len());
    for t in op.terms() {
        let (mut sign, s) = conjugate(&t.string, syms)?;
        for (i, &q) in syms.chosen_qubits.iter().enumerate() {
            match s.letter(q) {
                'I' => {}
                'X' => sign *= sector[i] as f64,
                other => {
                    return Err(Error::Consistency(format!(
                        "tapered term {s} acts as {other} on removed qubit {q}"
                    )))
                }
            }
        }
        let x_on_removed = removed.iter().fold(0u64, |m, &q| m | 1 << q);
        let stripped = PauliString::new(s.n_qubits(), s.x_mask() & !x_on_removed, s.z_mask())?;
        terms.push(PauliTerm::new(sign * t.coeff, stripped.remove_qubits(&removed)?));
    }
    Ok(PauliSum::from_terms(syms.reduced_qubits(), terms)?.normalize(DEFAULT_DROP_TOL))
}

pub fn taper(h: &PauliSum, syms: &Z2Symmetries, sector: &[i8]) -> Result<TaperingResult> {
    Ok(TaperingResult {
        reduced: taper_operator(h, syms, sector)?,
        sector: sector.to_vec(),
        removed_qubits: syms.removed_qubits(),
    })
}

/// Image of computational basis state `index` in the reduced register: the
/// removed bits are dropped. Valid for states inside the tapered sector.
pub fn taper_basis_index(index: usize, syms: &Z2Symmetries) -> usize {
    let removed = syms.removed_qubits();
    let mut out = 0usize;
    let mut k = 0;
    for q in 0..syms.n_qubits {
        if !removed.contains(&q) {
            out |= (index >> q & 1) << k;
            k += 1;
        }
    }
    out
}

/// A circuit on the reduced register together with the original parameter slot
/// each of its slots came from.
#[derive(Clone, Debug)]
pub struct TaperedCircuit {
    pub circuit: Circuit,
    pub source_slots: Vec<usize>,
}

/// Keeps the parameterized gates whose generators commute with every symmetry,
/// tapers each generator into commuting Pauli rotations sharing one slot, and
/// drops the rest. Layers and gate order are preserved.
pub fn taper_circuit(c: &Circuit, syms: &Z2Symmetries, sector: &[i8]) -> Result<TaperedCircuit> {
    if c.n_qubits() != syms.n_qubits {
        return Err(Error::dim("circuit and symmetries act on different registers"));
    }
    let mut b = CircuitBuilder::new(syms.reduced_qubits());
    let mut slot_map: HashMap<usize, usize> = HashMap::new();
    let mut source_slots = Vec::new();
    for range in c.layer_ranges() {
        b.layer();
        for g in &c.gates()[range] {
            let (Some(slot), Some(gen)) = (g.slot(), g.generator(c.n_qubits())?) else {
                return Err(Error::Unsupported(format!("cannot taper parameterless gate {g:?}")));
            };
            if !gen.terms().iter().all(|t| syms.preserves(&t.string)) {
                continue;
            }
            let reduced = taper_operator(&gen, syms, sector)?;
            let strings: Vec<&PauliTerm> = reduced.terms().iter().filter(|t| !t.string.is_identity()).collect();
            for (i, a) in strings.iter().enumerate() {
                for bb in &strings[i + 1..] {
                    if !commutes(&a.string, &bb.string)? {
                        return Err(Error::Unsupported(format!(
                            "tapered generator of {g:?} has non-commuting terms"
                        )));
                    }
                }
            }
            if strings.is_empty() {
                continue;
            }
            let new_slot = *slot_map.entry(slot).or_insert_with(|| {
                source_slots.push(slot);
                b.slot()
            });
            for t in strings {
                b.push(Gate::PauliRotation { word: t.string, coeff: t.coeff, slot: new_slot });
            }
        }
    }
    Ok(TaperedCircuit { circuit: b.build()?, source_slots })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> PauliSum {
        PauliSum::from_terms(
            2,
            [PauliTerm::new(1.0, "ZZ".parse().unwrap()), PauliTerm::new(0.5, "XX".parse().unwrap())],
        )
        .unwrap()
    }

    #[test]
    fn toy_symmetry() {
        let s = find_symmetries(&toy()).unwrap();
        assert_eq!(s.generators, vec!["ZZ".parse::<PauliString>().unwrap()]);
        assert_eq!(s.chosen_qubits, vec![0]);
        assert_eq!(s.reduced_qubits(), 1);
    }

    #[test]
    fn single_x_has_no_z_symmetry_touching_it() {
        let h = PauliSum::from_terms(2, [PauliTerm::new(1.0, "XI".parse().unwrap())]).unwrap();
        let s = find_symmetries(&h).unwrap();
        let x: PauliString = "XI".parse().unwrap();
        assert!(s.generators.iter().all(|g| commutes(g, &x).unwrap()));
        assert_eq!(s.generators.len(), 1);
    }

    #[test]
    fn sectors() {
        let s = find_symmetries(&toy()).unwrap();
        assert_eq!(sector_of(0, &s).unwrap(), vec![1]);
        assert_eq!(sector_of(0b11, &s).unwrap(), vec![1]);
        assert_eq!(sector_of(0b01, &s).unwrap(), vec![-1]);
    }

    #[test]
    fn identity_is_unchanged() {
        let s = find_symmetries(&toy()).unwrap();
        let id = PauliSum::identity(2, 0.7);
        let r = taper(&id, &s, &[-1]).unwrap();
        assert_eq!(r.reduced, PauliSum::identity(1, 0.7));
    }

    #[test]
    fn bad_sector() {
        let s = find_symmetries(&toy()).unwrap();
        assert!(taper(&toy(), &s, &[1, 1]).is_err());
        assert!(taper(&toy(), &s, &[0]).is_err());
    }

    #[test]
    fn basis_index_drops_removed_bits() {
        let s = Z2Symmetries {
            n_qubits: 4,
            generators: vec![PauliString::z_type(4, 0b0101).unwrap()],
            chosen_qubits: vec![2],
        };
        assert_eq!(taper_basis_index(0b1011, &s), 0b111);
    }
}
