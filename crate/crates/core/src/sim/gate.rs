use num_complex::Complex64;

use super::StateVector;
use crate::pauli::{PauliPolynomial, PauliString, PauliSum, PauliTerm, DEFAULT_DROP_TOL};
use crate::{Error, Result};

/// Whether an excitation carries the Jordan-Wigner parity sign of the fermionic
/// operator or acts as a bare qubit rotation between two bitstrings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExcitationFlavor {
    Qubit,
    Fermionic,
}

/// A circuit element. Parameterized gates read their angle from `params[slot]`.
///
/// Excitation wires list the created modes first and the annihilated modes after,
/// in operator order: a single on `[i, k]` rotates by `exp(theta (a_i^+ a_k - h.c.))`
/// and a double on `[i, j, k, l]` by `exp(theta (a_i^+ a_j^+ a_k a_l - h.c.))`.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    RotY { wire: usize, slot: usize },
    RotZ { wire: usize, slot: usize },
    Cnot { control: usize, target: usize },
    SingleExcitation { wires: [usize; 2], slot: usize, flavor: ExcitationFlavor },
    DoubleExcitation { wires: [usize; 4], slot: usize, flavor: ExcitationFlavor },
    /// `exp(-i theta coeff P)`.
    PauliRotation { word: PauliString, coeff: f64, slot: usize },
}

impl Gate {
    pub fn slot(&self) -> Option<usize> {
        match self {
            Gate::RotY { slot, .. }
            | Gate::RotZ { slot, .. }
            | Gate::SingleExcitation { slot, .. }
            | Gate::DoubleExcitation { slot, .. }
            | Gate::PauliRotation { slot, .. } => Some(*slot),
            Gate::Cnot { .. } => None,
        }
    }

    /// Qubits the gate acts on non-trivially.
    pub fn wires(&self) -> Vec<usize> {
        match self {
            Gate::RotY { wire, .. } | Gate::RotZ { wire, .. } => vec![*wire],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::SingleExcitation { wires, .. } => wires.to_vec(),
            Gate::DoubleExcitation { wires, .. } => wires.to_vec(),
            Gate::PauliRotation { word, .. } => {
                let support = word.x_mask() | word.z_mask();
                (0..word.n_qubits()).filter(|q| support >> q & 1 == 1).collect()
            }
        }
    }

    /// Hermitian `A` with the gate equal to `exp(-i theta A)`, as a Pauli sum on
    /// `n_qubits`. `None` for parameterless gates.
    pub fn generator(&self, n_qubits: usize) -> Result<Option<PauliSum>> {
        let single = |q: usize, letter: char, c: f64| -> Result<PauliSum> {
            PauliSum::from_terms(n_qubits, [PauliTerm::new(c, PauliString::single(n_qubits, q, letter)?)])
        };
        let excitation = |created: &[usize], annihilated: &[usize], flavor: ExcitationFlavor| -> Result<PauliSum> {
            let (up, down): (fn(usize, usize) -> PauliPolynomial, fn(usize, usize) -> PauliPolynomial) = match flavor {
                ExcitationFlavor::Qubit => (PauliPolynomial::raising, PauliPolynomial::lowering),
                ExcitationFlavor::Fermionic => (PauliPolynomial::creation, PauliPolynomial::annihilation),
            };
            let mut t = PauliPolynomial::identity(n_qubits);
            for &q in created {
                t = t.mul(&up(n_qubits, q));
            }
            for &q in annihilated {
                t = t.mul(&down(n_qubits, q));
            }
            let mut anti = t.clone();
            anti.add_scaled(&t.adjoint(), Complex64::new(-1.0, 0.0));
            anti.scale(Complex64::new(0.0, 1.0)).into_hermitian(DEFAULT_DROP_TOL)
        };
        Ok(Some(match self {
            Gate::Cnot { .. } => return Ok(None),
            Gate::RotY { wire, .. } => single(*wire, 'Y', 0.5)?,
            Gate::RotZ { wire, .. } => single(*wire, 'Z', 0.5)?,
            Gate::SingleExcitation { wires, flavor, .. } => excitation(&wires[..1], &wires[1..], *flavor)?,
            Gate::DoubleExcitation { wires, flavor, .. } => excitation(&wires[..2], &wires[2..], *flavor)?,
            Gate::PauliRotation { word, coeff, .. } => {
                if word.n_qubits() != n_qubits {
                    return Err(Error::dim("Pauli rotation word size differs from the register"));
                }
                PauliSum::from_terms(n_qubits, [PauliTerm::new(*coeff, *word)])?
            }
        }))
    }

    pub(crate) fn validate(&self, n_qubits: usize, n_params: usize) -> Result<()> {
        let wires = self.wires();
        if let Some(&w) = wires.iter().find(|&&w| w >= n_qubits) {
            return Err(Error::dim(format!("gate {self:?} touches wire {w} of a {n_qubits}-qubit register")));
        }
        let mut sorted = wires.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != wires.len() {
            return Err(Error::dim(format!("gate {self:?} repeats a wire")));
        }
        if let Gate::PauliRotation { word, .. } = self {
            if word.n_qubits() != n_qubits {
                return Err(Error::dim(format!(
                    "Pauli rotation word on {} qubits in a {n_qubits}-qubit circuit",
                    word.n_qubits()
                )));
            }
        }
        if let Some(s) = self.slot() {
            if s >= n_params {
                return Err(Error::dim(format!("gate {self:?} reads slot {s} of {n_params}")));
            }
        }
        Ok(())
    }

    /// Applies the gate with an explicit angle; parameterless gates ignore it.
    pub(crate) fn apply_angle(&self, amps: &mut [Complex64], theta: f64) {
        match self {
            Gate::RotY { wire, .. } => {
                let (s, c) = (theta / 2.0).sin_cos();
                let bit = 1usize << wire;
                for b in 0..amps.len() {
                    if b & bit == 0 {
                        let (a0, a1) = (amps[b], amps[b | bit]);
                        amps[b] = a0 * c - a1 * s;
                        amps[b | bit] = a0 * s + a1 * c;
                    }
                }
            }
            Gate::RotZ { wire, .. } => {
                let bit = 1usize << wire;
                let down = Complex64::from_polar(1.0, -theta / 2.0);
                let up = down.conj();
                for (b, a) in amps.iter_mut().enumerate() {
                    *a *= if b & bit == 0 { down } else { up };
                }
            }
            Gate::Cnot { control, target } => {
                let (c, t) = (1usize << control, 1usize << target);
                for b in 0..amps.len() {
                    if b & c != 0 && b & t == 0 {
                        amps.swap(b, b | t);
                    }
                }
            }
            Gate::SingleExcitation { wires, flavor, .. } => {
                excitation_rotation(amps, &[wires[0]], &[wires[1]], *flavor, theta)
            }
            Gate::DoubleExcitation { wires, flavor, .. } => {
                excitation_rotation(amps, &wires[..2], &wires[2..], *flavor, theta)
            }
            Gate::PauliRotation { word, coeff, .. } => {
                let (s, c) = (theta * coeff).sin_cos();
                let minus_i_s = Complex64::new(0.0, -s);
                let x = word.x_mask() as usize;
                if x == 0 {
                    for (b, a) in amps.iter_mut().enumerate() {
                        let (phase, _) = word.apply_to_basis(b);
                        *a *= c + minus_i_s * phase.to_complex();
                    }
                } else {
                    for b in 0..amps.len() {
                        let b2 = b ^ x;
                        if b < b2 {
                            let (p1, _) = word.apply_to_basis(b);
                            let (p2, _) = word.apply_to_basis(b2);
                            let (a1, a2) = (amps[b], amps[b2]);
                            amps[b] = a1 * c + minus_i_s * p2.to_complex() * a2;
                            amps[b2] = a2 * c + minus_i_s * p1.to_complex() * a1;
                        }
                    }
                }
            }
        }
    }

    /// `A|psi>` where the gate is `exp(-i theta A)`. Parameterless gates have no generator.
    pub(crate) fn apply_generator(&self, amps: &[Complex64]) -> Option<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        match self {
            Gate::Cnot { .. } => return None,
            Gate::RotY { wire, .. } => {
                let bit = 1usize << wire;
                // Y/2: Y|0> = i|1>, Y|1> = -i|0>.
                for b in 0..amps.len() {
                    if b & bit == 0 {
                        out[b | bit] = Complex64::new(0.0, 0.5) * amps[b];
                        out[b] = Complex64::new(0.0, -0.5) * amps[b | bit];
                    }
                }
            }
            Gate::RotZ { wire, .. } => {
                let bit = 1usize << wire;
                for (b, a) in amps.iter().enumerate() {
                    out[b] = if b & bit == 0 { a * 0.5 } else { -a * 0.5 };
                }
            }
            Gate::SingleExcitation { wires, flavor, .. } => {
                excitation_generator(amps, &mut out, &[wires[0]], &[wires[1]], *flavor)
            }
            Gate::DoubleExcitation { wires, flavor, .. } => {
                excitation_generator(amps, &mut out, &wires[..2], &wires[2..], *flavor)
            }
            Gate::PauliRotation { word, coeff, .. } => {
                for (b, a) in amps.iter().enumerate() {
                    let (phase, t) = word.apply_to_basis(b);
                    out[t] = phase.to_complex() * a * coeff;
                }
            }
        }
        Some(out)
    }
}

/// Returns `gate(theta)|state>` with `theta = params[slot]`.
pub fn apply_gate(state: &StateVector, gate: &Gate, params: &[f64]) -> Result<StateVector> {
    gate.validate(state.n_qubits(), params.len())?;
    let theta = gate.slot().map_or(0.0, |s| params[s]);
    let mut out = state.clone();
    gate.apply_angle(out.amplitudes_mut(), theta);
    Ok(out)
}

fn mask(modes: &[usize]) -> usize {
    modes.iter().fold(0, |m, &q| m | 1 << q)
}

/// Sign picked up by `a^+_{created...} a_{annihilated...}` acting on an occupation
/// bitstring, applying the rightmost operator first.
fn ladder_sign(mut b: usize, created: &[usize], annihilated: &[usize]) -> f64 {
    let mut parity = 0u32;
    for &q in annihilated.iter().rev() {
        parity += (b & ((1usize << q) - 1)).count_ones();
        b &= !(1usize << q);
    }
    for &q in created.iter().rev() {
        parity += (b & ((1usize << q) - 1)).count_ones();
        b |= 1usize << q;
    }
    if parity % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Visits every `(from, to, sign)` pair connected by `a^+_created a_annihilated`.
fn for_each_pair(
    dim: usize,
    created: &[usize],
    annihilated: &[usize],
    flavor: ExcitationFlavor,
    mut f: impl FnMut(usize, usize, f64),
) {
    let cm = mask(created);
    let am = mask(annihilated);
    let all = cm | am;
    for b in 0..dim {
        if b & all == am {
            let sign = match flavor {
                ExcitationFlavor::Qubit => 1.0,
                ExcitationFlavor::Fermionic => ladder_sign(b, created, annihilated),
            };
            f(b, b ^ all, sign);
        }
    }
}

fn excitation_rotation(
    amps: &mut [Complex64],
    created: &[usize],
    annihilated: &[usize],
    flavor: ExcitationFlavor,
    theta: f64,
) {
    let (s, c) = theta.sin_cos();
    for_each_pair(amps.len(), created, annihilated, flavor, |from, to, sign| {
        let (a, t) = (amps[from], amps[to]);
        amps[from] = a * c - t * (s * sign);
        amps[to] = a * (s * sign) + t * c;
    });
}

// The rotation is exp(theta T) with T anti-Hermitian, so A = iT.
fn excitation_generator(
    amps: &[Complex64],
    out: &mut [Complex64],
    created: &[usize],
    annihilated: &[usize],
    flavor: ExcitationFlavor,
) {
    let i = Complex64::new(0.0, 1.0);
    for_each_pair(amps.len(), created, annihilated, flavor, |from, to, sign| {
        out[to] = i * sign * amps[from];
        out[from] = -i * sign * amps[to];
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fermionic_single_sign_counts_modes_between() {
        // a_3^+ a_0 on |0110 + bit0>: two occupied modes in between.
        assert_eq!(ladder_sign(0b0111, &[3], &[0]), 1.0);
        assert_eq!(ladder_sign(0b0011, &[3], &[0]), -1.0);
        assert_eq!(ladder_sign(0b0001, &[3], &[0]), 1.0);
    }

    #[test]
    fn cnot_truth_table() {
        let g = Gate::Cnot { control: 0, target: 1 };
        for (input, output) in [(0, 0), (1, 3), (2, 2), (3, 1)] {
            let s = StateVector::basis(2, input).unwrap();
            let out = apply_gate(&s, &g, &[]).unwrap();
            assert_eq!(out.amplitudes()[output], Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn single_excitation_moves_population() {
        let g = Gate::SingleExcitation { wires: [1, 0], slot: 0, flavor: ExcitationFlavor::Qubit };
        let s = StateVector::basis(2, 0b01).unwrap();
        let out = apply_gate(&s, &g, &[std::f64::consts::FRAC_PI_2]).unwrap();
        assert!((out.amplitudes()[0b10] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn validation() {
        let s = StateVector::zero(2);
        let bad_wire = Gate::RotY { wire: 2, slot: 0 };
        assert!(apply_gate(&s, &bad_wire, &[0.0]).is_err());
        let bad_slot = Gate::RotY { wire: 0, slot: 1 };
        assert!(apply_gate(&s, &bad_slot, &[0.0]).is_err());
        let repeated = Gate::Cnot { control: 1, target: 1 };
        assert!(apply_gate(&s, &repeated, &[]).is_err());
    }
}
