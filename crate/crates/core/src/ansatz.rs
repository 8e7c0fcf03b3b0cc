//! Parameterized circuits: spin-restricted QCCSD, trotterized UCCSD and the
//! strongly entangled hardware-style ansatz, plus gate-count bookkeeping.

use serde::{Deserialize, Serialize};

use crate::fermion::twice_spin;
use crate::pauli::PauliString;
use crate::sim::{Circuit, CircuitBuilder, ExcitationFlavor, Gate};
use crate::{Error, Result};

/// Particle move from occupied to unoccupied spin orbitals of the reference state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Excitation {
    /// Ascending.
    pub occupied: Vec<usize>,
    /// Ascending.
    pub virtuals: Vec<usize>,
    /// Change of `2 S_z`.
    pub delta_twice_sz: i32,
}

impl Excitation {
    fn new(occupied: Vec<usize>, virtuals: Vec<usize>) -> Self {
        let spin = |v: &[usize]| v.iter().map(|&j| twice_spin(j)).sum::<i32>();
        let delta_twice_sz = spin(&virtuals) - spin(&occupied);
        Excitation { occupied, virtuals, delta_twice_sz }
    }

    /// Gate wires in operator order: created modes, then annihilated modes.
    pub fn wires(&self) -> Vec<usize> {
        let mut w = self.virtuals.clone();
        w.extend(self.occupied.iter().rev());
        w
    }

    pub fn gate(&self, slot: usize, flavor: ExcitationFlavor) -> Gate {
        match (self.occupied.as_slice(), self.virtuals.as_slice()) {
            (&[k], &[i]) => Gate::SingleExcitation { wires: [i, k], slot, flavor },
            (&[o1, o2], &[v1, v2]) => Gate::DoubleExcitation { wires: [v1, v2, o2, o1], slot, flavor },
            _ => unreachable!("excitations are singles or doubles"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExcitationList {
    pub singles: Vec<Excitation>,
    pub doubles: Vec<Excitation>,
}

impl ExcitationList {
    pub fn len(&self) -> usize {
        self.singles.len() + self.doubles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Doubles first, then singles: the order gates appear within one layer.
    pub fn layer_order(&self) -> impl Iterator<Item = &Excitation> {
        self.doubles.iter().chain(&self.singles)
    }
}

/// Singles and doubles out of the Hartree-Fock reference, sorted by
/// (occupied, virtual) index tuples. `spin_restricted` keeps only `dS_z = 0`.
pub fn build_excitations(n_qubits: usize, n_electrons: usize, spin_restricted: bool) -> Result<ExcitationList> {
    if n_electrons > n_qubits {
        return Err(Error::ActiveSpace(format!("{n_electrons} electrons in {n_qubits} spin orbitals")));
    }
    let occ: Vec<usize> = (0..n_electrons).collect();
    let virt: Vec<usize> = (n_electrons..n_qubits).collect();
    let keep = |e: &Excitation| !spin_restricted || e.delta_twice_sz == 0;
    let mut list = ExcitationList::default();
    for &k in &occ {
        for &i in &virt {
            let e = Excitation::new(vec![k], vec![i]);
            if keep(&e) {
                list.singles.push(e);
            }
        }
    }
    for (a, &o1) in occ.iter().enumerate() {
        for &o2 in &occ[a + 1..] {
            for (b, &v1) in virt.iter().enumerate() {
                for &v2 in &virt[b + 1..] {
                    let e = Excitation::new(vec![o1, o2], vec![v1, v2]);
                    if keep(&e) {
                        list.doubles.push(e);
                    }
                }
            }
        }
    }
    Ok(list)
}

fn excitation_circuit(
    n_qubits: usize,
    n_electrons: usize,
    layers: usize,
    spin_restricted: bool,
    flavor: ExcitationFlavor,
) -> Result<Circuit> {
    check_layers(layers)?;
    let list = build_excitations(n_qubits, n_electrons, spin_restricted)?;
    let mut b = CircuitBuilder::new(n_qubits);
    for _ in 0..layers {
        b.layer();
        for e in list.layer_order() {
            let slot = b.slot();
            b.push(e.gate(slot, flavor));
        }
    }
    b.build()
}

fn check_layers(layers: usize) -> Result<()> {
    if layers == 0 {
        return Err(Error::Config { field: "layers".into(), message: "must be at least 1".into() });
    }
    Ok(())
}

/// Qubit coupled-cluster singles and doubles: parity-free excitation rotations.
pub fn qccsd(n_qubits: usize, n_electrons: usize, layers: usize, spin_restricted: bool) -> Result<Circuit> {
    excitation_circuit(n_qubits, n_electrons, layers, spin_restricted, ExcitationFlavor::Qubit)
}

/// First-order trotterized unitary coupled cluster with Jordan-Wigner parity signs.
pub fn uccsd(n_qubits: usize, n_electrons: usize, layers: usize, spin_restricted: bool) -> Result<Circuit> {
    excitation_circuit(n_qubits, n_electrons, layers, spin_restricted, ExcitationFlavor::Fermionic)
}

/// Rotations RZ RY RZ on every qubit followed by a CNOT ring `i -> i+1 mod n`.
pub fn strongly_entangled(n_qubits: usize, layers: usize) -> Result<Circuit> {
    check_layers(layers)?;
    if n_qubits < 2 {
        return Err(Error::dim("the strongly entangled ansatz needs at least 2 qubits"));
    }
    let mut b = CircuitBuilder::new(n_qubits);
    for _ in 0..layers {
        b.layer();
        for q in 0..n_qubits {
            let (s0, s1, s2) = (b.slot(), b.slot(), b.slot());
            b.push(Gate::RotZ { wire: q, slot: s0 });
            b.push(Gate::RotY { wire: q, slot: s1 });
            b.push(Gate::RotZ { wire: q, slot: s2 });
        }
        for q in 0..n_qubits {
            b.push(Gate::Cnot { control: q, target: (q + 1) % n_qubits });
        }
    }
    b.build()
}

/// Which ansatz family to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnsatzKind {
    Qccsd,
    Uccsd,
    Se,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub one_qubit_gates: usize,
    pub two_qubit_gates: usize,
    pub depth: usize,
    pub n_params: usize,
}

/// Elementary operation of the expanded circuit used for counting.
#[derive(Clone, Copy, Debug)]
enum Prim {
    One(usize),
    Two(usize, usize),
}

fn single_template(a: usize, b: usize) -> Vec<Prim> {
    use Prim::*;
    vec![One(a), One(b), One(a), One(b), Two(a, b), One(a), One(b), Two(a, b), One(a), One(b)]
}

// 13 CNOTs and 21 one-qubit gates.
fn double_template(w: [usize; 4]) -> Vec<Prim> {
    use Prim::*;
    let [a, b, c, d] = w;
    let mut t = vec![One(a), One(b), One(c), One(d)];
    for _ in 0..2 {
        t.extend([Two(a, b), Two(b, c), Two(c, d), One(d), Two(c, d), Two(b, c), Two(a, b)]);
        t.extend([One(a), One(b), One(c), One(d)]);
    }
    t.extend([Two(a, d), One(a), One(b), One(c), One(d), One(a), One(b), One(d)]);
    t
}

/// CNOT ladder computing the parity of `qubits` onto the last one, and its mirror.
fn parity_ladder(qubits: &[usize]) -> (Vec<Prim>, Vec<Prim>) {
    let up: Vec<Prim> = qubits.windows(2).map(|w| Prim::Two(w[0], w[1])).collect();
    let down = up.iter().rev().copied().collect();
    (up, down)
}

/// Qubits carrying the Jordan-Wigner string of an excitation on `wires`.
fn parity_qubits(wires: &[usize]) -> Vec<usize> {
    let pairs: Vec<(usize, usize)> = wires
        .chunks(2)
        .map(|p| (p[0].min(p[1]), p[0].max(p[1])))
        .collect();
    let lo = wires.iter().min().copied().unwrap_or(0);
    let hi = wires.iter().max().copied().unwrap_or(0);
    (lo + 1..hi)
        .filter(|q| !wires.contains(q))
        .filter(|&q| pairs.iter().filter(|&&(a, b)| a < q && q < b).count() % 2 == 1)
        .collect()
}

fn with_parity(core: Vec<Prim>, wires: &[usize], flavor: ExcitationFlavor) -> Vec<Prim> {
    if flavor == ExcitationFlavor::Qubit {
        return core;
    }
    let between = parity_qubits(wires);
    if between.is_empty() {
        return core;
    }
    // The parity is accumulated onto the lowest wire and uncomputed afterwards:
    // two CNOTs per intermediate qubit.
    let mut chain = between.clone();
    chain.push(*wires.iter().min().unwrap());
    let (up, down) = parity_ladder(&chain);
    up.into_iter().chain(core).chain(down).collect()
}

fn pauli_template(word: &PauliString) -> Vec<Prim> {
    let support: Vec<usize> = (0..word.n_qubits()).filter(|&q| word.letter(q) != 'I').collect();
    let basis: Vec<Prim> = support
        .iter()
        .filter(|&&q| matches!(word.letter(q), 'X' | 'Y'))
        .map(|&q| Prim::One(q))
        .collect();
    let (up, down) = parity_ladder(&support);
    let mut t = basis.clone();
    t.extend(up);
    if let Some(&last) = support.last() {
        t.push(Prim::One(last));
    }
    t.extend(down);
    t.extend(basis);
    t
}

fn expand(g: &Gate) -> Vec<Prim> {
    match g {
        Gate::RotY { wire, .. } | Gate::RotZ { wire, .. } => vec![Prim::One(*wire)],
        Gate::Cnot { control, target } => vec![Prim::Two(*control, *target)],
        Gate::SingleExcitation { wires, flavor, .. } => {
            with_parity(single_template(wires[0], wires[1]), wires, *flavor)
        }
        Gate::DoubleExcitation { wires, flavor, .. } => with_parity(double_template(*wires), wires, *flavor),
        Gate::PauliRotation { word, .. } => pauli_template(word),
    }
}

/// Gate counts after expanding excitations into CNOT + one-qubit templates
/// (single: 2 CNOT, 8 one-qubit; double: 13 CNOT, 21 one-qubit; fermionic parity
/// strings add 2 CNOT per intermediate qubit), with depth from greedy scheduling.
pub fn resources(c: &Circuit) -> ResourceReport {
    let mut ready = vec![0usize; c.n_qubits()];
    let mut r = ResourceReport { n_params: c.n_params(), ..Default::default() };
    for g in c.gates() {
        for p in expand(g) {
            match p {
                Prim::One(q) => {
                    r.one_qubit_gates += 1;
                    ready[q] += 1;
                }
                Prim::Two(a, b) => {
                    r.two_qubit_gates += 1;
                    let t = ready[a].max(ready[b]) + 1;
                    ready[a] = t;
                    ready[b] = t;
                }
            }
        }
    }
    r.depth = ready.into_iter().max().unwrap_or(0);
    r
}
