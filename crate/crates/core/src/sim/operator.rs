use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::state::{inner_slices, real_part};
use super::StateVector;
use crate::pauli::PauliSum;
use crate::Result;

const PARALLEL_MIN_DIM: usize = 1 << 12;

/// A Pauli sum grouped by X mask, with the per-basis-state diagonal factor of each
/// group precomputed. Applying it costs one pass per distinct X mask.
#[derive(Clone, Debug)]
pub struct CompiledOperator {
    n_qubits: usize,
    groups: Vec<(usize, Vec<Complex64>)>,
}

impl CompiledOperator {
    pub fn new(h: &PauliSum) -> Self {
        let n = h.n_qubits();
        let dim = 1usize << n;
        let mut groups: BTreeMap<u64, Vec<Complex64>> = BTreeMap::new();
        for t in h.terms() {
            let diag = groups
                .entry(t.string.x_mask())
                .or_insert_with(|| vec![Complex64::new(0.0, 0.0); dim]);
            for (b, d) in diag.iter_mut().enumerate() {
                let (phase, _) = t.string.apply_to_basis(b);
                *d += phase.to_complex() * t.coeff;
            }
        }
        CompiledOperator {
            n_qubits: n,
            groups: groups.into_iter().map(|(x, d)| (x as usize, d)).collect(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// `H|psi>`.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        state.check_qubits(self.n_qubits)?;
        let amps = state.amplitudes();
        let dim = amps.len();
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        let row = |t: usize| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, diag) in &self.groups {
                let b = t ^ x;
                acc += diag[b] * amps[b];
            }
            acc
        };
        if dim >= PARALLEL_MIN_DIM {
            out.par_iter_mut().enumerate().for_each(|(t, o)| *o = row(t));
        } else {
            out.iter_mut().enumerate().for_each(|(t, o)| *o = row(t));
        }
        StateVector::from_amplitudes(self.n_qubits, out)
    }

    /// `<psi|H|psi>` together with `H|psi>`.
    pub fn expectation_and_apply(&self, state: &StateVector) -> Result<(f64, StateVector)> {
        let h_psi = self.apply(state)?;
        let e = real_part(inner_slices(state.amplitudes(), h_psi.amplitudes()))?;
        Ok((e, h_psi))
    }

    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        Ok(self.expectation_and_apply(state)?.0)
    }
}
