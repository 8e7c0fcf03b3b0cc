use num_complex::Complex64;

use crate::pauli::{PauliString, PauliSum};
use crate::{Error, Result};

/// Largest imaginary residue tolerated in an expectation value.
pub const IMAGINARY_TOL: f64 = 1e-10;

const MAX_SIM_QUBITS: usize = 26;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Self {
        StateVector::basis(n_qubits, 0).expect("index 0 is always valid")
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits > MAX_SIM_QUBITS {
            return Err(Error::Resource(format!("{n_qubits} qubits exceed the simulator limit")));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::dim(format!("basis index {index} out of range for {n_qubits} qubits")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// Wraps raw amplitudes; the caller is responsible for normalization.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1usize << n_qubits {
            return Err(Error::dim(format!(
                "{} amplitudes do not describe {n_qubits} qubits",
                amps.len()
            )));
        }
        Ok(StateVector { n_qubits, amps })
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_dim(other)?;
        Ok(inner_slices(&self.amps, &other.amps))
    }

    /// `P|self>`.
    pub fn apply_pauli(&self, p: &PauliString) -> Result<StateVector> {
        self.check_qubits(p.n_qubits())?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (b, a) in self.amps.iter().enumerate() {
            let (phase, t) = p.apply_to_basis(b);
            out[t] += phase.to_complex() * a;
        }
        Ok(StateVector { n_qubits: self.n_qubits, amps: out })
    }

    /// `H|self>`, applied term by term.
    pub fn apply_sum(&self, h: &PauliSum) -> Result<StateVector> {
        self.check_qubits(h.n_qubits())?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for t in h.terms() {
            let c = Complex64::new(t.coeff, 0.0);
            for (b, a) in self.amps.iter().enumerate() {
                let (phase, target) = t.string.apply_to_basis(b);
                out[target] += c * phase.to_complex() * a;
            }
        }
        Ok(StateVector { n_qubits: self.n_qubits, amps: out })
    }

    pub(crate) fn check_qubits(&self, n: usize) -> Result<()> {
        if n != self.n_qubits {
            return Err(Error::dim(format!("operator on {n} qubits, state on {}", self.n_qubits)));
        }
        Ok(())
    }

    fn check_dim(&self, other: &StateVector) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::dim(format!(
                "states on {} and {} qubits",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn inner_slices(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `sum_l eta_l <psi|P_l|psi>`, evaluated term by term without building `H|psi>`.
pub fn expectation(state: &StateVector, h: &PauliSum) -> Result<f64> {
    state.check_qubits(h.n_qubits())?;
    let amps = state.amplitudes();
    let mut total = Complex64::new(0.0, 0.0);
    for t in h.terms() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, a) in amps.iter().enumerate() {
            let (phase, target) = t.string.apply_to_basis(b);
            acc += amps[target].conj() * phase.to_complex() * a;
        }
        total += acc * t.coeff;
    }
    real_part(total)
}

/// `<H^2> - <H>^2`, computed as `|| (H - <H>) psi ||^2` from one application of `H`.
pub fn variance(state: &StateVector, h: &PauliSum) -> Result<f64> {
    let h_psi = state.apply_sum(h)?;
    let mean = real_part(state.inner(&h_psi)?)?;
    Ok(h_psi
        .amplitudes()
        .iter()
        .zip(state.amplitudes())
        .map(|(hp, p)| (hp - p * mean).norm_sqr())
        .sum())
}

/// `|<a|b>|^2`.
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

pub(crate) fn real_part(z: Complex64) -> Result<f64> {
    if z.im.abs() > IMAGINARY_TOL {
        return Err(Error::Consistency(format!(
            "expectation value has imaginary residue {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliTerm;

    fn z1() -> PauliSum {
        PauliSum::from_terms(1, [PauliTerm::new(1.0, "Z".parse().unwrap())]).unwrap()
    }

    fn plus() -> StateVector {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::from_amplitudes(1, vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)]).unwrap()
    }

    #[test]
    fn z_expectations() {
        assert_eq!(expectation(&StateVector::zero(1), &z1()).unwrap(), 1.0);
        assert!(expectation(&plus(), &z1()).unwrap().abs() < 1e-15);
    }

    #[test]
    fn z_variances() {
        assert!(variance(&StateVector::basis(1, 1).unwrap(), &z1()).unwrap().abs() < 1e-15);
        assert!((variance(&plus(), &z1()).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn overlaps() {
        let a = StateVector::zero(1);
        let b = StateVector::basis(1, 1).unwrap();
        assert_eq!(overlap(&a, &a).unwrap(), 1.0);
        assert_eq!(overlap(&a, &b).unwrap(), 0.0);
        assert!(overlap(&a, &StateVector::zero(2)).is_err());
    }

    #[test]
    fn imaginary_residue_is_an_error() {
        // <psi|Y|psi> on a state with complex amplitudes is real; force a non-Hermitian
        // evaluation through the raw helper instead.
        assert!(real_part(Complex64::new(0.0, 1e-6)).is_err());
        assert!(real_part(Complex64::new(1.0, 1e-12)).is_ok());
    }

    #[test]
    fn mismatched_operator() {
        let h = PauliSum::identity(2, 1.0);
        assert!(matches!(expectation(&StateVector::zero(1), &h), Err(Error::Dimension(_))));
    }
}
