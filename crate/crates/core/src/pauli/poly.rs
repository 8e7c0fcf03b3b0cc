use std::collections::HashMap;

use num_complex::Complex64;

use super::string::multiply_unchecked;
use super::{PauliString, PauliSum, PauliTerm};
use crate::{Error, Result};

/// Complex-weighted Pauli polynomial.
///
/// Used as scratch space when building operators from fermionic or qubit ladder
/// operators, where intermediate products are not Hermitian. Convert back with
/// [`PauliPolynomial::into_hermitian`].
#[derive(Clone, Debug, Default)]
pub struct PauliPolynomial {
    n_qubits: usize,
    terms: HashMap<PauliString, Complex64>,
}

impl PauliPolynomial {
    pub fn zero(n_qubits: usize) -> Self {
        PauliPolynomial { n_qubits, terms: HashMap::new() }
    }

    pub fn identity(n_qubits: usize) -> Self {
        PauliPolynomial::term(PauliString::identity(n_qubits), Complex64::new(1.0, 0.0))
    }

    pub fn term(string: PauliString, coeff: Complex64) -> Self {
        let mut terms = HashMap::new();
        terms.insert(string, coeff);
        PauliPolynomial { n_qubits: string.n_qubits(), terms }
    }

    /// Qubit lowering operator `(X + iY)/2 = |0><1|` on `qubit`.
    pub fn lowering(n_qubits: usize, qubit: usize) -> Self {
        let x = PauliString::new(n_qubits, 1 << qubit, 0).expect("qubit in range");
        let y = PauliString::new(n_qubits, 1 << qubit, 1 << qubit).expect("qubit in range");
        let mut p = PauliPolynomial::zero(n_qubits);
        p.add_term(x, Complex64::new(0.5, 0.0));
        p.add_term(y, Complex64::new(0.0, 0.5));
        p
    }

    /// Qubit raising operator `(X - iY)/2 = |1><0|` on `qubit`.
    pub fn raising(n_qubits: usize, qubit: usize) -> Self {
        PauliPolynomial::lowering(n_qubits, qubit).adjoint()
    }

    /// Jordan-Wigner annihilation operator `a_j = Z_0 ... Z_{j-1} (X_j + iY_j)/2`.
    pub fn annihilation(n_qubits: usize, mode: usize) -> Self {
        let tail = PauliString::z_type(n_qubits, (1u64 << mode) - 1).expect("mode in range");
        PauliPolynomial::term(tail, Complex64::new(1.0, 0.0)).mul(&PauliPolynomial::lowering(n_qubits, mode))
    }

    pub fn creation(n_qubits: usize, mode: usize) -> Self {
        PauliPolynomial::annihilation(n_qubits, mode).adjoint()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn add_term(&mut self, string: PauliString, coeff: Complex64) {
        *self.terms.entry(string).or_insert(Complex64::new(0.0, 0.0)) += coeff;
    }

    pub fn add_assign(&mut self, other: &PauliPolynomial) {
        for (s, c) in &other.terms {
            self.add_term(*s, *c);
        }
    }

    pub fn add_scaled(&mut self, other: &PauliPolynomial, factor: Complex64) {
        for (s, c) in &other.terms {
            self.add_term(*s, *c * factor);
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        PauliPolynomial {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(s, c)| (*s, *c * factor)).collect(),
        }
    }

    pub fn mul(&self, other: &PauliPolynomial) -> Self {
        let mut out = PauliPolynomial::zero(self.n_qubits);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let (phase, s) = multiply_unchecked(a, b);
                out.add_term(s, ca * cb * phase.to_complex());
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        PauliPolynomial {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(s, c)| (*s, c.conj())).collect(),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    /// Drops negligible terms. Returns an error if any surviving coefficient has an
    /// imaginary part above `tol`.
    pub fn into_hermitian(self, tol: f64) -> Result<PauliSum> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (s, c) in self.terms {
            if c.norm() < tol {
                continue;
            }
            if c.im.abs() > tol {
                return Err(Error::Consistency(format!(
                    "operator is not Hermitian: coefficient {c} on {s}"
                )));
            }
            terms.push(PauliTerm::new(c.re, s));
        }
        Ok(PauliSum::from_terms_unchecked(self.n_qubits, terms).normalize(tol))
    }
}

impl From<&PauliSum> for PauliPolynomial {
    fn from(s: &PauliSum) -> Self {
        let mut p = PauliPolynomial::zero(s.n_qubits());
        for t in s.terms() {
            p.add_term(t.string, Complex64::new(t.coeff, 0.0));
        }
        p
    }
}
