use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::string::{commutes_unchecked, multiply_unchecked};
use super::{PauliPolynomial, PauliString};
use crate::{Error, Result};

/// Coefficients below this magnitude (Hartree) are dropped by normalization.
pub const DEFAULT_DROP_TOL: f64 = 1e-12;

/// Largest qubit count for which dense matrices are built.
pub const DEFAULT_ORACLE_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliTerm {
    pub coeff: f64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coeff: f64, string: PauliString) -> Self {
        PauliTerm { coeff, string }
    }
}

/// Real-weighted sum of Pauli strings, kept in canonical order with unique strings.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        PauliSum { n_qubits, terms: Vec::new() }
    }

    pub fn identity(n_qubits: usize, coeff: f64) -> Self {
        PauliSum::from_terms_unchecked(n_qubits, vec![PauliTerm::new(coeff, PauliString::identity(n_qubits))])
    }

    /// Builds a sum from arbitrary terms, merging duplicates with the default drop tolerance.
    pub fn from_terms(n_qubits: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        let terms: Vec<PauliTerm> = terms.into_iter().collect();
        for t in &terms {
            if t.string.n_qubits() != n_qubits {
                return Err(Error::dim(format!(
                    "term {} has {} qubits, sum has {n_qubits}",
                    t.string,
                    t.string.n_qubits()
                )));
            }
            if !t.coeff.is_finite() {
                return Err(Error::Numeric(format!("non-finite coefficient on {}", t.string)));
            }
        }
        Ok(PauliSum::from_terms_unchecked(n_qubits, terms))
    }

    pub(crate) fn from_terms_unchecked(n_qubits: usize, terms: Vec<PauliTerm>) -> Self {
        PauliSum { n_qubits, terms }.normalize(DEFAULT_DROP_TOL)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `string`, zero if absent.
    pub fn coeff(&self, string: &PauliString) -> f64 {
        self.terms
            .binary_search_by(|t| t.string.cmp(string))
            .map(|i| self.terms[i].coeff)
            .unwrap_or(0.0)
    }

    /// Merges like terms, drops coefficients below `drop_tol` and sorts canonically.
    pub fn normalize(&self, drop_tol: f64) -> PauliSum {
        let mut merged: HashMap<PauliString, f64> = HashMap::with_capacity(self.terms.len());
        for t in &self.terms {
            *merged.entry(t.string).or_insert(0.0) += t.coeff;
        }
        let mut terms: Vec<PauliTerm> = merged
            .into_iter()
            .filter(|(_, c)| c.abs() >= drop_tol)
            .map(|(s, c)| PauliTerm::new(c, s))
            .collect();
        terms.sort_by(|a, b| a.string.cmp(&b.string));
        PauliSum { n_qubits: self.n_qubits, terms }
    }

    pub fn scale(&self, factor: f64) -> PauliSum {
        let terms = self.terms.iter().map(|t| PauliTerm::new(t.coeff * factor, t.string)).collect();
        PauliSum::from_terms_unchecked(self.n_qubits, terms)
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let terms = self.terms.iter().chain(other.terms.iter()).copied().collect();
        Ok(PauliSum::from_terms_unchecked(self.n_qubits, terms))
    }

    pub fn sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.add(&other.scale(-1.0))
    }

    /// `self + c * I`.
    pub fn shift(&self, c: f64) -> PauliSum {
        let mut terms = self.terms.clone();
        terms.push(PauliTerm::new(c, PauliString::identity(self.n_qubits)));
        PauliSum::from_terms_unchecked(self.n_qubits, terms)
    }

    /// Operator product, which is in general not Hermitian.
    pub fn product(&self, other: &PauliSum) -> Result<PauliPolynomial> {
        self.check_same(other)?;
        Ok(PauliPolynomial::from(self).mul(&PauliPolynomial::from(other)))
    }

    /// `self * self`. Anticommuting pairs cancel, so the result is again a real sum.
    pub fn square(&self) -> PauliSum {
        let mut acc: HashMap<PauliString, f64> = HashMap::new();
        let id = PauliString::identity(self.n_qubits);
        for (i, a) in self.terms.iter().enumerate() {
            *acc.entry(id).or_insert(0.0) += a.coeff * a.coeff;
            for b in &self.terms[i + 1..] {
                if !commutes_unchecked(&a.string, &b.string) {
                    continue;
                }
                let (phase, s) = multiply_unchecked(&a.string, &b.string);
                let sign = phase.real_sign().expect("commuting Hermitian strings have a real product");
                *acc.entry(s).or_insert(0.0) += 2.0 * sign * a.coeff * b.coeff;
            }
        }
        let terms = acc.into_iter().map(|(s, c)| PauliTerm::new(c, s)).collect();
        PauliSum::from_terms_unchecked(self.n_qubits, terms)
    }

    /// Dense `2^n x 2^n` matrix built from Kronecker products of single-qubit matrices.
    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        self.to_matrix_capped(DEFAULT_ORACLE_CAP)
    }

    pub fn to_matrix_capped(&self, cap: usize) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > cap {
            return Err(Error::Resource(format!(
                "dense matrix for {} qubits exceeds cap of {cap}",
                self.n_qubits
            )));
        }
        let dim = 1usize << self.n_qubits;
        let mut out = DMatrix::<Complex64>::zeros(dim, dim);
        for t in &self.terms {
            out += string_matrix(&t.string) * Complex64::new(t.coeff, 0.0);
        }
        Ok(out)
    }

    /// One term per line, `<coeff> <letters>`, preceded by a `# qubits <n>` header.
    pub fn to_text(&self) -> String {
        let mut out = format!("# qubits {}\n", self.n_qubits);
        for t in &self.terms {
            let _ = writeln!(out, "{:.16e} {}", t.coeff, t.string);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<PauliSum> {
        let mut n_qubits: Option<usize> = None;
        let mut terms = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let mut words = rest.split_whitespace();
                if words.next() == Some("qubits") {
                    let n = words
                        .next()
                        .and_then(|w| w.parse().ok())
                        .ok_or_else(|| Error::Parse { line: lineno, message: "bad qubit header".into() })?;
                    n_qubits = Some(n);
                }
                continue;
            }
            let mut words = line.split_whitespace();
            let (Some(c), Some(letters), None) = (words.next(), words.next(), words.next()) else {
                return Err(Error::Parse { line: lineno, message: "expected `<coeff> <letters>`".into() });
            };
            let coeff: f64 = c
                .parse()
                .map_err(|_| Error::Parse { line: lineno, message: format!("bad coefficient {c:?}") })?;
            let string: PauliString = letters
                .parse()
                .map_err(|e: Error| Error::Parse { line: lineno, message: e.to_string() })?;
            match n_qubits {
                Some(n) if n != string.n_qubits() => {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("expected {n} letters, found {}", string.n_qubits()),
                    })
                }
                None => n_qubits = Some(string.n_qubits()),
                _ => {}
            }
            terms.push(PauliTerm::new(coeff, string));
        }
        let n = n_qubits.ok_or(Error::Parse { line: 0, message: "empty Pauli sum without header".into() })?;
        PauliSum::from_terms(n, terms)
    }

    fn check_same(&self, other: &PauliSum) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::dim(format!(
                "sums on {} and {} qubits",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(())
    }
}

/// Folded-spectrum operator `(h - omega)^2`, normalized.
pub fn fold(h: &PauliSum, omega: f64) -> PauliSum {
    h.shift(-omega).square()
}

fn letter_matrix(letter: char) -> DMatrix<Complex64> {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let data = match letter {
        'I' => [l, o, o, l],
        'X' => [o, l, l, o],
        'Y' => [o, i, -i, o],
        _ => [l, o, o, -l],
    };
    // column-major
    DMatrix::from_column_slice(2, 2, &data)
}

fn string_matrix(s: &PauliString) -> DMatrix<Complex64> {
    // Basis index bit j is qubit j, so the highest qubit is the leftmost Kronecker factor.
    let mut m = letter_matrix(s.letter(s.n_qubits() - 1));
    for q in (0..s.n_qubits() - 1).rev() {
        m = m.kronecker(&letter_matrix(s.letter(q)));
    }
    m
}
