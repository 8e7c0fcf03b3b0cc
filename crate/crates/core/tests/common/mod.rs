#![allow(dead_code)]

use std::path::PathBuf;

use vqex::fermion::MolecularFixture;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> MolecularFixture {
    MolecularFixture::load(fixture_path(name)).expect("fixture loads")
}

pub fn lih(r: f64) -> MolecularFixture {
    fixture(&format!("lih_{r:.3}.fcidump"))
}

pub fn h4(r: f64) -> MolecularFixture {
    fixture(&format!("h4_{r:.3}.fcidump"))
}

pub fn h2() -> MolecularFixture {
    fixture("h2_0.735.fcidump")
}

use nalgebra::DMatrix;
use vqex::pauli::{PauliPolynomial, PauliString, PauliSum};
use vqex::Complex64;

/// Dense matrix of a Pauli string built entry by entry from the 2x2 tables.
pub fn pauli_matrix(p: &PauliString) -> DMatrix<Complex64> {
    let n = p.n_qubits();
    let dim = 1usize << n;
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let zero = Complex64::new(0.0, 0.0);
    let entry = |letter: char, row: usize, col: usize| -> Complex64 {
        match (letter, row, col) {
            ('I', r, c) => if r == c { one } else { zero },
            ('X', r, c) => if r != c { one } else { zero },
            ('Y', 0, 1) => -i,
            ('Y', 1, 0) => i,
            ('Y', _, _) => zero,
            ('Z', 0, 0) => one,
            ('Z', 1, 1) => -one,
            ('Z', _, _) => zero,
            _ => unreachable!(),
        }
    };
    // Each column has a single nonzero entry, in the row with the X/Y bits flipped.
    let mut m = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        let r = c ^ p.x_mask() as usize;
        m[(r, c)] = (0..n).fold(one, |acc, q| acc * entry(p.letter(q), (r >> q) & 1, (c >> q) & 1));
    }
    m
}

pub fn sum_matrix(h: &PauliSum) -> DMatrix<Complex64> {
    let dim = 1usize << h.n_qubits();
    h.terms().iter().fold(DMatrix::zeros(dim, dim), |acc, t| acc + pauli_matrix(&t.string) * Complex64::new(t.coeff, 0.0))
}

pub fn poly_matrix(p: &PauliPolynomial) -> DMatrix<Complex64> {
    let dim = 1usize << p.n_qubits();
    p.terms().fold(DMatrix::zeros(dim, dim), |acc, (s, c)| acc + pauli_matrix(s) * *c)
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
