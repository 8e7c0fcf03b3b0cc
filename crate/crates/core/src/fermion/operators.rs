use num_complex::Complex64;

use crate::pauli::{PauliPolynomial, PauliString, PauliSum, PauliTerm, DEFAULT_DROP_TOL};
use crate::{Error, Result};

/// `N = sum_j (I - Z_j)/2`.
pub fn number_operator(n_qubits: usize) -> PauliSum {
    let mut terms = vec![PauliTerm::new(0.5 * n_qubits as f64, PauliString::identity(n_qubits))];
    for j in 0..n_qubits {
        terms.push(PauliTerm::new(-0.5, PauliString::z_type(n_qubits, 1 << j).unwrap()));
    }
    PauliSum::from_terms(n_qubits, terms).expect("valid terms")
}

/// `S_z = 1/2 sum_p (n_{2p} - n_{2p+1})`.
pub fn sz_operator(n_qubits: usize) -> Result<PauliSum> {
    check_even(n_qubits)?;
    let terms = (0..n_qubits).map(|j| {
        // (I - Z_j)/2 * (+-1/2); identity parts cancel between the two spins.
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        PauliTerm::new(-0.25 * sign, PauliString::z_type(n_qubits, 1 << j).unwrap())
    });
    PauliSum::from_terms(n_qubits, terms)
}

/// Total spin `S^2 = S_z^2 + (S+ S- + S- S+)/2` with `S+ = sum_p a+_{2p} a_{2p+1}`.
pub fn s2_operator(n_qubits: usize) -> Result<PauliSum> {
    check_even(n_qubits)?;
    let mut s_plus = PauliPolynomial::zero(n_qubits);
    for p in 0..n_qubits / 2 {
        let op = PauliPolynomial::creation(n_qubits, 2 * p).mul(&PauliPolynomial::annihilation(n_qubits, 2 * p + 1));
        s_plus.add_assign(&op);
    }
    let s_minus = s_plus.adjoint();
    let sz = PauliPolynomial::from(&sz_operator(n_qubits)?);
    let mut s2 = sz.mul(&sz);
    s2.add_scaled(&s_plus.mul(&s_minus), Complex64::new(0.5, 0.0));
    s2.add_scaled(&s_minus.mul(&s_plus), Complex64::new(0.5, 0.0));
    s2.into_hermitian(DEFAULT_DROP_TOL)
}

/// `weight * (S_z - m_z)^2`.
pub fn spin_penalty_operator(n_qubits: usize, m_z: f64, weight: f64) -> Result<PauliSum> {
    Ok(crate::pauli::fold(&sz_operator(n_qubits)?, m_z).scale(weight))
}

/// Basis index with the lowest `n_electrons` spin orbitals occupied.
pub fn hartree_fock_index(n_electrons: usize, n_qubits: usize) -> usize {
    assert!(n_electrons <= n_qubits, "more electrons than spin orbitals");
    (1usize << n_electrons) - 1
}

fn check_even(n_qubits: usize) -> Result<()> {
    if n_qubits % 2 != 0 {
        return Err(Error::Convention(format!(
            "spin operators need an even qubit count (interleaved up/down), got {n_qubits}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hf_indices() {
        assert_eq!(hartree_fock_index(2, 4), 0b0011);
        assert_eq!(hartree_fock_index(0, 6), 0);
        assert_eq!(hartree_fock_index(4, 8), 0b1111);
    }

    #[test]
    fn odd_qubits_rejected() {
        assert!(matches!(sz_operator(3), Err(Error::Convention(_))));
        assert!(matches!(s2_operator(5), Err(Error::Convention(_))));
    }

    #[test]
    fn sz_coefficients() {
        let sz = sz_operator(2).unwrap();
        assert_eq!(sz.coeff(&"ZI".parse().unwrap()), -0.25);
        assert_eq!(sz.coeff(&"IZ".parse().unwrap()), 0.25);
        assert_eq!(sz.coeff(&PauliString::identity(2)), 0.0);
    }
}
