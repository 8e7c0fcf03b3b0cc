mod common;

use approx::assert_abs_diff_eq;
use common::{max_abs, poly_matrix, sum_matrix};
use nalgebra::DMatrix;
use vqex::exact::{dense_spectrum, occupation_matrix, sector_eigenvalues, SectorSpec};
use vqex::fermion::{
    freeze, hartree_fock_index, jordan_wigner, number_operator, parse_fcidump, sz_operator, to_spin_orbitals,
    ActiveSpace,
};
use vqex::pauli::{PauliPolynomial, PauliString};
use vqex::sim::{expectation, StateVector};
use vqex::Complex64;

#[test]
fn canonical_anticommutation_at_four_modes() {
    let n = 4;
    let id = DMatrix::<Complex64>::identity(16, 16);
    for i in 0..n {
        let a_i = poly_matrix(&PauliPolynomial::annihilation(n, i));
        for j in 0..n {
            let a_j = poly_matrix(&PauliPolynomial::annihilation(n, j));
            let ad_j = poly_matrix(&PauliPolynomial::creation(n, j));
            assert!(max_abs(&(&a_i * &a_j + &a_j * &a_i)) <= 1e-12);
            let expected = if i == j { id.clone() } else { DMatrix::zeros(16, 16) };
            assert!(max_abs(&(&a_i * &ad_j + &ad_j * &a_i - expected)) <= 1e-12, "modes {i} {j}");
        }
    }
}

#[test]
fn creation_on_second_mode_expands_with_z_string() {
    let ad = PauliPolynomial::creation(2, 1);
    let zx: PauliString = "ZX".parse().unwrap();
    let zy: PauliString = "ZY".parse().unwrap();
    let mut expected = PauliPolynomial::term(zx, Complex64::new(0.5, 0.0));
    expected.add_term(zy, Complex64::new(0.0, -0.5));
    assert!(max_abs(&(poly_matrix(&ad) - poly_matrix(&expected))) < 1e-15);
}

#[test]
fn fixtures_match_occupation_basis_oracle() {
    for (f, active) in [
        (common::h2(), ActiveSpace::default()),
        (common::h4(1.2), ActiveSpace::default()),
        (common::lih(1.6), ActiveSpace::frozen_core(1)),
    ] {
        let s = f.integrals(&active).unwrap();
        let h = jordan_wigner(&s).unwrap();
        let oracle = occupation_matrix(&s).unwrap().map(|x| Complex64::new(x, 0.0));
        assert!(max_abs(&(sum_matrix(&h) - oracle)) <= 1e-10, "{}", f.path.display());
    }
}

#[test]
fn h2_hamiltonian_has_fifteen_terms_and_reference_energy() {
    let f = common::h2();
    let h = f.hamiltonian(&ActiveSpace::default()).unwrap();
    assert_eq!(h.len(), 15);
    let ground = dense_spectrum(&h).unwrap()[0];
    assert_abs_diff_eq!(ground, f.metadata.reference_ground_ha, epsilon = 1e-8);
}

#[test]
fn hamiltonians_conserve_particle_number_and_spin() {
    for f in [common::h2(), common::h4(0.8), common::h4(2.0)] {
        let h = sum_matrix(&f.hamiltonian(&ActiveSpace::default()).unwrap());
        let n = f.dump.norb * 2;
        for op in [number_operator(n), sz_operator(n).unwrap()] {
            let o = sum_matrix(&op);
            assert!(max_abs(&(&h * &o - &o * &h)) <= 1e-10);
        }
    }
}

#[test]
fn fcidump_round_trip_on_every_fixture() {
    let dir = common::fixture_path("");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "fcidump") {
            let f = vqex::fermion::read_fcidump(&path).unwrap();
            let again = parse_fcidump(&f.to_fcidump_string()).unwrap();
            assert_eq!(again, f, "{}", path.display());
            count += 1;
        }
    }
    assert_eq!(count, 14);
}

#[test]
fn empty_freeze_keeps_h4_spectrum() {
    let f = common::h4(1.6);
    let s = to_spin_orbitals(&f.dump);
    let frozen = freeze(&s, &ActiveSpace::default()).unwrap();
    let a = sector_eigenvalues(&jordan_wigner(&s).unwrap(), SectorSpec::new(4, 0.0)).unwrap();
    let b = sector_eigenvalues(&jordan_wigner(&frozen).unwrap(), SectorSpec::new(4, 0.0)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn frozen_core_preserves_low_spectrum() {
    for r in [0.8, 1.6, 2.4, 3.2] {
        let f = common::lih(r);
        let full = sector_eigenvalues(&f.hamiltonian(&ActiveSpace::default()).unwrap(), SectorSpec::new(4, 0.0)).unwrap();
        let act =
            sector_eigenvalues(&f.hamiltonian(&ActiveSpace::frozen_core(1)).unwrap(), SectorSpec::new(2, 0.0)).unwrap();
        for k in 0..3 {
            assert!(((act[k] - full[k]) / full[k]).abs() < 1e-3, "r={r} k={k}");
        }
    }
}

#[test]
fn hartree_fock_state_quantum_numbers() {
    let b = hartree_fock_index(4, 8);
    let psi = StateVector::basis(8, b).unwrap();
    assert_abs_diff_eq!(expectation(&psi, &number_operator(8)).unwrap(), 4.0, epsilon = 1e-14);
    assert_abs_diff_eq!(expectation(&psi, &sz_operator(8).unwrap()).unwrap(), 0.0, epsilon = 1e-14);
    let s = StateVector::basis(4, 0b0101).unwrap();
    assert_abs_diff_eq!(expectation(&s, &sz_operator(4).unwrap()).unwrap(), 1.0, epsilon = 1e-14);
}

#[test]
fn lih_full_space_matches_reference() {
    let f = common::lih(1.6);
    let e = sector_eigenvalues(&f.hamiltonian(&ActiveSpace::default()).unwrap(), SectorSpec::new(4, 0.0)).unwrap();
    assert_abs_diff_eq!(e[0], f.metadata.reference_ground_ha, epsilon = 1e-8);
}
