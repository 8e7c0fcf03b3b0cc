mod common;

use vqex::ansatz::qccsd;
use vqex::drivers::{vqe, RunOptions, StoppingRule};
use vqex::exact::dense_spectrum;
use vqex::fermion::{hartree_fock_index, ActiveSpace, MolecularFixture};
use vqex::optim::OptimizerConfig;
use vqex::pauli::{commutes, PauliSum};
use vqex::sim::{expectation, run, InitialState};
use vqex::tapering::{find_symmetries, sector_of, taper, taper_basis_index, taper_circuit, Z2Symmetries};

fn all_sectors(k: usize) -> impl Iterator<Item = Vec<i8>> {
    (0..1usize << k).map(move |m| (0..k).map(|i| if m >> i & 1 == 1 { -1 } else { 1 }).collect())
}

fn contained(sub: &[f64], full: &[f64], tol: f64) -> bool {
    sub.iter().all(|e| full.iter().any(|f| (e - f).abs() <= tol))
}

fn active(f: &MolecularFixture) -> PauliSum {
    let space = if f.metadata.molecule == "lih" { ActiveSpace::frozen_core(1) } else { ActiveSpace::default() };
    f.hamiltonian(&space).unwrap()
}

fn check_generators(h: &PauliSum, syms: &Z2Symmetries) {
    for (i, g) in syms.generators.iter().enumerate() {
        assert!(g.is_z_type());
        for t in h.terms() {
            assert!(commutes(g, &t.string).unwrap());
        }
        for other in &syms.generators[i + 1..] {
            assert!(commutes(g, other).unwrap());
        }
        for (j, &q) in syms.chosen_qubits.iter().enumerate() {
            assert_eq!(g.z_mask() >> q & 1 == 1, i == j);
        }
    }
}

#[test]
fn lih_active_space_tapers_to_six_qubits() {
    let h = active(&common::lih(1.6));
    assert_eq!(h.n_qubits(), 10);
    let syms = find_symmetries(&h).unwrap();
    assert_eq!(syms.len(), 4);
    assert_eq!(syms.reduced_qubits(), 6);
    check_generators(&h, &syms);
}

#[test]
fn tapered_spectra_are_contained_in_every_sector() {
    for f in [common::h2(), common::h4(0.8), common::h4(2.0), common::lih(0.8), common::lih(2.4)] {
        let h = active(&f);
        let full = dense_spectrum(&h).unwrap();
        let syms = find_symmetries(&h).unwrap();
        check_generators(&h, &syms);
        for sector in all_sectors(syms.len()) {
            let reduced = taper(&h, &syms, &sector).unwrap().reduced;
            assert_eq!(reduced.n_qubits(), syms.reduced_qubits());
            let spec = dense_spectrum(&reduced).unwrap();
            assert!(contained(&spec, &full, 1e-9), "{} sector {sector:?}", f.path.display());
        }
    }
}

#[test]
fn union_over_sectors_is_the_full_spectrum() {
    for f in [common::h2(), common::h4(1.2), common::h4(1.6)] {
        let h = active(&f);
        let full = dense_spectrum(&h).unwrap();
        let syms = find_symmetries(&h).unwrap();
        let mut union: Vec<f64> = all_sectors(syms.len())
            .flat_map(|s| dense_spectrum(&taper(&h, &syms, &s).unwrap().reduced).unwrap())
            .collect();
        union.sort_by(f64::total_cmp);
        assert_eq!(union.len(), full.len());
        for (a, b) in union.iter().zip(&full) {
            assert!((a - b).abs() <= 1e-9);
        }
    }
}

#[test]
fn tapered_circuit_reproduces_symmetric_states() {
    let h = active(&common::lih(1.6));
    let syms = find_symmetries(&h).unwrap();
    let hf = hartree_fock_index(2, 10);
    let sector = sector_of(hf, &syms).unwrap();
    let reduced = taper(&h, &syms, &sector).unwrap().reduced;
    let full = qccsd(10, 2, 2, true).unwrap();
    let tapered = taper_circuit(&full, &syms, &sector).unwrap();
    assert_eq!(full.n_params(), 48);
    assert_eq!(tapered.circuit.n_params(), 20);
    let small: Vec<f64> = (0..20).map(|k| 0.3 * ((k as f64) * 1.7).cos()).collect();
    let mut big = vec![0.0; full.n_params()];
    for (k, &src) in tapered.source_slots.iter().enumerate() {
        big[src] = small[k];
    }
    let e_full = expectation(&run(&full, &big, &InitialState::Basis(hf)).unwrap(), &h).unwrap();
    let psi = run(&tapered.circuit, &small, &InitialState::Basis(taper_basis_index(hf, &syms))).unwrap();
    let e_tapered = expectation(&psi, &reduced).unwrap();
    assert!((e_full - e_tapered).abs() < 1e-10);
}

#[test]
fn tapered_vqe_matches_untapered_on_h2() {
    let f = common::h2();
    let h = active(&f);
    let syms = find_symmetries(&h).unwrap();
    let hf = hartree_fock_index(2, 4);
    let sector = sector_of(hf, &syms).unwrap();
    let reduced = taper(&h, &syms, &sector).unwrap().reduced;
    let circuit = qccsd(4, 2, 1, true).unwrap();
    let tc = taper_circuit(&circuit, &syms, &sector).unwrap().circuit;
    let stop = StoppingRule::new(1e-10, 400);
    let cfg = OptimizerConfig::default();
    let full = vqe(&h, &circuit, &InitialState::Basis(hf), &cfg, &stop, &RunOptions::default()).unwrap();
    let small = vqe(
        &reduced,
        &tc,
        &InitialState::Basis(taper_basis_index(hf, &syms)),
        &cfg,
        &stop,
        &RunOptions::default(),
    )
    .unwrap();
    assert!((full.energies[0] - small.energies[0]).abs() <= 1e-6);
    assert!((small.energies[0] - f.metadata.reference_ground_ha).abs() <= 1e-6);
}
