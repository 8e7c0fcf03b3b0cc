#!/usr/bin/env python3
"""Generate the STO-3G FCIDUMP fixtures and their metadata sidecars.

Run once; outputs are committed under crates/core/fixtures/. Requires pyscf.

    python3 tools/make_fixtures.py crates/core/fixtures
"""
import os
import sys

import numpy as np
import pyscf
from pyscf import ao2mo, fci, gto, scf
from pyscf.tools import fcidump

CLEAN_TOL = 1e-11
N_ROOTS = 6


def geometry(molecule, r):
    if molecule == "h2":
        return f"H 0 0 0; H 0 0 {r}"
    if molecule == "lih":
        return f"Li 0 0 0; H 0 0 {r}"
    if molecule == "h4":
        return "; ".join(f"H 0 0 {i * r}" for i in range(4))
    raise ValueError(molecule)


def build(molecule, r, out_dir):
    mol = gto.M(atom=geometry(molecule, r), basis="sto-3g", unit="Angstrom",
                symmetry=True, verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    if not mf.converged:
        raise RuntimeError(f"RHF did not converge for {molecule} at {r}")
    c = mf.mo_coeff
    norb = c.shape[1]
    h1 = c.T @ mf.get_hcore() @ c
    eri = ao2mo.restore(1, ao2mo.full(mol, c), norb)
    h1[np.abs(h1) < CLEAN_TOL] = 0.0
    eri[np.abs(eri) < CLEAN_TOL] = 0.0
    h1 = 0.5 * (h1 + h1.T)
    ecore = mol.energy_nuc()
    nelec = mol.nelectron

    solver = fci.direct_spin1.FCI()
    solver.conv_tol = 1e-13
    solver.nroots = N_ROOTS
    energies, vecs = solver.kernel(h1, eri, norb, (nelec // 2, nelec // 2), ecore=ecore)
    s2 = [fci.spin_op.spin_square0(v, norb, (nelec // 2, nelec // 2))[0] for v in vecs]

    tag = f"{molecule}_{r:.3f}"
    path = os.path.join(out_dir, f"{tag}.fcidump")
    orbsym = getattr(mf.mo_coeff, "orbsym", None)
    fcidump.from_integrals(path, h1, ao2mo.restore(8, eri, norb), norb, nelec,
                           nuc=ecore, ms=0, orbsym=orbsym, tol=1e-15,
                           float_format=" %.17e")
    with open(os.path.join(out_dir, f"{tag}.toml"), "w") as fh:
        fh.write(f'molecule = "{molecule}"\n')
        fh.write(f"bond_length_angstrom = {r}\n")
        fh.write(f"n_orbitals = {norb}\n")
        fh.write(f"n_electrons = {nelec}\n")
        fh.write(f"reference_ground_ha = {energies[0]:.15f}\n")
        fh.write("reference_excited_ha = [" + ", ".join(f"{e:.15f}" for e in energies[1:]) + "]\n")
        fh.write("reference_s2 = [" + ", ".join(f"{s:.6f}" for s in s2) + "]\n")
        fh.write(f"hf_energy_ha = {mf.e_tot:.15f}\n")
        fh.write('basis = "sto-3g"\n')
        fh.write('generator_tool = "pyscf"\n')
        fh.write(f'generator_version = "{pyscf.__version__}"\n')
    print(tag, energies[:4], [round(s, 3) for s in s2[:4]])


def main():
    out_dir = sys.argv[1] if len(sys.argv) > 1 else "crates/core/fixtures"
    os.makedirs(out_dir, exist_ok=True)
    build("h2", 0.735, out_dir)
    for r in (0.8, 1.2, 1.6, 2.0):
        build("h4", r, out_dir)
    for i in range(1, 10):
        build("lih", round(0.4 * i, 1), out_dir)


if __name__ == "__main__":
    main()
