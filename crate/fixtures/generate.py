#!/usr/bin/env python3
"""Regenerate the FCIDUMP fixtures (STO-3G, RHF/ROHF orbitals) with PySCF.

Usage: python3 fixtures/generate.py [outdir]

Each fixture gets a sidecar `<name>.meta.json` describing the geometry and
orbital set, since the integrals depend on both.
"""
import json
import math
import os
import sys

from pyscf import gto, lo, scf
from pyscf.tools import fcidump


def pyramid(center, ligand, r, angle_deg):
    # three ligands on a C3v pyramid with the given ligand-centre-ligand angle
    c = math.cos(math.radians(angle_deg))
    # cos(angle) = sin^2(t) cos(120) + cos^2(t)  ->  solve for t
    cos2 = (2.0 * c + 1.0) / 3.0
    t = math.acos(math.sqrt(cos2))
    atoms = [f"{center} 0 0 0"]
    for k in range(3):
        phi = 2.0 * math.pi * k / 3.0
        atoms.append(
            f"{ligand} {r * math.sin(t) * math.cos(phi):.12f} "
            f"{r * math.sin(t) * math.sin(phi):.12f} {r * math.cos(t):.12f}"
        )
    return "; ".join(atoms)


def bent(center, ligand, r, angle_deg):
    a = math.radians(angle_deg) / 2.0
    return (
        f"{center} 0 0 0; {ligand} {r * math.sin(a):.12f} {r * math.cos(a):.12f} 0; "
        f"{ligand} {-r * math.sin(a):.12f} {r * math.cos(a):.12f} 0"
    )


MOLECULES = {
    "h2": ("H 0 0 0; H 0 0 1.0", "R(H-H) = 1.0 A"),
    "lih": ("Li 0 0 0; H 0 0 1.0", "R(Li-H) = 1.0 A"),
    "beh2": ("H 0 0 -1.0; Be 0 0 0; H 0 0 1.0", "R(Be-H) = 1.0 A, collinear"),
    "h2o": (bent("O", "H", 1.0, 107.6), "R(O-H) = 1.0 A, HOH = 107.6 deg"),
    "nh3": (pyramid("N", "H", 1.0, 107.0), "R(N-H) = 1.0 A, HNH = 107 deg"),
}


def run_scf(mol):
    mf = scf.RHF(mol) if mol.spin == 0 else scf.ROHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    assert mf.converged, "SCF did not converge"
    return mf


def write(outdir, name, mol, mf, mo, orbitals, geometry):
    path = os.path.join(outdir, f"{name}.fcidump")
    fcidump.from_mo(mol, path, mo, tol=1e-15)
    meta = {
        "name": name,
        "basis": "sto-3g",
        "geometry": geometry,
        "atoms": mol.atom,
        "orbitals": orbitals,
        "n_orbitals": int(mo.shape[1]),
        "n_electrons": int(mol.nelectron),
        "scf_energy": float(mf.e_tot),
        "generator": "pyscf " + __import__("pyscf").__version__,
    }
    with open(os.path.join(outdir, f"{name}.meta.json"), "w") as f:
        json.dump(meta, f, indent=2)
        f.write("\n")


def boys(mol, mf):
    mo = mf.mo_coeff.copy()
    nocc = int((mf.mo_occ > 0).sum())
    mo[:, :nocc] = lo.Boys(mol, mo[:, :nocc]).kernel()
    if mo.shape[1] > nocc:
        mo[:, nocc:] = lo.Boys(mol, mo[:, nocc:]).kernel()
    return mo


def main():
    outdir = sys.argv[1] if len(sys.argv) > 1 else os.path.dirname(os.path.abspath(__file__))
    for name, (atom, geometry) in MOLECULES.items():
        mol = gto.M(atom=atom, basis="sto-3g", unit="Angstrom", verbose=0)
        mf = run_scf(mol)
        write(outdir, name, mol, mf, mf.mo_coeff, "canonical", geometry)

    chains = os.path.join(outdir, "hchain")
    os.makedirs(chains, exist_ok=True)
    for n in range(2, 11):
        atom = "; ".join(f"H 0 0 {1.4 * i:.6f}" for i in range(n))
        mol = gto.M(atom=atom, basis="sto-3g", unit="Angstrom", spin=n % 2, verbose=0)
        mf = run_scf(mol)
        geometry = f"linear H{n}, spacing 1.4 A"
        write(chains, f"h{n}_cmo", mol, mf, mf.mo_coeff, "canonical", geometry)
        write(chains, f"h{n}_fb", mol, mf, boys(mol, mf), "foster-boys", geometry)


if __name__ == "__main__":
    main()
