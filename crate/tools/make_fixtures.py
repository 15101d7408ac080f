"""Regenerate the shipped FCIDUMP fixtures.

Hydrogen peroxide, STO-3G, RHF canonical orbitals, O-O bond stretched to
1.7 A. Active spaces (2/2), (6/4) and (10/6) are taken around the Fermi level
and folded into CASCI effective integrals. The core energy is then re-referenced
so that the lowest eigenvalue over the whole active Fock space sits near
0.8 Hartree, which keeps every eigenvalue positive for phase estimation.

Requires pyscf. Usage: python3 tools/make_fixtures.py [outdir]
"""
import math
import sys

import numpy as np
from pyscf import ao2mo, fci, gto, mcscf, scf
from pyscf.tools import fcidump

O_O = 1.7
GROUND_TARGET = 0.8


def h2o2(roo):
    d = roo / 2
    roh = 0.95
    bend = math.radians(80.0)
    dih = math.radians(112.0)
    o1 = np.array([0.0, 0.0, d])
    o2 = np.array([0.0, 0.0, -d])
    h1 = o1 + roh * np.array([math.sin(bend), 0.0, math.cos(bend)])
    h2 = o2 + roh * np.array([math.sin(bend) * math.cos(dih), math.sin(bend) * math.sin(dih), -math.cos(bend)])
    atoms = [("O", o1), ("O", o2), ("H", h1), ("H", h2)]
    return gto.M(atom=[(a, tuple(p)) for a, p in atoms], basis="sto-3g", verbose=0)


def fock_space_minimum(h1, h2, norb):
    best = 0.0  # vacuum
    for na in range(norb + 1):
        for nb in range(norb + 1):
            if na + nb == 0:
                continue
            e, _ = fci.direct_spin1.kernel(h1, h2, norb, (na, nb), ecore=0.0, nroots=1)
            best = min(best, float(np.min(e)))
    return best


def main(outdir):
    mol = h2o2(O_O)
    mf = scf.RHF(mol).run()
    for ne, no in [(2, 2), (6, 4), (10, 6)]:
        cas = mcscf.CASCI(mf, no, ne)
        h1, _ = cas.get_h1eff()
        h2 = ao2mo.restore(1, cas.get_h2eff(), no)
        core = round(GROUND_TARGET - fock_space_minimum(h1, h2, no), 2)
        path = f"{outdir}/h2o2_{ne}e{no}o.fcidump"
        fcidump.from_integrals(path, h1, h2, no, ne, nuc=core, ms=0, tol=1e-14)
        print(path, "core", core)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "fixtures")
