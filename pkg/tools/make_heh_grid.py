"""Generate the packaged HeH+ Pauli-coefficient grid.

Computes the STO-3G full-CI Hamiltonian of HeH+ at a grid of bond lengths.
The two spatial molecular orbitals give four opposite-spin two-electron
configurations; the 4x4 CI matrix in that configuration basis is exactly a
two-qubit operator (qubit 1 = orbital of the spin-up electron, qubit 2 =
orbital of the spin-down electron) and is written out as Pauli-term blocks,
nuclear repulsion folded into the identity coefficient.

All electronic-structure machinery lives here, offline; the package only
ever reads the emitted text file.

Usage: python tools/make_heh_grid.py [output-path]
"""

import math
import sys

import numpy as np

BOHR_PER_ANGSTROM = 1.8897259886

# STO-3G 1s contraction for zeta = 1, scaled per atom below
STO3G_ALPHA = np.array([2.227660584, 0.405771156, 0.109818])
STO3G_D = np.array([0.154329, 0.535328, 0.444635])
ZETA = {"He": 2.0925, "H": 1.24}
CHARGE = {"He": 2.0, "H": 1.0}


def f0(t):
    if t < 1e-12:
        return 1.0
    return 0.5 * math.sqrt(math.pi / t) * math.erf(math.sqrt(t))


def basis_for(symbol, center):
    alphas = STO3G_ALPHA * ZETA[symbol] ** 2
    norms = (2.0 * alphas / math.pi) ** 0.75
    return [(a, d * nrm, center) for a, d, nrm in zip(alphas, STO3G_D, norms)]


def one_electron(basis_a, basis_b, centers_charges):
    s = t = v = 0.0
    for a, ca, ra in basis_a:
        for b, cb, rb in basis_b:
            p = a + b
            mu = a * b / p
            ab2 = float(np.dot(ra - rb, ra - rb))
            pref = (math.pi / p) ** 1.5 * math.exp(-mu * ab2)
            s += ca * cb * pref
            t += ca * cb * mu * (3.0 - 2.0 * mu * ab2) * pref
            rp = (a * ra + b * rb) / p
            for rc, z in centers_charges:
                pc2 = float(np.dot(rp - rc, rp - rc))
                v -= ca * cb * z * (2.0 * math.pi / p) * math.exp(-mu * ab2) * f0(p * pc2)
    return s, t, v


def two_electron(b1, b2, b3, b4):
    """Chemists' notation (12|34) over contracted s functions."""
    total = 0.0
    for a, ca, ra in b1:
        for b, cb, rb in b2:
            p = a + b
            rp = (a * ra + b * rb) / p
            eab = math.exp(-a * b / p * float(np.dot(ra - rb, ra - rb)))
            for c, cc, rc in b3:
                for d, cd, rd in b4:
                    q = c + d
                    rq = (c * rc + d * rd) / q
                    ecd = math.exp(-c * d / q * float(np.dot(rc - rd, rc - rd)))
                    pq2 = float(np.dot(rp - rq, rp - rq))
                    total += (
                        ca * cb * cc * cd
                        * 2.0 * math.pi**2.5 / (p * q * math.sqrt(p + q))
                        * eab * ecd * f0(p * q / (p + q) * pq2)
                    )
    return total


def scf_and_ci(bond_bohr):
    r_he = np.zeros(3)
    r_h = np.array([0.0, 0.0, bond_bohr])
    centers = [(r_he, CHARGE["He"]), (r_h, CHARGE["H"])]
    basis = [basis_for("He", r_he), basis_for("H", r_h)]

    s = np.zeros((2, 2))
    hcore = np.zeros((2, 2))
    for i in range(2):
        for j in range(2):
            sij, tij, vij = one_electron(basis[i], basis[j], centers)
            s[i, j] = sij
            hcore[i, j] = tij + vij
    eri = np.zeros((2, 2, 2, 2))
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    eri[i, j, k, l] = two_electron(basis[i], basis[j], basis[k], basis[l])

    # symmetric orthogonalization, then closed-shell SCF for 2 electrons
    svals, svecs = np.linalg.eigh(s)
    x = svecs @ np.diag(svals**-0.5) @ svecs.T
    coeffs = None
    fock = hcore
    for _ in range(200):
        fp = x.T @ fock @ x
        _, cp = np.linalg.eigh(fp)
        coeffs = x @ cp
        c0 = coeffs[:, 0]
        density = 2.0 * np.outer(c0, c0)
        g = np.einsum("kl,ijkl->ij", density, eri) - 0.5 * np.einsum("kl,ikjl->ij", density, eri)
        new_fock = hcore + g
        if np.max(np.abs(new_fock - fock)) < 1e-12:
            fock = new_fock
            break
        fock = new_fock

    # MO-basis integrals
    h_mo = coeffs.T @ hcore @ coeffs
    eri_mo = np.einsum("ip,jq,kr,ls,ijkl->pqrs", coeffs, coeffs, coeffs, coeffs, eri)

    # CI over opposite-spin configurations (i = up-electron orbital, j = down)
    e_nuc = CHARGE["He"] * CHARGE["H"] / bond_bohr
    dim = 4
    ci = np.zeros((dim, dim))
    for zi in range(dim):
        i, j = zi >> 1, zi & 1
        for zk in range(dim):
            k, l = zk >> 1, zk & 1
            val = 0.0
            if j == l:
                val += h_mo[i, k]
            if i == k:
                val += h_mo[j, l]
            val += eri_mo[i, k, j, l]
            ci[zi, zk] = val
        ci[zi, zi] += e_nuc
    return ci


PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_decompose(mat):
    terms = []
    for p in "IXYZ":
        for q in "IXYZ":
            coeff = np.trace(np.kron(PAULI[p], PAULI[q]) @ mat) / 4.0
            if abs(coeff.imag) > 1e-10:
                raise RuntimeError(f"non-real coefficient for {p}{q}: {coeff}")
            if abs(coeff.real) > 1e-12:
                terms.append((coeff.real, p + q))
    return terms


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "src/qaboa/data/heh_plus_tapered.txt"
    grid = np.round(np.arange(0.10, 3.0 + 1e-9, 0.05), 2)
    lines = [
        "# HeH+ potential-energy Hamiltonian on two qubits, STO-3G full CI.",
        "# Bond length L in angstrom; energies in hartree, nuclear repulsion",
        "# folded into the II coefficient.  Generated by tools/make_heh_grid.py.",
        "n_qubits=2",
    ]
    for L in grid:
        ci = scf_and_ci(float(L) * BOHR_PER_ANGSTROM)
        lines.append(f"L={L:.2f}")
        for coeff, pauli in pauli_decompose(ci):
            lines.append(f"{coeff:+.12f} {pauli}")
        ground = np.linalg.eigvalsh(ci)[0]
        print(f"L={L:.2f}  ground={ground:+.6f}  diag_min={ci.diagonal().min():+.6f}")
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {out} ({len(grid)} grid points)")


if __name__ == "__main__":
    main()
