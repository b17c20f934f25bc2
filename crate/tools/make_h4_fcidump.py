#!/usr/bin/env python3
"""Generate the H4/STO-3G FCIDUMP asset from first principles.

Linear H4 chain, 0.75 Angstrom adjacent spacing, STO-3G basis (s-type
Gaussians only, so every integral has a closed form through the Boys
function F0).  Restricted Hartree-Fock in the minimal basis, then the
MO-transformed integrals are written in FCIDUMP format together with a
sidecar file recording reference energies and full-CI diagnostics used
by the test suite.

Run from the repository root:  python3 tools/make_h4_fcidump.py
"""

import math
import os

import numpy as np

BOHR_PER_ANGSTROM = 1.8897259886
SPACING_ANGSTROM = 0.75
NUM_ATOMS = 4

# STO-3G hydrogen 1s: exponents and contraction coefficients over
# normalized primitives.
STO3G_ALPHA = np.array([3.425250914, 0.6239137298, 0.168855404])
STO3G_COEF = np.array([0.1543289673, 0.5353281423, 0.4446345422])


def boys_f0(t):
    if t < 1e-12:
        return 1.0 - t / 3.0
    st = math.sqrt(t)
    return 0.5 * math.sqrt(math.pi / t) * math.erf(st)


def contracted_basis(centers):
    """Returns per-orbital (alphas, coeffs, center) with exact normalization."""
    prim_norm = (2.0 * STO3G_ALPHA / math.pi) ** 0.75
    d = STO3G_COEF * prim_norm
    # self-overlap of the contracted function
    s = 0.0
    for i in range(3):
        for j in range(3):
            s += d[i] * d[j] * (math.pi / (STO3G_ALPHA[i] + STO3G_ALPHA[j])) ** 1.5
    d = d / math.sqrt(s)
    return [(STO3G_ALPHA, d, c) for c in centers]


def overlap_prim(a, ra, b, rb):
    p = a + b
    ab2 = np.dot(ra - rb, ra - rb)
    return (math.pi / p) ** 1.5 * math.exp(-a * b / p * ab2)


def kinetic_prim(a, ra, b, rb):
    p = a + b
    mu = a * b / p
    ab2 = np.dot(ra - rb, ra - rb)
    return mu * (3.0 - 2.0 * mu * ab2) * overlap_prim(a, ra, b, rb)


def nuclear_prim(a, ra, b, rb, rc):
    p = a + b
    ab2 = np.dot(ra - rb, ra - rb)
    rp = (a * ra + b * rb) / p
    pc2 = np.dot(rp - rc, rp - rc)
    return -2.0 * math.pi / p * math.exp(-a * b / p * ab2) * boys_f0(p * pc2)


def eri_prim(a, ra, b, rb, c, rc, d, rd):
    p = a + b
    q = c + d
    ab2 = np.dot(ra - rb, ra - rb)
    cd2 = np.dot(rc - rd, rc - rd)
    rp = (a * ra + b * rb) / p
    rq = (c * rc + d * rd) / q
    pq2 = np.dot(rp - rq, rp - rq)
    pref = 2.0 * math.pi ** 2.5 / (p * q * math.sqrt(p + q))
    return (
        pref
        * math.exp(-a * b / p * ab2 - c * d / q * cd2)
        * boys_f0(p * q / (p + q) * pq2)
    )


def ao_integrals(basis, charges, centers):
    n = len(basis)
    s = np.zeros((n, n))
    t = np.zeros((n, n))
    v = np.zeros((n, n))
    for i, (ai, di, ri) in enumerate(basis):
        for j, (aj, dj, rj) in enumerate(basis):
            for p in range(3):
                for q in range(3):
                    w = di[p] * dj[q]
                    s[i, j] += w * overlap_prim(ai[p], ri, aj[q], rj)
                    t[i, j] += w * kinetic_prim(ai[p], ri, aj[q], rj)
                    for z, rc in zip(charges, centers):
                        v[i, j] += w * z * nuclear_prim(ai[p], ri, aj[q], rj, rc)
    eri = np.zeros((n, n, n, n))
    for i, (ai, di, ri) in enumerate(basis):
        for j, (aj, dj, rj) in enumerate(basis):
            for k, (ak, dk, rk) in enumerate(basis):
                for l, (al, dl, rl) in enumerate(basis):
                    acc = 0.0
                    for p in range(3):
                        for q in range(3):
                            for r in range(3):
                                for u in range(3):
                                    acc += (
                                        di[p]
                                        * dj[q]
                                        * dk[r]
                                        * dl[u]
                                        * eri_prim(
                                            ai[p], ri, aj[q], rj,
                                            ak[r], rk, al[u], rl,
                                        )
                                    )
                    eri[i, j, k, l] = acc
    return s, t, v, eri


def run_rhf(s, hcore, eri, n_elec):
    n = s.shape[0]
    n_occ = n_elec // 2
    se, sv = np.linalg.eigh(s)
    x = sv @ np.diag(se ** -0.5) @ sv.T
    f = hcore.copy()
    energy = 0.0
    dm = np.zeros((n, n))
    for _ in range(200):
        fp = x.T @ f @ x
        eps, cp = np.linalg.eigh(fp)
        c = x @ cp
        dm_new = 2.0 * c[:, :n_occ] @ c[:, :n_occ].T
        j = np.einsum("mnls,ls->mn", eri, dm_new)
        k = np.einsum("mlns,ls->mn", eri, dm_new)
        f = hcore + j - 0.5 * k
        e_new = 0.5 * np.sum(dm_new * (hcore + f))
        if abs(e_new - energy) < 1e-13 and np.max(np.abs(dm_new - dm)) < 1e-10:
            energy = e_new
            dm = dm_new
            break
        energy = e_new
        dm = dm_new
    return energy, eps, c


def write_fcidump(path, h_mo, eri_mo, e_core, eps, n_elec):
    n = h_mo.shape[0]
    lines = []
    lines.append(f"&FCI NORB={n:4d},NELEC={n_elec:3d},MS2= 0,")
    lines.append("  ORBSYM=" + "1," * n)
    lines.append("  ISYM=1,")
    lines.append(" &END")

    def rec(val, i, j, k, l):
        lines.append(f" {val: .16e} {i:4d} {j:4d} {k:4d} {l:4d}")

    for i in range(n):
        for j in range(i + 1):
            for k in range(i + 1):
                lmax = j + 1 if k == i else k + 1
                for l in range(lmax):
                    val = eri_mo[i, j, k, l]
                    if abs(val) > 1e-14:
                        rec(val, i + 1, j + 1, k + 1, l + 1)
    for i in range(n):
        for j in range(i + 1):
            if abs(h_mo[i, j]) > 1e-14:
                rec(h_mo[i, j], i + 1, j + 1, 0, 0)
    for i in range(n):
        rec(eps[i], i + 1, 0, 0, 0)
    rec(e_core, 0, 0, 0, 0)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Full CI over the 4-electron sector of 8 spin-orbitals, used only to record
# reference diagnostics alongside the asset.
# ---------------------------------------------------------------------------

def jw_sign(state, mode):
    return -1.0 if bin(state & ((1 << mode) - 1)).count("1") % 2 else 1.0


def apply_ladders(state, factors):
    """factors: list of (mode, is_create), applied right to left."""
    sign = 1.0
    for mode, create in reversed(factors):
        bit = 1 << mode
        occ = state & bit != 0
        if create == occ:
            return None
        sign *= jw_sign(state, mode)
        state ^= bit
    return state, sign


def fci_space(n_modes, n_elec):
    return [s for s in range(1 << n_modes) if bin(s).count("1") == n_elec]


def build_sector_matrix(terms, states):
    index = {s: i for i, s in enumerate(states)}
    h = np.zeros((len(states), len(states)))
    for coeff, factors in terms:
        if coeff == 0.0:
            continue
        for col, s in enumerate(states):
            out = apply_ladders(s, factors)
            if out is None:
                continue
            s2, sign = out
            row = index.get(s2)
            if row is not None:
                h[row, col] += coeff * sign
    return h


def molecular_terms(h_mo, eri_mo):
    n = h_mo.shape[0]
    m = 2 * n
    terms = []
    for i in range(m):
        for j in range(m):
            if i % 2 == j % 2:
                val = h_mo[i // 2, j // 2]
                if val != 0.0:
                    terms.append((val, [(i, True), (j, False)]))
    for i in range(m):
        for j in range(m):
            for k in range(m):
                for l in range(m):
                    # physicist <ij|kl> = (ik|jl) with spin matching
                    d1 = (eri_mo[i // 2, k // 2, j // 2, l // 2]
                          if i % 2 == k % 2 and j % 2 == l % 2 else 0.0)
                    d2 = (eri_mo[i // 2, l // 2, j // 2, k // 2]
                          if i % 2 == l % 2 and j % 2 == k % 2 else 0.0)
                    anti = d1 - d2
                    if anti != 0.0:
                        terms.append(
                            (0.25 * anti,
                             [(i, True), (j, True), (l, False), (k, False)])
                        )
    return terms


def spin_squared_matrix(states, n_orb):
    terms = []
    for p in range(n_orb):
        for q in range(n_orb):
            # S+S- = sum_pq a_{pA}+ a_{pB} a_{qB}+ a_{qA}
            terms.append(
                (1.0, [(2 * p, True), (2 * p + 1, False),
                       (2 * q + 1, True), (2 * q, False)])
            )
    sp_sm = build_sector_matrix(terms, states)
    sz_terms = []
    for p in range(n_orb):
        sz_terms.append((0.5, [(2 * p, True), (2 * p, False)]))
        sz_terms.append((-0.5, [(2 * p + 1, True), (2 * p + 1, False)]))
    sz = build_sector_matrix(sz_terms, states)
    return sp_sm + sz @ sz - sz


def rdm1(vec, states, m):
    index = {s: i for i, s in enumerate(states)}
    g = np.zeros((m, m))
    for j in range(m):
        for i in range(m):
            for col, s in enumerate(states):
                out = apply_ladders(s, [(i, True), (j, False)])
                if out is None:
                    continue
                s2, sign = out
                row = index.get(s2)
                if row is not None:
                    g[i, j] += sign * vec[row] * vec[col]
    return g


def rdm2_composite(vec, states, m):
    index = {s: i for i, s in enumerate(states)}
    g = np.zeros((m * m, m * m))
    for col, s in enumerate(states):
        for k in range(m):
            for l in range(m):
                out1 = apply_ladders(s, [(l, False), (k, False)])
                if out1 is None:
                    continue
                mid, sgn1 = out1
                for i in range(m):
                    for j in range(m):
                        out2 = apply_ladders(mid, [(i, True), (j, True)])
                        if out2 is None:
                            continue
                        s2, sgn2 = out2
                        row = index.get(s2)
                        if row is not None:
                            g[i * m + j, k * m + l] += (
                                sgn1 * sgn2 * vec[row] * vec[col]
                            )
    return g


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    asset_dir = os.path.join(here, "..", "assets")
    os.makedirs(asset_dir, exist_ok=True)

    spacing = SPACING_ANGSTROM * BOHR_PER_ANGSTROM
    centers = [np.array([0.0, 0.0, i * spacing]) for i in range(NUM_ATOMS)]
    charges = [1.0] * NUM_ATOMS
    basis = contracted_basis(centers)

    e_nuc = 0.0
    for a in range(NUM_ATOMS):
        for b in range(a + 1, NUM_ATOMS):
            e_nuc += 1.0 / np.linalg.norm(centers[a] - centers[b])

    s, t, v, eri = ao_integrals(basis, charges, centers)
    hcore = t + v
    e_elec, eps, c = run_rhf(s, hcore, eri, NUM_ATOMS)
    e_hf = e_elec + e_nuc

    h_mo = c.T @ hcore @ c
    eri_mo = np.einsum("mi,nj,mnls,lk,su->ijku", c, c, eri, c, c, optimize=True)

    dump_path = os.path.join(asset_dir, "h4_sto3g_0p75.fcidump")
    write_fcidump(dump_path, h_mo, eri_mo, e_nuc, eps, NUM_ATOMS)

    # full CI diagnostics
    n_orb = NUM_ATOMS
    m = 2 * n_orb
    states = fci_space(m, NUM_ATOMS)
    terms = molecular_terms(h_mo, eri_mo)
    h = build_sector_matrix(terms, states)
    evals, evecs = np.linalg.eigh(h)
    s2 = spin_squared_matrix(states, n_orb)

    hf_det = states.index(0b00001111)
    ground = evecs[:, 0]
    g1 = rdm1(ground, states, m)
    g1_eigs = np.linalg.eigvalsh(g1)
    g2 = rdm2_composite(ground, states, m)
    g2_eigs = np.linalg.eigvalsh(g2)

    excited_idx = None
    for k in range(1, 10):
        vv = evecs[:, k]
        if abs(vv @ s2 @ vv) < 1e-6:
            excited_idx = k
            break
    exc = evecs[:, excited_idx]
    e1 = rdm1(exc, states, m)
    e1_eigs = np.linalg.eigvalsh(e1)
    exc_coeffs = np.sort(np.abs(exc))[::-1]

    sidecar = os.path.join(asset_dir, "h4_sto3g_0p75.reference")
    with open(sidecar, "w") as fh:
        fh.write("# reference values recorded when the FCIDUMP asset was generated\n")
        fh.write("# linear H4 chain, 0.75 Angstrom adjacent spacing, STO-3G, RHF orbitals\n")
        fh.write(f"nuclear_repulsion = {e_nuc:.12f}\n")
        fh.write(f"hf_total_energy = {e_hf:.12f}\n")
        fh.write(f"fci_ground_energy = {evals[0] + e_nuc:.12f}\n")
        fh.write(f"fci_excited_singlet_energy = {evals[excited_idx] + e_nuc:.12f}\n")
        fh.write(f"excited_singlet_index = {excited_idx}\n")
        fh.write(f"ground_leading_determinant_coeff = {abs(ground[hf_det]):.8f}\n")
        fh.write(f"excited_two_leading_coeffs = {exc_coeffs[0]:.8f},{exc_coeffs[1]:.8f}\n")
        fh.write(f"ground_rdm1_eig_min = {g1_eigs.min():.8f}\n")
        fh.write(f"ground_rdm1_eig_max = {g1_eigs.max():.8f}\n")
        fh.write(f"ground_rdm2_eig_max = {g2_eigs.max():.8f}\n")
        fh.write(f"excited_rdm1_eig_min = {e1_eigs.min():.8f}\n")
        fh.write(f"excited_rdm1_eig_max = {e1_eigs.max():.8f}\n")

    print(f"E_nuc            = {e_nuc:.10f}")
    print(f"E_HF             = {e_hf:.10f}")
    print(f"orbital energies = {eps}")
    print(f"E_FCI(ground)    = {evals[0] + e_nuc:.10f}")
    print(f"lowest sector eigenvalues + e_nuc = {evals[:8] + e_nuc}")
    print(f"S^2 of lowest 8  = {[float(evecs[:, k] @ s2 @ evecs[:, k]) for k in range(8)]}")
    print(f"excited singlet index = {excited_idx}")
    print(f"ground leading |c|    = {abs(ground[hf_det]):.6f}  (expect ~0.98)")
    print(f"excited two |c|       = {exc_coeffs[:2]}  (expect ~0.70)")
    print(f"ground 1-RDM eig range  = [{g1_eigs.min():.6f}, {g1_eigs.max():.6f}]  (expect [0.0048, 0.9936])")
    print(f"ground 2-RDM max eig    = {g2_eigs.max():.6f}  (expect 2.0148)")
    print(f"excited 1-RDM eig range = [{e1_eigs.min():.6f}, {e1_eigs.max():.6f}]  (expect [0.0015, 0.9985])")


if __name__ == "__main__":
    main()
