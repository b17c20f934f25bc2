//! Cross-validation of the bit-algebra implementations against brute-force
//! dense constructions built from Kronecker products. Everything here has a
//! second, independent derivation: ladder matrices, pool generators,
//! Hamiltonians, exponentials, and density-matrix elements.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use nrep_core::ansatz::apply_exponential;
use nrep_core::fock::{
    ladder_matrix, FockBasis, LadderKind, SpaceKind, SparseOperator, StateVector,
};
use nrep_core::models::{
    bcs_level_energies, build_bcs_hamiltonian, build_xxz_hamiltonian, exact_eigenstates,
    parse_fcidump_text, build_molecular_hamiltonian, LevelSpacing,
};
use nrep_core::pool::{build_pool, GeneratorShape, PoolKind};
use nrep_core::rdm::{compute_doci_blocks, compute_rdm1, compute_rdm2};
use nrep_testkit as kit;

use LadderKind::{Annihilate, Create};

fn full_basis(space: SpaceKind, m: usize) -> Arc<FockBasis> {
    Arc::new(FockBasis::full(space, m).unwrap())
}

fn sector(space: SpaceKind, m: usize, n: usize) -> Arc<FockBasis> {
    Arc::new(FockBasis::new(space, m, n).unwrap())
}

fn dense_of(op: &SparseOperator) -> kit::CMat {
    op.to_dense()
}

/// Embeds a sector state into the full `2^m` space by bitstring value.
fn embed(v: &StateVector) -> DVector<Complex64> {
    let m = v.basis().num_modes();
    let mut full = DVector::zeros(1 << m);
    for (i, &s) in v.basis().states().iter().enumerate() {
        full[s as usize] = v.amplitude(i);
    }
    full
}

/// A reproducible entangled state: the filled reference pushed through a few
/// fixed pool exponentials.
fn scrambled_state(basis: &Arc<FockBasis>, kind: PoolKind, thetas: &[f64]) -> StateVector {
    let pool = build_pool(kind, basis).unwrap();
    let occ = (1u64 << basis.particle_count().unwrap()) - 1;
    let mut v = StateVector::basis_state(basis, occ).unwrap();
    for (step, &theta) in thetas.iter().enumerate() {
        let op = &pool.operators()[(step * 7 + 3) % pool.len()];
        v = apply_exponential(&op.matrix, theta, &v).unwrap();
    }
    v
}

#[test]
fn ladder_matrices_match_the_dense_construction() {
    for m in [4, 6] {
        let fermion = full_basis(SpaceKind::Fermion, m);
        let bosons = full_basis(SpaceKind::HardCoreBoson, m);
        for mode in 0..m {
            for (kind, create) in [(Create, true), (Annihilate, false)] {
                let lhs = dense_of(&ladder_matrix(&fermion, mode, kind).unwrap());
                let rhs = kit::fermion_ladder(m, mode, create);
                assert!(kit::max_abs(&(&lhs - &rhs)) < 1e-12, "fermion mode {mode}");

                let lhs = dense_of(&ladder_matrix(&bosons, mode, kind).unwrap());
                let rhs = kit::boson_ladder(m, mode, create);
                assert!(kit::max_abs(&(&lhs - &rhs)) < 1e-12, "boson mode {mode}");
            }
        }
    }
}

#[test]
fn canonical_anticommutation_relations_hold() {
    for m in [4, 6] {
        let basis = full_basis(SpaceKind::Fermion, m);
        let a: Vec<kit::CMat> = (0..m)
            .map(|i| dense_of(&ladder_matrix(&basis, i, Annihilate).unwrap()))
            .collect();
        let c: Vec<kit::CMat> = (0..m)
            .map(|i| dense_of(&ladder_matrix(&basis, i, Create).unwrap()))
            .collect();
        let id = DMatrix::<Complex64>::identity(1 << m, 1 << m);
        for i in 0..m {
            for j in 0..m {
                let mut mixed = kit::anticommutator(&a[i], &c[j]);
                if i == j {
                    mixed -= &id;
                }
                assert!(kit::max_abs(&mixed) < 1e-12, "{{a_{i}, a_{j}^+}}");
                assert!(
                    kit::max_abs(&kit::anticommutator(&a[i], &a[j])) < 1e-12,
                    "{{a_{i}, a_{j}}}"
                );
            }
        }
    }
}

#[test]
fn hard_core_relations_hold() {
    let m = 4;
    let basis = full_basis(SpaceKind::HardCoreBoson, m);
    let b: Vec<kit::CMat> = (0..m)
        .map(|i| dense_of(&ladder_matrix(&basis, i, Annihilate).unwrap()))
        .collect();
    let bd: Vec<kit::CMat> = (0..m)
        .map(|i| dense_of(&ladder_matrix(&basis, i, Create).unwrap()))
        .collect();
    let id = DMatrix::<Complex64>::identity(1 << m, 1 << m);
    for i in 0..m {
        assert!(kit::max_abs(&(&b[i] * &b[i])) < 1e-14, "pair modes are hard-core");
        let comm = kit::commutator(&b[i], &bd[i]);
        let expected = &id - kit::mode_number(m, i).scale(2.0);
        assert!(kit::max_abs(&(&comm - &expected)) < 1e-12, "[b, b^+] on one mode");
        for j in 0..m {
            if i != j {
                assert!(
                    kit::max_abs(&kit::commutator(&b[i], &bd[j])) < 1e-12,
                    "different modes commute"
                );
            }
        }
    }
}

/// Dense reconstruction of a singles generator from its mode list.
fn dense_single(m: usize, i: usize, k: usize) -> kit::CMat {
    let ci = kit::fermion_ladder(m, i, true);
    let ak = kit::fermion_ladder(m, k, false);
    let ck = kit::fermion_ladder(m, k, true);
    let ai = kit::fermion_ladder(m, i, false);
    &ci * &ak - &ck * &ai
}

/// Dense reconstruction of a doubles generator from its mode list.
fn dense_double(m: usize, i: usize, j: usize, k: usize, l: usize) -> kit::CMat {
    let a = kit::fermion_ladder(m, i, true)
        * kit::fermion_ladder(m, j, true)
        * kit::fermion_ladder(m, k, false)
        * kit::fermion_ladder(m, l, false);
    &a - &a.adjoint()
}

#[test]
fn gsd_pool_matches_dense_enumeration_and_pruning() {
    let (m, n) = (4, 2);
    let basis = sector(SpaceKind::Fermion, m, n);
    let idx = kit::sector_indices(m, n);

    for spin_filtered in [false, true] {
        let kind = if spin_filtered {
            PoolKind::GsdSpinFiltered
        } else {
            PoolKind::Gsd
        };
        let pool = build_pool(kind, &basis).unwrap();

        // every shipped generator equals its dense reconstruction
        for op in pool.operators() {
            let full = match op.shape {
                GeneratorShape::Single => dense_single(m, op.modes[0], op.modes[1]),
                GeneratorShape::Double => {
                    dense_double(m, op.modes[0], op.modes[1], op.modes[2], op.modes[3])
                }
                GeneratorShape::PairHop => panic!("no pair hops in a fermionic pool"),
            };
            let projected = kit::project(&full, &idx);
            let diff = &projected - &op.matrix.to_dense();
            assert!(kit::max_abs(&diff) < 1e-12, "{:?} {:?}", op.shape, op.modes);
        }

        // independent recount of the pruning: distinct nonzero restrictions
        // up to an overall sign
        let mut distinct: Vec<kit::CMat> = Vec::new();
        let mut keep = |p: kit::CMat| {
            if kit::max_abs(&p) < 1e-14 {
                return;
            }
            for q in &distinct {
                if kit::max_abs(&(&p - q)) < 1e-12 || kit::max_abs(&(&p + q)) < 1e-12 {
                    return;
                }
            }
            distinct.push(p);
        };
        let up = |t: usize| usize::from(t % 2 == 0);
        for i in 0..m {
            for k in i + 1..m {
                if spin_filtered && i % 2 != k % 2 {
                    continue;
                }
                keep(kit::project(&dense_single(m, i, k), &idx));
            }
        }
        let mut pairs = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                pairs.push((i, j));
            }
        }
        for (pi, &(i, j)) in pairs.iter().enumerate() {
            for &(k, l) in &pairs[pi + 1..] {
                if spin_filtered && up(i) + up(j) != up(k) + up(l) {
                    continue;
                }
                keep(kit::project(&dense_double(m, i, j, k, l), &idx));
            }
        }
        assert_eq!(
            pool.len(),
            distinct.len(),
            "pruned pool size (spin_filtered = {spin_filtered})"
        );
    }
}

#[test]
fn spin_filtered_pool_commutes_with_total_sz() {
    for (m, n) in [(4, 2), (6, 3)] {
        let basis = sector(SpaceKind::Fermion, m, n);
        let idx = kit::sector_indices(m, n);
        let mut sz_full: kit::CMat = DMatrix::zeros(1 << m, 1 << m);
        for p in 0..m / 2 {
            sz_full += kit::mode_number(m, 2 * p).scale(0.5);
            sz_full += kit::mode_number(m, 2 * p + 1).scale(-0.5);
        }
        let sz = kit::project(&sz_full, &idx);

        let filtered = build_pool(PoolKind::GsdSpinFiltered, &basis).unwrap();
        for op in filtered.operators() {
            let comm = kit::commutator(&op.matrix.to_dense(), &sz);
            assert!(kit::max_abs(&comm) < 1e-12, "{:?} {:?}", op.shape, op.modes);
        }

        let unfiltered = build_pool(PoolKind::Gsd, &basis).unwrap();
        assert!(
            unfiltered.operators().iter().any(|op| {
                kit::max_abs(&kit::commutator(&op.matrix.to_dense(), &sz)) > 1e-6
            }),
            "the unfiltered pool must contain spin-changing generators"
        );
        assert!(unfiltered.len() > filtered.len());
    }
}

#[test]
fn pair_hops_are_seniority_projected_doubles() {
    // expanding pair mode p into spin orbitals (2p, 2p+1), the pair hop
    // b_p^+ b_q - b_q^+ b_p is minus the corresponding fermionic double
    // restricted to the doubly-occupied-or-empty subspace
    for (k, pairs) in [(2, 1), (3, 1), (3, 2)] {
        let pair_basis = sector(SpaceKind::HardCoreBoson, k, pairs);
        let pool = build_pool(PoolKind::Pair, &pair_basis).unwrap();
        assert_eq!(pool.len(), k * (k - 1) / 2);

        let m = 2 * k;
        // seniority-zero states with the right pair count, ascending; the
        // bit expansion s -> sum 3 * 4^p s_p is monotone, so the orderings
        // of the two bases agree
        let seniority_idx: Vec<usize> = (0..(1usize << m))
            .filter(|s| {
                (0..k).all(|p| {
                    let pair = (s >> (2 * p)) & 3;
                    pair == 0 || pair == 3
                }) && s.count_ones() as usize == 2 * pairs
            })
            .collect();
        assert_eq!(seniority_idx.len(), pair_basis.dim());

        for op in pool.operators() {
            let (p, q) = (op.modes[0], op.modes[1]);
            let full = dense_double(m, 2 * p, 2 * p + 1, 2 * q, 2 * q + 1);
            let projected = kit::project(&full, &seniority_idx);
            let sum = &projected + &op.matrix.to_dense();
            assert!(kit::max_abs(&sum) < 1e-12, "hop ({p}, {q}) on {k} levels");
        }
    }
}

#[test]
fn rdm_elements_match_dense_expectation_values() {
    let (m, n) = (6, 3);
    let basis = sector(SpaceKind::Fermion, m, n);
    let v = scrambled_state(&basis, PoolKind::Gsd, &[0.4, -0.9, 0.23, 1.1, -0.35]);
    let full = embed(&v);
    let create: Vec<kit::CMat> = (0..m).map(|i| kit::fermion_ladder(m, i, true)).collect();
    let destroy: Vec<kit::CMat> = (0..m).map(|i| kit::fermion_ladder(m, i, false)).collect();

    let g1 = compute_rdm1(&v).unwrap();
    for i in 0..m {
        for j in 0..m {
            let want = full.dotc(&(&create[i] * (&destroy[j] * &full)));
            assert!((g1.get(i, j) - want).norm() < 1e-12, "rdm1 ({i}, {j})");
        }
    }

    let g2 = compute_rdm2(&v).unwrap();
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let t = &destroy[l] * (&destroy[k] * &full);
                    let t = &create[i] * (&create[j] * t);
                    let want = full.dotc(&t);
                    assert!(
                        (g2.get(i, j, k, l) - want).norm() < 1e-12,
                        "rdm2 ({i}, {j}, {k}, {l})"
                    );
                }
            }
        }
    }
}

#[test]
fn doci_blocks_match_dense_expectation_values() {
    let (m, n) = (4, 2);
    let basis = sector(SpaceKind::HardCoreBoson, m, n);
    let v = scrambled_state(&basis, PoolKind::Pair, &[0.7, -0.4, 0.9, 0.15]);
    let full = embed(&v);

    let blocks = compute_doci_blocks(&v).unwrap();
    for i in 0..m {
        for j in 0..m {
            let hop = kit::boson_ladder(m, i, true) * kit::boson_ladder(m, j, false);
            let want_pi = full.dotc(&(&hop * &full));
            assert!((blocks.pi()[(i, j)] - want_pi).norm() < 1e-12, "pi ({i}, {j})");

            let nn = kit::mode_number(m, i) * kit::mode_number(m, j);
            let want_d = full.dotc(&(&nn * &full));
            assert!((blocks.d()[(i, j)] - want_d).norm() < 1e-12, "d ({i}, {j})");
        }
    }
}

#[test]
fn taylor_exponential_matches_dense_expm() {
    let (m, n) = (4, 2);
    let basis = sector(SpaceKind::Fermion, m, n);
    let pool = build_pool(PoolKind::Gsd, &basis).unwrap();
    let hf = StateVector::basis_state(&basis, 0b0011).unwrap();

    for (which, theta) in [(0, 0.3), (3, -1.7), (5, 2.0), (1, 1e-5)] {
        let op = &pool.operators()[which % pool.len()];
        let moved = apply_exponential(&op.matrix, theta, &hf).unwrap();
        assert!((moved.norm() - 1.0).abs() < 1e-13);

        let u = kit::expm(&op.matrix.to_dense().scale(theta));
        let dense_moved = &u * DVector::from_column_slice(hf.amplitudes());
        for (a, b) in moved.amplitudes().iter().zip(dense_moved.iter()) {
            assert!((a - b).norm() < 1e-12, "theta = {theta}");
        }
    }

    // a product of several exponentials stays on the dense path
    let thetas = [0.5, -0.25, 0.8, -1.2, 0.05, 0.6, -0.4, 1.5];
    let mut v = hf.clone();
    let mut dense_v = DVector::from_column_slice(hf.amplitudes());
    for (step, &theta) in thetas.iter().enumerate() {
        let op = &pool.operators()[(3 * step + 1) % pool.len()];
        v = apply_exponential(&op.matrix, theta, &v).unwrap();
        dense_v = &kit::expm(&op.matrix.to_dense().scale(theta)) * dense_v;
    }
    for (a, b) in v.amplitudes().iter().zip(dense_v.iter()) {
        assert!((a - b).norm() < 1e-11);
    }
}

#[test]
fn chain_hamiltonian_matches_independent_spin_construction() {
    for delta in [0.5, 2.0, -1.0] {
        let (k, pairs) = (4, 2);
        let basis = sector(SpaceKind::HardCoreBoson, k, pairs);
        let core = build_xxz_hamiltonian(k, delta, &basis).unwrap().to_dense();
        let spin = kit::project(&kit::spin_xxz(k, delta), &kit::sector_indices(k, pairs));
        assert!(kit::max_abs(&(&core - &spin)) < 1e-12, "delta = {delta}");

        let mut a = kit::eigh_values(&core);
        let b = kit::eigh_values(&spin);
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}

#[test]
fn pairing_hamiltonian_matches_dense_construction() {
    let k = 4;
    let levels = bcs_level_energies(k, LevelSpacing::OverK);
    for g in [0.0, 0.046875, 1.0] {
        let basis = sector(SpaceKind::HardCoreBoson, k, 2);
        let core = build_bcs_hamiltonian(k, g, &basis).unwrap();

        let dim = 1usize << k;
        let mut full: kit::CMat = DMatrix::zeros(dim, dim);
        for (l, &e) in levels.iter().enumerate() {
            full += kit::mode_number(k, l).scale(e);
        }
        for i in 0..k {
            for j in 0..k {
                full -= (kit::boson_ladder(k, i, true) * kit::boson_ladder(k, j, false)).scale(g);
            }
        }
        let projected = kit::project(&full, &kit::sector_indices(k, 2));
        assert!(kit::max_abs(&(&core.to_dense() - &projected)) < 1e-12, "g = {g}");

        // spectrum agreement across the two independent eigensolvers
        let jacobi = kit::eigh_values(&projected);
        let pairs = exact_eigenstates(&core, core.basis().dim()).unwrap();
        for (x, p) in jacobi.iter().zip(&pairs) {
            assert!((x - p.value).abs() < 1e-10, "g = {g}");
        }
    }
}

#[test]
fn molecular_assembly_matches_dense_kron_construction() {
    let text = "\
&FCI NORB=2,NELEC=2,MS2=0,\n&END\n\
 0.7 1 1 1 1\n\
 0.45 1 1 2 2\n\
 0.15 1 2 1 2\n\
 0.65 2 2 2 2\n\
 -1.2 1 1 0 0\n\
 -0.3 1 2 0 0\n\
 -0.8 2 2 0 0\n\
 0.3 0 0 0 0\n";
    let ints = parse_fcidump_text(text).unwrap();
    let m = 4usize; // two spatial orbitals, interleaved spins
    let basis = sector(SpaceKind::Fermion, m, 2);
    let core = build_molecular_hamiltonian(&ints, &basis).unwrap().to_dense();

    let dim = 1usize << m;
    let lc: Vec<kit::CMat> = (0..m).map(|t| kit::fermion_ladder(m, t, true)).collect();
    let la: Vec<kit::CMat> = (0..m).map(|t| kit::fermion_ladder(m, t, false)).collect();
    let mut full: kit::CMat = DMatrix::identity(dim, dim).scale(ints.core_energy());
    for p in 0..2 {
        for q in 0..2 {
            for s in 0..2 {
                full += (&lc[2 * p + s] * &la[2 * q + s]).scale(ints.one_body(p, q));
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let mut w = 0.0;
                    if i % 2 == k % 2 && j % 2 == l % 2 {
                        w += ints.two_body(i / 2, k / 2, j / 2, l / 2);
                    }
                    if i % 2 == l % 2 && j % 2 == k % 2 {
                        w -= ints.two_body(i / 2, l / 2, j / 2, k / 2);
                    }
                    if w != 0.0 {
                        let term = &lc[i] * &lc[j] * &la[l] * &la[k];
                        full += term.scale(0.25 * w);
                    }
                }
            }
        }
    }
    let projected = kit::project(&full, &kit::sector_indices(m, 2));
    assert!(kit::max_abs(&(&core - &projected)) < 1e-12);
}
