//! Anti-Hermitian operator pools for ansatz growth.
//!
//! A pool is an ordered list of sector-restricted generators. Two families
//! are provided:
//!
//! * generalized singles and doubles over fermionic spin orbitals,
//!   `P_ik = a_i^+ a_k - a_k^+ a_i` (i < k) and
//!   `P_ijkl = a_i^+ a_j^+ a_k a_l - a_k^+ a_l^+ a_i a_j`
//!   (i < j, k < l, (i,j) < (k,l) lexicographically), optionally filtered to
//!   the spin-projection-conserving subset under the interleaved convention
//!   (orbital p, up) = mode 2p, (orbital p, down) = mode 2p+1;
//! * pair hops `b_i^+ b_j - b_j^+ b_i` (i < j) over hard-core boson levels.
//!
//! Enumeration order is part of the contract: singles before doubles, each
//! family lexicographic in its mode indices, so a pool index identifies the
//! same generator across runs. Operators whose sector restriction vanishes
//! are dropped, as is any operator whose matrix duplicates an earlier one
//! up to overall sign.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockBasis, LadderFactor, LadderKind, SparseOperator, SpaceKind};

/// Pool family, also the token used in ansatz file headers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolKind {
    Gsd,
    GsdSpinFiltered,
    Pair,
}

impl PoolKind {
    pub fn token(&self) -> &'static str {
        match self {
            PoolKind::Gsd => "GSD",
            PoolKind::GsdSpinFiltered => "GSD_SpinFiltered",
            PoolKind::Pair => "Pair",
        }
    }

    pub fn from_token(token: &str) -> Option<PoolKind> {
        match token {
            "GSD" => Some(PoolKind::Gsd),
            "GSD_SpinFiltered" => Some(PoolKind::GsdSpinFiltered),
            "Pair" => Some(PoolKind::Pair),
            _ => None,
        }
    }
}

impl fmt::Display for PoolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorShape {
    Single,
    Double,
    PairHop,
}

/// One pool entry: its shape, defining mode indices, and sector matrix.
#[derive(Debug, Clone)]
pub struct PoolOperator {
    pub shape: GeneratorShape,
    pub modes: Vec<usize>,
    pub matrix: SparseOperator,
}

/// An immutable, canonically ordered set of generators over one basis.
#[derive(Debug)]
pub struct OperatorPool {
    kind: PoolKind,
    basis: Arc<FockBasis>,
    operators: Vec<PoolOperator>,
}

impl OperatorPool {
    pub fn kind(&self) -> PoolKind {
        self.kind
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn operator_at(&self, index: usize) -> Result<&PoolOperator> {
        self.operators.get(index).ok_or_else(|| {
            Error::domain(format!(
                "pool index {index} out of range for {} operators",
                self.operators.len()
            ))
        })
    }

    pub fn operators(&self) -> &[PoolOperator] {
        &self.operators
    }
}

/// Spin projection label under the interleaved convention: even mode = up.
fn up_count(modes: &[usize]) -> usize {
    modes.iter().filter(|m| *m % 2 == 0).count()
}

/// Sign-normalized fingerprint of a canonical sparse matrix, used to detect
/// duplicates up to overall sign. Values are exactly representable small
/// sums, so bit comparison is sound.
fn sign_normalized_key(op: &SparseOperator) -> Vec<(u32, u32, u64, u64)> {
    let mut flip = false;
    if let Some((_, _, v)) = op.entries().next() {
        if v.re < 0.0 || (v.re == 0.0 && v.im < 0.0) {
            flip = true;
        }
    }
    op.entries()
        .map(|(r, c, v)| {
            let v = if flip { -v } else { v };
            (r as u32, c as u32, v.re.to_bits(), v.im.to_bits())
        })
        .collect()
}

/// Builds the pool a [`PoolKind`] names.
pub fn build_pool(kind: PoolKind, basis: &Arc<FockBasis>) -> Result<OperatorPool> {
    match kind {
        PoolKind::Gsd => build_gsd_pool(basis, false),
        PoolKind::GsdSpinFiltered => build_gsd_pool(basis, true),
        PoolKind::Pair => build_pair_pool(basis),
    }
}

/// Generalized singles and doubles pool over a fermionic basis.
pub fn build_gsd_pool(basis: &Arc<FockBasis>, spin_filtered: bool) -> Result<OperatorPool> {
    if basis.space() != SpaceKind::Fermion {
        return Err(Error::domain("singles/doubles pool requires a fermionic basis"));
    }
    let m = basis.num_modes();
    if m % 2 != 0 {
        return Err(Error::domain(
            "singles/doubles pool requires an even number of spin-orbital modes",
        ));
    }
    let one = Complex64::ONE;
    let mut operators = Vec::new();
    let mut seen: HashSet<Vec<(u32, u32, u64, u64)>> = HashSet::new();

    let mut push = |shape: GeneratorShape, modes: Vec<usize>, terms: &[(Complex64, Vec<LadderFactor>)]|
     -> Result<()> {
        let matrix = SparseOperator::from_terms(basis, terms)?;
        if matrix.num_entries() == 0 {
            return Ok(());
        }
        if seen.insert(sign_normalized_key(&matrix)) {
            operators.push(PoolOperator { shape, modes, matrix });
        }
        Ok(())
    };

    for i in 0..m {
        for k in (i + 1)..m {
            if spin_filtered && i % 2 != k % 2 {
                continue;
            }
            push(
                GeneratorShape::Single,
                vec![i, k],
                &[
                    (one, vec![(i, LadderKind::Create), (k, LadderKind::Annihilate)]),
                    (-one, vec![(k, LadderKind::Create), (i, LadderKind::Annihilate)]),
                ],
            )?;
        }
    }

    let mut pairs = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            pairs.push((i, j));
        }
    }
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for &(k, l) in pairs.iter().skip(a + 1) {
            if spin_filtered && up_count(&[i, j]) != up_count(&[k, l]) {
                continue;
            }
            push(
                GeneratorShape::Double,
                vec![i, j, k, l],
                &[
                    (
                        one,
                        vec![
                            (i, LadderKind::Create),
                            (j, LadderKind::Create),
                            (k, LadderKind::Annihilate),
                            (l, LadderKind::Annihilate),
                        ],
                    ),
                    (
                        -one,
                        vec![
                            (k, LadderKind::Create),
                            (l, LadderKind::Create),
                            (i, LadderKind::Annihilate),
                            (j, LadderKind::Annihilate),
                        ],
                    ),
                ],
            )?;
        }
    }

    if operators.is_empty() {
        return Err(Error::domain(
            "no singles/doubles generator is nonzero on this sector",
        ));
    }
    Ok(OperatorPool {
        kind: if spin_filtered {
            PoolKind::GsdSpinFiltered
        } else {
            PoolKind::Gsd
        },
        basis: Arc::clone(basis),
        operators,
    })
}

/// Pair-hop pool over hard-core boson levels; always `K(K-1)/2` operators.
pub fn build_pair_pool(basis: &Arc<FockBasis>) -> Result<OperatorPool> {
    if basis.space() != SpaceKind::HardCoreBoson {
        return Err(Error::domain("pair-hop pool requires a hard-core boson basis"));
    }
    let k = basis.num_modes();
    if k < 2 {
        return Err(Error::domain("pair-hop pool needs at least two levels"));
    }
    let one = Complex64::ONE;
    let mut operators = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            let matrix = SparseOperator::from_terms(
                basis,
                &[
                    (one, vec![(i, LadderKind::Create), (j, LadderKind::Annihilate)]),
                    (-one, vec![(j, LadderKind::Create), (i, LadderKind::Annihilate)]),
                ],
            )?;
            operators.push(PoolOperator {
                shape: GeneratorShape::PairHop,
                modes: vec![i, j],
                matrix,
            });
        }
    }
    Ok(OperatorPool {
        kind: PoolKind::Pair,
        basis: Arc::clone(basis),
        operators,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(b: FockBasis) -> Arc<FockBasis> {
        Arc::new(b)
    }

    #[test]
    fn two_modes_one_particle_has_single_generator() {
        let b = arc(FockBasis::new(SpaceKind::Fermion, 2, 1).unwrap());
        let pool = build_gsd_pool(&b, false).unwrap();
        assert_eq!(pool.len(), 1);
        let op = pool.operator_at(0).unwrap();
        assert_eq!(op.shape, GeneratorShape::Single);
        assert_eq!(op.modes, vec![0, 1]);
    }

    #[test]
    fn pair_pool_size_and_order() {
        let b = arc(FockBasis::new(SpaceKind::HardCoreBoson, 4, 2).unwrap());
        let pool = build_pair_pool(&b).unwrap();
        assert_eq!(pool.len(), 6);
        assert_eq!(pool.operator_at(0).unwrap().modes, vec![0, 1]);
        assert_eq!(pool.operator_at(5).unwrap().modes, vec![2, 3]);
    }

    #[test]
    fn all_generators_are_anti_hermitian() {
        let fb = arc(FockBasis::new(SpaceKind::Fermion, 4, 2).unwrap());
        let pool = build_gsd_pool(&fb, false).unwrap();
        for op in pool.operators() {
            assert!(
                op.matrix.anti_hermiticity_defect() <= 1e-14,
                "{:?} {:?}",
                op.shape,
                op.modes
            );
        }
        let bb = arc(FockBasis::new(SpaceKind::HardCoreBoson, 4, 2).unwrap());
        let pool = build_pair_pool(&bb).unwrap();
        for op in pool.operators() {
            assert!(op.matrix.anti_hermiticity_defect() <= 1e-14);
        }
    }

    #[test]
    fn spin_filter_keeps_same_spin_singles() {
        let b = arc(FockBasis::new(SpaceKind::Fermion, 4, 2).unwrap());
        let filtered = build_gsd_pool(&b, true).unwrap();
        let singles: Vec<&PoolOperator> = filtered
            .operators()
            .iter()
            .filter(|op| op.shape == GeneratorShape::Single)
            .collect();
        assert_eq!(singles.len(), 2);
        assert_eq!(singles[0].modes, vec![0, 2]);
        assert_eq!(singles[1].modes, vec![1, 3]);
    }

    #[test]
    fn filtered_pool_is_subset_of_unfiltered() {
        let b = arc(FockBasis::new(SpaceKind::Fermion, 6, 3).unwrap());
        let all = build_gsd_pool(&b, false).unwrap();
        let filtered = build_gsd_pool(&b, true).unwrap();
        assert!(filtered.len() < all.len());
        let all_modes: Vec<&Vec<usize>> = all.operators().iter().map(|o| &o.modes).collect();
        for op in filtered.operators() {
            assert!(all_modes.contains(&&op.modes));
        }
    }

    #[test]
    fn pool_index_out_of_range_errors() {
        let b = arc(FockBasis::new(SpaceKind::HardCoreBoson, 3, 1).unwrap());
        let pool = build_pair_pool(&b).unwrap();
        assert_eq!(pool.len(), 3);
        assert!(pool.operator_at(3).is_err());
    }

    #[test]
    fn wrong_space_is_rejected() {
        let fb = arc(FockBasis::new(SpaceKind::Fermion, 4, 2).unwrap());
        assert!(build_pair_pool(&fb).is_err());
        let bb = arc(FockBasis::new(SpaceKind::HardCoreBoson, 4, 2).unwrap());
        assert!(build_gsd_pool(&bb, false).is_err());
    }

    #[test]
    fn generators_conserve_particle_number() {
        let b = arc(FockBasis::new(SpaceKind::Fermion, 4, 2).unwrap());
        let pool = build_gsd_pool(&b, false).unwrap();
        let n_terms: Vec<(Complex64, Vec<LadderFactor>)> = (0..4)
            .map(|m| {
                (
                    Complex64::ONE,
                    vec![(m, LadderKind::Create), (m, LadderKind::Annihilate)],
                )
            })
            .collect();
        let n_op = SparseOperator::from_terms(&b, &n_terms).unwrap();
        for op in pool.operators() {
            let comm = op
                .matrix
                .matmul(&n_op)
                .unwrap()
                .add(&n_op.matmul(&op.matrix).unwrap().scaled(-Complex64::ONE))
                .unwrap();
            assert!(comm.norm_fro() <= 1e-12);
        }
    }

    #[test]
    fn duplicate_sector_realizations_are_dropped() {
        // On a half-filled two-orbital sector several canonical doubles
        // collapse to the same matrix up to sign; the pool must not repeat.
        let b = arc(FockBasis::new(SpaceKind::Fermion, 4, 2).unwrap());
        let pool = build_gsd_pool(&b, false).unwrap();
        let mut keys = HashSet::new();
        for op in pool.operators() {
            assert!(
                keys.insert(sign_normalized_key(&op.matrix)),
                "duplicate realization at {:?}",
                op.modes
            );
        }
    }
}
