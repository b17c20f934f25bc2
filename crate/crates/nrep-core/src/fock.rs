//! Occupation-number state spaces, state vectors, and sparse operators.
//!
//! A basis state is a `u64` occupation bitstring over `num_modes` modes with
//! mode 0 stored in the least significant bit. A [`FockBasis`] enumerates the
//! bitstrings whose popcount lies in its allowed particle-count set, sorted
//! by increasing integer value; that ordering is the canonical index order
//! used by every vector and matrix in the crate.
//!
//! Fermionic ladder operators carry the Jordan-Wigner sign
//! `(-1)^(number of occupied modes with index < mode)`. Hard-core boson
//! ladder operators use the same occupation algebra without the sign string:
//! operators on different modes commute, and double occupation is excluded
//! by construction.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported mode count; sector enumeration is exponential beyond it.
pub const MAX_MODES: usize = 24;

/// Statistics of the underlying modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    /// Jordan-Wigner signs apply.
    Fermion,
    /// Pair-level algebra: no sign strings, at most one particle per mode.
    HardCoreBoson,
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceKind::Fermion => write!(f, "fermion"),
            SpaceKind::HardCoreBoson => write!(f, "hard-core boson"),
        }
    }
}

/// Elementary ladder operator direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderKind {
    Create,
    Annihilate,
}

/// One factor of a normal-ordered ladder product: `(mode, kind)`.
pub type LadderFactor = (usize, LadderKind);

/// An enumerated occupation basis with fixed mode count and an allowed set
/// of particle counts. Production sectors have a single count; unions of
/// adjacent counts appear transiently when materializing bare ladder
/// operators, and the full space (all counts) backs small exact checks.
pub struct FockBasis {
    space: SpaceKind,
    num_modes: usize,
    particle_counts: Vec<usize>,
    states: Vec<u64>,
    index: HashMap<u64, usize>,
}

impl FockBasis {
    /// Single-sector basis: all length-`num_modes` bitstrings with
    /// `particle_count` occupied modes, in increasing integer order.
    pub fn new(space: SpaceKind, num_modes: usize, particle_count: usize) -> Result<FockBasis> {
        Self::with_counts(space, num_modes, &[particle_count])
    }

    /// Basis over a union of particle-count sectors. Counts are deduplicated
    /// and must each be `<= num_modes`.
    pub fn with_counts(space: SpaceKind, num_modes: usize, counts: &[usize]) -> Result<FockBasis> {
        if num_modes == 0 || num_modes > MAX_MODES {
            return Err(Error::domain(format!(
                "num_modes must be in 1..={MAX_MODES}, got {num_modes}"
            )));
        }
        if counts.is_empty() {
            return Err(Error::domain("particle count set is empty"));
        }
        let mut particle_counts = counts.to_vec();
        particle_counts.sort_unstable();
        particle_counts.dedup();
        if let Some(&bad) = particle_counts.iter().find(|&&c| c > num_modes) {
            return Err(Error::domain(format!(
                "particle count {bad} exceeds num_modes {num_modes}"
            )));
        }
        let mut states = Vec::new();
        for &count in &particle_counts {
            enumerate_sector(num_modes, count, &mut states);
        }
        states.sort_unstable();
        let index = states
            .iter()
            .enumerate()
            .map(|(i, &s)| (s, i))
            .collect::<HashMap<_, _>>();
        Ok(FockBasis {
            space,
            num_modes,
            particle_counts,
            states,
            index,
        })
    }

    /// All `2^num_modes` occupation strings. Intended for small mode counts
    /// in exact cross-checks; errors above 16 modes.
    pub fn full(space: SpaceKind, num_modes: usize) -> Result<FockBasis> {
        if num_modes > 16 {
            return Err(Error::domain(format!(
                "full space is limited to 16 modes, got {num_modes}"
            )));
        }
        let counts: Vec<usize> = (0..=num_modes).collect();
        Self::with_counts(space, num_modes, &counts)
    }

    pub fn space(&self) -> SpaceKind {
        self.space
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    /// Number of basis states.
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// The fixed particle count, if this basis spans a single sector.
    pub fn particle_count(&self) -> Option<usize> {
        match self.particle_counts.as_slice() {
            [single] => Some(*single),
            _ => None,
        }
    }

    pub fn particle_counts(&self) -> &[usize] {
        &self.particle_counts
    }

    /// Bitstring of the `index`-th basis state.
    pub fn state_at(&self, index: usize) -> u64 {
        self.states[index]
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    /// Index of an occupation bitstring, if present.
    pub fn index_of(&self, state: u64) -> Option<usize> {
        self.index.get(&state).copied()
    }

    /// True when vectors/operators over `self` and `other` may be combined.
    pub fn compatible(&self, other: &FockBasis) -> bool {
        std::ptr::eq(self, other) || self == other
    }
}

impl PartialEq for FockBasis {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space
            && self.num_modes == other.num_modes
            && self.states == other.states
    }
}

impl fmt::Debug for FockBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FockBasis")
            .field("space", &self.space)
            .field("num_modes", &self.num_modes)
            .field("particle_counts", &self.particle_counts)
            .field("dim", &self.dim())
            .finish()
    }
}

/// Appends all `num_modes`-bit strings of popcount `count`, ascending,
/// via Gosper's next-bit-permutation.
fn enumerate_sector(num_modes: usize, count: usize, out: &mut Vec<u64>) {
    if count == 0 {
        out.push(0);
        return;
    }
    let limit: u64 = 1 << num_modes;
    let mut v: u64 = (1 << count) - 1;
    while v < limit {
        out.push(v);
        let t = v | (v - 1);
        let next = (t + 1) | ((((!t) & (!t).wrapping_neg()) - 1) >> (v.trailing_zeros() + 1));
        if next <= v {
            break;
        }
        v = next;
    }
}

/// Jordan-Wigner sign for acting with a ladder operator on `mode`:
/// parity of the occupied modes strictly below it.
#[inline]
fn jw_sign(state: u64, mode: usize) -> f64 {
    if (state & ((1u64 << mode) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Applies an ordered ladder product to a bitstring; the last factor in
/// `factors` acts first (operator strings read right to left). Returns the
/// image bitstring and accumulated sign, or `None` when annihilated.
pub(crate) fn apply_ladder_product(
    space: SpaceKind,
    mut state: u64,
    factors: &[LadderFactor],
) -> Option<(u64, f64)> {
    let mut sign = 1.0;
    for &(mode, kind) in factors.iter().rev() {
        let bit = 1u64 << mode;
        let occupied = state & bit != 0;
        match kind {
            LadderKind::Create if occupied => return None,
            LadderKind::Annihilate if !occupied => return None,
            _ => {}
        }
        if space == SpaceKind::Fermion {
            sign *= jw_sign(state, mode);
        }
        state ^= bit;
    }
    Some((state, sign))
}

// ===========================================================================
// State vectors
// ===========================================================================

/// Complex amplitudes over a [`FockBasis`], in canonical index order.
#[derive(Debug, Clone)]
pub struct StateVector {
    basis: Arc<FockBasis>,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The zero vector.
    pub fn zero(basis: &Arc<FockBasis>) -> StateVector {
        StateVector {
            basis: Arc::clone(basis),
            amplitudes: vec![Complex64::ZERO; basis.dim()],
        }
    }

    /// Unit vector on a single occupation bitstring.
    pub fn basis_state(basis: &Arc<FockBasis>, occupation: u64) -> Result<StateVector> {
        let idx = basis.index_of(occupation).ok_or_else(|| {
            Error::domain(format!(
                "occupation {occupation:#b} is not a state of this basis"
            ))
        })?;
        let mut v = StateVector::zero(basis);
        v.amplitudes[idx] = Complex64::ONE;
        Ok(v)
    }

    pub fn from_amplitudes(basis: &Arc<FockBasis>, amplitudes: Vec<Complex64>) -> Result<StateVector> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::domain(format!(
                "amplitude vector has length {}, basis dimension is {}",
                amplitudes.len(),
                basis.dim()
            )));
        }
        Ok(StateVector {
            basis: Arc::clone(basis),
            amplitudes,
        })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Scales to unit norm; errors on (numerically) zero vectors.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n < 1e-14 {
            return Err(Error::numerical("cannot normalize a zero vector"));
        }
        let inv = 1.0 / n;
        for a in &mut self.amplitudes {
            *a *= inv;
        }
        Ok(())
    }

    /// `<self|other>` with the left argument conjugated.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same_basis(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: Complex64, other: &StateVector) -> Result<()> {
        self.check_same_basis(other)?;
        for (a, b) in self.amplitudes.iter_mut().zip(&other.amplitudes) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn scale(&mut self, c: Complex64) {
        for a in &mut self.amplitudes {
            *a *= c;
        }
    }

    fn check_same_basis(&self, other: &StateVector) -> Result<()> {
        if !self.basis.compatible(&other.basis) {
            return Err(Error::mismatch("state vectors live on different bases"));
        }
        Ok(())
    }
}

// ===========================================================================
// Sparse operators
// ===========================================================================

/// A sparse matrix over a [`FockBasis`] in canonicalized triplet form:
/// entries sorted by `(row, col)`, duplicates summed, exact zeros dropped.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    basis: Arc<FockBasis>,
    rows: Vec<u32>,
    cols: Vec<u32>,
    values: Vec<Complex64>,
}

impl SparseOperator {
    /// Builds from unordered triplets, canonicalizing as it goes.
    pub fn new(
        basis: &Arc<FockBasis>,
        triplets: Vec<(usize, usize, Complex64)>,
    ) -> Result<SparseOperator> {
        let dim = basis.dim();
        for &(r, c, _) in &triplets {
            if r >= dim || c >= dim {
                return Err(Error::domain(format!(
                    "triplet ({r}, {c}) out of range for dimension {dim}"
                )));
            }
        }
        Ok(Self::canonical(basis, triplets))
    }

    fn canonical(
        basis: &Arc<FockBasis>,
        mut triplets: Vec<(usize, usize, Complex64)>,
    ) -> SparseOperator {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut rows = Vec::with_capacity(triplets.len());
        let mut cols = Vec::with_capacity(triplets.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            if let (Some(&lr), Some(&lc)) = (rows.last(), cols.last()) {
                if lr == r as u32 && lc == c as u32 {
                    *values.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(r as u32);
            cols.push(c as u32);
            values.push(v);
        }
        // drop entries that cancelled exactly
        let mut out = SparseOperator {
            basis: Arc::clone(basis),
            rows: Vec::new(),
            cols: Vec::new(),
            values: Vec::new(),
        };
        for i in 0..values.len() {
            if values[i] != Complex64::ZERO {
                out.rows.push(rows[i]);
                out.cols.push(cols[i]);
                out.values.push(values[i]);
            }
        }
        out
    }

    pub fn zero(basis: &Arc<FockBasis>) -> SparseOperator {
        SparseOperator {
            basis: Arc::clone(basis),
            rows: Vec::new(),
            cols: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(basis: &Arc<FockBasis>) -> SparseOperator {
        let dim = basis.dim() as u32;
        SparseOperator {
            basis: Arc::clone(basis),
            rows: (0..dim).collect(),
            cols: (0..dim).collect(),
            values: vec![Complex64::ONE; dim as usize],
        }
    }

    /// Sector matrix of a sum of ladder products,
    /// `sum_t coeff_t * prod_f factors_t`, evaluated by direct action on
    /// each basis bitstring. Images that fall outside the basis are dropped,
    /// which realizes the projection of the operator onto the spanned
    /// subspace; number-conserving terms on a single sector are exact.
    pub fn from_terms(
        basis: &Arc<FockBasis>,
        terms: &[(Complex64, Vec<LadderFactor>)],
    ) -> Result<SparseOperator> {
        let num_modes = basis.num_modes();
        for (_, factors) in terms {
            if let Some(&(mode, _)) = factors.iter().find(|&&(m, _)| m >= num_modes) {
                return Err(Error::domain(format!(
                    "ladder factor on mode {mode} exceeds num_modes {num_modes}"
                )));
            }
        }
        let mut triplets = Vec::new();
        for (coeff, factors) in terms {
            if *coeff == Complex64::ZERO {
                continue;
            }
            for col in 0..basis.dim() {
                let state = basis.state_at(col);
                if let Some((image, sign)) = apply_ladder_product(basis.space(), state, factors) {
                    if let Some(row) = basis.index_of(image) {
                        triplets.push((row, col, coeff * sign));
                    }
                }
            }
        }
        Ok(Self::canonical(basis, triplets))
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn num_entries(&self) -> usize {
        self.values.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.values.len()).map(|i| (self.rows[i] as usize, self.cols[i] as usize, self.values[i]))
    }

    /// `w = A v`.
    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if !self.basis.compatible(v.basis()) {
            return Err(Error::mismatch("operator and vector bases differ"));
        }
        let mut out = vec![Complex64::ZERO; self.basis.dim()];
        let amps = v.amplitudes();
        for i in 0..self.values.len() {
            out[self.rows[i] as usize] += self.values[i] * amps[self.cols[i] as usize];
        }
        Ok(StateVector {
            basis: Arc::clone(&self.basis),
            amplitudes: out,
        })
    }

    /// `<v| A |v>` for a normalized `v`.
    pub fn expectation(&self, v: &StateVector) -> Result<Complex64> {
        if !self.basis.compatible(v.basis()) {
            return Err(Error::mismatch("operator and vector bases differ"));
        }
        let amps = v.amplitudes();
        let mut acc = Complex64::ZERO;
        for i in 0..self.values.len() {
            acc += amps[self.rows[i] as usize].conj()
                * self.values[i]
                * amps[self.cols[i] as usize];
        }
        Ok(acc)
    }

    pub fn add(&self, other: &SparseOperator) -> Result<SparseOperator> {
        if !self.basis.compatible(&other.basis) {
            return Err(Error::mismatch("operator bases differ"));
        }
        let mut triplets: Vec<(usize, usize, Complex64)> = self
            .entries()
            .chain(other.entries())
            .collect();
        triplets.retain(|&(_, _, v)| v != Complex64::ZERO);
        Ok(Self::canonical(&self.basis, triplets))
    }

    pub fn scaled(&self, c: Complex64) -> SparseOperator {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= c;
        }
        out
    }

    /// `A * B` (self applied after `other`).
    pub fn matmul(&self, other: &SparseOperator) -> Result<SparseOperator> {
        if !self.basis.compatible(&other.basis) {
            return Err(Error::mismatch("operator bases differ"));
        }
        // group self's entries by column for j-matching
        let mut by_col: HashMap<u32, Vec<(u32, Complex64)>> = HashMap::new();
        for i in 0..self.values.len() {
            by_col
                .entry(self.cols[i])
                .or_default()
                .push((self.rows[i], self.values[i]));
        }
        let mut triplets = Vec::new();
        for i in 0..other.values.len() {
            if let Some(hits) = by_col.get(&other.rows[i]) {
                for &(row, va) in hits {
                    triplets.push((
                        row as usize,
                        other.cols[i] as usize,
                        va * other.values[i],
                    ));
                }
            }
        }
        Ok(Self::canonical(&self.basis, triplets))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> SparseOperator {
        let triplets = self
            .entries()
            .map(|(r, c, v)| (c, r, v.conj()))
            .collect();
        Self::canonical(&self.basis, triplets)
    }

    /// Largest `|A[i,j] - conj(A[j,i])|`; zero for an exactly Hermitian matrix.
    pub fn hermiticity_defect(&self) -> f64 {
        self.deviation_from(|v| v.conj())
    }

    /// Largest `|A[i,j] + conj(A[j,i])|`; zero for an exactly anti-Hermitian matrix.
    pub fn anti_hermiticity_defect(&self) -> f64 {
        self.deviation_from(|v| -v.conj())
    }

    fn deviation_from(&self, mirror: impl Fn(Complex64) -> Complex64) -> f64 {
        let mut defect: f64 = 0.0;
        for (r, c, v) in self.entries() {
            let transposed = self.get(c, r);
            defect = defect.max((v - mirror(transposed)).norm());
        }
        // entries present at (j,i) but absent at (i,j)
        for (r, c, v) in self.entries() {
            if self.get(c, r) == Complex64::ZERO {
                defect = defect.max(mirror(v).norm());
            }
        }
        defect
    }

    /// Value at `(row, col)`; zero when no entry is stored.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let key = (row as u32, col as u32);
        let mut lo = 0usize;
        let mut hi = self.values.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            let probe = (self.rows[mid], self.cols[mid]);
            if probe < key {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        if lo < self.values.len() && (self.rows[lo], self.cols[lo]) == key {
            self.values[lo]
        } else {
            Complex64::ZERO
        }
    }

    /// Frobenius norm of the stored entries.
    pub fn norm_fro(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = self.basis.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] += v;
        }
        m
    }

    /// Projects onto a sub-basis of the same space: keeps entries whose row
    /// and column bitstrings both exist in `sub`, reindexed accordingly.
    pub fn restrict_to(&self, sub: &Arc<FockBasis>) -> Result<SparseOperator> {
        if sub.space() != self.basis.space() || sub.num_modes() != self.basis.num_modes() {
            return Err(Error::mismatch(
                "restriction target has a different space or mode count",
            ));
        }
        let mut triplets = Vec::new();
        for (r, c, v) in self.entries() {
            let row_state = self.basis.state_at(r);
            let col_state = self.basis.state_at(c);
            if let (Some(nr), Some(nc)) = (sub.index_of(row_state), sub.index_of(col_state)) {
                triplets.push((nr, nc, v));
            }
        }
        Ok(Self::canonical(sub, triplets))
    }
}

/// Materializes a bare ladder operator. Because creation/annihilation change
/// the particle number, the returned operator lives on the union of each
/// allowed count with its shifted neighbor (clipped to `[0, num_modes]`);
/// number-conserving products should be assembled by multiplying such
/// operators and then restricting to the sector of interest, or directly
/// via [`SparseOperator::from_terms`].
pub fn ladder_matrix(
    basis: &Arc<FockBasis>,
    mode: usize,
    kind: LadderKind,
) -> Result<SparseOperator> {
    if mode >= basis.num_modes() {
        return Err(Error::domain(format!(
            "mode {mode} out of range for {} modes",
            basis.num_modes()
        )));
    }
    let mut counts = basis.particle_counts().to_vec();
    for &c in basis.particle_counts() {
        match kind {
            LadderKind::Create if c < basis.num_modes() => counts.push(c + 1),
            LadderKind::Annihilate if c > 0 => counts.push(c - 1),
            _ => {}
        }
    }
    counts.sort_unstable();
    counts.dedup();
    let union = if counts == basis.particle_counts() {
        Arc::clone(basis)
    } else {
        Arc::new(FockBasis::with_counts(
            basis.space(),
            basis.num_modes(),
            &counts,
        )?)
    };
    SparseOperator::from_terms(&union, &[(Complex64::ONE, vec![(mode, kind)])])
}
