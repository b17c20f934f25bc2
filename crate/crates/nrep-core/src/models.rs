//! The three model systems targets are generated from: molecular
//! Hamiltonians read from FCIDUMP integral files, a reduced pairing
//! Hamiltonian on doubly-occupied levels, and an anisotropic spin chain in
//! its hard-core boson form.
//!
//! Spin orbitals interleave spins within a spatial orbital: orbital `p` with
//! spin up is mode `2p`, with spin down mode `2p + 1`. Pair-level systems
//! use one hard-core mode per level.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockBasis, LadderFactor, LadderKind, SparseOperator, SpaceKind, StateVector};
use crate::linalg::hermitian_eigen;

use LadderKind::{Annihilate, Create};

/// One- and two-electron integrals over spatial molecular orbitals, with the
/// two-body tensor in chemists' index order `(pq|rs)`.
#[derive(Debug, Clone)]
pub struct MolecularIntegrals {
    num_orbitals: usize,
    num_electrons: usize,
    ms2: i64,
    core_energy: f64,
    one_body: Vec<f64>,
    two_body: Vec<f64>,
}

impl MolecularIntegrals {
    pub fn num_orbitals(&self) -> usize {
        self.num_orbitals
    }

    /// Number of spin orbitals, i.e. modes of the fermionic sector.
    pub fn num_spin_orbitals(&self) -> usize {
        2 * self.num_orbitals
    }

    pub fn num_electrons(&self) -> usize {
        self.num_electrons
    }

    pub fn ms2(&self) -> i64 {
        self.ms2
    }

    /// Constant shift (nuclear repulsion plus any frozen-core contribution).
    pub fn core_energy(&self) -> f64 {
        self.core_energy
    }

    pub fn one_body(&self, p: usize, q: usize) -> f64 {
        self.one_body[p * self.num_orbitals + q]
    }

    /// Chemists' `(pq|rs)`.
    pub fn two_body(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.num_orbitals;
        self.two_body[((p * n + q) * n + r) * n + s]
    }
}

pub fn load_fcidump(path: impl AsRef<Path>) -> Result<MolecularIntegrals> {
    let text = fs::read_to_string(path)?;
    parse_fcidump_text(&text)
}

/// Parses the FCIDUMP interchange format: a Fortran namelist header holding
/// `NORB`, `NELEC`, and optionally `MS2`, closed by `&END` or `/`, followed
/// by `value i j k l` records with 1-based indices. Two-body records carry
/// chemists' `(ij|kl)` and are expanded to all eight index symmetries;
/// `i 0 0 0` orbital-energy records are skipped; the mandatory `0 0 0 0`
/// record is the core energy.
pub fn parse_fcidump_text(text: &str) -> Result<MolecularIntegrals> {
    let mut lines = text.lines().enumerate().peekable();

    // ---- namelist header ----
    let mut header = String::new();
    let mut header_done = false;
    let mut last_line = 0usize;
    for (idx, raw) in lines.by_ref() {
        last_line = idx + 1;
        let mut chunk = raw.trim();
        if last_line == 1 {
            if !chunk.starts_with('&') {
                return Err(Error::parse(1, "expected a namelist header starting with '&'"));
            }
            // drop the '&FCI' group name
            chunk = chunk[1..].trim_start();
            if let Some(pos) = chunk.find(char::is_whitespace) {
                chunk = &chunk[pos..];
            } else {
                chunk = "";
            }
        }
        let end = chunk.find("&END").or_else(|| chunk.find("&end")).or_else(|| {
            // a bare '/' also closes a namelist
            chunk.find('/')
        });
        if let Some(pos) = end {
            header.push(' ');
            header.push_str(&chunk[..pos]);
            header_done = true;
            break;
        }
        header.push(' ');
        header.push_str(chunk);
    }
    if !header_done {
        return Err(Error::parse(last_line, "namelist header is never closed by &END or /"));
    }

    let mut norb: Option<usize> = None;
    let mut nelec: Option<usize> = None;
    let mut ms2: i64 = 0;
    for piece in header.split(',') {
        let piece = piece.trim();
        let Some((key, value)) = piece.split_once('=') else {
            continue; // continuation values of an array key such as ORBSYM
        };
        let value = value.trim();
        match key.trim().to_ascii_uppercase().as_str() {
            "NORB" => {
                norb = Some(value.parse().map_err(|_| {
                    Error::parse(1, format!("bad NORB value '{value}'"))
                })?);
            }
            "NELEC" => {
                nelec = Some(value.parse().map_err(|_| {
                    Error::parse(1, format!("bad NELEC value '{value}'"))
                })?);
            }
            "MS2" => {
                ms2 = value.parse().map_err(|_| {
                    Error::parse(1, format!("bad MS2 value '{value}'"))
                })?;
            }
            _ => {}
        }
    }
    let norb = norb.ok_or_else(|| Error::parse(1, "header does not define NORB"))?;
    let nelec = nelec.ok_or_else(|| Error::parse(1, "header does not define NELEC"))?;
    if norb == 0 || 2 * norb > crate::fock::MAX_MODES {
        return Err(Error::parse(
            1,
            format!("NORB = {norb} maps to an unsupported spin-orbital count"),
        ));
    }

    // ---- integral records ----
    let mut one_body = vec![0.0; norb * norb];
    let mut two_body = vec![0.0; norb * norb * norb * norb];
    let mut core: Option<f64> = None;
    for (idx, raw) in lines {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 5 {
            return Err(Error::parse(
                line_no,
                format!("expected 'value i j k l', got '{line}'"),
            ));
        }
        let value: f64 = toks[0]
            .replace(['D', 'd'], "E")
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad value '{}'", toks[0])))?;
        if !value.is_finite() {
            return Err(Error::parse(line_no, "integral value must be finite"));
        }
        let mut ix = [0usize; 4];
        for (slot, tok) in ix.iter_mut().zip(&toks[1..]) {
            let v: usize = tok
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad index '{tok}'")))?;
            if v > norb {
                return Err(Error::parse(
                    line_no,
                    format!("index {v} exceeds NORB = {norb}"),
                ));
            }
            *slot = v;
        }
        match ix {
            [0, 0, 0, 0] => core = Some(value),
            [_, 0, 0, 0] => {} // orbital energy, informational only
            [i, j, 0, 0] if i > 0 && j > 0 => {
                one_body[(i - 1) * norb + (j - 1)] = value;
                one_body[(j - 1) * norb + (i - 1)] = value;
            }
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                let (i, j, k, l) = (i - 1, j - 1, k - 1, l - 1);
                for (a, b, c, d) in [
                    (i, j, k, l),
                    (j, i, k, l),
                    (i, j, l, k),
                    (j, i, l, k),
                    (k, l, i, j),
                    (l, k, i, j),
                    (k, l, j, i),
                    (l, k, j, i),
                ] {
                    two_body[((a * norb + b) * norb + c) * norb + d] = value;
                }
            }
            _ => {
                return Err(Error::parse(
                    line_no,
                    format!("unsupported index pattern '{line}'"),
                ));
            }
        }
    }
    let core_energy = core.ok_or_else(|| {
        Error::parse(last_line, "missing core-energy record '0 0 0 0'")
    })?;

    Ok(MolecularIntegrals {
        num_orbitals: norb,
        num_electrons: nelec,
        ms2,
        core_energy,
        one_body,
        two_body,
    })
}

/// Second-quantized molecular Hamiltonian over spin orbitals, including the
/// core energy as a multiple of the identity, so expectation values are
/// total energies.
pub fn build_molecular_hamiltonian(
    ints: &MolecularIntegrals,
    basis: &Arc<FockBasis>,
) -> Result<SparseOperator> {
    if basis.space() != SpaceKind::Fermion {
        return Err(Error::domain("molecular Hamiltonian requires a fermionic basis"));
    }
    let m = ints.num_spin_orbitals();
    if basis.num_modes() != m {
        return Err(Error::mismatch(format!(
            "integrals describe {m} spin orbitals but the basis has {} modes",
            basis.num_modes()
        )));
    }
    let spatial = |t: usize| t / 2;
    let spin = |t: usize| t % 2;
    let mut terms: Vec<(Complex64, Vec<LadderFactor>)> = Vec::new();
    terms.push((Complex64::new(ints.core_energy, 0.0), Vec::new()));
    for p in 0..ints.num_orbitals() {
        for q in 0..ints.num_orbitals() {
            let h = ints.one_body(p, q);
            if h == 0.0 {
                continue;
            }
            for sigma in 0..2 {
                terms.push((
                    Complex64::new(h, 0.0),
                    vec![(2 * p + sigma, Create), (2 * q + sigma, Annihilate)],
                ));
            }
        }
    }
    // 1/4 sum_{ijkl} <ij||kl> a_i^+ a_j^+ a_l a_k over spin orbitals, where
    // <ij||kl> = (ik|jl) - (il|jk) with spin deltas on each pairing
    for i in 0..m {
        for j in 0..m {
            if i == j {
                continue;
            }
            for k in 0..m {
                for l in 0..m {
                    if k == l {
                        continue;
                    }
                    let mut w = 0.0;
                    if spin(i) == spin(k) && spin(j) == spin(l) {
                        w += ints.two_body(spatial(i), spatial(k), spatial(j), spatial(l));
                    }
                    if spin(i) == spin(l) && spin(j) == spin(k) {
                        w -= ints.two_body(spatial(i), spatial(l), spatial(j), spatial(k));
                    }
                    if w.abs() < 1e-14 {
                        continue;
                    }
                    terms.push((
                        Complex64::new(0.25 * w, 0.0),
                        vec![(i, Create), (j, Create), (l, Annihilate), (k, Annihilate)],
                    ));
                }
            }
        }
    }
    SparseOperator::from_terms(basis, &terms)
}

/// How the single-pair level energies of the pairing model are spaced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelSpacing {
    /// Level `l` (1-based) sits at `l / k`, keeping the band inside `(0, 1]`.
    OverK,
    /// Level `l` (1-based) sits at `l`.
    Unit,
}

/// Single-pair level energies, lowest first.
pub fn bcs_level_energies(k: usize, spacing: LevelSpacing) -> Vec<f64> {
    (1..=k)
        .map(|l| match spacing {
            LevelSpacing::OverK => l as f64 / k as f64,
            LevelSpacing::Unit => l as f64,
        })
        .collect()
}

/// Pairing Hamiltonian `sum_l e_l n_l - g sum_{ij} b_i^+ b_j` on hard-core
/// pair modes; the scatter sum includes `i = j`.
pub fn bcs_hamiltonian_with_levels(
    g: f64,
    levels: &[f64],
    basis: &Arc<FockBasis>,
) -> Result<SparseOperator> {
    if basis.space() != SpaceKind::HardCoreBoson {
        return Err(Error::domain("pairing Hamiltonian requires a hard-core boson basis"));
    }
    if basis.num_modes() != levels.len() {
        return Err(Error::mismatch(format!(
            "{} level energies for a basis with {} modes",
            levels.len(),
            basis.num_modes()
        )));
    }
    if !g.is_finite() || levels.iter().any(|e| !e.is_finite()) {
        return Err(Error::domain("pairing parameters must be finite"));
    }
    let mut terms: Vec<(Complex64, Vec<LadderFactor>)> = Vec::new();
    for (l, &e) in levels.iter().enumerate() {
        terms.push((Complex64::new(e, 0.0), vec![(l, Create), (l, Annihilate)]));
    }
    for i in 0..levels.len() {
        for j in 0..levels.len() {
            terms.push((Complex64::new(-g, 0.0), vec![(i, Create), (j, Annihilate)]));
        }
    }
    SparseOperator::from_terms(basis, &terms)
}

/// Pairing Hamiltonian with the default `l / k` level ladder.
pub fn build_bcs_hamiltonian(k: usize, g: f64, basis: &Arc<FockBasis>) -> Result<SparseOperator> {
    bcs_hamiltonian_with_levels(g, &bcs_level_energies(k, LevelSpacing::OverK), basis)
}

/// Mean-field critical coupling of the half-filled pairing model:
/// `1 / sum_l 1 / |e_l - mu|` with the chemical potential centered between
/// the highest filled and lowest empty level.
pub fn bcs_critical_g(k: usize, spacing: LevelSpacing) -> Result<f64> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::domain(format!(
            "critical coupling is defined for an even number of levels, got {k}"
        )));
    }
    let levels = bcs_level_energies(k, spacing);
    let m = k / 2;
    let mu = 0.5 * (levels[m - 1] + levels[m]);
    let sum: f64 = levels.iter().map(|e| 1.0 / (e - mu).abs()).sum();
    Ok(1.0 / sum)
}

/// Open-boundary anisotropic spin chain in hard-core boson form:
/// `sum_i [ (b_i^+ b_{i+1} + b_{i+1}^+ b_i) / 2 + delta (n_i - 1/2)(n_{i+1} - 1/2) ]`.
pub fn build_xxz_hamiltonian(
    k: usize,
    delta: f64,
    basis: &Arc<FockBasis>,
) -> Result<SparseOperator> {
    if basis.space() != SpaceKind::HardCoreBoson {
        return Err(Error::domain("spin-chain Hamiltonian requires a hard-core boson basis"));
    }
    if k < 2 {
        return Err(Error::domain("spin chain needs at least two sites"));
    }
    if basis.num_modes() != k {
        return Err(Error::mismatch(format!(
            "chain length {k} does not match basis with {} modes",
            basis.num_modes()
        )));
    }
    if !delta.is_finite() {
        return Err(Error::domain("anisotropy must be finite"));
    }
    let mut terms: Vec<(Complex64, Vec<LadderFactor>)> = Vec::new();
    for i in 0..k - 1 {
        let j = i + 1;
        terms.push((Complex64::new(0.5, 0.0), vec![(i, Create), (j, Annihilate)]));
        terms.push((Complex64::new(0.5, 0.0), vec![(j, Create), (i, Annihilate)]));
        // delta (n_i - 1/2)(n_j - 1/2), expanded
        terms.push((
            Complex64::new(delta, 0.0),
            vec![(i, Create), (i, Annihilate), (j, Create), (j, Annihilate)],
        ));
        terms.push((
            Complex64::new(-0.5 * delta, 0.0),
            vec![(i, Create), (i, Annihilate)],
        ));
        terms.push((
            Complex64::new(-0.5 * delta, 0.0),
            vec![(j, Create), (j, Annihilate)],
        ));
        terms.push((Complex64::new(0.25 * delta, 0.0), Vec::new()));
    }
    SparseOperator::from_terms(basis, &terms)
}

/// An eigenvalue with its normalized, phase-fixed eigenvector.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub vector: StateVector,
}

/// The `count` lowest eigenpairs of a Hermitian operator, ascending. Each
/// vector has its largest-magnitude amplitude rotated to the positive real
/// axis, and each is verified against the operator to a residual of 1e-10.
pub fn exact_eigenstates(h: &SparseOperator, count: usize) -> Result<Vec<EigenPair>> {
    let basis = h.basis();
    if count > basis.dim() {
        return Err(Error::domain(format!(
            "requested {count} eigenstates from a {}-dimensional space",
            basis.dim()
        )));
    }
    let (values, vectors) = hermitian_eigen(&h.to_dense(), 1e-10)?;
    let mut out = Vec::with_capacity(count);
    for c in 0..count {
        let mut amps: Vec<Complex64> = (0..basis.dim()).map(|r| vectors[(r, c)]).collect();
        let lead = amps
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.norm_sqr().partial_cmp(&b.norm_sqr()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let phase = amps[lead] / amps[lead].norm();
        for a in amps.iter_mut() {
            *a /= phase;
        }
        let vector = StateVector::from_amplitudes(basis, amps)?;
        let lambda = values[c];
        let mut image = h.apply(&vector)?;
        image.add_scaled(Complex64::new(-lambda, 0.0), &vector)?;
        if image.norm() > 1e-10 {
            return Err(Error::numerical(format!(
                "eigenpair {c} has residual {:.3e}",
                image.norm()
            )));
        }
        out.push(EigenPair { value: lambda, vector });
    }
    Ok(out)
}

/// Determinant with the lowest-index spin orbitals filled.
pub fn hartree_fock_reference(basis: &Arc<FockBasis>) -> Result<StateVector> {
    if basis.space() != SpaceKind::Fermion {
        return Err(Error::domain("the filled-determinant reference is fermionic"));
    }
    let n = basis
        .particle_count()
        .ok_or_else(|| Error::domain("reference states need a single-sector basis"))?;
    StateVector::basis_state(basis, (1u64 << n) - 1)
}

/// Pair condensate seed: the lowest levels filled with pairs.
pub fn pair_reference(basis: &Arc<FockBasis>) -> Result<StateVector> {
    if basis.space() != SpaceKind::HardCoreBoson {
        return Err(Error::domain("the pair reference lives on hard-core modes"));
    }
    let n = basis
        .particle_count()
        .ok_or_else(|| Error::domain("reference states need a single-sector basis"))?;
    StateVector::basis_state(basis, (1u64 << n) - 1)
}

/// Symmetric combination of the two alternating-occupation patterns, the
/// natural seed of the spin chain at strong anisotropy.
pub fn neel_superposition_reference(basis: &Arc<FockBasis>) -> Result<StateVector> {
    if basis.space() != SpaceKind::HardCoreBoson {
        return Err(Error::domain("the alternating reference lives on hard-core modes"));
    }
    let k = basis.num_modes();
    if k % 2 != 0 {
        return Err(Error::domain("the alternating reference needs an even chain"));
    }
    let even: u64 = (0..k).step_by(2).map(|i| 1u64 << i).sum();
    let odd: u64 = (1..k).step_by(2).map(|i| 1u64 << i).sum();
    let mut v = StateVector::basis_state(basis, even)?;
    let other = StateVector::basis_state(basis, odd)?;
    v.add_scaled(Complex64::ONE, &other)?;
    v.normalize()?;
    Ok(v)
}

/// Total-spin operator `S^2 = S_+ S_- + S_z^2 - S_z` over interleaved spin
/// orbitals; eigenvalue `s(s+1)` distinguishes singlets from triplets.
pub fn total_spin_squared(basis: &Arc<FockBasis>) -> Result<SparseOperator> {
    if basis.space() != SpaceKind::Fermion || basis.num_modes() % 2 != 0 {
        return Err(Error::domain(
            "total spin needs a fermionic basis with an even mode count",
        ));
    }
    let orbitals = basis.num_modes() / 2;
    let mut raise: Vec<(Complex64, Vec<LadderFactor>)> = Vec::new();
    let mut z: Vec<(Complex64, Vec<LadderFactor>)> = Vec::new();
    for p in 0..orbitals {
        raise.push((Complex64::ONE, vec![(2 * p, Create), (2 * p + 1, Annihilate)]));
        z.push((Complex64::new(0.5, 0.0), vec![(2 * p, Create), (2 * p, Annihilate)]));
        z.push((
            Complex64::new(-0.5, 0.0),
            vec![(2 * p + 1, Create), (2 * p + 1, Annihilate)],
        ));
    }
    let s_plus = SparseOperator::from_terms(basis, &raise)?;
    let s_z = SparseOperator::from_terms(basis, &z)?;
    s_plus
        .matmul(&s_plus.adjoint())?
        .add(&s_z.matmul(&s_z)?)?
        .add(&s_z.scaled(Complex64::new(-1.0, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;
    use std::path::PathBuf;

    fn asset(name: &str) -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../assets").join(name)
    }

    fn read_key_values(path: &Path) -> HashMap<String, String> {
        fs::read_to_string(path)
            .unwrap()
            .lines()
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect()
    }

    #[test]
    fn fcidump_parse_covers_record_kinds() {
        let text = "\
&FCI NORB=2,NELEC=2,\n ORBSYM=1,1,\n ISYM=1,\n&END\n\
 0.25 1 1 2 2\n\
 -1.0D0 1 1 0 0\n\
 -0.3 1 2 0 0\n\
 -0.9 1 0 0 0\n\
 0.5 0 0 0 0\n";
        let ints = parse_fcidump_text(text).unwrap();
        assert_eq!(ints.num_orbitals(), 2);
        assert_eq!(ints.num_electrons(), 2);
        assert_eq!(ints.ms2(), 0, "MS2 defaults to zero");
        assert_eq!(ints.core_energy(), 0.5);
        assert_eq!(ints.one_body(0, 0), -1.0, "D exponents are accepted");
        assert_eq!(ints.one_body(0, 1), -0.3);
        assert_eq!(ints.one_body(1, 0), -0.3, "one-body records are symmetrized");
        // all eight symmetry images of (00|11)
        assert_eq!(ints.two_body(0, 0, 1, 1), 0.25);
        assert_eq!(ints.two_body(1, 1, 0, 0), 0.25);
        assert_eq!(ints.two_body(0, 0, 1, 1), ints.two_body(0, 0, 1, 1));
    }

    #[test]
    fn fcidump_parse_errors() {
        assert!(matches!(
            parse_fcidump_text("&FCI NELEC=2,\n&END\n0.5 0 0 0 0\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_fcidump_text("not a namelist\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_fcidump_text("&FCI NORB=2,NELEC=2,\n&END\n1.0 1 1 0 0\n"),
            Err(Error::Parse { .. })
        ), "missing core record is an error");
        assert!(matches!(
            parse_fcidump_text("&FCI NORB=2,NELEC=2,\n&END\n1.0 3 1 0 0\n0.5 0 0 0 0\n"),
            Err(Error::Parse { line: 3, .. })
        ), "indices above NORB are rejected");
        assert!(matches!(
            parse_fcidump_text("&FCI NORB=2,NELEC=2,\n&END\n1.0 1 1 1\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_fcidump_text("&FCI NORB=2,NELEC=2,\n&END\n1.0 0 1 0 0\n0.5 0 0 0 0\n"),
            Err(Error::Parse { line: 3, .. })
        ), "a zero index inside a populated pattern is malformed");
        assert!(matches!(
            parse_fcidump_text("&FCI NORB=2,NELEC=2,\n"),
            Err(Error::Parse { .. })
        ), "unterminated header");
    }

    #[test]
    fn h4_hamiltonian_reproduces_reference_energies() {
        let ints = load_fcidump(asset("h4_sto3g_0p75.fcidump")).unwrap();
        assert_eq!(ints.num_orbitals(), 4);
        assert_eq!(ints.num_electrons(), 4);
        let refs = read_key_values(&asset("h4_sto3g_0p75.reference"));
        let get = |k: &str| refs[k].parse::<f64>().unwrap();

        assert!((ints.core_energy() - get("nuclear_repulsion")).abs() < 1e-12);

        let basis = Arc::new(FockBasis::new(SpaceKind::Fermion, 8, 4).unwrap());
        assert_eq!(basis.dim(), 70);
        let h = build_molecular_hamiltonian(&ints, &basis).unwrap();
        assert!(h.hermiticity_defect() < 1e-12);

        // the filled determinant gives the mean-field total energy
        let hf = hartree_fock_reference(&basis).unwrap();
        let e_hf = h.expectation(&hf).unwrap();
        assert!(e_hf.im.abs() < 1e-12);
        assert!(
            (e_hf.re - get("hf_total_energy")).abs() < 1e-8,
            "mean-field energy {} vs reference {}",
            e_hf.re,
            get("hf_total_energy")
        );

        let eigen = exact_eigenstates(&h, 6).unwrap();
        assert!(
            (eigen[0].value - get("fci_ground_energy")).abs() < 1e-8,
            "ground energy {} vs reference {}",
            eigen[0].value,
            get("fci_ground_energy")
        );

        // states 1..=3 form the triplet; the singlet gap partner sits above it
        let s2 = total_spin_squared(&basis).unwrap();
        let spin = |p: &EigenPair| s2.expectation(&p.vector).unwrap().re;
        assert!(spin(&eigen[0]).abs() < 1e-8);
        for pair in &eigen[1..=3] {
            assert!((spin(pair) - 2.0).abs() < 1e-8);
        }
        let excited_index = refs["excited_singlet_index"].parse::<usize>().unwrap();
        assert_eq!(excited_index, 4);
        assert!(spin(&eigen[excited_index]).abs() < 1e-8);
        assert!(
            (eigen[excited_index].value - get("fci_excited_singlet_energy")).abs() < 1e-8
        );

        // occupation spectra of the ground state match the reference run
        let g1 = crate::rdm::compute_rdm1(&eigen[0].vector).unwrap();
        let evs = g1.eigenvalues().unwrap();
        assert!((evs.first().unwrap() - get("ground_rdm1_eig_min")).abs() < 1e-6);
        assert!((evs.last().unwrap() - get("ground_rdm1_eig_max")).abs() < 1e-6);
        let g2 = crate::rdm::compute_rdm2(&eigen[0].vector).unwrap();
        let evs2 = g2.eigenvalues().unwrap();
        assert!((evs2.last().unwrap() - get("ground_rdm2_eig_max")).abs() < 1e-6);
    }

    #[test]
    fn pairing_model_energies_and_critical_coupling() {
        let basis = Arc::new(FockBasis::new(SpaceKind::HardCoreBoson, 4, 2).unwrap());
        let h0 = build_bcs_hamiltonian(4, 0.0, &basis).unwrap();
        let eigen = exact_eigenstates(&h0, 1).unwrap();
        // two pairs in the two lowest of (1/4, 2/4, 3/4, 1)
        assert!((eigen[0].value - 0.75).abs() < 1e-12);

        let h1 = build_bcs_hamiltonian(4, 1.0, &basis).unwrap();
        assert!(h1.hermiticity_defect() < 1e-12);
        let e1 = exact_eigenstates(&h1, 1).unwrap()[0].value;
        assert!(e1 < eigen[0].value, "attractive pairing lowers the energy");

        assert!((bcs_critical_g(4, LevelSpacing::OverK).unwrap() - 0.046875).abs() < 1e-15);
        assert!((bcs_critical_g(4, LevelSpacing::Unit).unwrap() - 0.1875).abs() < 1e-15);
        assert!(bcs_critical_g(3, LevelSpacing::Unit).is_err());

        let levels = bcs_level_energies(4, LevelSpacing::OverK);
        assert_eq!(levels, vec![0.25, 0.5, 0.75, 1.0]);
        assert!((0.5 * (levels[1] + levels[2]) - 0.625).abs() < 1e-15);
    }

    #[test]
    fn two_site_chain_spectrum() {
        let basis = Arc::new(FockBasis::new(SpaceKind::HardCoreBoson, 2, 1).unwrap());
        for delta in [0.0, 0.7, -1.3] {
            let h = build_xxz_hamiltonian(2, delta, &basis).unwrap();
            let eigen = exact_eigenstates(&h, 2).unwrap();
            let shift = -0.25 * delta;
            assert!((eigen[0].value - (shift - 0.5)).abs() < 1e-12);
            assert!((eigen[1].value - (shift + 0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn alternating_reference_expectation() {
        let basis = Arc::new(FockBasis::new(SpaceKind::HardCoreBoson, 4, 2).unwrap());
        let neel = neel_superposition_reference(&basis).unwrap();
        let delta = 2.3;
        let h = build_xxz_hamiltonian(4, delta, &basis).unwrap();
        // both alternating patterns see -delta/4 on each of the three bonds,
        // and a single hop cannot connect them
        let e = h.expectation(&neel).unwrap();
        assert!((e.re - (-0.75 * delta)).abs() < 1e-12);
        assert!(e.im.abs() < 1e-14);
    }

    #[test]
    fn strong_anisotropy_ground_state_is_the_alternating_superposition() {
        let basis = Arc::new(FockBasis::new(SpaceKind::HardCoreBoson, 4, 2).unwrap());
        let h = build_xxz_hamiltonian(4, 40.0, &basis).unwrap();
        let ground = &exact_eigenstates(&h, 1).unwrap()[0];
        let neel = neel_superposition_reference(&basis).unwrap();
        let overlap = neel.inner(&ground.vector).unwrap();
        assert!(
            overlap.norm_sqr() > 0.99,
            "overlap^2 = {} should be near one at strong anisotropy",
            overlap.norm_sqr()
        );
    }

    #[test]
    fn eigenstates_are_sorted_phase_fixed_and_verified() {
        let basis = Arc::new(FockBasis::new(SpaceKind::HardCoreBoson, 3, 1).unwrap());
        let h = build_xxz_hamiltonian(3, 0.9, &basis).unwrap();
        let eigen = exact_eigenstates(&h, 3).unwrap();
        for w in eigen.windows(2) {
            assert!(w[0].value <= w[1].value);
        }
        for pair in &eigen {
            let lead = pair
                .vector
                .amplitudes()
                .iter()
                .cloned()
                .max_by(|a, b| a.norm_sqr().partial_cmp(&b.norm_sqr()).unwrap())
                .unwrap();
            assert!(lead.im.abs() < 1e-12 && lead.re > 0.0, "leading amplitude {lead}");
        }
        assert!(exact_eigenstates(&h, 4).is_err(), "space is 3-dimensional");
    }

    #[test]
    fn spin_eigenvalues_of_simple_determinants() {
        let basis = Arc::new(FockBasis::new(SpaceKind::Fermion, 4, 2).unwrap());
        let s2 = total_spin_squared(&basis).unwrap();
        let paired = StateVector::basis_state(&basis, 0b0011).unwrap();
        assert!(s2.expectation(&paired).unwrap().norm() < 1e-12);
        let aligned = StateVector::basis_state(&basis, 0b0101).unwrap();
        assert!((s2.expectation(&aligned).unwrap().re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn reference_states_validate_their_space() {
        let fermion = Arc::new(FockBasis::new(SpaceKind::Fermion, 4, 2).unwrap());
        let pairs = Arc::new(FockBasis::new(SpaceKind::HardCoreBoson, 4, 2).unwrap());
        assert!(hartree_fock_reference(&fermion).is_ok());
        assert!(hartree_fock_reference(&pairs).is_err());
        assert!(pair_reference(&pairs).is_ok());
        assert!(pair_reference(&fermion).is_err());
        assert!(neel_superposition_reference(&pairs).is_ok());
        let odd = Arc::new(FockBasis::new(SpaceKind::HardCoreBoson, 3, 1).unwrap());
        assert!(neel_superposition_reference(&odd).is_err());
    }
}
