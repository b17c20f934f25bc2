//! Reduced density matrices, target payloads, noise, and the
//! Hilbert-Schmidt distance the annealer minimizes.
//!
//! Conventions, fixed across the crate and the target file format:
//!
//! * 1-RDM: `g1[i, j] = <a_i^+ a_j>`, an `m x m` Hermitian matrix with
//!   trace equal to the particle number.
//! * 2-RDM: `g2[(i,j), (k,l)] = <a_i^+ a_j^+ a_l a_k>` stored as the
//!   composite `m^2 x m^2` matrix with row `i*m + j` and column `k*m + l`;
//!   its pair trace is `N(N-1)` and contracting the second index pair onto
//!   the first reproduces `(N-1)` times the 1-RDM.
//! * Seniority-zero (pair-level) states use two blocks:
//!   `pi[i, j] = <b_i^+ b_j>` and `d[i, j] = <n_i n_j>`; `trace(pi)` is the
//!   pair count.
//!
//! The distance between two payloads of the same shape is the squared
//! Hilbert-Schmidt norm `sum |a - b|^2` over every stored element; for the
//! two-block payload the block distances are added with equal weight.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fock::{FockBasis, LadderKind, SpaceKind, StateVector};
use crate::linalg::hermitian_eigenvalues;

const TARGET_MAGIC: &str = "NREP-TARGET";
const TARGET_VERSION: &str = "v1";

/// Payload discriminant; also the `kind` token in target files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdmKind {
    Rdm1,
    Rdm2,
    Doci,
}

impl RdmKind {
    pub fn token(&self) -> &'static str {
        match self {
            RdmKind::Rdm1 => "rdm1",
            RdmKind::Rdm2 => "rdm2",
            RdmKind::Doci => "doci",
        }
    }

    pub fn from_token(t: &str) -> Option<RdmKind> {
        match t {
            "rdm1" => Some(RdmKind::Rdm1),
            "rdm2" => Some(RdmKind::Rdm2),
            "doci" => Some(RdmKind::Doci),
            _ => None,
        }
    }
}

/// One-body reduced density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Rdm1 {
    matrix: DMatrix<Complex64>,
}

impl Rdm1 {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Rdm1> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::domain("1-RDM must be square and nonempty"));
        }
        Ok(Rdm1 { matrix })
    }

    pub fn num_modes(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.diagonal().iter().sum()
    }

    /// Occupation spectrum, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.matrix, 1e-8)
    }
}

/// Two-body reduced density matrix in the composite-index view.
#[derive(Debug, Clone, PartialEq)]
pub struct Rdm2 {
    num_modes: usize,
    composite: DMatrix<Complex64>,
}

impl Rdm2 {
    pub fn new(num_modes: usize, composite: DMatrix<Complex64>) -> Result<Rdm2> {
        let want = num_modes * num_modes;
        if composite.nrows() != want || composite.ncols() != want {
            return Err(Error::domain(format!(
                "composite 2-RDM for {num_modes} modes must be {want} x {want}"
            )));
        }
        Ok(Rdm2 {
            num_modes,
            composite,
        })
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn composite(&self) -> &DMatrix<Complex64> {
        &self.composite
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        self.composite[(i * self.num_modes + j, k * self.num_modes + l)]
    }

    /// `sum_{ij} g2[(i,j), (i,j)]`; equals `N(N-1)` for a physical state.
    pub fn pair_trace(&self) -> Complex64 {
        self.composite.diagonal().iter().sum()
    }

    /// `sum_j g2[(i,j), (k,j)]`, which equals `(N-1)` times the 1-RDM for a
    /// physical state.
    pub fn contraction(&self) -> DMatrix<Complex64> {
        let m = self.num_modes;
        let mut out = DMatrix::zeros(m, m);
        for i in 0..m {
            for k in 0..m {
                let mut acc = Complex64::ZERO;
                for j in 0..m {
                    acc += self.composite[(i * m + j, k * m + j)];
                }
                out[(i, k)] = acc;
            }
        }
        out
    }

    /// Largest violation of `g2(i,j,k,l) = -g2(j,i,k,l) = -g2(i,j,l,k)`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let m = self.num_modes;
        let mut defect: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let v = self.get(i, j, k, l);
                        defect = defect.max((v + self.get(j, i, k, l)).norm());
                        defect = defect.max((v + self.get(i, j, l, k)).norm());
                    }
                }
            }
        }
        defect
    }

    /// Spectrum of the composite matrix, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.composite, 1e-8)
    }
}

/// Pair-number and pair-hop blocks of a seniority-zero state.
#[derive(Debug, Clone, PartialEq)]
pub struct DociBlocks {
    pi: DMatrix<Complex64>,
    d: DMatrix<Complex64>,
}

impl DociBlocks {
    pub fn new(pi: DMatrix<Complex64>, d: DMatrix<Complex64>) -> Result<DociBlocks> {
        if pi.nrows() != pi.ncols() || pi.nrows() == 0 {
            return Err(Error::domain("pi block must be square and nonempty"));
        }
        if d.nrows() != pi.nrows() || d.ncols() != pi.ncols() {
            return Err(Error::domain("pi and d blocks must have matching shapes"));
        }
        Ok(DociBlocks { pi, d })
    }

    pub fn num_levels(&self) -> usize {
        self.pi.nrows()
    }

    pub fn pi(&self) -> &DMatrix<Complex64> {
        &self.pi
    }

    pub fn d(&self) -> &DMatrix<Complex64> {
        &self.d
    }

    /// Equals the pair count for a physical state.
    pub fn pi_trace(&self) -> Complex64 {
        self.pi.diagonal().iter().sum()
    }
}

/// A reduced-density payload of any of the three supported shapes.
#[derive(Debug, Clone, PartialEq)]
pub enum RdmPayload {
    One(Rdm1),
    Two(Rdm2),
    Doci(DociBlocks),
}

impl RdmPayload {
    pub fn kind(&self) -> RdmKind {
        match self {
            RdmPayload::One(_) => RdmKind::Rdm1,
            RdmPayload::Two(_) => RdmKind::Rdm2,
            RdmPayload::Doci(_) => RdmKind::Doci,
        }
    }

    /// Mode (or pair-level) count of the underlying system.
    pub fn num_modes(&self) -> usize {
        match self {
            RdmPayload::One(g) => g.num_modes(),
            RdmPayload::Two(g) => g.num_modes(),
            RdmPayload::Doci(b) => b.num_levels(),
        }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        fn defect(m: &DMatrix<Complex64>) -> f64 {
            let n = m.nrows();
            (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| (m[(i, j)] - m[(j, i)].conj()).norm())
                .fold(0.0f64, f64::max)
        }
        match self {
            RdmPayload::One(g) => defect(&g.matrix),
            RdmPayload::Two(g) => defect(&g.composite),
            RdmPayload::Doci(b) => defect(&b.pi).max(defect(&b.d)),
        }
    }
}

/// Squared Hilbert-Schmidt distance between payloads of identical shape.
pub fn hs_distance(a: &RdmPayload, b: &RdmPayload) -> Result<f64> {
    fn block(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm_sqr()).sum()
    }
    match (a, b) {
        (RdmPayload::One(x), RdmPayload::One(y)) if x.num_modes() == y.num_modes() => {
            Ok(block(&x.matrix, &y.matrix))
        }
        (RdmPayload::Two(x), RdmPayload::Two(y)) if x.num_modes() == y.num_modes() => {
            Ok(block(&x.composite, &y.composite))
        }
        (RdmPayload::Doci(x), RdmPayload::Doci(y)) if x.num_levels() == y.num_levels() => {
            Ok(block(&x.pi, &y.pi) + block(&x.d, &y.d))
        }
        _ => Err(Error::mismatch(format!(
            "cannot compare {} ({} modes) with {} ({} modes)",
            a.kind().token(),
            a.num_modes(),
            b.kind().token(),
            b.num_modes()
        ))),
    }
}

fn require_single_sector(basis: &Arc<FockBasis>, space: SpaceKind, what: &str) -> Result<usize> {
    if basis.space() != space {
        return Err(Error::domain(format!(
            "{what} requires a {space} basis, got {}",
            basis.space()
        )));
    }
    basis.particle_count().ok_or_else(|| {
        Error::domain(format!("{what} requires a single-sector basis"))
    })
}

/// `<a_i^+ a_j>` over a normalized fermionic sector state.
pub fn compute_rdm1(v: &StateVector) -> Result<Rdm1> {
    let basis = v.basis();
    require_single_sector(basis, SpaceKind::Fermion, "1-RDM extraction")?;
    let m = basis.num_modes();
    let mut g = DMatrix::zeros(m, m);
    for col in 0..basis.dim() {
        let amp = v.amplitude(col);
        if amp == Complex64::ZERO {
            continue;
        }
        let s = basis.state_at(col);
        for j in 0..m {
            if s & (1 << j) == 0 {
                continue;
            }
            for i in 0..m {
                if let Some((image, sign)) = crate::fock::apply_ladder_product(
                    SpaceKind::Fermion,
                    s,
                    &[(i, LadderKind::Create), (j, LadderKind::Annihilate)],
                ) {
                    if let Some(row) = basis.index_of(image) {
                        g[(i, j)] += sign * v.amplitude(row).conj() * amp;
                    }
                }
            }
        }
    }
    Rdm1::new(g)
}

/// `<a_i^+ a_j^+ a_l a_k>` in the composite view, over a normalized
/// fermionic sector state with at least two particles.
pub fn compute_rdm2(v: &StateVector) -> Result<Rdm2> {
    let basis = v.basis();
    let n = require_single_sector(basis, SpaceKind::Fermion, "2-RDM extraction")?;
    if n < 2 {
        return Err(Error::domain(format!(
            "2-RDM extraction needs at least 2 particles, sector has {n}"
        )));
    }
    let m = basis.num_modes();
    let mut g = DMatrix::zeros(m * m, m * m);
    let mut holes: Vec<usize> = Vec::with_capacity(m);
    // antisymmetry lets us evaluate one ordered representative per index
    // pair and fill the other three entries by sign
    for col in 0..basis.dim() {
        let amp = v.amplitude(col);
        if amp == Complex64::ZERO {
            continue;
        }
        let s = basis.state_at(col);
        for k in 0..m {
            if s & (1 << k) == 0 {
                continue;
            }
            let sign_k = jw(s, k);
            let s1 = s ^ (1 << k);
            for l in k + 1..m {
                if s1 & (1 << l) == 0 {
                    continue;
                }
                let sign_kl = sign_k * jw(s1, l);
                let mid = s1 ^ (1 << l);
                holes.clear();
                holes.extend((0..m).filter(|&h| mid & (1 << h) == 0));
                for (jpos, &j) in holes.iter().enumerate() {
                    let sign_j = jw(mid, j);
                    let s2 = mid | (1 << j);
                    for &i in &holes[..jpos] {
                        let image = s2 | (1 << i);
                        let sign = sign_kl * sign_j * jw(s2, i);
                        if let Some(row) = basis.index_of(image) {
                            let c = sign * v.amplitude(row).conj() * amp;
                            g[(i * m + j, k * m + l)] += c;
                            g[(j * m + i, k * m + l)] -= c;
                            g[(i * m + j, l * m + k)] -= c;
                            g[(j * m + i, l * m + k)] += c;
                        }
                    }
                }
            }
        }
    }
    Rdm2::new(m, g)
}

#[inline]
fn jw(state: u64, mode: usize) -> f64 {
    if (state & ((1u64 << mode) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `pi[i,j] = <b_i^+ b_j>` and `d[i,j] = <n_i n_j>` over a normalized
/// hard-core boson sector state.
pub fn compute_doci_blocks(v: &StateVector) -> Result<DociBlocks> {
    let basis = v.basis();
    require_single_sector(basis, SpaceKind::HardCoreBoson, "pair-block extraction")?;
    let m = basis.num_modes();
    let mut pi = DMatrix::zeros(m, m);
    let mut d = DMatrix::zeros(m, m);
    for col in 0..basis.dim() {
        let amp = v.amplitude(col);
        if amp == Complex64::ZERO {
            continue;
        }
        let s = basis.state_at(col);
        let weight = Complex64::new(amp.norm_sqr(), 0.0);
        for j in 0..m {
            if s & (1 << j) == 0 {
                continue;
            }
            // diagonal of pi and the full d block come straight from the
            // occupations; no signs in the pair algebra
            pi[(j, j)] += weight;
            for k in 0..m {
                if s & (1 << k) != 0 {
                    d[(j, k)] += weight;
                }
            }
            // <b_i^+ b_j> for i empty: hop j -> i
            for i in 0..m {
                if i != j && s & (1 << i) == 0 {
                    let image = (s ^ (1 << j)) | (1 << i);
                    if let Some(row) = basis.index_of(image) {
                        pi[(i, j)] += v.amplitude(row).conj() * amp;
                    }
                }
            }
        }
    }
    DociBlocks::new(pi, d)
}

/// Extraction dispatched on the payload kind.
pub fn extract_payload(kind: RdmKind, v: &StateVector) -> Result<RdmPayload> {
    Ok(match kind {
        RdmKind::Rdm1 => RdmPayload::One(compute_rdm1(v)?),
        RdmKind::Rdm2 => RdmPayload::Two(compute_rdm2(v)?),
        RdmKind::Doci => RdmPayload::Doci(compute_doci_blocks(v)?),
    })
}

/// Draws a symmetric perturbation with independent uniform `[-1, 1]` entries
/// (Hermitized as `R <- (R + R^T) / 2`) for every block of the payload and
/// returns `exact + epsilon * R`. The generator is seeded, so a given
/// `(seed, shape)` always yields the same perturbation. For the composite
/// 2-RDM view the noise is applied to the matrix as stored: fermionic
/// antisymmetry of the target is deliberately not restored.
pub fn add_noise(exact: &RdmPayload, epsilon: f64, seed: u64) -> Result<RdmPayload> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::domain(format!(
            "noise strength must be a finite non-negative number, got {epsilon}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perturb = |m: &DMatrix<Complex64>| -> DMatrix<Complex64> {
        let n = m.nrows();
        let mut r = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                r[(i, j)] = rng.gen_range(-1.0..=1.0);
            }
        }
        let sym = (&r + r.transpose()) * 0.5;
        let mut out = m.clone();
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] += Complex64::new(epsilon * sym[(i, j)], 0.0);
            }
        }
        out
    };
    Ok(match exact {
        RdmPayload::One(g) => RdmPayload::One(Rdm1::new(perturb(&g.matrix))?),
        RdmPayload::Two(g) => {
            RdmPayload::Two(Rdm2::new(g.num_modes(), perturb(&g.composite))?)
        }
        RdmPayload::Doci(b) => {
            let pi = perturb(&b.pi);
            let d = perturb(&b.d);
            RdmPayload::Doci(DociBlocks::new(pi, d)?)
        }
    })
}

/// A payload with its bookkeeping: how many particles (or pairs) the source
/// system has, where the matrix came from, and how much noise was mixed in.
#[derive(Debug, Clone)]
pub struct RdmTarget {
    pub payload: RdmPayload,
    pub particles: usize,
    pub provenance: Option<String>,
    pub noise_epsilon: f64,
}

impl RdmTarget {
    pub fn new(payload: RdmPayload, particles: usize) -> RdmTarget {
        RdmTarget {
            payload,
            particles,
            provenance: None,
            noise_epsilon: 0.0,
        }
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> RdmTarget {
        self.provenance = Some(provenance.into());
        self
    }

    /// Returns a noisy copy; the original is untouched.
    pub fn with_noise(&self, epsilon: f64, seed: u64) -> Result<RdmTarget> {
        let payload = add_noise(&self.payload, epsilon, seed)?;
        Ok(RdmTarget {
            payload,
            particles: self.particles,
            provenance: self.provenance.clone(),
            noise_epsilon: epsilon,
        })
    }
}

// ===========================================================================
// Target file format
// ===========================================================================

/// Serializes a target:
///
/// ```text
/// NREP-TARGET v1
/// kind <rdm1|rdm2|doci> modes <m> particles <n>
/// provenance <free text>          (optional)
/// <elements>
/// ```
///
/// Elements are `i j re im` (rdm1), `i j k l re im` (rdm2), or
/// `PI i j re im` / `D i j re im` (doci); indices are 0-based and omitted
/// elements are zero. Values are written with 17 significant digits so
/// write-then-read is exact.
pub fn target_to_string(target: &RdmTarget) -> String {
    let mut out = format!("{TARGET_MAGIC} {TARGET_VERSION}\n");
    out.push_str(&format!(
        "kind {} modes {} particles {}\n",
        target.payload.kind().token(),
        target.payload.num_modes(),
        target.particles
    ));
    if let Some(p) = &target.provenance {
        out.push_str(&format!("provenance {p}\n"));
    }
    let mut element = |prefix: &str, indices: &[usize], v: Complex64| {
        if v != Complex64::ZERO {
            out.push_str(prefix);
            for idx in indices {
                out.push_str(&format!("{idx} "));
            }
            out.push_str(&format!("{:.16e} {:.16e}\n", v.re, v.im));
        }
    };
    match &target.payload {
        RdmPayload::One(g) => {
            let m = g.num_modes();
            for i in 0..m {
                for j in 0..m {
                    element("", &[i, j], g.get(i, j));
                }
            }
        }
        RdmPayload::Two(g) => {
            let m = g.num_modes();
            for i in 0..m {
                for j in 0..m {
                    for k in 0..m {
                        for l in 0..m {
                            element("", &[i, j, k, l], g.get(i, j, k, l));
                        }
                    }
                }
            }
        }
        RdmPayload::Doci(b) => {
            let m = b.num_levels();
            for i in 0..m {
                for j in 0..m {
                    element("PI ", &[i, j], b.pi()[(i, j)]);
                }
            }
            for i in 0..m {
                for j in 0..m {
                    element("D ", &[i, j], b.d()[(i, j)]);
                }
            }
        }
    }
    out
}

pub fn write_target(target: &RdmTarget, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, target_to_string(target))?;
    Ok(())
}

pub fn read_target(path: impl AsRef<Path>) -> Result<RdmTarget> {
    let text = fs::read_to_string(path)?;
    parse_target_text(&text)
}

pub fn parse_target_text(text: &str) -> Result<RdmTarget> {
    let mut lines = text.lines().enumerate();
    let (_, magic) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty target file"))?;
    if magic.trim() != format!("{TARGET_MAGIC} {TARGET_VERSION}") {
        return Err(Error::parse(
            1,
            format!("expected header '{TARGET_MAGIC} {TARGET_VERSION}', got '{magic}'"),
        ));
    }
    let (_, kind_line) = lines
        .next()
        .ok_or_else(|| Error::parse(2, "missing kind line"))?;
    let fields: Vec<&str> = kind_line.split_whitespace().collect();
    if fields.len() != 6 || fields[0] != "kind" || fields[2] != "modes" || fields[4] != "particles"
    {
        return Err(Error::parse(
            2,
            format!("expected 'kind <k> modes <m> particles <n>', got '{kind_line}'"),
        ));
    }
    let kind = RdmKind::from_token(fields[1])
        .ok_or_else(|| Error::parse(2, format!("unknown kind '{}'", fields[1])))?;
    let modes: usize = fields[3]
        .parse()
        .map_err(|_| Error::parse(2, format!("bad mode count '{}'", fields[3])))?;
    let particles: usize = fields[5]
        .parse()
        .map_err(|_| Error::parse(2, format!("bad particle count '{}'", fields[5])))?;
    if modes == 0 {
        return Err(Error::parse(2, "mode count must be positive"));
    }

    let mut provenance: Option<String> = None;
    let mut pi = DMatrix::<Complex64>::zeros(modes, modes);
    let mut d = DMatrix::<Complex64>::zeros(modes, modes);
    let mut one = DMatrix::<Complex64>::zeros(modes, modes);
    let mut two = if kind == RdmKind::Rdm2 {
        DMatrix::<Complex64>::zeros(modes * modes, modes * modes)
    } else {
        DMatrix::zeros(0, 0)
    };
    let mut seen: std::collections::HashSet<(u8, usize, usize)> = std::collections::HashSet::new();

    let parse_value = |line_no: usize, re: &str, im: &str| -> Result<Complex64> {
        let re: f64 = re
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad real part '{re}'")))?;
        let im: f64 = im
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad imaginary part '{im}'")))?;
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::parse(line_no, "element value must be finite"));
        }
        Ok(Complex64::new(re, im))
    };
    let parse_index = |line_no: usize, tok: &str, bound: usize| -> Result<usize> {
        let idx: usize = tok
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad index '{tok}'")))?;
        if idx >= bound {
            return Err(Error::parse(
                line_no,
                format!("index {idx} out of range for {bound} modes"),
            ));
        }
        Ok(idx)
    };

    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("provenance ") {
            if provenance.is_some() {
                return Err(Error::parse(line_no, "duplicate provenance line"));
            }
            provenance = Some(rest.to_string());
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match kind {
            RdmKind::Rdm1 => {
                if toks.len() != 4 {
                    return Err(Error::parse(
                        line_no,
                        format!("expected 'i j re im', got '{line}'"),
                    ));
                }
                let i = parse_index(line_no, toks[0], modes)?;
                let j = parse_index(line_no, toks[1], modes)?;
                if !seen.insert((0, i, j)) {
                    return Err(Error::parse(line_no, format!("duplicate element ({i}, {j})")));
                }
                one[(i, j)] = parse_value(line_no, toks[2], toks[3])?;
            }
            RdmKind::Rdm2 => {
                if toks.len() != 6 {
                    return Err(Error::parse(
                        line_no,
                        format!("expected 'i j k l re im', got '{line}'"),
                    ));
                }
                let i = parse_index(line_no, toks[0], modes)?;
                let j = parse_index(line_no, toks[1], modes)?;
                let k = parse_index(line_no, toks[2], modes)?;
                let l = parse_index(line_no, toks[3], modes)?;
                if !seen.insert((0, i * modes + j, k * modes + l)) {
                    return Err(Error::parse(
                        line_no,
                        format!("duplicate element ({i}, {j}, {k}, {l})"),
                    ));
                }
                two[(i * modes + j, k * modes + l)] = parse_value(line_no, toks[4], toks[5])?;
            }
            RdmKind::Doci => {
                if toks.len() != 5 || (toks[0] != "PI" && toks[0] != "D") {
                    return Err(Error::parse(
                        line_no,
                        format!("expected 'PI i j re im' or 'D i j re im', got '{line}'"),
                    ));
                }
                let block = if toks[0] == "PI" { 1u8 } else { 2u8 };
                let i = parse_index(line_no, toks[1], modes)?;
                let j = parse_index(line_no, toks[2], modes)?;
                if !seen.insert((block, i, j)) {
                    return Err(Error::parse(
                        line_no,
                        format!("duplicate element {} ({i}, {j})", toks[0]),
                    ));
                }
                let v = parse_value(line_no, toks[3], toks[4])?;
                if block == 1 {
                    pi[(i, j)] = v;
                } else {
                    d[(i, j)] = v;
                }
            }
        }
    }

    let payload = match kind {
        RdmKind::Rdm1 => RdmPayload::One(Rdm1::new(one)?),
        RdmKind::Rdm2 => RdmPayload::Two(Rdm2::new(modes, two)?),
        RdmKind::Doci => RdmPayload::Doci(DociBlocks::new(pi, d)?),
    };
    let mut target = RdmTarget::new(payload, particles);
    target.provenance = provenance;
    Ok(target)
}
