//! Dense brute-force oracles for the integration tests.
//!
//! Everything here is built by an independent route from the main crate:
//! operators are assembled as Kronecker products of 2x2 blocks over the full
//! `2^n` space (mode 0 in the least significant bit, so the *last* Kronecker
//! factor acts on mode 0), matrix exponentials use scaling-and-squaring, and
//! eigenvalues come from a cyclic Jacobi solver. Dimensions are expected to
//! stay small (`2^8` at most); these routines favor obviousness over speed.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn kron_chain(factors: &[CMat]) -> CMat {
    let mut acc = DMatrix::identity(1, 1);
    for f in factors {
        acc = acc.kronecker(f);
    }
    acc
}

fn eye2() -> CMat {
    DMatrix::identity(2, 2)
}

fn lower2() -> CMat {
    // annihilation on one mode: |1> -> |0>
    let mut m = DMatrix::zeros(2, 2);
    m[(0, 1)] = c(1.0);
    m
}

fn raise2() -> CMat {
    let mut m = DMatrix::zeros(2, 2);
    m[(1, 0)] = c(1.0);
    m
}

fn zsign2() -> CMat {
    let mut m = DMatrix::zeros(2, 2);
    m[(0, 0)] = c(1.0);
    m[(1, 1)] = c(-1.0);
    m
}

fn number2() -> CMat {
    let mut m = DMatrix::zeros(2, 2);
    m[(1, 1)] = c(1.0);
    m
}

/// Fermionic ladder operator on the full `2^num_modes` space with the
/// Jordan-Wigner string over modes below `mode`.
pub fn fermion_ladder(num_modes: usize, mode: usize, create: bool) -> CMat {
    assert!(mode < num_modes);
    let mut factors = Vec::new();
    for _ in 0..(num_modes - 1 - mode) {
        factors.push(eye2());
    }
    factors.push(if create { raise2() } else { lower2() });
    for _ in 0..mode {
        factors.push(zsign2());
    }
    kron_chain(&factors)
}

/// Hard-core boson ladder operator: same occupation action, no sign string.
pub fn boson_ladder(num_modes: usize, mode: usize, create: bool) -> CMat {
    assert!(mode < num_modes);
    let mut factors = Vec::new();
    for _ in 0..(num_modes - 1 - mode) {
        factors.push(eye2());
    }
    factors.push(if create { raise2() } else { lower2() });
    for _ in 0..mode {
        factors.push(eye2());
    }
    kron_chain(&factors)
}

/// Occupation-number operator for one mode on the full space.
pub fn mode_number(num_modes: usize, mode: usize) -> CMat {
    assert!(mode < num_modes);
    let mut factors = Vec::new();
    for _ in 0..(num_modes - 1 - mode) {
        factors.push(eye2());
    }
    factors.push(number2());
    for _ in 0..mode {
        factors.push(eye2());
    }
    kron_chain(&factors)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Full-space indices (= bitstring values) with the given popcount, ascending.
/// Matches the canonical sector ordering of the main crate.
pub fn sector_indices(num_modes: usize, count: usize) -> Vec<usize> {
    (0..(1usize << num_modes))
        .filter(|s| s.count_ones() as usize == count)
        .collect()
}

/// Submatrix on a list of full-space indices.
pub fn project(m: &CMat, idx: &[usize]) -> CMat {
    let n = idx.len();
    let mut out = DMatrix::zeros(n, n);
    for (r, &ir) in idx.iter().enumerate() {
        for (col, &ic) in idx.iter().enumerate() {
            out[(r, col)] = m[(ir, ic)];
        }
    }
    out
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn expm(m: &CMat) -> CMat {
    let n = m.nrows();
    let norm1 = (0..m.ncols())
        .map(|j| (0..n).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 {
        (norm1 / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m.map(|v| v / c(2f64.powi(squarings as i32)));
    let mut acc = DMatrix::identity(n, n);
    let mut term: CMat = DMatrix::identity(n, n);
    for k in 1..200 {
        term = (&term * &scaled).map(|v| v / c(k as f64));
        acc += &term;
        if max_abs(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    acc
}

/// Eigenvalues of a Hermitian matrix, ascending, via cyclic Jacobi on the
/// real symmetric embedding `[[A, -B], [B, A]]` of `H = A + iB`. Each
/// eigenvalue of `H` appears twice in the embedding; the duplicates are
/// collapsed by taking every other entry of the sorted list.
pub fn eigh_values(m: &CMat) -> Vec<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    let herm_defect = max_abs(&(m - m.adjoint()));
    assert!(
        herm_defect < 1e-10,
        "eigh_values expects a Hermitian matrix (defect {herm_defect:.3e})"
    );
    if m.iter().all(|v| v.im == 0.0) {
        let real = m.map(|v| v.re);
        let (vals, _) = jacobi_eigh(&real, false);
        return vals;
    }
    let mut embed = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            embed[(i, j)] = m[(i, j)].re;
            embed[(n + i, n + j)] = m[(i, j)].re;
            embed[(i, n + j)] = -m[(i, j)].im;
            embed[(n + i, j)] = m[(i, j)].im;
        }
    }
    let (vals, _) = jacobi_eigh(&embed, false);
    vals.into_iter().step_by(2).collect()
}

/// Eigen-decomposition of a real symmetric matrix, ascending eigenvalues,
/// eigenvectors in the corresponding columns.
pub fn eigh_real(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    jacobi_eigh(m, true)
}

fn jacobi_eigh(m: &DMatrix<f64>, want_vectors: bool) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut v = DMatrix::identity(n, n);
    let fro: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = 1e-15 * fro.max(1e-300);
    for _sweep in 0..100 {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let cos = 1.0 / (1.0 + t * t).sqrt();
                let sin = t * cos;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = cos * akp - sin * akq;
                    a[(k, q)] = sin * akp + cos * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = cos * apk - sin * aqk;
                    a[(q, k)] = sin * apk + cos * aqk;
                }
                if want_vectors {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = cos * vkp - sin * vkq;
                        v[(k, q)] = sin * vkp + cos * vkq;
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vecs = DMatrix::zeros(n, if want_vectors { n } else { 0 });
    if want_vectors {
        for (newcol, &oldcol) in order.iter().enumerate() {
            for k in 0..n {
                vecs[(k, newcol)] = v[(k, oldcol)];
            }
        }
    }
    (vals, vecs)
}

/// XXZ chain in its spin form on the full `2^k` space, open boundary:
/// site occupied = spin up, `S^+ = |up><down|`, `S^z = diag(-1/2, +1/2)`.
pub fn spin_xxz(k: usize, delta: f64) -> CMat {
    let dim = 1usize << k;
    let mut h: CMat = DMatrix::zeros(dim, dim);
    let sp: Vec<CMat> = (0..k).map(|i| boson_ladder(k, i, true)).collect();
    let sm: Vec<CMat> = (0..k).map(|i| boson_ladder(k, i, false)).collect();
    let sz: Vec<CMat> = (0..k)
        .map(|i| mode_number(k, i) - DMatrix::identity(dim, dim).map(|v: Complex64| v * c(0.5)))
        .collect();
    for i in 0..(k - 1) {
        h += (&sp[i] * &sm[i + 1] + &sm[i] * &sp[i + 1]).map(|v| v * c(0.5));
        h += (&sz[i] * &sz[i + 1]).map(|v| v * c(delta));
    }
    h
}
