//! Dense Hermitian eigendecomposition used by model diagnostics and RDM
//! spectra. Real symmetric input takes the direct path; general Hermitian
//! matrices go through the real symmetric embedding `[[A, -B], [B, A]]` of
//! `H = A + iB`, whose spectrum doubles each eigenvalue of `H` and whose
//! eigenvectors `(x; y)` recover complex eigenvectors `x + iy`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigenvalues (ascending) and matching eigenvector columns of a Hermitian
/// matrix. Errors when the Hermiticity defect exceeds `tol`.
pub(crate) fn hermitian_eigen(
    m: &DMatrix<Complex64>,
    tol: f64,
) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::domain("eigendecomposition requires a square matrix"));
    }
    if n == 0 {
        return Err(Error::domain("eigendecomposition of an empty matrix"));
    }
    let defect = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (m[(i, j)] - m[(j, i)].conj()).norm())
        .fold(0.0f64, f64::max);
    if defect > tol {
        return Err(Error::numerical(format!(
            "matrix is not Hermitian within {tol:.1e} (defect {defect:.3e})"
        )));
    }

    if m.iter().all(|v| v.im == 0.0) {
        let real = m.map(|v| v.re);
        let eig = real.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = DMatrix::zeros(n, n);
        for (newcol, &oldcol) in order.iter().enumerate() {
            for r in 0..n {
                vectors[(r, newcol)] = Complex64::new(eig.eigenvectors[(r, oldcol)], 0.0);
            }
        }
        return Ok((values, vectors));
    }

    // complex Hermitian: real embedding, then collapse the doubled spectrum
    let mut embed = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            embed[(i, j)] = m[(i, j)].re;
            embed[(n + i, n + j)] = m[(i, j)].re;
            embed[(i, n + j)] = -m[(i, j)].im;
            embed[(n + i, j)] = m[(i, j)].im;
        }
    }
    let eig = embed.symmetric_eigen();
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());

    let mut values: Vec<f64> = Vec::with_capacity(n);
    let mut vectors: Vec<DVector<Complex64>> = Vec::with_capacity(n);
    for &col in &order {
        if values.len() == n {
            break;
        }
        let mut z = DVector::from_fn(n, |r, _| {
            Complex64::new(eig.eigenvectors[(r, col)], eig.eigenvectors[(n + r, col)])
        });
        // a duplicate embedding vector is parallel (up to phase) to one we
        // already kept for the same eigenvalue; Gram-Schmidt removes it
        for (kept_val, kept_vec) in values.iter().zip(&vectors) {
            if (eig.eigenvalues[col] - kept_val).abs() < 1e-8 * (1.0 + kept_val.abs()) {
                let overlap: Complex64 = kept_vec
                    .iter()
                    .zip(z.iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                for r in 0..n {
                    let sub = overlap * kept_vec[r];
                    z[r] -= sub;
                }
            }
        }
        let norm = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for r in 0..n {
                z[r] /= Complex64::new(norm, 0.0);
            }
            values.push(eig.eigenvalues[col]);
            vectors.push(z);
        }
    }
    if values.len() != n {
        return Err(Error::numerical(
            "embedding eigendecomposition failed to recover a full eigenbasis",
        ));
    }
    let mut out = DMatrix::zeros(n, n);
    for (c, v) in vectors.iter().enumerate() {
        for r in 0..n {
            out[(r, c)] = v[r];
        }
    }
    Ok((values, out))
}

/// Eigenvalues only, ascending.
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>, tol: f64) -> Result<Vec<f64>> {
    hermitian_eigen(m, tol).map(|(vals, _)| vals)
}
