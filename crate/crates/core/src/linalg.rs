//! Hermitian eigendecomposition helpers shared by the bound calculators.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Relative clipping threshold for eigenvalues of numerically singular
/// Gram matrices: anything below `CLIP_REL * lambda_max` is treated as 0
/// before taking square roots.
pub(crate) const CLIP_REL: f64 = 1e-12;

/// Absolute floor below which an eigenvalue is considered evidence of an
/// invalid (non-PSD) matrix rather than rounding noise.
pub(crate) const PSD_FAIL_ABS: f64 = -1e-8;

/// Eigendecomposition of a Hermitian matrix: real eigenvalues and a
/// unitary matrix of column eigenvectors.
pub(crate) struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<Complex64>,
}

pub(crate) fn hermitian_eigen(matrix: &DMatrix<Complex64>) -> HermitianEigen {
    let eig = matrix.clone().symmetric_eigen();
    HermitianEigen {
        eigenvalues: eig.eigenvalues.iter().copied().collect(),
        eigenvectors: eig.eigenvectors,
    }
}

/// Eigenvalues clipped for square-root use: fails on clearly negative
/// eigenvalues, zeroes the band between `PSD_FAIL_ABS` and the relative
/// clipping threshold.
pub(crate) fn clipped_eigenvalues(eigenvalues: &[f64]) -> Result<Vec<f64>> {
    let max = eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let min = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < PSD_FAIL_ABS {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: min,
        });
    }
    let floor = CLIP_REL * max;
    Ok(eigenvalues
        .iter()
        .map(|&l| if l < floor { 0.0 } else { l })
        .collect())
}

/// Diagonal of the Hermitian square root `sqrt(G)`, which is real and
/// nonnegative: `diag_m = sum_k sqrt(lambda_k) |U[m][k]|^2`.
pub(crate) fn sqrt_diagonal(eigen: &HermitianEigen) -> Result<Vec<f64>> {
    let lambda = clipped_eigenvalues(&eigen.eigenvalues)?;
    let n = eigen.eigenvectors.nrows();
    let mut diag = vec![0.0; n];
    for (k, &l) in lambda.iter().enumerate() {
        if l == 0.0 {
            continue;
        }
        let sqrt_l = l.sqrt();
        for (m, d) in diag.iter_mut().enumerate() {
            *d += sqrt_l * eigen.eigenvectors[(m, k)].norm_sqr();
        }
    }
    Ok(diag)
}

/// A factor `L` with `L L^H = G`, built as `U diag(sqrt(lambda))` with
/// clipped eigenvalues. Columns belonging to clipped eigenvalues are
/// dropped, so `L` is `n x rank`.
pub(crate) fn psd_factor(matrix: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let eigen = hermitian_eigen(matrix);
    let lambda = clipped_eigenvalues(&eigen.eigenvalues)?;
    let n = matrix.nrows();
    let kept: Vec<usize> = (0..lambda.len()).filter(|&k| lambda[k] > 0.0).collect();
    let mut factor = DMatrix::zeros(n, kept.len());
    for (col, &k) in kept.iter().enumerate() {
        let sqrt_l = lambda[k].sqrt();
        for row in 0..n {
            factor[(row, col)] = eigen.eigenvectors[(row, k)] * sqrt_l;
        }
    }
    Ok(factor)
}
