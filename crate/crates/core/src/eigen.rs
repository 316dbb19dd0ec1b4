//! Hermitian eigendecomposition, backed by nalgebra.

use nalgebra::DMatrix;

use crate::error::{PqstError, Result};
use crate::linalg::Operator;

#[derive(Debug, Clone)]
pub struct Eigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: Operator,
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrised first;
/// a Hermiticity residual above `1e-8` is rejected.
pub fn eigh(m: &Operator) -> Result<Eigen> {
    let residual = m.hermiticity_residual();
    if residual > 1e-8 {
        return Err(PqstError::NotHermitian { residual });
    }
    let d = m.dim();
    let h = m.hermitian_part();
    let dm = DMatrix::from_row_slice(d, d, h.as_slice());
    let se = dm.symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&x, &y| se.eigenvalues[x].total_cmp(&se.eigenvalues[y]));
    let values = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let mut vectors = Operator::zeros(d)?;
    for (col, &k) in order.iter().enumerate() {
        for row in 0..d {
            vectors[(row, col)] = se.eigenvectors[(row, k)];
        }
    }
    Ok(Eigen { values, vectors })
}

pub fn eigvalsh(m: &Operator) -> Result<Vec<f64>> {
    Ok(eigh(m)?.values)
}

/// Operator norm of a Hermitian matrix.
pub fn spectral_norm(m: &Operator) -> Result<f64> {
    Ok(eigvalsh(m)?.into_iter().map(f64::abs).fold(0.0, f64::max))
}

/// `V f(Λ) V†` for a Hermitian matrix.
pub fn apply_spectral(m: &Operator, f: impl Fn(f64) -> f64) -> Result<Operator> {
    let Eigen { values, vectors } = eigh(m)?;
    let d = m.dim();
    let mut out = Operator::zeros(d)?;
    for (k, &lam) in values.iter().enumerate() {
        let w = f(lam);
        if w == 0.0 {
            continue;
        }
        let col = vectors.column(k);
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] += col[i] * col[j].conj() * w;
            }
        }
    }
    Ok(out)
}

/// Square root of a Hermitian matrix with negative eigenvalues clamped to zero.
/// Returns the root and the clamped (absolute) eigenvalue mass.
pub fn sqrt_psd(m: &Operator) -> Result<(Operator, f64)> {
    let vals = eigvalsh(m)?;
    let clamped = vals
        .iter()
        .filter(|&&x| x < 0.0)
        .fold(0.0, |acc, x| acc - x);
    Ok((apply_spectral(m, |x| x.max(0.0).sqrt())?, clamped))
}
