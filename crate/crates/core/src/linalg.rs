//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::CMatrix;

/// Threshold above which a matrix is treated as singular.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Squared Frobenius norm.
pub fn frob_sq(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// The `d` eigenvectors of a Hermitian matrix with the smallest eigenvalues,
/// ordered by increasing eigenvalue.
pub fn least_eigvecs(herm: &CMatrix, d: usize) -> CMatrix {
    let n = herm.nrows();
    debug_assert!(d <= n);
    if n == d {
        return CMatrix::identity(n, d);
    }
    let eig = SymmetricEigen::new(herm.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut out = CMatrix::zeros(n, d);
    for (c, &idx) in order.iter().take(d).enumerate() {
        out.set_column(c, &eig.eigenvectors.column(idx));
    }
    out
}

/// Singular values in decreasing order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Ratio of the extreme singular values (infinite when rank-deficient).
pub fn condition_number(m: &CMatrix) -> f64 {
    let sv = singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// The `d` leading right singular vectors of `m` (columns of an
/// `ncols × d` matrix). Falls back to identity columns when `m` is empty.
pub fn leading_right_singular_vectors(m: &CMatrix, d: usize) -> CMatrix {
    let n = m.ncols();
    if m.nrows() == 0 || n == d {
        return CMatrix::identity(n, d);
    }
    // Right singular vectors of m are eigenvectors of m^H m.
    let gram = m.adjoint() * m;
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut out = CMatrix::zeros(n, d);
    for (c, &idx) in order.iter().take(d).enumerate() {
        out.set_column(c, &eig.eigenvectors.column(idx));
    }
    out
}

/// Orthonormal basis for the column span of a full-column-rank matrix.
pub fn orthonormalize(m: &CMatrix) -> CMatrix {
    let (r, c) = m.shape();
    let q = m.clone().qr().q();
    q.columns(0, c.min(r)).into_owned()
}

/// Inverse with a condition-number guard.
pub fn guarded_inverse(m: &CMatrix) -> Result<CMatrix> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "cannot invert a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    let cond = condition_number(m);
    if !cond.is_finite() || cond > CONDITION_LIMIT {
        return Err(Error::IllConditioned(cond));
    }
    m.clone()
        .try_inverse()
        .ok_or(Error::IllConditioned(f64::INFINITY))
}

/// Right pseudo-inverse `A^H (A A^H)^{-1}` of a full-row-rank matrix.
pub fn right_pseudo_inverse(a: &CMatrix) -> Result<CMatrix> {
    let cond = condition_number(a);
    if !cond.is_finite() || cond > CONDITION_LIMIT {
        return Err(Error::IllConditioned(cond));
    }
    let ah = a.adjoint();
    let gram = a * &ah;
    let inv = gram
        .try_inverse()
        .ok_or(Error::IllConditioned(f64::INFINITY))?;
    Ok(ah * inv)
}

/// Scales every column to unit Euclidean norm (zero columns are left alone).
pub fn normalize_columns(m: &mut CMatrix) {
    for mut col in m.column_iter_mut() {
        let n = col.norm();
        if n > 0.0 {
            col.unscale_mut(n);
        }
    }
}

pub fn zeros(r: usize, c: usize) -> CMatrix {
    DMatrix::from_element(r, c, Complex64::new(0.0, 0.0))
}
