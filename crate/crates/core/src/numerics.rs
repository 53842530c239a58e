//! Dense matrix primitives.
//!
//! Complex arithmetic is confined to states and operators; everything on the
//! Bloch side (correlation matrices, bordered matrices, matricizations) is
//! real, so only a real SVD is needed.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{contract, Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type RealMatrix = DMatrix<f64>;

/// Absolute tolerance on `max |m[i,j] - conj(m[j,i])|` for Hermitian inputs.
pub const HERMITIAN_TOL: f64 = 1e-10;

const SVD_EPS: f64 = 1e-15;
const MAX_SWEEPS: usize = 10_000;

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `Tr(a b)` without forming the product.
pub fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Largest `|m[i,j] - conj(m[j,i])|`. Non-square input yields `+inf`.
pub fn hermiticity_deviation(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_finite_complex(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Singular values in descending order; `min(rows, cols)` of them.
///
/// Tiny singular values are reported as computed, never truncated.
pub fn singular_values(m: &RealMatrix) -> Result<Vec<f64>> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite entry in SVD input".into()));
    }
    let svd = m
        .clone()
        .try_svd(false, false, SVD_EPS, MAX_SWEEPS)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let mut values: Vec<f64> = svd.singular_values.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Sum of singular values.
pub fn trace_norm(m: &RealMatrix) -> Result<f64> {
    Ok(singular_values(m)?.iter().sum())
}

/// Largest singular value (0 for an empty matrix).
pub fn spectral_norm(m: &RealMatrix) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

/// Trace norm of a complex matrix through its real embedding
/// `[[Re, -Im], [Im, Re]]`, whose singular values are those of the input, each twice.
pub fn complex_trace_norm(m: &ComplexMatrix) -> Result<f64> {
    let (rows, cols) = m.shape();
    let embedded = RealMatrix::from_fn(2 * rows, 2 * cols, |i, j| {
        let z = m[(i % rows, j % cols)];
        match (i < rows, j < cols) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    Ok(trace_norm(&embedded)? / 2.0)
}

/// Real spectrum of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return contract(format!(
            "eigenvalues need a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        ));
    }
    if !is_finite_complex(m) {
        return Err(Error::Numerical("non-finite entry in eigensolver input".into()));
    }
    let dev = hermiticity_deviation(m);
    if dev > HERMITIAN_TOL {
        return contract(format!("matrix is not Hermitian (deviation {dev:e})"));
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    // Symmetrize so the solver sees an exactly Hermitian input.
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::try_new(sym, SVD_EPS, MAX_SWEEPS)
        .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}
