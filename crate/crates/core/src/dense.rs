//! Thin wrappers over faer's dense complex decompositions.

use faer::linalg::solvers::DenseSolveCore;
use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) type CMat = Mat<Complex64>;

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub(crate) fn adjoint(a: &CMat) -> CMat {
    a.adjoint().to_owned()
}

pub(crate) fn hermitian_part(a: &CMat) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

pub(crate) fn scaled(a: &CMat, z: Complex64) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * z)
}

pub(crate) fn max_abs(a: &CMat) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

pub(crate) fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    m
}

pub(crate) fn frobenius(a: &CMat) -> f64 {
    a.norm_l2()
}

/// Eigenvalues (ascending) and eigenvectors of the Hermitian part of `a`.
pub(crate) fn eigh(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    let h = hermitian_part(a);
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    let values = evd.S().column_vector().iter().map(|z| z.re).collect();
    Ok((values, evd.U().to_owned()))
}

pub(crate) fn eigvalsh(a: &CMat) -> Result<Vec<f64>> {
    hermitian_part(a)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Decomposition(format!("{e:?}")))
}

/// Singular values in nonincreasing order.
pub(crate) fn singular_values(a: &CMat) -> Result<Vec<f64>> {
    a.singular_values().map_err(|e| Error::Decomposition(format!("{e:?}")))
}

pub(crate) struct Svd {
    pub u: CMat,
    pub s: Vec<f64>,
    pub v: CMat,
}

pub(crate) fn svd(a: &CMat) -> Result<Svd> {
    let svd = a.svd().map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    Ok(Svd {
        u: svd.U().to_owned(),
        s: svd.S().column_vector().iter().map(|z| z.re).collect(),
        v: svd.V().to_owned(),
    })
}

/// `V diag(f(lambda)) V*` for the Hermitian part of `a`.
pub(crate) fn hermitian_function(a: &CMat, f: impl Fn(f64) -> f64) -> Result<CMat> {
    let (values, vectors) = eigh(a)?;
    let n = a.nrows();
    let weighted = CMat::from_fn(n, n, |i, j| vectors[(i, j)] * f(values[j]));
    Ok(hermitian_part(&(&weighted * vectors.adjoint())))
}

pub(crate) fn lu_inverse(a: &CMat) -> CMat {
    a.partial_piv_lu().inverse()
}

pub(crate) fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}
