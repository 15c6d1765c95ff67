//! Seeded random inputs: matrix-valued functions and module-map operators.
//!
//! Random module maps are `row_lift(B)` for a complex Gaussian `B` whose
//! singular values are clamped into `[0.2, 5]`, so they are bijective and
//! matrix-adjointable by construction.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::dense::{self, CMat};
use crate::operator::LinOp;
use crate::space::{MatFn, SpaceSpec};

pub const SINGULAR_VALUE_FLOOR: f64 = 0.2;
pub const SINGULAR_VALUE_CEIL: f64 = 5.0;

/// Standard complex Gaussian: `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    // Fill column-major in a fixed order so draws are reproducible.
    let mut m = CMat::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            m[(i, j)] = complex_gaussian(rng);
        }
    }
    m
}

pub fn random_matfn<R: Rng + ?Sized>(spec: &SpaceSpec, rng: &mut R) -> MatFn {
    let coeffs = (0..spec.ambient_dim()).map(|_| complex_gaussian(rng)).collect();
    MatFn::from_coeffs(spec, coeffs).expect("length matches ambient dimension")
}

/// Gaussian `n x n` matrix with singular values clamped into `[lo, hi]`.
pub fn well_conditioned_matrix<R: Rng + ?Sized>(n: usize, lo: f64, hi: f64, rng: &mut R) -> CMat {
    let b = random_matrix(n, n, rng);
    let svd = dense::svd(&b).expect("svd of a finite matrix");
    let scaled = CMat::from_fn(n, n, |i, j| svd.u[(i, j)] * svd.s[j].clamp(lo, hi));
    &scaled * svd.v.adjoint()
}

/// Random unitary `n x n` matrix (the unitary polar factor of a Gaussian).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let b = random_matrix(n, n, rng);
    let svd = dense::svd(&b).expect("svd of a finite matrix");
    &svd.u * svd.v.adjoint()
}

pub fn random_module_map<R: Rng + ?Sized>(spec: &SpaceSpec, rng: &mut R) -> LinOp {
    let b = well_conditioned_matrix(spec.row_len(), SINGULAR_VALUE_FLOOR, SINGULAR_VALUE_CEIL, rng);
    LinOp::row_lift(spec, &b).expect("block size matches row length")
}

/// `U* U` for a random module map `U`; spectrum inside `[0.04, 25]`.
pub fn random_psd_module_map<R: Rng + ?Sized>(spec: &SpaceSpec, rng: &mut R) -> LinOp {
    let u = random_module_map(spec, rng);
    u.trace_adjoint().compose(&u).expect("same space").hermitian_part()
}

/// PSD module map whose spectrum lies in `[lo, hi]` with both ends attained
/// (when the row block has at least two coordinates).
pub fn psd_module_map_with_spectrum<R: Rng + ?Sized>(
    spec: &SpaceSpec,
    lo: f64,
    hi: f64,
    rng: &mut R,
) -> LinOp {
    let n = spec.row_len();
    let q = random_unitary(n, rng);
    let mut values: Vec<f64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
    values[0] = hi;
    if n > 1 {
        values[n - 1] = lo;
    }
    let weighted = CMat::from_fn(n, n, |i, j| q[(i, j)] * values[j]);
    let b = dense::hermitian_part(&(&weighted * q.adjoint()));
    LinOp::row_lift(spec, &b).expect("block size matches row length")
}

/// Self-adjoint (generally indefinite) module map.
pub fn random_self_adjoint_module_map<R: Rng + ?Sized>(spec: &SpaceSpec, rng: &mut R) -> LinOp {
    let b = random_matrix(spec.row_len(), spec.row_len(), rng);
    LinOp::row_lift(spec, &dense::hermitian_part(&b)).expect("block size matches row length")
}

/// Module map with an unstructured (non-normal) Gaussian block.
pub fn random_general_module_map<R: Rng + ?Sized>(spec: &SpaceSpec, rng: &mut R) -> LinOp {
    let b = random_matrix(spec.row_len(), spec.row_len(), rng);
    LinOp::row_lift(spec, &b).expect("block size matches row length")
}

/// Dense operator with no structure at all.
pub fn random_dense_operator<R: Rng + ?Sized>(spec: &SpaceSpec, rng: &mut R) -> LinOp {
    let d = spec.ambient_dim();
    LinOp::from_matrix(spec, random_matrix(d, d, rng)).expect("square of ambient size")
}
