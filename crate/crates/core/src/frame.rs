//! Frame diagnostics for finite families in `L2(G, C^{s x r})`.
//!
//! For a family `{F_k}` the frame operator `S f = sum_k <f, F_k> F_k` acts
//! on each row of `f` by the same matrix: writing `V_f` for the `s x r|G|`
//! reshape, `S` sends `V_f` to `V_f Q` with `Q = sum_k V_k* V_k`. The optimal
//! frame bounds for the energy `sum_k |<f, F_k>|_F^2` are the extreme
//! eigenvalues of `Q`, which are also those of `S`.

use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dense::{self, c, CMat};
use crate::error::{Error, Result};
use crate::operator::LinOp;
use crate::riesz::RieszBasis;
use crate::sample;
use crate::space::{MatFn, SpaceSpec};

/// Relative singular-value threshold for the rank in [`completeness_defect`].
pub const RANK_TOL: f64 = 1e-9;
/// A family is reported as a frame when `A > FRAME_TOL * B`.
pub const FRAME_TOL: f64 = 1e-9;
/// Seed of the probe used for the reconstruction error in reports.
pub const PROBE_SEED: u64 = 0x5eed;

fn family_spec(family: &[MatFn]) -> Result<&SpaceSpec> {
    let first = family.first().ok_or(Error::EmptyFamily)?;
    for f in &family[1..] {
        first.spec().ensure_same(f.spec())?;
    }
    Ok(first.spec())
}

/// The rows of every `V_k` stacked into an `(N s) x r|G|` matrix `R`, so
/// that `Q = sum_k V_k* V_k = R* R`.
fn stacked_rows(family: &[MatFn]) -> Result<CMat> {
    let spec = family_spec(family)?;
    let (s, n) = (spec.s(), spec.row_len());
    Ok(Mat::from_fn(family.len() * s, n, |row, m| family[row / s].coeffs()[(row % s) * n + m]))
}

fn row_gram(family: &[MatFn]) -> Result<CMat> {
    let stacked = stacked_rows(family)?;
    Ok(dense::hermitian_part(&(stacked.adjoint() * &stacked)))
}

/// The frame operator `S` as a dense operator on the ambient space.
pub fn frame_operator(family: &[MatFn]) -> Result<LinOp> {
    let spec = family_spec(family)?;
    let q = row_gram(family)?;
    // S acts on every row by V -> V Q, i.e. by Q^T on coordinates.
    LinOp::row_lift(spec, &q.transpose().to_owned())
}

/// `sum_k |<f, F_k>|_F^2`.
pub fn coefficient_energy(f: &MatFn, family: &[MatFn]) -> Result<f64> {
    family.iter().try_fold(0.0, |acc, fk| {
        let g = f.mat_inner(fk)?;
        Ok(acc + dense::frobenius(&g).powi(2))
    })
}

#[derive(Clone, Debug)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    /// A unit-norm minimizer of the coefficient energy.
    pub lower_witness: MatFn,
}

/// Optimal frame bounds and a minimizing function.
///
/// The bounds are the extreme eigenvalues of `Q = R* R`, computed as squared
/// singular values of `R`: forming `Q` first would square the condition
/// number and cost the small bound half its digits.
pub fn optimal_frame_bounds(family: &[MatFn]) -> Result<FrameBounds> {
    let spec = family_spec(family)?.clone();
    let svd = dense::svd(&stacked_rows(family)?)?;
    let n = spec.row_len();
    let upper = svd.s.first().map_or(0.0, |v| v * v);
    // With fewer stacked rows than columns R has a kernel.
    let lower = if svd.s.len() < n { 0.0 } else { svd.s[n - 1] * svd.s[n - 1] };
    // A function whose only nonzero row is v has energy v Q v*, so the
    // minimizer's row is the conjugate of the last right singular vector.
    let mut coeffs = vec![c(0.0); spec.ambient_dim()];
    for (m, slot) in coeffs[..n].iter_mut().enumerate() {
        *slot = svd.v[(m, n - 1)].conj();
    }
    Ok(FrameBounds { lower, upper, lower_witness: MatFn::from_coeffs(&spec, coeffs)? })
}

/// `D - rank{E_pq F_k}`: the codimension of the left-module span.
pub fn completeness_defect(family: &[MatFn]) -> Result<usize> {
    let spec = family_spec(family)?;
    let s = spec.s();
    let d = spec.ambient_dim();
    let n = spec.row_len();
    // E_pq F_k puts row q of F_k into row p.
    let cols = family.len() * s * s;
    let m = Mat::from_fn(d, cols, |a, col| {
        let k = col / (s * s);
        let (p, q) = ((col / s) % s, col % s);
        let (row, offset) = (a / n, a % n);
        if row == p {
            family[k].coeffs()[q * n + offset]
        } else {
            c(0.0)
        }
    });
    let sv = dense::singular_values(&m)?;
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(d);
    }
    let rank = sv.iter().filter(|&&v| v > RANK_TOL * top).count();
    Ok(d - rank)
}

/// `f_hat = sum_k <f, g_k> f_k` and `|f - f_hat| / |f|`.
pub fn reconstruct(f: &MatFn, rb: &RieszBasis) -> Result<(MatFn, f64)> {
    let dual = rb.dual().ok_or(Error::MissingDual)?;
    let mut acc = MatFn::zeros(f.spec());
    for (fk, gk) in rb.functions().iter().zip(dual) {
        acc = acc.add(&fk.left_mul(&f.mat_inner(gk)?)?)?;
    }
    let err = f.sub(&acc)?.frob_norm() / f.frob_norm().max(1e-300);
    Ok((acc, err))
}

#[derive(Clone, Debug, Serialize)]
pub struct FrameReport {
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub is_frame: bool,
    pub completeness_defect: usize,
    /// `max(|A - 1|, |B - 1|)`.
    pub parseval_distance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reconstruction_error: Option<f64>,
    /// Unit-norm function of minimal coefficient energy, when not a frame.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<MatFn>,
    /// `[|U^{-1}|^{-2}, |U|^2]` for a generated family.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub riesz_interval: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub within_riesz_interval: Option<bool>,
}

impl FrameReport {
    /// Frame, complete, and (if known) bounds inside the Riesz interval.
    pub fn passes(&self) -> bool {
        self.is_frame && self.completeness_defect == 0 && self.within_riesz_interval.unwrap_or(true)
    }
}

/// Report for an arbitrary family.
pub fn frame_report(family: &[MatFn]) -> Result<FrameReport> {
    let bounds = optimal_frame_bounds(family)?;
    let is_frame = bounds.lower > FRAME_TOL * bounds.upper;
    Ok(FrameReport {
        lower_bound: bounds.lower,
        upper_bound: bounds.upper,
        is_frame,
        completeness_defect: completeness_defect(family)?,
        parseval_distance: (bounds.lower - 1.0).abs().max((bounds.upper - 1.0).abs()),
        reconstruction_error: None,
        witness: (!is_frame).then_some(bounds.lower_witness),
        riesz_interval: None,
        within_riesz_interval: None,
    })
}

/// Full diagnostics for a generated Riesz basis. `tol` is the relative slack
/// allowed when comparing the frame bounds with the Riesz interval.
pub fn verify_riesz(rb: &RieszBasis, tol: f64) -> Result<FrameReport> {
    let mut report = frame_report(rb.functions())?;
    let sv = rb.generator().singular_values()?;
    let (hi, lo) = (sv[0], sv[sv.len() - 1]);
    let interval = [lo * lo, hi * hi];
    report.within_riesz_interval =
        Some(report.lower_bound >= interval[0] * (1.0 - tol) && report.upper_bound <= interval[1] * (1.0 + tol));
    report.riesz_interval = Some(interval);

    let with_dual;
    let rb = if rb.dual().is_some() {
        rb
    } else {
        with_dual = rb.clone().with_dual()?;
        &with_dual
    };
    let probe = sample::random_matfn(rb.onb().spec(), &mut ChaCha8Rng::seed_from_u64(PROBE_SEED));
    report.reconstruction_error = Some(reconstruct(&probe, rb)?.1);
    Ok(report)
}

/// `<f, F_k>` for every member of the family.
pub fn analysis(f: &MatFn, family: &[MatFn]) -> Result<Vec<CMat>> {
    family.iter().map(|fk| f.mat_inner(fk)).collect()
}

/// `sum_k C_k F_k` for matrix coefficients `C_k`.
pub fn synthesis(coeffs: &[CMat], family: &[MatFn]) -> Result<MatFn> {
    let spec = family_spec(family)?;
    if coeffs.len() != family.len() {
        return Err(Error::LengthMismatch { coeffs: coeffs.len(), functions: family.len() });
    }
    let mut acc = MatFn::zeros(spec);
    for (ck, fk) in coeffs.iter().zip(family) {
        acc = acc.add(&fk.left_mul(ck)?)?;
    }
    Ok(acc)
}
