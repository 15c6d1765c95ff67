//! Three operators on `L2(G, C^{2x2})` that separate the notions the rest of
//! the crate relies on:
//!
//! - an entry swap that is trace-self-adjoint yet not matrix-adjointable,
//! - a family `{U E_k}` with no positive lower frame bound,
//! - the pointwise transpose, trace-self-adjoint but not positive.

use serde::Serialize;

use crate::dense::{self, CMat};
use crate::error::{Error, Result};
use crate::frame::{self, FrameReport};
use crate::group::GroupSpec;
use crate::operator::{LinOp, OpReport, DEFAULT_TOL};
use crate::riesz::MatOnb;
use crate::space::{MatFn, SpaceSpec};

/// Swaps entries `(0, 0)` and `(0, 1)` of every value. Needs `r >= 2`.
pub fn entry_swap(spec: &SpaceSpec) -> Result<LinOp> {
    if spec.r() < 2 {
        return Err(Error::UnsupportedShape { s: spec.s(), r: spec.r() });
    }
    LinOp::permutation(spec, |a| {
        let (i, j, x) = spec.split_coord(a);
        match (i, j) {
            (0, 0) => spec.coord(0, 1, x),
            (0, 1) => spec.coord(0, 0, x),
            _ => a,
        }
    })
}

/// Pointwise transpose `f(x) -> f(x)^T`. Needs `s == r`.
pub fn transpose(spec: &SpaceSpec) -> Result<LinOp> {
    if spec.s() != spec.r() {
        return Err(Error::UnsupportedShape { s: spec.s(), r: spec.r() });
    }
    LinOp::permutation(spec, |a| {
        let (i, j, x) = spec.split_coord(a);
        spec.coord(j, i, x)
    })
}

fn require_two_by_two(spec: &SpaceSpec) -> Result<()> {
    if spec.s() == 2 && spec.r() == 2 {
        Ok(())
    } else {
        Err(Error::UnsupportedShape { s: spec.s(), r: spec.r() })
    }
}

/// `F_k = [[0, e_k], [0, e_k]]`, the image of the canonical basis `e_k I`
/// under a map that copies the diagonal into the second column.
pub fn image_family(spec: &SpaceSpec) -> Result<Vec<MatFn>> {
    require_two_by_two(spec)?;
    spec.group()
        .scalar_onb()
        .iter()
        .map(|e| {
            MatFn::from_values(spec, |x| {
                let mut v = CMat::zeros(2, 2);
                v[(0, 1)] = e[x];
                v[(1, 1)] = e[x];
                v
            })
        })
        .collect()
}

/// Wire form of a small complex matrix: rows of `[re, im]`.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_json(m: &CMat) -> MatrixJson {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct EntrySwapReport {
    pub trace_self_adjoint: bool,
    pub equals_trace_adjoint: bool,
    pub matrix_adjointable: bool,
    pub witness_f: MatFn,
    pub witness_g: MatFn,
    /// `<U f, g>`.
    pub lhs: MatrixJson,
    /// `<f, U g>`.
    pub rhs: MatrixJson,
    pub deviation: f64,
}

pub fn entry_swap_report(spec: &SpaceSpec) -> Result<EntrySwapReport> {
    require_two_by_two(spec)?;
    let u = entry_swap(spec)?;
    let adj = u.is_matrix_adjointable(DEFAULT_TOL);
    let (f, g) = adj.witness.clone().ok_or_else(|| Error::Format("entry swap unexpectedly adjointable".into()))?;
    let lhs = u.apply(&f)?.mat_inner(&g)?;
    let rhs = f.mat_inner(&u.apply(&g)?)?;
    Ok(EntrySwapReport {
        trace_self_adjoint: u.is_trace_self_adjoint(DEFAULT_TOL),
        equals_trace_adjoint: u.trace_adjoint().max_abs_diff(&u) == 0.0,
        matrix_adjointable: adj.adjointable,
        deviation: dense::max_abs_diff(&lhs, &rhs),
        lhs: matrix_json(&lhs),
        rhs: matrix_json(&rhs),
        witness_f: f,
        witness_g: g,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ImageFamilyReport {
    pub frame: FrameReport,
    /// `[[0, 0], [e_0, 0]]`, a unit vector orthogonal to every `F_k`.
    pub witness: MatFn,
    pub witness_energy: f64,
    pub witness_norm: f64,
}

pub fn image_family_report(spec: &SpaceSpec) -> Result<ImageFamilyReport> {
    let family = image_family(spec)?;
    let witness = MatFn::single_entry(spec, 1, 0, &spec.group().scalar_onb()[0])?;
    Ok(ImageFamilyReport {
        frame: frame::frame_report(&family)?,
        witness_energy: frame::coefficient_energy(&witness, &family)?,
        witness_norm: witness.frob_norm(),
        witness,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TransposeReport {
    pub operator: OpReport,
    /// `[[0, h], [-h, h]]` with `h = e_0`.
    pub witness: MatFn,
    /// `tr <U f, f>` for the witness; equals `-|h|^2`.
    pub trace_form: f64,
    pub h_norm_squared: f64,
}

pub fn transpose_report(spec: &SpaceSpec) -> Result<TransposeReport> {
    require_two_by_two(spec)?;
    let u = transpose(spec)?;
    let h = &spec.group().scalar_onb()[0];
    let witness = MatFn::from_values(spec, |x| {
        let mut v = CMat::zeros(2, 2);
        v[(0, 1)] = h[x];
        v[(1, 0)] = -h[x];
        v[(1, 1)] = h[x];
        v
    })?;
    let trace_form = u.apply(&witness)?.trace_inner(&witness)?;
    Ok(TransposeReport {
        operator: u.report(DEFAULT_TOL)?,
        witness,
        trace_form: trace_form.re,
        h_norm_squared: h.iter().map(|z| z.norm_sqr()).sum(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleSuite {
    pub space: String,
    pub entry_swap: EntrySwapReport,
    pub image_family: ImageFamilyReport,
    pub transpose: TransposeReport,
}

impl CounterexampleSuite {
    /// Whether every report shows the separation it is meant to show.
    pub fn all_hold(&self) -> bool {
        let e = &self.entry_swap;
        let h = &self.image_family;
        let t = &self.transpose;
        e.trace_self_adjoint
            && e.equals_trace_adjoint
            && !e.matrix_adjointable
            && !h.frame.is_frame
            && h.witness_energy.abs() < 1e-12
            && t.operator.is_trace_self_adjoint
            && !t.operator.is_positive
            && (t.trace_form + t.h_norm_squared).abs() < 1e-12
    }
}

/// All three reports on `L2(Z_n, C^{2x2})`.
pub fn run_suite(group_order: usize) -> Result<CounterexampleSuite> {
    let spec = SpaceSpec::new(GroupSpec::cyclic(group_order)?, 2, 2)?;
    run_suite_on(&spec)
}

pub fn run_suite_on(spec: &SpaceSpec) -> Result<CounterexampleSuite> {
    // The canonical basis is `e_k I` here; building it validates the shape.
    MatOnb::canonical(spec)?;
    Ok(CounterexampleSuite {
        space: spec.to_string(),
        entry_swap: entry_swap_report(spec)?,
        image_family: image_family_report(spec)?,
        transpose: transpose_report(spec)?,
    })
}
