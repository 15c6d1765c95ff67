//! Matrix-valued orthonormal bases, Riesz bases `{U E_k}` and the operator
//! classes that generate them.
//!
//! Builders return generators (operators). [`apply_generator`] is the only
//! way to turn a generator into a [`RieszBasis`], and it insists on a
//! bijective, matrix-adjointable generator.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::dense::{self, c, CMat};
use crate::error::{Error, Result};
use crate::operator::{LinOp, OperatorJson, DEFAULT_TOL};
use crate::space::{MatFn, MatFnJson, SpaceSpec};

/// Tolerance for input validation in the builders.
pub const BUILDER_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct MatOnb {
    spec: SpaceSpec,
    functions: Vec<MatFn>,
}

impl MatOnb {
    /// `E_(n,c)(x) = e_n(x) S_c`, where `S_c` is the `s x r` block selector
    /// `[0 .. I_s .. 0]` for block `c < r / s`. Index order is `n` outer, `c`
    /// inner. Requires `s | r`.
    pub fn canonical(spec: &SpaceSpec) -> Result<Self> {
        let (s, r) = (spec.s(), spec.r());
        if r % s != 0 {
            return Err(Error::UnsupportedShape { s, r });
        }
        let blocks = r / s;
        let scalar = spec.group().scalar_onb();
        let mut functions = Vec::with_capacity(scalar.len() * blocks);
        for e in &scalar {
            for blk in 0..blocks {
                let f = MatFn::from_values(spec, |x| {
                    CMat::from_fn(s, r, |i, j| if j == blk * s + i { e[x] } else { c(0.0) })
                })?;
                functions.push(f);
            }
        }
        Ok(Self { spec: spec.clone(), functions })
    }

    pub fn spec(&self) -> &SpaceSpec {
        &self.spec
    }

    pub fn functions(&self) -> &[MatFn] {
        &self.functions
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// `max_{k,j} |<E_k, E_j> - delta_kj I_s|`.
    pub fn gram_defect(&self) -> Result<f64> {
        let s = self.spec.s();
        let mut worst = 0.0f64;
        for (k, ek) in self.functions.iter().enumerate() {
            for (j, ej) in self.functions.iter().enumerate() {
                let gram = ek.mat_inner(ej)?;
                let target = if k == j { dense::identity(s) } else { CMat::zeros(s, s) };
                worst = worst.max(dense::max_abs_diff(&gram, &target));
            }
        }
        Ok(worst)
    }

    /// `f - sum_k <f, E_k> E_k`.
    pub fn reconstruction_residual(&self, f: &MatFn) -> Result<MatFn> {
        let mut acc = MatFn::zeros(&self.spec);
        for e in &self.functions {
            acc = acc.add(&e.left_mul(&f.mat_inner(e)?)?)?;
        }
        f.sub(&acc)
    }
}

#[derive(Clone, Debug)]
pub struct RieszBasis {
    onb: Arc<MatOnb>,
    generator: LinOp,
    inverse: LinOp,
    functions: Vec<MatFn>,
    dual: Option<Vec<MatFn>>,
}

/// Validates `generator` and builds `{U E_k}`.
pub fn apply_generator(generator: &LinOp, onb: Arc<MatOnb>) -> Result<RieszBasis> {
    onb.spec().ensure_same(generator.spec())?;
    let adj = generator.is_matrix_adjointable(DEFAULT_TOL);
    if let Some(w) = adj.witness {
        return Err(Error::NotAdjointable { witness: Box::new(w) });
    }
    let inverse = generator.invert()?;
    let functions = onb.functions().iter().map(|e| generator.apply(e)).collect::<Result<_>>()?;
    Ok(RieszBasis { onb, generator: generator.clone(), inverse, functions, dual: None })
}

impl RieszBasis {
    pub fn onb(&self) -> &Arc<MatOnb> {
        &self.onb
    }

    pub fn generator(&self) -> &LinOp {
        &self.generator
    }

    pub fn generator_inverse(&self) -> &LinOp {
        &self.inverse
    }

    pub fn functions(&self) -> &[MatFn] {
        &self.functions
    }

    pub fn dual(&self) -> Option<&[MatFn]> {
        self.dual.as_deref()
    }

    /// Attaches the dual Riesz basis `g_k = (U^{-1})* E_k` and returns it.
    pub fn dual_basis(&mut self) -> Result<&[MatFn]> {
        if self.dual.is_none() {
            let adj_inv = self.inverse.trace_adjoint();
            let dual = self.onb.functions().iter().map(|e| adj_inv.apply(e)).collect::<Result<_>>()?;
            self.dual = Some(dual);
        }
        Ok(self.dual.as_deref().expect("dual just attached"))
    }

    pub fn with_dual(mut self) -> Result<Self> {
        self.dual_basis()?;
        Ok(self)
    }

    /// The dual pair viewed as a Riesz basis in its own right, generated by
    /// `(U^{-1})*`; its dual is the original family.
    pub fn dual_riesz_basis(&self) -> Result<RieszBasis> {
        apply_generator(&self.inverse.trace_adjoint(), self.onb.clone())
    }

    /// `max_{k,j} |<f_k, g_j> - delta_kj I_s|`.
    pub fn biorthogonality_defect(&self) -> Result<f64> {
        let dual = self.dual.as_ref().ok_or(Error::MissingDual)?;
        let s = self.onb.spec().s();
        let mut worst = 0.0f64;
        for (k, f) in self.functions.iter().enumerate() {
            for (j, g) in dual.iter().enumerate() {
                let gram = f.mat_inner(g)?;
                let target = if k == j { dense::identity(s) } else { CMat::zeros(s, s) };
                worst = worst.max(dense::max_abs_diff(&gram, &target));
            }
        }
        Ok(worst)
    }

    /// JSON manifest: generator, ONB parameters and the dual if attached.
    pub fn manifest(&self) -> BasisManifest {
        let spec = self.onb.spec();
        BasisManifest {
            generator: self.generator.to_json(),
            onb: OnbParams {
                group: spec.group().orders().to_vec(),
                s: spec.s(),
                r: spec.r(),
                construction: "canonical".into(),
            },
            dual: self.dual.as_ref().map(|d| d.iter().map(MatFn::to_json).collect()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OnbParams {
    pub group: Vec<usize>,
    pub s: usize,
    pub r: usize,
    pub construction: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct BasisManifest {
    pub generator: OperatorJson,
    pub onb: OnbParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual: Option<Vec<MatFnJson>>,
}

fn require_adjointable(op: &LinOp) -> Result<()> {
    match op.is_matrix_adjointable(BUILDER_TOL).witness {
        Some(w) => Err(Error::NotAdjointable { witness: Box::new(w) }),
        None => Ok(()),
    }
}

fn require_positive(op: &LinOp) -> Result<()> {
    let pos = op.is_positive(BUILDER_TOL)?;
    if !pos.is_trace_self_adjoint {
        return Err(Error::NotSelfAdjoint { deviation: op.self_adjoint_deviation() });
    }
    if !pos.is_positive {
        return Err(Error::NotPositive { min_eigenvalue: pos.min_eigenvalue });
    }
    Ok(())
}

fn require_self_adjoint(op: &LinOp) -> Result<()> {
    if op.is_trace_self_adjoint(BUILDER_TOL) {
        Ok(())
    } else {
        Err(Error::NotSelfAdjoint { deviation: op.self_adjoint_deviation() })
    }
}

#[derive(Clone, Debug)]
pub struct NamedGenerator {
    pub name: String,
    pub op: LinOp,
}

impl NamedGenerator {
    fn new(name: impl Into<String>, op: LinOp) -> Self {
        Self { name: name.into(), op }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PositiveClassRequest<'a> {
    pub s: Option<&'a LinOp>,
    /// Also build `I + TS`; fails unless `T` and `S` commute.
    pub product: bool,
    /// Also build `I + T + ... + T^n`.
    pub power_terms: Option<u32>,
}

/// Commutator threshold for `I + TS`, relative to `1 + |T| |S|`.
pub const COMMUTATOR_TOL: f64 = 1e-10;

/// Generators `I + T`, `I + S`, `I + T + S`, `I + TS` and
/// `I + T + ... + T^n` for positive module maps `T`, `S`.
pub fn build_positive_classes(t: &LinOp, req: PositiveClassRequest<'_>) -> Result<Vec<NamedGenerator>> {
    require_positive(t)?;
    require_adjointable(t)?;
    let mut out = vec![NamedGenerator::new("I+T", t.shift_identity(c(1.0)))];
    if let Some(s) = req.s {
        require_positive(s)?;
        require_adjointable(s)?;
        out.push(NamedGenerator::new("I+S", s.shift_identity(c(1.0))));
        out.push(NamedGenerator::new("I+T+S", t.add(s)?.shift_identity(c(1.0))));
        if req.product {
            let commutator = t.commutator_norm(s)?;
            if commutator > COMMUTATOR_TOL * (1.0 + t.op_norm()? * s.op_norm()?) {
                return Err(Error::NonCommuting { commutator });
            }
            out.push(NamedGenerator::new("I+TS", t.compose(s)?.hermitian_part().shift_identity(c(1.0))));
        }
    }
    if let Some(n) = req.power_terms {
        let mut sum = LinOp::identity(t.spec());
        let mut power = LinOp::identity(t.spec());
        for _ in 0..n {
            power = power.compose(t)?;
            sum = sum.add(&power)?;
        }
        out.push(NamedGenerator::new(format!("I+T+...+T^{n}"), sum.hermitian_part()));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct NeumannCheckpoint {
    pub terms: u32,
    /// `|sum_{m<=n} T^m - (I - T)^{-1}|`.
    pub residual: f64,
    /// Geometric tail bound `|T|^{n+1} / (1 - |T|)`.
    pub tail_bound: f64,
}

#[derive(Clone, Debug)]
pub struct NeumannSeries {
    pub generator: LinOp,
    pub norm: f64,
    pub checkpoints: Vec<NeumannCheckpoint>,
    pub converged: bool,
}

/// Partial sums `sum_{m <= n} T^m` at the given checkpoints (ascending).
pub fn neumann_partial_sums(t: &LinOp, checkpoints: &[u32]) -> Result<Vec<(u32, LinOp)>> {
    let mut sum = LinOp::identity(t.spec());
    let mut power = LinOp::identity(t.spec());
    let mut n = 0;
    let mut out = Vec::with_capacity(checkpoints.len());
    for &target in checkpoints {
        while n < target {
            power = power.compose(t)?;
            sum = sum.add(&power)?;
            n += 1;
        }
        out.push((target, sum.clone()));
    }
    Ok(out)
}

pub const NEUMANN_CHECKPOINTS: [u32; 7] = [0, 1, 2, 4, 8, 16, 32];

/// `(I - T)^{-1}` for a module map with `|T| < 1`, together with the
/// convergence of the Neumann partial sums toward it.
pub fn build_neumann(t: &LinOp) -> Result<NeumannSeries> {
    require_adjointable(t)?;
    let norm = t.op_norm()?;
    if norm >= 1.0 {
        return Err(Error::NormCondition { norm });
    }
    let generator = LinOp::identity(t.spec()).sub(t)?.invert()?;
    let mut checkpoints = Vec::new();
    let mut converged = true;
    for (terms, partial) in neumann_partial_sums(t, &NEUMANN_CHECKPOINTS)? {
        let residual = partial.sub(&generator)?.op_norm()?;
        let tail_bound = norm.powi(terms as i32 + 1) / (1.0 - norm);
        converged &= residual <= tail_bound * (1.0 + 1e-8) + 1e-12;
        checkpoints.push(NeumannCheckpoint { terms, residual, tail_bound });
    }
    Ok(NeumannSeries { generator, norm, checkpoints, converged })
}

/// `T^{1/2^n}` by `n` successive positive square roots.
pub fn build_sqrt_chain(t: &LinOp, n: u32) -> Result<LinOp> {
    if n == 0 {
        return Err(Error::InvalidSpace("square-root chain length must be at least 1".into()));
    }
    require_positive(t)?;
    require_adjointable(t)?;
    t.invert()?;
    let mut root = t.clone();
    for _ in 0..n {
        root = root.sqrt_psd()?;
    }
    Ok(root)
}

#[derive(Clone, Debug)]
pub struct JordanParts {
    /// `I + P_1` with `P_1 = ((T^2)^{1/2} + T) / 2`.
    pub plus: LinOp,
    /// `I + P_2` with `P_2 = ((T^2)^{1/2} - T) / 2`.
    pub minus: LinOp,
    pub p1: LinOp,
    pub p2: LinOp,
    /// `|P_1 P_2|`.
    pub product_residual: f64,
    /// `|T - (P_1 - P_2)|`.
    pub difference_residual: f64,
}

/// Splits a self-adjoint module map into its positive and negative parts.
pub fn build_jordan_parts(t: &LinOp) -> Result<JordanParts> {
    require_self_adjoint(t)?;
    require_adjointable(t)?;
    let t = t.hermitian_part();
    let abs = t.compose(&t)?.hermitian_part().sqrt_psd()?;
    let half = c(0.5);
    let p1 = abs.add(&t)?.scale(half).hermitian_part();
    let p2 = abs.sub(&t)?.scale(half).hermitian_part();
    let product_residual = p1.compose(&p2)?.op_norm()?;
    let difference_residual = p1.sub(&p2)?.sub(&t)?.op_norm()?;
    Ok(JordanParts {
        plus: p1.shift_identity(c(1.0)),
        minus: p2.shift_identity(c(1.0)),
        p1,
        p2,
        product_residual,
        difference_residual,
    })
}

#[derive(Clone, Debug)]
pub struct UnitaryParts {
    /// `(T + i (|T|^2 I - T^2)^{1/2}) / |T|`.
    pub plus: LinOp,
    /// `(T - i (|T|^2 I - T^2)^{1/2}) / |T|`.
    pub minus: LinOp,
    pub norm: f64,
}

/// Writes a nonzero self-adjoint module map as `|T|` times the average of two
/// unitaries. `|T|` is the exact largest singular value.
pub fn build_unitary_parts(t: &LinOp) -> Result<UnitaryParts> {
    require_self_adjoint(t)?;
    require_adjointable(t)?;
    let t = t.hermitian_part();
    let norm = t.op_norm()?;
    if norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let (plus, minus) = unitary_pair(&t, norm)?;
    Ok(UnitaryParts { plus, minus, norm })
}

/// `(A +- i (n^2 I - A^2)^{1/2}) / n` for self-adjoint `A` with norm `n`.
fn unitary_pair(a: &LinOp, norm: f64) -> Result<(LinOp, LinOp)> {
    let gap = a.compose(a)?.scale(c(-1.0)).shift_identity(c(norm * norm)).hermitian_part();
    let root = gap.sqrt_psd()?;
    let i_root = root.scale(Complex64::new(0.0, 1.0));
    let inv = c(1.0 / norm);
    Ok((a.add(&i_root)?.scale(inv), a.sub(&i_root)?.scale(inv)))
}

#[derive(Clone, Debug)]
pub struct CartesianUnitaries {
    /// `Omega_1 .. Omega_4`; `None` where the Cartesian part they are built
    /// from vanishes.
    pub omegas: [Option<LinOp>; 4],
}

impl CartesianUnitaries {
    pub fn available(&self) -> impl Iterator<Item = (usize, &LinOp)> {
        self.omegas.iter().enumerate().filter_map(|(i, o)| o.as_ref().map(|o| (i + 1, o)))
    }
}

/// Four unitary generators built from the Cartesian parts `T + T*` and
/// `T - T*` of an arbitrary module map:
///
/// - `Omega_{1,2} = (A +- i (|A|^2 I - A^2)^{1/2}) / |A|` with `A = T + T*`
/// - `Omega_{3,4} = -i (K -+ (|K|^2 I + K^2)^{1/2}) / |K|` with `K = T - T*`
pub fn build_cartesian_unitaries(t: &LinOp) -> Result<CartesianUnitaries> {
    require_adjointable(t)?;
    let scale = t.op_norm()?.max(1.0);
    let adj = t.trace_adjoint();
    let real = t.add(&adj)?.hermitian_part();
    let skew = t.sub(&adj)?;

    let mut omegas: [Option<LinOp>; 4] = [None, None, None, None];
    let real_norm = real.op_norm()?;
    if real_norm > 1e-12 * scale {
        let (o1, o2) = unitary_pair(&real, real_norm)?;
        omegas[0] = Some(o1);
        omegas[1] = Some(o2);
    }
    let skew_norm = skew.op_norm()?;
    if skew_norm > 1e-12 * scale {
        let gap = skew.compose(&skew)?.shift_identity(c(skew_norm * skew_norm)).hermitian_part();
        let root = gap.sqrt_psd()?;
        let factor = Complex64::new(0.0, -1.0 / skew_norm);
        omegas[2] = Some(skew.sub(&root)?.scale(factor));
        omegas[3] = Some(skew.add(&root)?.scale(factor));
    }
    Ok(CartesianUnitaries { omegas })
}

#[derive(Clone, Debug)]
pub struct HolubForward {
    /// `T = (U^{-1})* U^{-1}`, the map sending `f_k` to `g_k`.
    pub map: LinOp,
    /// `max_k |T f_k - g_k|`.
    pub max_residual: f64,
    pub is_positive: bool,
    pub min_eigenvalue: f64,
}

/// The operator mapping a Riesz basis onto its dual, and its positivity.
pub fn holub_map(rb: &RieszBasis) -> Result<HolubForward> {
    let dual = rb.dual().ok_or(Error::MissingDual)?;
    let inv = rb.generator_inverse();
    let map = inv.trace_adjoint().compose(inv)?.hermitian_part();
    let max_residual = max_map_residual(&map, rb.functions(), dual)?;
    let pos = map.is_positive(DEFAULT_TOL)?;
    Ok(HolubForward { map, max_residual, is_positive: pos.is_positive, min_eigenvalue: pos.min_eigenvalue })
}

/// `max_k |T a_k - b_k|`.
pub fn max_map_residual(t: &LinOp, from: &[MatFn], to: &[MatFn]) -> Result<f64> {
    if from.len() != to.len() {
        return Err(Error::LengthMismatch { coeffs: from.len(), functions: to.len() });
    }
    from.iter().zip(to).try_fold(0.0f64, |m, (a, b)| Ok(m.max(t.apply(a)?.sub(b)?.frob_norm())))
}

#[derive(Clone, Debug)]
pub struct HolubConverse {
    /// `q_k = (T^{1/2})^{-1} E_k`, with its dual `h_k = T^{1/2} E_k` attached.
    pub basis: RieszBasis,
    /// `max_k |T q_k - h_k|`.
    pub max_residual: f64,
}

/// For a positive invertible module map `T`, the Riesz basis that `T` maps
/// onto its own dual.
pub fn holub_basis_for_positive(t: &LinOp, onb: Arc<MatOnb>) -> Result<HolubConverse> {
    require_positive(t)?;
    require_adjointable(t)?;
    t.invert()?;
    let root = t.sqrt_psd()?;
    let basis = apply_generator(&root.invert()?, onb.clone())?.with_dual()?;
    let h: Vec<MatFn> = onb.functions().iter().map(|e| root.apply(e)).collect::<Result<_>>()?;
    let max_residual = max_map_residual(t, basis.functions(), &h)?;
    Ok(HolubConverse { basis, max_residual })
}
