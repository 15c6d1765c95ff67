//! Bounded linear operators on `L^2(G, C^{s x r})`, stored as dense
//! `D x D` matrices acting on coordinate vectors.
//!
//! Two notions of adjoint coexist here. The trace adjoint is the ordinary
//! Hilbert-space adjoint for the trace inner product (the conjugate
//! transpose). An operator is *matrix-adjointable* when the trace adjoint also
//! satisfies `<Uf, g> = <f, U*g>` for the `s x s` matrix-valued inner
//! product; in this finite model that happens exactly for module maps
//! `I_s (x) B`, which [`LinOp::row_lift`] builds.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::{self, c, CMat};
use crate::error::{Error, Result};
use crate::space::{MatFn, SpaceSpec};

/// Default tolerance for structural checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Relative tolerance used when an operator must be positive before taking
/// a square root.
pub const SQRT_POSITIVITY_TOL: f64 = 1e-10;

/// Relative singular-value floor below which [`LinOp::invert`] refuses.
pub const SINGULAR_TOL: f64 = 1e-10;

/// Relative deviation below which an operator is treated as a row lift by
/// the block fast paths.
const ROW_LIFT_DETECTION_TOL: f64 = 1e-13;

/// Advisory structure label. Never trusted for correctness: every check
/// runs on the dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum StructureTag {
    General,
    ModuleMap,
    /// Pointwise multiplication by a scalar function `phi` on the group.
    Multiplication { phi: Vec<Complex64> },
    Permutation,
}

impl StructureTag {
    fn is_module(&self) -> bool {
        matches!(self, StructureTag::ModuleMap | StructureTag::Multiplication { .. })
    }

    fn kind(&self) -> &'static str {
        match self {
            StructureTag::General => "general",
            StructureTag::ModuleMap => "module_map",
            StructureTag::Multiplication { .. } => "multiplication",
            StructureTag::Permutation => "permutation",
        }
    }
}

#[derive(Clone, Debug)]
pub struct LinOp {
    spec: SpaceSpec,
    matrix: CMat,
    tag: StructureTag,
}

/// Outcome of the basis-pair matrix-adjointability test.
#[derive(Clone, Debug)]
pub struct Adjointability {
    pub adjointable: bool,
    pub max_deviation: f64,
    /// First basis pair `(e_a, e_b)` with `<U e_a, e_b> != <e_a, U* e_b>`.
    pub witness: Option<(MatFn, MatFn)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Positivity {
    pub is_positive: bool,
    pub is_trace_self_adjoint: bool,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OpReport {
    pub is_trace_self_adjoint: bool,
    pub is_matrix_adjointable: bool,
    pub is_positive: bool,
    pub min_eigenvalue: f64,
    pub operator_norm: f64,
    pub witness: Option<(MatFn, MatFn)>,
}

#[derive(Clone, Debug)]
pub struct SqrtIteration {
    pub root: LinOp,
    pub inverse_root: LinOp,
    pub iterations: usize,
    pub last_step: f64,
}

#[derive(Clone, Debug)]
pub struct Polar {
    /// Unitary factor `W = U P^{-1}`.
    pub unitary: LinOp,
    /// Positive factor `P = (U* U)^{1/2}`.
    pub positive: LinOp,
}

impl LinOp {
    pub fn from_matrix(spec: &SpaceSpec, matrix: CMat) -> Result<Self> {
        Self::with_tag(spec, matrix, StructureTag::General)
    }

    fn with_tag(spec: &SpaceSpec, matrix: CMat, tag: StructureTag) -> Result<Self> {
        let d = spec.ambient_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { spec: spec.clone(), matrix, tag })
    }

    fn derived(&self, matrix: CMat, tag: StructureTag) -> Self {
        Self { spec: self.spec.clone(), matrix, tag }
    }

    pub fn identity(spec: &SpaceSpec) -> Self {
        let d = spec.ambient_dim();
        Self { spec: spec.clone(), matrix: dense::identity(d), tag: StructureTag::ModuleMap }
    }

    pub fn zero(spec: &SpaceSpec) -> Self {
        let d = spec.ambient_dim();
        Self { spec: spec.clone(), matrix: CMat::zeros(d, d), tag: StructureTag::ModuleMap }
    }

    /// `(phi f)(x) = phi(x) f(x)` for a scalar function `phi` given by element rank.
    pub fn multiplication(spec: &SpaceSpec, phi: &[Complex64]) -> Result<Self> {
        if phi.len() != spec.group_size() {
            return Err(Error::DimensionMismatch { expected: spec.group_size(), actual: phi.len() });
        }
        let d = spec.ambient_dim();
        let mut m = CMat::zeros(d, d);
        for a in 0..d {
            let (_, _, x) = spec.split_coord(a);
            m[(a, a)] = phi[x];
        }
        Ok(Self {
            spec: spec.clone(),
            matrix: m,
            tag: StructureTag::Multiplication { phi: phi.to_vec() },
        })
    }

    /// Coordinate permutation sending coordinate `a` to `target(a)`.
    pub fn permutation(spec: &SpaceSpec, target: impl Fn(usize) -> usize) -> Result<Self> {
        let d = spec.ambient_dim();
        let mut m = CMat::zeros(d, d);
        let mut hit = vec![false; d];
        for a in 0..d {
            let t = target(a);
            if t >= d || hit[t] {
                return Err(Error::Format(format!("coordinate map is not a bijection at {a}")));
            }
            hit[t] = true;
            m[(t, a)] = c(1.0);
        }
        Ok(Self { spec: spec.clone(), matrix: m, tag: StructureTag::Permutation })
    }

    /// Applies the `r|G| x r|G|` matrix `b` to each of the `s` rows of `f`.
    pub fn row_lift(spec: &SpaceSpec, b: &CMat) -> Result<Self> {
        let n = spec.row_len();
        if b.nrows() != n || b.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: b.nrows().max(b.ncols()) });
        }
        let d = spec.ambient_dim();
        let mut m = CMat::zeros(d, d);
        for blk in 0..spec.s() {
            for j in 0..n {
                for i in 0..n {
                    m[(blk * n + i, blk * n + j)] = b[(i, j)];
                }
            }
        }
        Ok(Self { spec: spec.clone(), matrix: m, tag: StructureTag::ModuleMap })
    }

    pub fn spec(&self) -> &SpaceSpec {
        &self.spec
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn tag(&self) -> &StructureTag {
        &self.tag
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, f: &MatFn) -> Result<MatFn> {
        self.spec.ensure_same(f.spec())?;
        let v = f.coeffs();
        let d = self.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for (j, &x) in v.iter().enumerate() {
            if x == Complex64::new(0.0, 0.0) {
                continue;
            }
            let col = self.matrix.col(j);
            for (o, m) in out.iter_mut().zip(col.iter()) {
                *o += m * x;
            }
        }
        MatFn::from_coeffs(&self.spec, out)
    }

    /// `self` after `other`: `(self o other) f = self(other(f))`.
    pub fn compose(&self, other: &LinOp) -> Result<LinOp> {
        self.spec.ensure_same(&other.spec)?;
        let tag = combined_tag(&self.tag, &other.tag);
        Ok(self.derived(&self.matrix * &other.matrix, tag))
    }

    pub fn add(&self, other: &LinOp) -> Result<LinOp> {
        self.spec.ensure_same(&other.spec)?;
        let tag = combined_tag(&self.tag, &other.tag);
        Ok(self.derived(&self.matrix + &other.matrix, tag))
    }

    pub fn sub(&self, other: &LinOp) -> Result<LinOp> {
        self.add(&other.scale(c(-1.0)))
    }

    pub fn scale(&self, z: Complex64) -> LinOp {
        let tag = match &self.tag {
            StructureTag::Multiplication { phi } => {
                StructureTag::Multiplication { phi: phi.iter().map(|p| p * z).collect() }
            }
            StructureTag::Permutation => StructureTag::General,
            t => t.clone(),
        };
        self.derived(dense::scaled(&self.matrix, z), tag)
    }

    /// `I + self`.
    pub fn shift_identity(&self, z: Complex64) -> LinOp {
        let mut m = self.matrix.clone();
        for a in 0..self.dim() {
            m[(a, a)] += z;
        }
        let tag = if self.tag.is_module() { StructureTag::ModuleMap } else { StructureTag::General };
        self.derived(m, tag)
    }

    pub fn power(&self, n: u32) -> LinOp {
        let mut acc = LinOp::identity(&self.spec);
        for _ in 0..n {
            acc = acc.compose(self).expect("same space");
        }
        acc
    }

    /// `(self + self*) / 2`.
    pub fn hermitian_part(&self) -> LinOp {
        self.derived(dense::hermitian_part(&self.matrix), self.tag.clone())
    }

    /// Adjoint for the trace inner product: the conjugate transpose.
    pub fn trace_adjoint(&self) -> LinOp {
        let tag = match &self.tag {
            StructureTag::Multiplication { phi } => {
                StructureTag::Multiplication { phi: phi.iter().map(|p| p.conj()).collect() }
            }
            t => t.clone(),
        };
        self.derived(dense::adjoint(&self.matrix), tag)
    }

    /// Largest entry modulus, floored at 1; the scale for absolute checks.
    fn check_scale(&self) -> f64 {
        dense::max_abs(&self.matrix).max(1.0)
    }

    pub fn max_abs_diff(&self, other: &LinOp) -> f64 {
        dense::max_abs_diff(&self.matrix, &other.matrix)
    }

    pub fn self_adjoint_deviation(&self) -> f64 {
        dense::max_abs_diff(&self.matrix, &dense::adjoint(&self.matrix))
    }

    pub fn is_trace_self_adjoint(&self, tol: f64) -> bool {
        self.self_adjoint_deviation() <= tol * self.check_scale()
    }

    /// Checks `<U e_a, e_b> = <e_a, U* e_b>` over every pair of canonical
    /// coordinate basis functions. Both sides are sesquilinear in `(f, g)`,
    /// so agreement on basis pairs is agreement everywhere.
    pub fn is_matrix_adjointable(&self, tol: f64) -> Adjointability {
        let spec = &self.spec;
        let (s, n, d) = (spec.s(), spec.row_len(), self.dim());
        let u = &self.matrix;
        let adj = dense::adjoint(u);
        let bound = tol * self.check_scale();
        let zero = Complex64::new(0.0, 0.0);

        let mut max_dev = 0.0f64;
        let mut witness = None;
        for a in 0..d {
            let (ia, ma) = (a / n, a % n);
            for b in 0..d {
                let (ib, mb) = (b / n, b % n);
                // <U e_a, e_b>_{pq} = delta(q, ib) U[p n + mb, a]
                // <e_a, U* e_b>_{pq} = delta(p, ia) conj(U*[q n + ma, b])
                let mut dev = 0.0f64;
                for p in 0..s {
                    let lhs = u[(p * n + mb, a)];
                    let rhs = if p == ia { adj[(ib * n + ma, b)].conj() } else { zero };
                    dev = dev.max((lhs - rhs).norm());
                }
                for q in (0..s).filter(|&q| q != ib) {
                    let rhs = adj[(q * n + ma, b)].conj();
                    dev = dev.max(rhs.norm());
                }
                if dev > bound && witness.is_none() {
                    witness = Some((MatFn::basis(spec, a), MatFn::basis(spec, b)));
                }
                max_dev = max_dev.max(dev);
            }
        }
        Adjointability { adjointable: witness.is_none(), max_deviation: max_dev, witness }
    }

    /// Checks `U(E_pq f) = E_pq U(f)` for every matrix unit `E_pq` and every
    /// canonical basis function `f`.
    pub fn check_module_map(&self, tol: f64) -> bool {
        let spec = &self.spec;
        let (s, n, d) = (spec.s(), spec.row_len(), self.dim());
        let u = &self.matrix;
        let bound = tol * self.check_scale();
        let zero = Complex64::new(0.0, 0.0);
        for p in 0..s {
            for q in 0..s {
                for a in 0..d {
                    let (ia, ma) = (a / n, a % n);
                    // E_pq e_a = delta(q, ia) e_{p n + ma}
                    for t in 0..d {
                        let (it, mt) = (t / n, t % n);
                        let lhs = if q == ia { u[(t, p * n + ma)] } else { zero };
                        let rhs = if it == p { u[(q * n + mt, a)] } else { zero };
                        if (lhs - rhs).norm() > bound {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Recovers `B` with `self = row_lift(B)` by averaging the diagonal row
    /// blocks, or `None` when the operator is not of that form.
    pub fn as_row_lift(&self, tol: f64) -> Option<CMat> {
        let (s, n) = (self.spec.s(), self.spec.row_len());
        let u = &self.matrix;
        let b = CMat::from_fn(n, n, |i, j| {
            (0..s).map(|blk| u[(blk * n + i, blk * n + j)]).sum::<Complex64>() / s as f64
        });
        let lifted = LinOp::row_lift(&self.spec, &b).ok()?;
        (dense::max_abs_diff(&lifted.matrix, u) <= tol * self.check_scale()).then_some(b)
    }

    /// The row block when the operator is a row lift up to rounding.
    fn lifted_block(&self) -> Option<CMat> {
        if self.spec.s() == 1 {
            return None;
        }
        self.as_row_lift(ROW_LIFT_DETECTION_TOL)
    }

    fn lift(&self, b: &CMat) -> CMat {
        LinOp::row_lift(&self.spec, b).expect("block has row length").matrix
    }

    /// Singular values in nonincreasing order, with multiplicity.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        match self.lifted_block() {
            Some(b) => Ok(repeat_each(dense::singular_values(&b)?, self.spec.s())),
            None => dense::singular_values(&self.matrix),
        }
    }

    /// Eigenvalues of the Hermitian part in ascending order, with multiplicity.
    pub fn eigenvalues_hermitian(&self) -> Result<Vec<f64>> {
        match self.lifted_block() {
            Some(b) => Ok(repeat_each(dense::eigvalsh(&b)?, self.spec.s())),
            None => dense::eigvalsh(&self.matrix),
        }
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> Result<f64> {
        Ok(self.singular_values()?.first().copied().unwrap_or(0.0))
    }

    /// Positive means trace-self-adjoint with spectrum `>= -tol ||T||`.
    pub fn is_positive(&self, tol: f64) -> Result<Positivity> {
        let self_adjoint = self.is_trace_self_adjoint(tol);
        let eig = self.eigenvalues_hermitian()?;
        let min = eig.first().copied().unwrap_or(0.0);
        let norm = eig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(Positivity {
            is_positive: self_adjoint && min >= -tol * norm,
            is_trace_self_adjoint: self_adjoint,
            min_eigenvalue: min,
        })
    }

    pub fn report(&self, tol: f64) -> Result<OpReport> {
        let adj = self.is_matrix_adjointable(tol);
        let pos = self.is_positive(tol)?;
        let witness = if let Some(w) = adj.witness {
            Some(w)
        } else if !pos.is_trace_self_adjoint {
            Some(self.self_adjoint_witness())
        } else if !pos.is_positive {
            let (_, vectors) = dense::eigh(&self.matrix)?;
            let v: Vec<Complex64> = vectors.col(0).iter().copied().collect();
            let f = MatFn::from_coeffs(&self.spec, v)?;
            Some((f.clone(), f))
        } else {
            None
        };
        Ok(OpReport {
            is_trace_self_adjoint: pos.is_trace_self_adjoint,
            is_matrix_adjointable: adj.adjointable,
            is_positive: pos.is_positive,
            min_eigenvalue: pos.min_eigenvalue,
            operator_norm: self.op_norm()?,
            witness,
        })
    }

    /// Basis pair `(e_b, e_a)` maximizing `|tr<U e_b, e_a> - tr<e_b, U e_a>|`.
    fn self_adjoint_witness(&self) -> (MatFn, MatFn) {
        let d = self.dim();
        let (mut best, mut pair) = (-1.0, (0, 0));
        for b in 0..d {
            for a in 0..d {
                let dev = (self.matrix[(a, b)] - self.matrix[(b, a)].conj()).norm();
                if dev > best {
                    best = dev;
                    pair = (b, a);
                }
            }
        }
        (MatFn::basis(&self.spec, pair.0), MatFn::basis(&self.spec, pair.1))
    }

    fn require_positive(&self) -> Result<()> {
        let pos = self.is_positive(SQRT_POSITIVITY_TOL)?;
        if !pos.is_trace_self_adjoint {
            return Err(Error::NotSelfAdjoint { deviation: self.self_adjoint_deviation() });
        }
        if !pos.is_positive {
            return Err(Error::NotPositive { min_eigenvalue: pos.min_eigenvalue });
        }
        Ok(())
    }

    /// The unique positive square root, via Hermitian eigendecomposition with
    /// slightly negative eigenvalues clamped to zero.
    pub fn sqrt_psd(&self) -> Result<LinOp> {
        self.require_positive()?;
        let sqrt = |m: &CMat| dense::hermitian_function(m, |v| v.max(0.0).sqrt());
        let root = match self.lifted_block() {
            // Near-zero eigenvalues have roots far above rounding level, and
            // their eigenvectors need not respect the row blocks; working on
            // the block keeps the result an exact module map.
            Some(b) => self.lift(&sqrt(&b)?),
            None => sqrt(&self.matrix)?,
        };
        let tag = match &self.tag {
            StructureTag::Multiplication { phi } => {
                StructureTag::Multiplication { phi: phi.iter().map(|p| c(p.re.max(0.0).sqrt())).collect() }
            }
            t if t.is_module() => StructureTag::ModuleMap,
            _ => StructureTag::General,
        };
        Ok(self.derived(root, tag))
    }

    /// Square root as the limit of the scaled Denman-Beavers iteration
    /// `Y <- (mu Y + (mu Z)^{-1}) / 2`, `Z <- (mu Z + (mu Y)^{-1}) / 2`
    /// with `Y_0 = T`, `Z_0 = I`.
    ///
    /// The scaling `mu = (|Y^-1| |Z^-1| / (|Y| |Z|))^{1/4}` uses Frobenius
    /// norms and is switched off once the iterates are close. Stops when
    /// `|Y_{k+1} - Y_k|_F <= tol max(1, |Y_{k+1}|_F)`; the Frobenius norm
    /// bounds the operator norm.
    pub fn sqrt_iterative(&self, tol: f64, max_iter: usize) -> Result<SqrtIteration> {
        self.require_positive()?;
        let eig = self.eigenvalues_hermitian()?;
        let (min, max) = (eig[0], eig[eig.len() - 1]);
        if min <= SINGULAR_TOL * max.max(f64::MIN_POSITIVE) {
            return Err(Error::Singular { smallest: min.max(0.0) });
        }

        let d = self.dim();
        let mut y = dense::hermitian_part(&self.matrix);
        let mut z = dense::identity(d);
        let mut scaling = true;
        let mut step = f64::INFINITY;
        for k in 1..=max_iter {
            let y_inv = dense::lu_inverse(&y);
            let z_inv = dense::lu_inverse(&z);
            let mu = if scaling {
                let num = dense::frobenius(&y_inv) * dense::frobenius(&z_inv);
                let den = dense::frobenius(&y) * dense::frobenius(&z);
                (num / den).powf(0.25)
            } else {
                1.0
            };
            let y_next = CMat::from_fn(d, d, |i, j| (y[(i, j)] * mu + z_inv[(i, j)] / mu) * 0.5);
            let z_next = CMat::from_fn(d, d, |i, j| (z[(i, j)] * mu + y_inv[(i, j)] / mu) * 0.5);
            step = dense::frobenius(&(&y_next - &y));
            let size = dense::frobenius(&y_next);
            y = y_next;
            z = z_next;
            if step <= 1e-2 * size {
                scaling = false;
            }
            if step <= tol * size.max(1.0) {
                let tag = if self.tag.is_module() { StructureTag::ModuleMap } else { StructureTag::General };
                return Ok(SqrtIteration {
                    root: self.derived(dense::hermitian_part(&y), tag.clone()),
                    inverse_root: self.derived(dense::hermitian_part(&z), tag),
                    iterations: k,
                    last_step: step,
                });
            }
        }
        Err(Error::NoConvergence { iterations: max_iter, residual: step })
    }

    /// Dense inverse via the SVD.
    pub fn invert(&self) -> Result<LinOp> {
        // A row lift has the block's singular values, each repeated s times.
        let block = self.lifted_block();
        let svd = dense::svd(block.as_ref().unwrap_or(&self.matrix))?;
        let largest = svd.s.first().copied().unwrap_or(0.0);
        let smallest = svd.s.last().copied().unwrap_or(0.0);
        if smallest <= SINGULAR_TOL * largest || largest == 0.0 {
            return Err(Error::Singular { smallest });
        }
        let n = svd.s.len();
        let v_scaled = CMat::from_fn(n, n, |i, j| svd.v[(i, j)] / svd.s[j]);
        let inv = &v_scaled * svd.u.adjoint();
        let inv = if block.is_some() { self.lift(&inv) } else { inv };
        let tag = match &self.tag {
            StructureTag::Multiplication { phi } => {
                StructureTag::Multiplication { phi: phi.iter().map(|p| p.inv()).collect() }
            }
            t if t.is_module() => StructureTag::ModuleMap,
            StructureTag::Permutation => StructureTag::Permutation,
            _ => StructureTag::General,
        };
        Ok(self.derived(inv, tag))
    }

    /// `U = W P` with `P = (U* U)^{1/2}` and `W = U P^{-1}`.
    pub fn polar(&self) -> Result<Polar> {
        let gram = self.trace_adjoint().compose(self)?.hermitian_part();
        let positive = gram.sqrt_psd()?;
        let unitary = self.compose(&positive.invert()?)?;
        Ok(Polar { unitary, positive })
    }

    /// Operator norm of `self other - other self`.
    pub fn commutator_norm(&self, other: &LinOp) -> Result<f64> {
        let ab = self.compose(other)?;
        let ba = other.compose(self)?;
        ab.sub(&ba)?.op_norm()
    }

    pub fn to_json(&self) -> OperatorJson {
        let d = self.dim();
        let mut matrix = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let z = self.matrix[(i, j)];
                matrix.push([z.re, z.im]);
            }
        }
        let phi = match &self.tag {
            StructureTag::Multiplication { phi } => Some(phi.iter().map(|z| [z.re, z.im]).collect()),
            _ => None,
        };
        OperatorJson { dim: d, matrix, kind: Some(self.tag.kind().to_string()), phi }
    }

    pub fn from_json(spec: &SpaceSpec, json: &OperatorJson) -> Result<Self> {
        let d = spec.ambient_dim();
        if json.dim != d || json.matrix.len() != d * d {
            return Err(Error::Format(format!(
                "operator of dim {} with {} entries does not act on {spec}",
                json.dim,
                json.matrix.len()
            )));
        }
        let matrix = CMat::from_fn(d, d, |i, j| {
            let [re, im] = json.matrix[i * d + j];
            Complex64::new(re, im)
        });
        let tag = match json.kind.as_deref() {
            None | Some("general") => StructureTag::General,
            Some("module_map") => StructureTag::ModuleMap,
            Some("permutation") => StructureTag::Permutation,
            Some("multiplication") => {
                let phi = json
                    .phi
                    .as_ref()
                    .ok_or_else(|| Error::Format("multiplication operator without phi".into()))?;
                StructureTag::Multiplication { phi: phi.iter().map(|&[re, im]| Complex64::new(re, im)).collect() }
            }
            Some(other) => return Err(Error::Format(format!("unknown operator kind {other:?}"))),
        };
        Self::with_tag(spec, matrix, tag)
    }
}

fn combined_tag(a: &StructureTag, b: &StructureTag) -> StructureTag {
    if a.is_module() && b.is_module() {
        StructureTag::ModuleMap
    } else {
        StructureTag::General
    }
}

/// Wire format: `{"dim": D, "matrix": [[re, im], ...]}` in row-major order,
/// optionally with `"kind"` and, for multiplication operators, `"phi"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub dim: usize,
    pub matrix: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<[f64; 2]>>,
}

fn repeat_each(values: Vec<f64>, times: usize) -> Vec<f64> {
    values.into_iter().flat_map(|v| std::iter::repeat_n(v, times)).collect()
}
