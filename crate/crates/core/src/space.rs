//! The space `L^2(G, C^{s x r})` of matrix-valued functions on a finite
//! abelian group.
//!
//! A [`MatFn`] is stored as a flat coordinate vector. Entry `(i, j)` at the
//! element of rank `x` lives at index `(i * r + j) * |G| + x`, so row `i` of
//! the function occupies the contiguous block `[i * r|G|, (i + 1) * r|G|)`.
//! With this layout the trace inner product is the plain complex dot product
//! of coordinate vectors.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::CMat;
use crate::error::{Error, Result};
use crate::group::GroupSpec;

/// Upper bound on `s` and `r`.
pub const MAX_MATRIX_SIDE: usize = 16;
/// Upper bound on the ambient dimension `|G| s r` for dense operators.
pub const MAX_AMBIENT_DIM: usize = 4096;

/// Value of the matrix-valued inner product: an `s x s` matrix.
pub type MatGram = CMat;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpaceSpec {
    group: GroupSpec,
    s: usize,
    r: usize,
}

impl SpaceSpec {
    pub fn new(group: GroupSpec, s: usize, r: usize) -> Result<Self> {
        for (name, v) in [("s", s), ("r", r)] {
            if v == 0 || v > MAX_MATRIX_SIDE {
                return Err(Error::InvalidSpace(format!(
                    "{name} = {v} is outside 1..={MAX_MATRIX_SIDE}"
                )));
            }
        }
        let dim = group.size() * s * r;
        if dim > MAX_AMBIENT_DIM {
            return Err(Error::InvalidSpace(format!(
                "ambient dimension {dim} exceeds the cap of {MAX_AMBIENT_DIM}"
            )));
        }
        Ok(Self { group, s, r })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn group_size(&self) -> usize {
        self.group.size()
    }

    /// Length `r |G|` of one row block.
    pub fn row_len(&self) -> usize {
        self.r * self.group.size()
    }

    pub fn ambient_dim(&self) -> usize {
        self.s * self.row_len()
    }

    pub fn coord(&self, i: usize, j: usize, x: usize) -> usize {
        debug_assert!(i < self.s && j < self.r && x < self.group.size());
        (i * self.r + j) * self.group.size() + x
    }

    /// Inverse of [`SpaceSpec::coord`]: `(i, j, x)`.
    pub fn split_coord(&self, a: usize) -> (usize, usize, usize) {
        let g = self.group.size();
        let x = a % g;
        let ij = a / g;
        (ij / self.r, ij % self.r, x)
    }

    pub(crate) fn ensure_same(&self, other: &SpaceSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch { left: self.to_string(), right: other.to_string() })
        }
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L2({}, C^{}x{})", self.group, self.s, self.r)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatFn {
    spec: SpaceSpec,
    coeffs: Vec<Complex64>,
}

impl MatFn {
    pub fn zeros(spec: &SpaceSpec) -> Self {
        Self { spec: spec.clone(), coeffs: vec![Complex64::new(0.0, 0.0); spec.ambient_dim()] }
    }

    pub fn from_coeffs(spec: &SpaceSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != spec.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.ambient_dim(),
                actual: coeffs.len(),
            });
        }
        Ok(Self { spec: spec.clone(), coeffs })
    }

    /// Builds `f` from its value at every element rank.
    pub fn from_values(spec: &SpaceSpec, mut value: impl FnMut(usize) -> CMat) -> Result<Self> {
        let mut f = Self::zeros(spec);
        for x in 0..spec.group_size() {
            let m = value(x);
            if m.nrows() != spec.s || m.ncols() != spec.r {
                return Err(Error::DimensionMismatch {
                    expected: spec.s * spec.r,
                    actual: m.nrows() * m.ncols(),
                });
            }
            for i in 0..spec.s {
                for j in 0..spec.r {
                    f.coeffs[spec.coord(i, j, x)] = m[(i, j)];
                }
            }
        }
        Ok(f)
    }

    /// The function with a single nonzero entry `(i, j)` equal to `scalar`.
    pub fn single_entry(spec: &SpaceSpec, i: usize, j: usize, scalar: &[Complex64]) -> Result<Self> {
        if scalar.len() != spec.group_size() {
            return Err(Error::DimensionMismatch {
                expected: spec.group_size(),
                actual: scalar.len(),
            });
        }
        if i >= spec.s || j >= spec.r {
            return Err(Error::InvalidSpace(format!("entry ({i}, {j}) outside {spec}")));
        }
        let mut f = Self::zeros(spec);
        for (x, &v) in scalar.iter().enumerate() {
            f.coeffs[spec.coord(i, j, x)] = v;
        }
        Ok(f)
    }

    /// Canonical coordinate basis function with a single 1 at coordinate `a`.
    pub fn basis(spec: &SpaceSpec, a: usize) -> Self {
        let mut f = Self::zeros(spec);
        f.coeffs[a] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn spec(&self) -> &SpaceSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn get(&self, i: usize, j: usize, x: usize) -> Complex64 {
        self.coeffs[self.spec.coord(i, j, x)]
    }

    /// The `s x r` matrix `f(x)` at the element of rank `x`.
    pub fn value_at(&self, x: usize) -> CMat {
        CMat::from_fn(self.spec.s, self.spec.r, |i, j| self.get(i, j, x))
    }

    fn row(&self, i: usize) -> &[Complex64] {
        let n = self.spec.row_len();
        &self.coeffs[i * n..(i + 1) * n]
    }

    /// `<f, g> = sum_x f(x) g(x)*`.
    pub fn mat_inner(&self, g: &MatFn) -> Result<MatGram> {
        self.spec.ensure_same(&g.spec)?;
        let s = self.spec.s;
        Ok(CMat::from_fn(s, s, |p, q| {
            self.row(p).iter().zip(g.row(q)).map(|(a, b)| a * b.conj()).sum()
        }))
    }

    /// `tr <f, g>`.
    pub fn trace_inner(&self, g: &MatFn) -> Result<Complex64> {
        self.spec.ensure_same(&g.spec)?;
        Ok(self.coeffs.iter().zip(&g.coeffs).map(|(a, b)| a * b.conj()).sum())
    }

    pub fn frob_norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(M f)(x) = M f(x)` for an `s x s` matrix `M`.
    pub fn left_mul(&self, m: &CMat) -> Result<MatFn> {
        let s = self.spec.s;
        if m.nrows() != s || m.ncols() != s {
            return Err(Error::DimensionMismatch { expected: s * s, actual: m.nrows() * m.ncols() });
        }
        let n = self.spec.row_len();
        let mut out = Self::zeros(&self.spec);
        for p in 0..s {
            let dst = &mut out.coeffs[p * n..(p + 1) * n];
            for q in 0..s {
                let w = m[(p, q)];
                if w == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (d, v) in dst.iter_mut().zip(self.row(q)) {
                    *d += w * v;
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, z: Complex64) -> MatFn {
        Self { spec: self.spec.clone(), coeffs: self.coeffs.iter().map(|v| v * z).collect() }
    }

    pub fn add(&self, g: &MatFn) -> Result<MatFn> {
        self.spec.ensure_same(&g.spec)?;
        let coeffs = self.coeffs.iter().zip(&g.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { spec: self.spec.clone(), coeffs })
    }

    pub fn sub(&self, g: &MatFn) -> Result<MatFn> {
        self.add(&g.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn to_json(&self) -> MatFnJson {
        MatFnJson {
            shape: [self.spec.s, self.spec.r, self.spec.group_size()],
            entries: self.coeffs.iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn from_json(spec: &SpaceSpec, json: &MatFnJson) -> Result<Self> {
        let expected = [spec.s, spec.r, spec.group_size()];
        if json.shape != expected {
            return Err(Error::Format(format!(
                "shape {:?} does not match {spec} (expected {expected:?})",
                json.shape
            )));
        }
        let coeffs = json.entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        Self::from_coeffs(spec, coeffs)
    }
}

/// Pointwise complex-linear combination `sum_k c_k f_k`.
pub fn lin_comb(coeffs: &[Complex64], fs: &[MatFn]) -> Result<MatFn> {
    if coeffs.len() != fs.len() {
        return Err(Error::LengthMismatch { coeffs: coeffs.len(), functions: fs.len() });
    }
    let first = fs.first().ok_or(Error::EmptyFamily)?;
    let mut out = MatFn::zeros(&first.spec);
    for (c, f) in coeffs.iter().zip(fs) {
        out.spec.ensure_same(&f.spec)?;
        for (o, v) in out.coeffs.iter_mut().zip(&f.coeffs) {
            *o += c * v;
        }
    }
    Ok(out)
}

/// Wire format: `{"shape": [s, r, |G|], "entries": [[re, im], ...]}` with
/// entries in the coordinate order described in the module docs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatFnJson {
    pub shape: [usize; 3],
    pub entries: Vec<[f64; 2]>,
}

impl Serialize for MatFn {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn space(orders: Vec<usize>, s: usize, r: usize) -> SpaceSpec {
        SpaceSpec::new(GroupSpec::new(orders).unwrap(), s, r).unwrap()
    }

    fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
        crate::dense::max_abs_diff(a, b) <= tol
    }

    /// Entrywise double sum over elements and the inner column index.
    fn brute_mat_inner(f: &MatFn, g: &MatFn) -> CMat {
        let spec = f.spec();
        CMat::from_fn(spec.s(), spec.s(), |p, q| {
            let mut acc = Complex64::new(0.0, 0.0);
            for x in 0..spec.group_size() {
                for j in 0..spec.r() {
                    acc += f.get(p, j, x) * g.get(q, j, x).conj();
                }
            }
            acc
        })
    }

    #[test]
    fn coordinate_layout() {
        let sp = space(vec![3], 2, 4);
        assert_eq!(sp.ambient_dim(), 24);
        assert_eq!(sp.coord(1, 2, 1), (4 + 2) * 3 + 1);
        for a in 0..sp.ambient_dim() {
            let (i, j, x) = sp.split_coord(a);
            assert_eq!(sp.coord(i, j, x), a);
        }
    }

    #[test]
    fn space_caps() {
        let g = GroupSpec::cyclic(4).unwrap();
        assert!(SpaceSpec::new(g.clone(), 0, 1).is_err());
        assert!(SpaceSpec::new(g.clone(), 17, 1).is_err());
        assert!(SpaceSpec::new(GroupSpec::cyclic(4096).unwrap(), 2, 2).is_err());
        assert!(SpaceSpec::new(GroupSpec::cyclic(1).unwrap(), 1, 1).is_ok());
    }

    #[test]
    fn normalized_constant_has_identity_gram() {
        let sp = space(vec![5], 3, 3);
        let scale = 1.0 / (5f64).sqrt();
        let e = MatFn::from_values(&sp, |_| CMat::from_fn(3, 3, |i, j| if i == j { Complex64::new(scale, 0.0) } else { Complex64::new(0.0, 0.0) })).unwrap();
        assert!(close(&e.mat_inner(&e).unwrap(), &CMat::identity(3, 3), 1e-12));
    }

    #[test]
    fn mat_inner_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (orders, s, r) in [(vec![4], 2, 2), (vec![2, 3], 3, 1), (vec![5], 1, 4)] {
            let sp = space(orders, s, r);
            let f = sample::random_matfn(&sp, &mut rng);
            let g = sample::random_matfn(&sp, &mut rng);
            assert!(close(&f.mat_inner(&g).unwrap(), &brute_mat_inner(&f, &g), 1e-12));
        }
    }

    #[test]
    fn trace_inner_and_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let sp = space(vec![2, 2], 2, 3);
        let f = sample::random_matfn(&sp, &mut rng);
        let g = sample::random_matfn(&sp, &mut rng);
        let gram = f.mat_inner(&g).unwrap();
        let tr: Complex64 = (0..2).map(|i| gram[(i, i)]).sum();
        assert!((f.trace_inner(&g).unwrap() - tr).norm() < 1e-12);

        let ff = f.trace_inner(&f).unwrap();
        assert!((ff.re - f.frob_norm().powi(2)).abs() <= 1e-12 * ff.re);
        assert!(ff.im.abs() <= 1e-12);

        let zero = MatFn::zeros(&sp);
        assert_eq!(zero.trace_inner(&g).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(zero.frob_norm(), 0.0);
    }

    #[test]
    fn single_entry_of_unit_scalar_has_unit_norm() {
        let sp = space(vec![6], 2, 3);
        let e0 = &sp.group().scalar_onb()[0];
        let f = MatFn::single_entry(&sp, 1, 2, e0).unwrap();
        assert!((f.frob_norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn left_mul_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sp = space(vec![3], 2, 2);
        let f = sample::random_matfn(&sp, &mut rng);
        let g = sample::random_matfn(&sp, &mut rng);
        assert_eq!(f.left_mul(&CMat::identity(2, 2)).unwrap(), f);
        assert_eq!(f.left_mul(&CMat::zeros(2, 2)).unwrap(), MatFn::zeros(&sp));

        let m = sample::random_matrix(2, 2, &mut rng);
        let lhs = f.left_mul(&m).unwrap().mat_inner(&g).unwrap();
        let rhs = &m * f.mat_inner(&g).unwrap();
        assert!(close(&lhs, &rhs, 1e-12));

        assert!(f.left_mul(&CMat::identity(3, 3)).is_err());
    }

    #[test]
    fn lin_comb_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let sp = space(vec![4], 1, 2);
        let f = sample::random_matfn(&sp, &mut rng);
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(lin_comb(&[one], std::slice::from_ref(&f)).unwrap(), f);
        let zero = lin_comb(&[one, -one], &[f.clone(), f.clone()]).unwrap();
        assert!(zero.frob_norm() < 1e-15);
        let twice = lin_comb(&[Complex64::new(2.0, 0.0)], std::slice::from_ref(&f)).unwrap();
        assert!((twice.frob_norm() - 2.0 * f.frob_norm()).abs() < 1e-12);
        assert!(lin_comb(&[one, one], std::slice::from_ref(&f)).is_err());
    }

    #[test]
    fn spec_mismatch_is_an_error() {
        let a = MatFn::zeros(&space(vec![4], 2, 2));
        let b = MatFn::zeros(&space(vec![2, 2], 2, 2));
        assert!(matches!(a.mat_inner(&b), Err(Error::SpaceMismatch { .. })));
        assert!(a.trace_inner(&b).is_err());
    }

    #[test]
    fn json_shape_is_checked() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sp = space(vec![3], 2, 1);
        let f = sample::random_matfn(&sp, &mut rng);
        let json = f.to_json();
        assert_eq!(json.shape, [2, 1, 3]);
        let text = serde_json::to_string(&json).unwrap();
        let back: MatFnJson = serde_json::from_str(&text).unwrap();
        assert_eq!(MatFn::from_json(&sp, &back).unwrap(), f);
        assert!(MatFn::from_json(&space(vec![3], 1, 2), &back).is_err());
    }
}
