//! Riesz bases and frames of matrix-valued functions on finite abelian
//! groups.
//!
//! The ambient space is `L2(G, C^{s x r})` for `G = Z_{n_1} x ... x Z_{n_m}`
//! with counting measure, carrying the matrix-valued inner product
//! `<f, g> = sum_x f(x) g(x)*`. Operators are stored as dense matrices on the
//! `s r |G|`-dimensional coordinate space; see [`space`] for the layout.

mod dense;

pub mod counterexamples;
pub mod error;
pub mod frame;
pub mod group;
pub mod operator;
pub mod riesz;
pub mod sample;
pub mod space;

pub use error::{Error, Result};
pub use frame::{FrameReport, verify_riesz};
pub use group::{GroupElement, GroupSpec};
pub use operator::{LinOp, OpReport, Positivity, StructureTag};
pub use riesz::{apply_generator, MatOnb, RieszBasis};
pub use space::{lin_comb, MatFn, MatFnJson, MatGram, SpaceSpec};

pub use num_complex::Complex64;
