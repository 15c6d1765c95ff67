//! Randomized property trials over small spaces.
//!
//! Trial `t` uses seed `seed + t` (wrapping) for both its shape and its
//! draws, so `--trials 1 --seed <trial seed>` replays any single trial.

use std::sync::Arc;

use mvframe_core::counterexamples;
use mvframe_core::frame;
use mvframe_core::operator::DEFAULT_TOL;
use mvframe_core::riesz::{self, MatOnb};
use mvframe_core::{apply_generator, sample, Complex64, GroupSpec, LinOp, MatFn, SpaceSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Trial shapes `(group, s, r)`; all have `r >= 2` so the entry swap exists.
pub const SHAPES: [(&[usize], usize, usize); 7] = [
    (&[4], 1, 2),
    (&[5], 1, 3),
    (&[6], 2, 2),
    (&[2, 3], 2, 2),
    (&[8], 2, 2),
    (&[3], 2, 4),
    (&[2, 2], 3, 3),
];

pub const PROPERTIES: [(&str, f64); 10] = [
    ("closure", 0.0),
    ("adjointability_equivalence", 0.0),
    ("sqrt_psd_residual", 1e-10),
    ("sqrt_agreement", 1e-8),
    ("sqrt_norm_law", 1e-10),
    ("holub_forward", 1e-10),
    ("holub_converse", 1e-10),
    ("reconstruction", 1e-8),
    ("trace_domination", 1e-9),
    ("polar", 1e-10),
];

#[derive(Clone, Debug, Serialize)]
pub struct ShapeJson {
    pub group: Vec<usize>,
    pub s: usize,
    pub r: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub property: &'static str,
    pub residual: f64,
    pub limit: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// Basis pair `(f, g)` with `<Uf, g> != <f, U*g>`, when that is the cause.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<[MatFn; 2]>,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.residual <= self.limit
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Trial {
    pub seed: u64,
    pub shape: ShapeJson,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertySummary {
    pub name: &'static str,
    pub limit: f64,
    pub max_residual: f64,
    pub failures: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub trial_seed: u64,
    pub shape: ShapeJson,
    pub property: &'static str,
    pub residual: f64,
    pub limit: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertiesReport {
    pub seed: u64,
    pub trials: u64,
    pub corrupt: bool,
    pub passed: bool,
    pub properties: Vec<PropertySummary>,
    pub failures: Vec<Failure>,
}

/// Everything needed to rerun the first failing trial.
#[derive(Clone, Debug, Serialize)]
pub struct Replay {
    pub command: String,
    pub trial_seed: u64,
    pub corrupt: bool,
    pub shape: ShapeJson,
    pub property: &'static str,
    pub residual: f64,
    pub limit: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<[MatFn; 2]>,
}

pub fn shape_for(trial_seed: u64) -> (SpaceSpec, ShapeJson) {
    let (group, s, r) = SHAPES[(trial_seed % SHAPES.len() as u64) as usize];
    let spec = SpaceSpec::new(GroupSpec::new(group.to_vec()).expect("valid group"), s, r).expect("valid shape");
    (spec, ShapeJson { group: group.to_vec(), s, r })
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn limit(property: &str) -> f64 {
    PROPERTIES.iter().find(|(p, _)| *p == property).expect("known property").1
}

fn rel(a: &LinOp, b: &LinOp) -> mvframe_core::Result<f64> {
    Ok(a.sub(b)?.op_norm()? / b.op_norm()?.max(f64::MIN_POSITIVE))
}

type Outcome = mvframe_core::Result<(f64, Option<String>)>;

fn closure(sp: &SpaceSpec, rng: &mut ChaCha8Rng) -> Outcome {
    let a = sample::random_module_map(sp, rng);
    let b = sample::random_module_map(sp, rng);
    let ops = [a.add(&b)?, a.compose(&b)?, a.invert()?];
    let bad = ops.iter().filter(|o| !o.is_matrix_adjointable(DEFAULT_TOL).adjointable).count();
    Ok((bad as f64, None))
}

fn adjointability_equivalence(sp: &SpaceSpec, rng: &mut ChaCha8Rng) -> Outcome {
    let ops = [
        sample::random_general_module_map(sp, rng),
        sample::random_dense_operator(sp, rng),
        counterexamples::entry_swap(sp)?,
    ];
    let disagreements = ops
        .iter()
        .filter(|op| {
            let a = op.is_matrix_adjointable(DEFAULT_TOL).adjointable;
            let m = op.check_module_map(DEFAULT_TOL);
            let l = op.as_row_lift(DEFAULT_TOL).is_some();
            !(a == m && m == l)
        })
        .count();
    Ok((disagreements as f64, None))
}

fn sqrt_checks(sp: &SpaceSpec, rng: &mut ChaCha8Rng) -> mvframe_core::Result<[(f64, Option<String>); 3]> {
    let t = sample::random_psd_module_map(sp, rng);
    let root = t.sqrt_psd()?;
    let squared = rel(&root.compose(&root)?, &t)?;
    let iter = t.sqrt_iterative(1e-14, 100)?;
    let agreement = rel(&iter.root, &root)?;
    let norm_law = (root.op_norm()? - t.op_norm()?.sqrt()).abs() / t.op_norm()?.sqrt();
    Ok([(squared, None), (agreement, Some(format!("{} iterations", iter.iterations))), (norm_law, None)])
}

fn holub_forward(
    sp: &SpaceSpec,
    onb: &Arc<MatOnb>,
    corrupt: bool,
    rng: &mut ChaCha8Rng,
) -> mvframe_core::Result<(f64, Option<String>, Option<[MatFn; 2]>)> {
    let mut u = sample::random_module_map(sp, rng);
    if corrupt {
        u = u.compose(&counterexamples::entry_swap(sp)?)?;
    }
    let rb = match apply_generator(&u, onb.clone()) {
        Ok(rb) => rb.with_dual()?,
        Err(mvframe_core::Error::NotAdjointable { witness }) => {
            let (f, g) = *witness;
            return Ok((f64::INFINITY, Some("generator is not matrix-adjointable".into()), Some([f, g])));
        }
        Err(e) => return Err(e),
    };
    let fwd = riesz::holub_map(&rb)?;
    let scale = 1.0 + fwd.map.op_norm()? * u.op_norm()?;
    let residual = fwd.max_residual / scale;
    if !fwd.is_positive {
        let detail = format!("map is not positive: min eigenvalue {:e}", fwd.min_eigenvalue);
        return Ok((f64::INFINITY, Some(detail), None));
    }
    Ok((residual, None, None))
}

fn holub_converse(sp: &SpaceSpec, onb: &Arc<MatOnb>, rng: &mut ChaCha8Rng) -> Outcome {
    let t = sample::random_psd_module_map(sp, rng);
    let conv = riesz::holub_basis_for_positive(&t, onb.clone())?;
    let scale = t.op_norm()? * conv.basis.generator().op_norm()?;
    let biorth = conv.basis.biorthogonality_defect()?;
    Ok(((conv.max_residual / scale).max(biorth), None))
}

fn reconstruction(sp: &SpaceSpec, onb: &Arc<MatOnb>, rng: &mut ChaCha8Rng) -> Outcome {
    let u = sample::random_module_map(sp, rng);
    let report = frame::verify_riesz(&apply_generator(&u, onb.clone())?, 1e-9)?;
    if !report.passes() {
        let detail = format!("frame check failed: bounds [{:e}, {:e}]", report.lower_bound, report.upper_bound);
        return Ok((f64::INFINITY, Some(detail)));
    }
    Ok((report.reconstruction_error.unwrap_or(f64::INFINITY), None))
}

fn trace_domination(sp: &SpaceSpec, rng: &mut ChaCha8Rng) -> Outcome {
    let t = sample::random_psd_module_map(sp, rng);
    let weight: f64 = rng.random_range(0.0..3.0);
    let omega = t.add(&sample::random_psd_module_map(sp, rng).scale(c(weight)))?.hermitian_part();
    let t_min = *t.singular_values()?.last().expect("nonempty");
    let o_min = *omega.singular_values()?.last().expect("nonempty");
    omega.invert()?;
    Ok(((1.0 - o_min / t_min).max(0.0), None))
}

fn polar(sp: &SpaceSpec, rng: &mut ChaCha8Rng) -> Outcome {
    let u = sample::random_module_map(sp, rng);
    let p = u.polar()?;
    let factor = rel(&p.unitary.compose(&p.positive)?, &u)?;
    let unitary = p.unitary.trace_adjoint().compose(&p.unitary)?.sub(&LinOp::identity(sp))?.op_norm()?;
    Ok((factor.max(unitary), None))
}

fn check(property: &'static str, outcome: Outcome) -> Check {
    let (residual, detail) = outcome.unwrap_or_else(|e| (f64::INFINITY, Some(e.to_string())));
    Check { property, residual, limit: limit(property), detail, witness: None }
}

/// Runs every property once on the shape and draws fixed by `trial_seed`.
/// Each property gets its own stream so one failure cannot shift the others.
pub fn run_trial(trial_seed: u64, corrupt: bool) -> Trial {
    let (sp, shape) = shape_for(trial_seed);
    let stream = |k: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        rng.set_stream(k);
        rng
    };
    let onb = Arc::new(MatOnb::canonical(&sp).expect("shapes have s | r"));
    let mut checks = vec![
        check("closure", closure(&sp, &mut stream(0))),
        check("adjointability_equivalence", adjointability_equivalence(&sp, &mut stream(1))),
    ];
    match sqrt_checks(&sp, &mut stream(2)) {
        Ok(results) => {
            for (name, outcome) in ["sqrt_psd_residual", "sqrt_agreement", "sqrt_norm_law"].into_iter().zip(results) {
                checks.push(check(name, Ok(outcome)));
            }
        }
        Err(e) => {
            for property in ["sqrt_psd_residual", "sqrt_agreement", "sqrt_norm_law"] {
                let detail = Some(e.to_string());
                checks.push(Check { property, residual: f64::INFINITY, limit: limit(property), detail, witness: None });
            }
        }
    }
    let fwd = match holub_forward(&sp, &onb, corrupt, &mut stream(3)) {
        Ok((residual, detail, witness)) => {
            Check { property: "holub_forward", residual, limit: limit("holub_forward"), detail, witness }
        }
        Err(e) => check("holub_forward", Err(e)),
    };
    checks.push(fwd);
    checks.push(check("holub_converse", holub_converse(&sp, &onb, &mut stream(4))));
    checks.push(check("reconstruction", reconstruction(&sp, &onb, &mut stream(5))));
    checks.push(check("trace_domination", trace_domination(&sp, &mut stream(6))));
    checks.push(check("polar", polar(&sp, &mut stream(7))));
    for c in &mut checks {
        if c.residual.is_nan() {
            c.residual = f64::INFINITY;
        }
    }
    Trial { seed: trial_seed, shape, checks }
}

pub fn replay_command(trial_seed: u64, corrupt: bool) -> String {
    let mut cmd = format!("mvframe properties --trials 1 --seed {trial_seed}");
    if corrupt {
        cmd.push_str(" --corrupt");
    }
    cmd
}

/// Runs `trials` trials in parallel. The report does not depend on the
/// thread count: results are collected in trial order.
pub fn run_properties(trials: u64, seed: u64, corrupt: bool) -> (PropertiesReport, Option<Replay>) {
    let results: Vec<Trial> =
        (0..trials).into_par_iter().map(|t| run_trial(seed.wrapping_add(t), corrupt)).collect();

    let properties = PROPERTIES
        .iter()
        .map(|&(name, limit)| {
            let checks = results.iter().flat_map(|t| &t.checks).filter(|c| c.property == name);
            let (max_residual, failures) =
                checks.fold((0.0f64, 0), |(m, n), c| (m.max(c.residual), n + usize::from(!c.pass())));
            PropertySummary { name, limit, max_residual, failures }
        })
        .collect();

    let mut failures = Vec::new();
    let mut replay = None;
    for trial in &results {
        for c in trial.checks.iter().filter(|c| !c.pass()) {
            failures.push(Failure {
                trial_seed: trial.seed,
                shape: trial.shape.clone(),
                property: c.property,
                residual: c.residual,
                limit: c.limit,
                detail: c.detail.clone(),
            });
            replay.get_or_insert_with(|| Replay {
                command: replay_command(trial.seed, corrupt),
                trial_seed: trial.seed,
                corrupt,
                shape: trial.shape.clone(),
                property: c.property,
                residual: c.residual,
                limit: c.limit,
                detail: c.detail.clone(),
                witness: c.witness.clone(),
            });
        }
    }
    let report = PropertiesReport { seed, trials, corrupt, passed: failures.is_empty(), properties, failures };
    (report, replay)
}
