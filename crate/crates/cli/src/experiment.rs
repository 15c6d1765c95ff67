//! Runs one validated config and assembles its report.

use std::sync::Arc;
use std::time::Instant;

use mvframe_core::counterexamples::{self, CounterexampleSuite};
use mvframe_core::frame::{self, FrameReport};
use mvframe_core::riesz::{self, MatOnb, PositiveClassRequest};
use mvframe_core::{apply_generator, sample, Complex64, LinOp, OpReport, SpaceSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{Construction, ExperimentConfig, Tolerances, Validated};
use crate::output::{StepTiming, Timings};

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorEntry {
    pub name: String,
    pub operator: OpReport,
    pub frame: FrameReport,
}

/// One row of the square-root chain sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub n: u32,
    pub lower: f64,
    pub upper: f64,
    pub expected_lower: f64,
    pub expected_upper: f64,
    pub parseval_distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub space: String,
    pub passed: bool,
    /// Set when a numerical step aborted the run; the report is then partial.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub verdicts: Vec<Verdict>,
    pub generators: Vec<GeneratorEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexamples: Option<CounterexampleSuite>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<SweepRow>>,
}

pub struct Outcome {
    pub report: RunReport,
    pub timings: Timings,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

struct Runner {
    spec: SpaceSpec,
    tol: Tolerances,
    rng: ChaCha8Rng,
    onb: Option<Arc<MatOnb>>,
    verdicts: Vec<Verdict>,
    generators: Vec<GeneratorEntry>,
    steps: Vec<StepTiming>,
    table: Option<Vec<SweepRow>>,
    counterexamples: Option<CounterexampleSuite>,
}

type Step<T = ()> = mvframe_core::Result<T>;

impl Runner {
    fn onb(&mut self) -> Step<Arc<MatOnb>> {
        if self.onb.is_none() {
            self.onb = Some(Arc::new(MatOnb::canonical(&self.spec)?));
        }
        Ok(self.onb.clone().expect("just built"))
    }

    fn check(&mut self, name: impl Into<String>, pass: bool) {
        self.verdicts.push(Verdict { name: name.into(), pass, value: None, limit: None });
    }

    fn at_most(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.verdicts.push(Verdict { name: name.into(), pass: value <= limit, value: Some(value), limit: Some(limit) });
    }

    fn at_least(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.verdicts.push(Verdict { name: name.into(), pass: value >= limit, value: Some(value), limit: Some(limit) });
    }

    fn timed<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Step<T>) -> Step<T> {
        let start = Instant::now();
        let out = f(self);
        self.steps.push(StepTiming { name: name.to_string(), seconds: start.elapsed().as_secs_f64() });
        out
    }

    /// Builds `{U E_k}`, verifies it, and records the standard verdicts.
    fn generator(&mut self, name: &str, op: &LinOp, unitary: bool) -> Step<FrameReport> {
        let onb = self.onb()?;
        let tol = self.tol.clone();
        self.timed(name, |run| {
            let rb = apply_generator(op, onb)?;
            let report = frame::verify_riesz(&rb, tol.frame)?;
            run.check(format!("{name}: frame bounds inside the Riesz interval"), report.within_riesz_interval == Some(true));
            run.check(format!("{name}: is a frame"), report.is_frame);
            run.at_most(format!("{name}: completeness defect"), report.completeness_defect as f64, 0.0);
            run.at_most(
                format!("{name}: reconstruction error"),
                report.reconstruction_error.unwrap_or(f64::INFINITY),
                tol.reconstruction,
            );
            if unitary {
                run.at_most(format!("{name}: Parseval distance"), report.parseval_distance, tol.unitary);
            }
            run.generators.push(GeneratorEntry {
                name: name.to_string(),
                operator: op.report(tol.adjointability)?,
                frame: report.clone(),
            });
            Ok(report)
        })
    }

    fn unitarity(&mut self, name: &str, w: &LinOp) -> Step {
        let defect = w.trace_adjoint().compose(w)?.sub(&LinOp::identity(&self.spec))?.op_norm()?;
        self.at_most(format!("{name}: |W*W - I|"), defect, self.tol.unitary);
        Ok(())
    }

    fn identity(&mut self) -> Step {
        let report = self.generator("identity", &LinOp::identity(&self.spec), true)?;
        self.at_most("identity: |A - 1| and |B - 1|", report.parseval_distance, self.tol.frame);
        Ok(())
    }

    fn i_plus_t(&mut self, config: &ExperimentConfig) -> Step {
        let t = sample::random_psd_module_map(&self.spec, &mut self.rng);
        let s = sample::random_psd_module_map(&self.spec, &mut self.rng);
        let with_s = config.params.with_s.unwrap_or(true);
        let req = PositiveClassRequest { s: with_s.then_some(&s), product: false, power_terms: config.params.power_terms };
        let mut gens = riesz::build_positive_classes(&t, req)?;
        if config.params.commuting.unwrap_or(true) {
            // A polynomial in T commutes with it.
            let poly = t.compose(&t)?.scale(c(0.1)).hermitian_part();
            let req = PositiveClassRequest { s: Some(&poly), product: true, power_terms: None };
            let product = riesz::build_positive_classes(&t, req)?.into_iter().find(|g| g.name == "I+TS");
            gens.extend(product.map(|mut g| {
                g.name = "I+TS (S = T^2/10)".into();
                g
            }));
        }
        for g in gens {
            let report = self.generator(&g.name, &g.op, false)?;
            self.at_least(format!("{}: lower frame bound", g.name), report.lower_bound, 1.0 - self.tol.frame);
        }
        Ok(())
    }

    fn neumann(&mut self, config: &ExperimentConfig) -> Step {
        let norm = config.params.norm.unwrap_or(0.9);
        let a = sample::random_general_module_map(&self.spec, &mut self.rng);
        let t = a.scale(c(norm / a.op_norm()?));
        let series = riesz::build_neumann(&t)?;
        for cp in &series.checkpoints {
            let limit = cp.tail_bound * (1.0 + 1e-8) + 1e-12;
            self.at_most(format!("neumann: partial sum to {} within the tail bound", cp.terms), cp.residual, limit);
        }
        self.generator("(I - T)^-1", &series.generator, false)?;
        Ok(())
    }

    fn sqrt_chain(&mut self, config: &ExperimentConfig) -> Step {
        let n_max = config.params.n.unwrap_or(8);
        let [lo, hi] = config.params.spectrum.unwrap_or([0.5, 4.0]);
        let t = sample::psd_module_map_with_spectrum(&self.spec, lo, hi, &mut self.rng);
        let sv = t.singular_values()?;
        let (norm, smin) = (sv[0], sv[sv.len() - 1]);
        let mut rows = Vec::new();
        let mut previous = f64::INFINITY;
        for n in 1..=n_max {
            let root = riesz::build_sqrt_chain(&t, n)?;
            let name = format!("T^(1/2^{n})");
            let report = self.generator(&name, &root, false)?;
            let e = 1.0 / 2f64.powi(n as i32 - 1);
            let row = SweepRow {
                n,
                lower: report.lower_bound,
                upper: report.upper_bound,
                expected_lower: smin.powf(e),
                expected_upper: norm.powf(e),
                parseval_distance: report.parseval_distance,
            };
            let err = (row.lower - row.expected_lower).abs().max((row.upper - row.expected_upper).abs());
            self.at_most(format!("{name}: bounds match (s_min^e, |T|^e)"), err, self.tol.bounds);
            if t.max_abs_diff(&LinOp::identity(&self.spec)) > 0.0 {
                self.check(format!("{name}: Parseval distance decreases"), row.parseval_distance < previous);
            }
            previous = row.parseval_distance;
            rows.push(row);
        }
        self.table = Some(rows);
        Ok(())
    }

    fn jordan_parts(&mut self) -> Step {
        let h = sample::random_self_adjoint_module_map(&self.spec, &mut self.rng);
        let norm = h.op_norm()?;
        let parts = riesz::build_jordan_parts(&h)?;
        self.at_most("jordan: |P1 P2| / |T|^2", parts.product_residual / (norm * norm), self.tol.residual);
        self.at_most("jordan: |T - (P1 - P2)| / |T|", parts.difference_residual / norm, self.tol.residual);
        self.generator("I+P1", &parts.plus, false)?;
        self.generator("I+P2", &parts.minus, false)?;
        Ok(())
    }

    fn unitary_parts(&mut self) -> Step {
        let h = sample::random_self_adjoint_module_map(&self.spec, &mut self.rng);
        let parts = riesz::build_unitary_parts(&h)?;
        let avg = parts.plus.add(&parts.minus)?.scale(c(0.5));
        let gap = avg.sub(&h.scale(c(1.0 / parts.norm)))?.op_norm()?;
        self.at_most("unitary parts: |(W+ + W-)/2 - T/|T||", gap, self.tol.residual);
        for (name, w) in [("W+", &parts.plus), ("W-", &parts.minus)] {
            self.unitarity(name, w)?;
            self.generator(name, w, true)?;
        }
        Ok(())
    }

    fn cartesian_unitaries(&mut self) -> Step {
        let g = sample::random_general_module_map(&self.spec, &mut self.rng);
        let cart = riesz::build_cartesian_unitaries(&g)?;
        self.at_least("cartesian: available unitaries", cart.available().count() as f64, 4.0);
        for (i, o) in cart.available() {
            let name = format!("Omega{i}");
            self.unitarity(&name, o)?;
            self.generator(&name, o, true)?;
        }
        Ok(())
    }

    fn polar(&mut self) -> Step {
        let u = sample::random_module_map(&self.spec, &mut self.rng);
        let p = u.polar()?;
        let rec = p.unitary.compose(&p.positive)?.sub(&u)?.op_norm()? / u.op_norm()?;
        self.at_most("polar: |WP - U| / |U|", rec, self.tol.residual);
        self.unitarity("W", &p.unitary)?;
        self.generator("W", &p.unitary, true)?;
        self.generator("P", &p.positive, false)?;
        Ok(())
    }

    fn holub_forward(&mut self) -> Step {
        let u = sample::random_module_map(&self.spec, &mut self.rng);
        self.generator("U", &u, false)?;
        let rb = apply_generator(&u, self.onb()?)?.with_dual()?;
        let fwd = riesz::holub_map(&rb)?;
        self.check("holub forward: T = (U^-1)* U^-1 is positive", fwd.is_positive);
        self.at_most("holub forward: max_k |T f_k - g_k|", fwd.max_residual, self.tol.residual);
        let scaled = fwd.min_eigenvalue * u.op_norm()?.powi(2);
        self.at_least("holub forward: min eig(T) |U|^2", scaled, 1.0 - self.tol.frame);
        Ok(())
    }

    fn holub_converse(&mut self, config: &ExperimentConfig) -> Step {
        let t = match config.params.spectrum {
            Some([lo, hi]) => sample::psd_module_map_with_spectrum(&self.spec, lo, hi, &mut self.rng),
            None => sample::random_psd_module_map(&self.spec, &mut self.rng),
        };
        let conv = riesz::holub_basis_for_positive(&t, self.onb()?)?;
        self.at_most("holub converse: max_k |T q_k - h_k| / |T|", conv.max_residual / t.op_norm()?, self.tol.residual);
        self.at_most("holub converse: biorthogonality of q and h", conv.basis.biorthogonality_defect()?, self.tol.residual);
        let gen = conv.basis.generator().clone();
        self.generator("(T^1/2)^-1", &gen, false)?;
        Ok(())
    }

    fn counterexamples(&mut self) -> Step {
        let spec = self.spec.clone();
        let suite = self.timed("counterexamples", |_| counterexamples::run_suite_on(&spec))?;
        let e = &suite.entry_swap;
        self.check("entry swap: not matrix-adjointable", !e.matrix_adjointable);
        self.check("entry swap: U* = U", e.equals_trace_adjoint);
        self.at_least("entry swap: witness deviation", e.deviation, 0.5);
        let h = &suite.image_family;
        self.at_most("image family: lower frame bound", h.frame.lower_bound, 1e-10);
        self.at_least("image family: completeness defect", h.frame.completeness_defect as f64, 1.0);
        self.at_most("image family: witness energy", h.witness_energy, 1e-20);
        let t = &suite.transpose;
        self.at_most("transpose: |tr<Uf,f> + |h|^2|", (t.trace_form + t.h_norm_squared).abs(), 1e-10);
        self.check("transpose: not positive", !t.operator.is_positive);
        let u = counterexamples::transpose(&spec)?;
        let onb = self.onb()?;
        let fixes = onb.functions().iter().map(|e| u.apply(e).map(|v| &v == e)).collect::<Step<Vec<_>>>()?;
        self.check("transpose: fixes every diagonal basis element", fixes.iter().all(|&b| b));
        self.counterexamples = Some(suite);
        Ok(())
    }
}

/// Runs a validated config. Numerical failures do not abort: they are
/// recorded in the report, which is then marked as failed.
pub fn run_experiment(validated: &Validated) -> Outcome {
    let config = &validated.config;
    let start = Instant::now();
    let mut runner = Runner {
        spec: validated.spec.clone(),
        tol: validated.tolerances.clone(),
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        onb: None,
        verdicts: Vec::new(),
        generators: Vec::new(),
        steps: Vec::new(),
        table: None,
        counterexamples: None,
    };
    let result = match config.construction {
        Construction::Identity => runner.identity(),
        Construction::IPlusT => runner.i_plus_t(config),
        Construction::Neumann => runner.neumann(config),
        Construction::SqrtChain => runner.sqrt_chain(config),
        Construction::JordanParts => runner.jordan_parts(),
        Construction::UnitaryParts => runner.unitary_parts(),
        Construction::CartesianUnitaries => runner.cartesian_unitaries(),
        Construction::Polar => runner.polar(),
        Construction::HolubForward => runner.holub_forward(),
        Construction::HolubConverse => runner.holub_converse(config),
        Construction::Counterexamples => runner.counterexamples(),
    };
    let error = result.err().map(|e| e.to_string());
    let passed = error.is_none() && !runner.verdicts.is_empty() && runner.verdicts.iter().all(|v| v.pass);
    Outcome {
        report: RunReport {
            config: config.clone(),
            space: validated.spec.to_string(),
            passed,
            error,
            verdicts: runner.verdicts,
            generators: runner.generators,
            counterexamples: runner.counterexamples,
            table: runner.table,
        },
        timings: Timings { total_seconds: start.elapsed().as_secs_f64(), steps: runner.steps },
    }
}
