//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so the verdicts are always printed.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use mvframe_core::counterexamples;
use mvframe_core::frame::{self, optimal_frame_bounds};
use mvframe_core::operator::DEFAULT_TOL;
use mvframe_core::riesz::{self, PositiveClassRequest};
use mvframe_core::sample;
use mvframe_core::{apply_generator, Complex64, GroupSpec, LinOp, MatOnb, SpaceSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn space(orders: &[usize], s: usize, r: usize) -> SpaceSpec {
    SpaceSpec::new(GroupSpec::new(orders.to_vec()).unwrap(), s, r).unwrap()
}

fn onb(sp: &SpaceSpec) -> Arc<MatOnb> {
    Arc::new(MatOnb::canonical(sp).unwrap())
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Shapes used by the 100-trial batteries; all have D <= 256.
fn battery_shapes() -> Vec<SpaceSpec> {
    vec![
        space(&[4], 2, 2),
        space(&[8], 1, 1),
        space(&[2, 3], 2, 4),
        space(&[16], 3, 3),
        space(&[64], 2, 2),
        space(&[4, 4], 2, 6),
        space(&[5], 3, 6),
        space(&[32], 1, 4),
    ]
}

fn trial_space(trial: u64) -> SpaceSpec {
    let shapes = battery_shapes();
    shapes[trial as usize % shapes.len()].clone()
}

fn rng(criterion: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(criterion << 32 | trial)
}

fn dist(a: &LinOp, b: &LinOp) -> f64 {
    a.sub(b).unwrap().op_norm().unwrap()
}

fn z4_two_by_two() -> SpaceSpec {
    space(&[4], 2, 2)
}

fn entry_swap_counterexample() -> Check {
    let sp = z4_two_by_two();
    let u = counterexamples::entry_swap(&sp).map_err(|e| e.to_string())?;
    let adj = u.is_matrix_adjointable(DEFAULT_TOL);
    ensure(!adj.adjointable, || "reported matrix-adjointable".into())?;
    let (f, g) = adj.witness.ok_or("no witness pair")?;
    let lhs = u.apply(&f).unwrap().mat_inner(&g).unwrap();
    let rhs = f.mat_inner(&u.apply(&g).unwrap()).unwrap();
    let gap = (&lhs - &rhs).norm_l2();
    ensure(gap > 0.5, || format!("witness does not violate the identity (gap {gap:e})"))?;
    ensure(u.trace_adjoint().matrix() == u.matrix(), || "trace adjoint differs from U".into())?;
    ensure(!u.check_module_map(DEFAULT_TOL), || "passes the module-map check".into())?;

    let mut r = rng(1, 0);
    let (p, q) = (sample::random_matfn(&sp, &mut r), sample::random_matfn(&sp, &mut r));
    let t1 = u.apply(&p).unwrap().trace_inner(&q).unwrap();
    let t2 = p.trace_inner(&u.trace_adjoint().apply(&q).unwrap()).unwrap();
    ensure((t1 - t2).norm() <= 1e-10, || "trace-level adjoint identity fails".into())?;
    Ok(format!("witness gap {gap:.3}, U* = U exactly"))
}

fn image_family_counterexample() -> Check {
    let r = counterexamples::image_family_report(&z4_two_by_two()).map_err(|e| e.to_string())?;
    ensure(r.frame.lower_bound <= 1e-10, || format!("lower bound {:e}", r.frame.lower_bound))?;
    ensure(r.frame.completeness_defect >= 1, || "defect 0".into())?;
    ensure(r.witness_energy <= 1e-20, || format!("witness energy {:e}", r.witness_energy))?;
    ensure((r.witness_norm - 1.0).abs() < 1e-14, || "witness not unit norm".into())?;
    Ok(format!(
        "lower {:.1e}, defect {}, witness energy {:.1e}",
        r.frame.lower_bound, r.frame.completeness_defect, r.witness_energy
    ))
}

fn transpose_counterexample() -> Check {
    let sp = z4_two_by_two();
    let r = counterexamples::transpose_report(&sp).map_err(|e| e.to_string())?;
    let target = -r.h_norm_squared;
    ensure((r.trace_form - target).abs() <= 1e-10, || format!("tr<Uf,f> = {} vs {target}", r.trace_form))?;
    ensure(!r.operator.is_positive, || "transpose reported positive".into())?;
    ensure(r.operator.is_trace_self_adjoint, || "transpose not trace-self-adjoint".into())?;
    let u = counterexamples::transpose(&sp).unwrap();
    for e in onb(&sp).functions() {
        ensure(&u.apply(e).unwrap() == e, || "U moves a diagonal basis element".into())?;
    }
    Ok(format!("tr<Uf,f> = {:.12}, U fixes all {} basis elements", r.trace_form, sp.group_size()))
}

fn optimal_bounds_law() -> Check {
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let sp = trial_space(trial);
        let u = sample::random_module_map(&sp, &mut rng(4, trial));
        let rb = apply_generator(&u, onb(&sp)).map_err(|e| format!("trial {trial}: {e}"))?;
        let b = optimal_frame_bounds(rb.functions()).unwrap();
        let sv = u.singular_values().unwrap();
        let (smax, smin) = (sv[0], sv[sv.len() - 1]);
        let lo_err = (b.lower - smin * smin).abs() / (smin * smin);
        let hi_err = (b.upper - smax * smax).abs() / (smax * smax);
        ensure(lo_err <= 1e-8 && hi_err <= 1e-8, || format!("trial {trial}: relative errors {lo_err:e}, {hi_err:e}"))?;
        // The interval uses independently computed norms of U and U^{-1}.
        let inv_norm = u.invert().unwrap().op_norm().unwrap();
        let norm = u.op_norm().unwrap();
        let inside = b.lower >= (1.0 - 1e-8) / (inv_norm * inv_norm) && b.upper <= (1.0 + 1e-8) * norm * norm;
        ensure(inside, || format!("trial {trial}: bounds outside the Riesz interval"))?;
        worst = worst.max(lo_err).max(hi_err);
    }
    Ok(format!("100 generators, worst relative error {worst:.1e}"))
}

fn parseval_convergence() -> Check {
    let sp = space(&[8], 2, 2);
    let t = sample::psd_module_map_with_spectrum(&sp, 0.5, 4.0, &mut rng(5, 0));
    let sv = t.singular_values().unwrap();
    let (norm, smin) = (sv[0], sv[sv.len() - 1]);
    ensure((norm - 4.0).abs() < 1e-12, || format!("|T| = {norm}"))?;
    let basis = onb(&sp);
    let mut previous = f64::INFINITY;
    let mut worst = 0.0f64;
    let mut last = 0.0;
    for n in 1..=8u32 {
        let root = riesz::build_sqrt_chain(&t, n).map_err(|e| e.to_string())?;
        let rb = apply_generator(&root, basis.clone()).map_err(|e| e.to_string())?;
        let report = frame::frame_report(rb.functions()).unwrap();
        let exponent = 1.0 / 2f64.powi(n as i32 - 1);
        let (lo, hi) = (smin.powf(exponent), norm.powf(exponent));
        let err = (report.lower_bound - lo).abs().max((report.upper_bound - hi).abs());
        ensure(err <= 1e-7, || format!("n = {n}: bounds off by {err:e}"))?;
        ensure(report.parseval_distance < previous, || format!("n = {n}: Parseval distance not decreasing"))?;
        previous = report.parseval_distance;
        worst = worst.max(err);
        last = report.parseval_distance;
    }
    let limit = 4f64.powf(1.0 / 128.0) - 1.0 + 1e-7;
    ensure(last <= limit, || format!("distance at n = 8 is {last:e} > {limit:e}"))?;
    Ok(format!("worst bound error {worst:.1e}, distance at n = 8: {last:.6e} <= {limit:.6e}"))
}

fn square_root_battery() -> Check {
    let (mut res, mut agree, mut law) = (0.0f64, 0.0f64, 0.0f64);
    let mut iterations = 0;
    for trial in 0..100 {
        let sp = trial_space(trial);
        let t = sample::random_psd_module_map(&sp, &mut rng(6, trial));
        let norm = t.op_norm().unwrap();
        let root = t.sqrt_psd().map_err(|e| format!("trial {trial}: {e}"))?;
        let r = dist(&root.compose(&root).unwrap(), &t) / norm;
        ensure(r <= 1e-10, || format!("trial {trial}: |W^2 - T| = {r:e} |T|"))?;
        let it = t.sqrt_iterative(1e-12, 100).map_err(|e| format!("trial {trial}: {e}"))?;
        let a = dist(&it.root, &root);
        ensure(a <= 1e-8, || format!("trial {trial}: methods differ by {a:e}"))?;
        let l = (root.op_norm().unwrap() - norm.sqrt()).abs() / (1.0 + norm);
        ensure(l <= 1e-8, || format!("trial {trial}: norm law off by {l:e}"))?;
        ensure(t.is_matrix_adjointable(DEFAULT_TOL).adjointable, || format!("trial {trial}: T not adjointable"))?;
        ensure(root.is_matrix_adjointable(DEFAULT_TOL).adjointable, || format!("trial {trial}: root not adjointable"))?;
        res = res.max(r);
        agree = agree.max(a);
        law = law.max(l);
        iterations = iterations.max(it.iterations);
    }
    Ok(format!(
        "residual {res:.1e}, cross-method {agree:.1e}, norm law {law:.1e}, at most {iterations} iterations"
    ))
}

fn holub_characterization() -> Check {
    let (mut fwd, mut conv) = (f64::INFINITY, 0.0f64);
    for trial in 0..100 {
        let sp = trial_space(trial);
        let mut r = rng(7, trial);
        let basis = onb(&sp);
        let u = sample::random_module_map(&sp, &mut r);
        let rb = apply_generator(&u, basis.clone()).unwrap().with_dual().unwrap();
        let h = riesz::holub_map(&rb).map_err(|e| format!("trial {trial}: {e}"))?;
        ensure(h.is_positive, || format!("trial {trial}: forward map not positive"))?;
        ensure(h.max_residual <= 1e-8, || format!("trial {trial}: T f_k != g_k ({:e})", h.max_residual))?;
        let scaled = h.min_eigenvalue * u.op_norm().unwrap().powi(2);
        ensure(scaled >= 1.0 - 1e-6, || format!("trial {trial}: min eig * |U|^2 = {scaled}"))?;
        fwd = fwd.min(scaled);

        let t = sample::random_psd_module_map(&sp, &mut r);
        let c = riesz::holub_basis_for_positive(&t, basis).map_err(|e| format!("trial {trial}: {e}"))?;
        let rel = c.max_residual / t.op_norm().unwrap();
        ensure(rel <= 1e-8, || format!("trial {trial}: |T q_k - h_k| = {rel:e} |T|"))?;
        conv = conv.max(rel);
    }
    Ok(format!("forward min eig * |U|^2 >= {fwd:.6}, converse residual {conv:.1e} |T|"))
}

struct Battery {
    checked: usize,
    worst_reconstruction: f64,
    worst_unitary_parseval: f64,
}

impl Battery {
    fn check(&mut self, label: &str, op: &LinOp, unitary: bool) -> Result<(), String> {
        let rb = apply_generator(op, onb(op.spec())).map_err(|e| format!("{label}: {e}"))?;
        let report = frame::verify_riesz(&rb, 1e-8).map_err(|e| format!("{label}: {e}"))?;
        ensure(report.passes(), || format!("{label}: report fails {report:?}"))?;
        let rec = report.reconstruction_error.unwrap_or(f64::INFINITY);
        ensure(rec <= 1e-8, || format!("{label}: reconstruction error {rec:e}"))?;
        if unitary {
            ensure(report.parseval_distance <= 1e-8, || {
                format!("{label}: Parseval distance {:e}", report.parseval_distance)
            })?;
            self.worst_unitary_parseval = self.worst_unitary_parseval.max(report.parseval_distance);
        }
        self.worst_reconstruction = self.worst_reconstruction.max(rec);
        self.checked += 1;
        Ok(())
    }

    fn run(&mut self, sp: &SpaceSpec, seed: u64) -> Result<(), String> {
        let mut r = rng(8, seed);
        let t = sample::random_psd_module_map(sp, &mut r);
        let s = sample::random_psd_module_map(sp, &mut r);
        // A polynomial in T commutes with it, which allows I + TS.
        let t2 = t.compose(&t).unwrap().scale(c(0.1)).hermitian_part();
        let err = |e: mvframe_core::Error| e.to_string();

        let req = PositiveClassRequest { s: Some(&s), product: false, power_terms: Some(3) };
        for g in riesz::build_positive_classes(&t, req).map_err(err)? {
            self.check(&g.name, &g.op, false)?;
        }
        let req = PositiveClassRequest { s: Some(&t2), product: true, power_terms: None };
        for g in riesz::build_positive_classes(&t, req).map_err(err)? {
            self.check(&format!("commuting {}", g.name), &g.op, false)?;
        }

        let a = sample::random_general_module_map(sp, &mut r);
        let a = a.scale(c(0.9 / a.op_norm().unwrap()));
        let series = riesz::build_neumann(&a).map_err(err)?;
        ensure(series.converged, || "Neumann partial sums exceed the tail bound".into())?;
        self.check("neumann", &series.generator, false)?;

        for n in 1..=4 {
            self.check(&format!("sqrt chain n={n}"), &riesz::build_sqrt_chain(&t, n).map_err(err)?, false)?;
        }

        let h = sample::random_self_adjoint_module_map(sp, &mut r);
        let jordan = riesz::build_jordan_parts(&h).map_err(err)?;
        self.check("jordan I+P1", &jordan.plus, false)?;
        self.check("jordan I+P2", &jordan.minus, false)?;

        let parts = riesz::build_unitary_parts(&h).map_err(err)?;
        self.check("unitary part +", &parts.plus, true)?;
        self.check("unitary part -", &parts.minus, true)?;

        let g = sample::random_general_module_map(sp, &mut r);
        let cart = riesz::build_cartesian_unitaries(&g).map_err(err)?;
        ensure(cart.available().count() == 4, || "a Cartesian unitary is missing".into())?;
        for (i, o) in cart.available() {
            self.check(&format!("cartesian omega {i}"), o, true)?;
        }
        Ok(())
    }
}

fn constructor_battery() -> Check {
    let mut battery = Battery { checked: 0, worst_reconstruction: 0.0, worst_unitary_parseval: 0.0 };
    for (seed, sp) in battery_shapes().iter().enumerate() {
        battery.run(sp, seed as u64)?;
    }
    // One instance at the largest default scale.
    let large = space(&[64], 3, 6);
    let t = sample::random_psd_module_map(&large, &mut rng(8, 99));
    battery.check("I+T at D=1152", &t.shift_identity(c(1.0)), false)?;
    Ok(format!(
        "{} generators, reconstruction {:.1e}, unitary Parseval distance {:.1e}",
        battery.checked, battery.worst_reconstruction, battery.worst_unitary_parseval
    ))
}

fn polar_decomposition() -> Check {
    let (mut rec, mut unit) = (0.0f64, 0.0f64);
    for trial in 0..100 {
        let sp = trial_space(trial);
        let u = sample::random_module_map(&sp, &mut rng(9, trial));
        let p = u.polar().map_err(|e| format!("trial {trial}: {e}"))?;
        let r = dist(&p.unitary.compose(&p.positive).unwrap(), &u) / u.op_norm().unwrap();
        let w = dist(&p.unitary.trace_adjoint().compose(&p.unitary).unwrap(), &LinOp::identity(&sp));
        ensure(r <= 1e-8, || format!("trial {trial}: |WP - U| = {r:e} |U|"))?;
        ensure(w <= 1e-8, || format!("trial {trial}: |W*W - I| = {w:e}"))?;
        for (label, op) in [("W", &p.unitary), ("P", &p.positive)] {
            let rb = apply_generator(op, onb(&sp)).map_err(|e| format!("trial {trial} {label}: {e}"))?;
            let report = frame::verify_riesz(&rb, 1e-8).unwrap();
            let ok = report.passes() && report.reconstruction_error.is_some_and(|e| e <= 1e-8);
            ensure(ok, || format!("trial {trial}: {{{label} E_k}} fails verification"))?;
        }
        rec = rec.max(r);
        unit = unit.max(w);
    }
    Ok(format!("|WP - U| <= {rec:.1e} |U|, |W*W - I| <= {unit:.1e}"))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Check,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "entry-swap operator", limit: Some(Duration::from_secs(1)), run: entry_swap_counterexample },
        Criterion { id: 2, name: "non-frame image family", limit: Some(Duration::from_secs(1)), run: image_family_counterexample },
        Criterion { id: 3, name: "transpose operator", limit: Some(Duration::from_secs(1)), run: transpose_counterexample },
        Criterion { id: 4, name: "optimal frame bounds", limit: Some(Duration::from_secs(60)), run: optimal_bounds_law },
        Criterion { id: 5, name: "Parseval convergence", limit: None, run: parseval_convergence },
        Criterion { id: 6, name: "square-root battery", limit: None, run: square_root_battery },
        Criterion { id: 7, name: "positivity characterization", limit: None, run: holub_characterization },
        Criterion { id: 8, name: "constructor battery", limit: None, run: constructor_battery },
        Criterion { id: 9, name: "polar decomposition", limit: None, run: polar_decomposition },
    ];

    let start = Instant::now();
    let mut failures = 0;
    for c in &criteria {
        let t0 = Instant::now();
        let mut outcome = (c.run)();
        let elapsed = t0.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, c.limit) {
            if elapsed > limit {
                outcome = Err(format!("took {elapsed:.2?}, limit {limit:.0?}"));
            }
        }
        failures += report_line(c.id, c.name, elapsed, &outcome);
    }
    let total = start.elapsed();
    let limit = Duration::from_secs(300);
    let outcome = if total <= limit {
        Ok(format!("criteria 1-9 finished in {total:.2?}"))
    } else {
        Err(format!("took {total:.2?}, limit {limit:.0?}"))
    };
    failures += report_line(10, "full-suite wall clock", total, &outcome);

    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        eprintln!("{failures} acceptance criteria failed");
        ExitCode::FAILURE
    }
}

fn report_line(id: u32, name: &str, elapsed: Duration, outcome: &Check) -> usize {
    match outcome {
        Ok(detail) => {
            println!("PASS {id:>2} {name} ({:.2} s): {detail}", elapsed.as_secs_f64());
            0
        }
        Err(why) => {
            println!("FAIL {id:>2} {name} ({:.2} s): {why}", elapsed.as_secs_f64());
            1
        }
    }
}
