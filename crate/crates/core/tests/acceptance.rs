//! Acceptance suite: twelve criteria, each reported as one PASS/FAIL line.
//!
//! The criteria run sequentially inside one test so that the wall-clock
//! budgets are measured without competition from other tests.  Lines are
//! written straight to the process stderr so they appear even when the
//! harness captures test output.

use moebius_energy::ig::{chords, circles, lines3};
use moebius_energy::moebius::{invariance_suite, Functional, Subject};
use moebius_energy::planar::CutoffForm;
use moebius_energy::renorm::extrapolate;
use moebius_energy::{corpus, crossratio, planar, space, ClosedCurve, DivergenceModel, PlanarDomain, Vec3};
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

const E_CIRCLE: f64 = PI * PI / 2.0;
const E_DISK: f64 = 3.0 * PI * PI / 4.0;

const ORACLE_REL_TOL: f64 = 1e-3;
const RELATION_ABS_TOL: f64 = 5e-3;
const C2_REL_TOL: f64 = 0.02;
const C1_REL_TOL: f64 = 0.05;
const COUNTERTERM_REL_TOL: f64 = 0.05;
const ROUTE_REL_TOL: f64 = 1e-2;
const Z_MAX: f64 = 3.0;
const INVARIANCE_TOL: f64 = 1e-3;
const CONJUGATE_TOL: f64 = 1e-3;
const CHORD_LIMIT_REL_TOL: f64 = 0.02;
const PLANAR_WRITHE_TOL: f64 = 1e-10;
const PROJECTION_WRITHE_TOL: f64 = 0.05;
const POINTWISE_TOL: f64 = 1e-12;
const SINE_LAW_REL_TOL: f64 = 0.01;
const MC_SAMPLES: u64 = 1_000_000;

type Outcome = Result<(bool, String), String>;

struct Line {
    id: usize,
    gating: bool,
    pass: bool,
}

fn report(line: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

fn criterion(id: usize, title: &str, budget_s: u64, gating: bool, f: impl FnOnce() -> Outcome) -> Line {
    let start = Instant::now();
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
        .unwrap_or_else(|_| Err("panicked".to_string()));
    let elapsed = start.elapsed();
    let in_time = elapsed <= Duration::from_secs(budget_s);
    let (pass, detail) = match outcome {
        Ok((ok, d)) => (ok && in_time, d),
        Err(e) => (false, format!("error: {e}")),
    };
    let tag = match (gating, pass) {
        (true, true) => "PASS",
        (true, false) => "FAIL",
        (false, true) => "PASS (exploratory)",
        (false, false) => "FAIL (exploratory)",
    };
    report(&format!(
        "[acceptance] {id:>2} {tag}: {title} | {detail} | {:.1}s of {budget_s}s",
        elapsed.as_secs_f64()
    ));
    Line { id, gating, pass }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn c1_oracles() -> Outcome {
    let disk = corpus::disk();
    let k = disk.boundaries();
    let mut rows: Vec<(&str, f64, f64)> = vec![
        ("sinsin", planar::curve_energy(&k).map_err(err)?.value, E_CIRCLE),
        ("coscos", planar::curve_energy_cutoff(&k, CutoffForm::Coscos).map_err(err)?.e_curve, E_CIRCLE),
        ("dots", planar::curve_energy_cutoff(&k, CutoffForm::Dots).map_err(err)?.e_curve, E_CIRCLE),
        ("segments", planar::segment_energy(&k).map_err(err)?.value, E_CIRCLE),
        ("chord", planar::convex_chord_energy(&disk).map_err(err)?.value, E_CIRCLE),
        ("nt", planar::nt_energy(&disk, 100_000, 1).map_err(err)?.value, E_CIRCLE),
        ("V-integral", planar::domain_energy(&disk).map_err(err)?.value, E_DISK),
    ];
    let c3 = corpus::unit_circle_space();
    rows.push(("space-sinsin", space::space_energy(&[&c3]).map_err(err)?.value, E_CIRCLE));
    rows.push(("space-coscos", space::space_energy_cutoff(&[&c3], CutoffForm::Coscos).map_err(err)?.value, E_CIRCLE));
    rows.push(("space-dots", space::space_energy_cutoff(&[&c3], CutoffForm::Dots).map_err(err)?.value, E_CIRCLE));
    let worst = rows.iter().map(|(_, v, t)| rel(*v, *t)).fold(0.0, f64::max);
    let detail = format!("{} routes, worst relative error {worst:.2e} (tol {ORACLE_REL_TOL:e})", rows.len());
    Ok((worst < ORACLE_REL_TOL, detail))
}

fn c2_relation() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (name, d) in [("disk", corpus::disk()), ("annulus", corpus::annulus()), ("two-hole", corpus::two_hole())] {
        let eo = planar::domain_energy(&d).map_err(err)?.value;
        let ek = planar::boundary_energy(&d).map_err(err)?.value;
        let target = PI * PI * d.euler_characteristic() as f64 / 4.0;
        let dev = (eo - ek - target).abs();
        worst = worst.max(dev);
        parts.push(format!("{name} chi={} dev={dev:.1e}", d.euler_characteristic()));
    }
    Ok((worst < RELATION_ABS_TOL, format!("{} (tol {RELATION_ABS_TOL:e})", parts.join(", "))))
}

fn c3_asymptotics() -> Outcome {
    let ellipse = PlanarDomain::simple(corpus::ellipse()).map_err(err)?;
    let two_hole = corpus::two_hole();
    let points = [(&ellipse, 0, 0.0), (&ellipse, 0, 1.0), (&ellipse, 0, 2.0), (&two_hole, 0, 0.5), (&two_hole, 1, 0.0), (&two_hole, 2, 2.0)];
    let (mut w2, mut w1): (f64, f64) = (0.0, 0.0);
    for (d, b, t) in points {
        let p = planar::potential_asymptotics(d, b, t).map_err(err)?;
        w2 = w2.max(rel(p.c2, -PI / 4.0));
        w1 = w1.max(rel(p.c1, -p.curvature * PI / 4.0));
    }
    let detail = format!("6 boundary points, worst c2 {w2:.1e} (tol {C2_REL_TOL}), worst c1 {w1:.1e} (tol {C1_REL_TOL})");
    Ok((w2 < C2_REL_TOL && w1 < C1_REL_TOL, detail))
}

fn c4_counterterms() -> Outcome {
    let ellipse = corpus::ellipse();
    let l = ellipse.arclength();
    let domain = PlanarDomain::simple(ellipse.clone()).map_err(err)?;
    let trefoil = corpus::trefoil();
    let lt = trefoil.arclength();
    let coef = |r: moebius_energy::RenormResult| r.coefficient(-1).ok_or("no divergent coefficient".to_string());
    let mut rows: Vec<(&str, f64, f64)> = vec![
        ("domain piL/4", -coef(planar::domain_energy_diagnostic(&domain).map_err(err)?)?, PI * l / 4.0),
        ("planar coscos L", -coef(planar::curve_energy_cutoff_diagnostic(&[&ellipse], CutoffForm::Coscos).map_err(err)?)?, l),
        ("planar dots L/2", -coef(planar::curve_energy_cutoff_diagnostic(&[&ellipse], CutoffForm::Dots).map_err(err)?)?, l / 2.0),
        ("space coscos L", -coef(space::space_energy_cutoff_diagnostic(&[&trefoil], CutoffForm::Coscos).map_err(err)?)?, lt),
        ("space dots L/2", -coef(space::space_energy_cutoff_diagnostic(&[&trefoil], CutoffForm::Dots).map_err(err)?)?, lt / 2.0),
        ("parallel piL/4", -coef(space::space_energy_parallel_diagnostic(&ellipse.to_space()).map_err(err)?)?, PI * l / 4.0),
    ];
    let c = corpus::unit_circle_space();
    let ladder = circles::mc_energy_ladder(&[&c], MC_SAMPLES, 11).map_err(err)?;
    rows.push(("circles 3piL/8", -coef(ladder.fit)?, -ladder.expected_divergence));
    let worst = rows.iter().map(|(_, v, t)| rel(*v, *t)).fold(0.0, f64::max);
    let names: Vec<String> = rows.iter().map(|(n, v, t)| format!("{n}: {:.4}", v / t)).collect();
    Ok((worst < COUNTERTERM_REL_TOL, format!("ratios {} (tol {COUNTERTERM_REL_TOL})", names.join(", "))))
}

fn c5_trefoil_routes() -> Outcome {
    let k = corpus::trefoil();
    let values = [
        space::space_energy(&[&k]).map_err(err)?.value,
        space::space_energy_cutoff(&[&k], CutoffForm::Coscos).map_err(err)?.value,
        space::space_energy_cutoff(&[&k], CutoffForm::Dots).map_err(err)?.value,
        space::space_energy_parallel(&k).map_err(err)?.value,
    ];
    let mut worst: f64 = 0.0;
    for a in &values {
        for b in &values {
            worst = worst.max(rel(*a, *b));
        }
    }
    let mc = circles::mc_energy_circles(&[&k], MC_SAMPLES, 2024).map_err(err)?;
    let z = mc.z_score(values[0]);
    let detail = format!(
        "direct {:.8}, pairwise worst {worst:.1e} (tol {ROUTE_REL_TOL:e}); mc {:.4} ± {:.4}, z {z:.2}",
        values[0], mc.mean, mc.std_error
    );
    Ok((worst < ROUTE_REL_TOL && z < Z_MAX, detail))
}

fn c6_invariance() -> Outcome {
    let (h1, h2) = corpus::hopf_pair();
    let cases: Vec<(&str, Functional, Subject)> = vec![
        ("planar E(K)", Functional::PlanarK, Subject::Curves(vec![corpus::ellipse()])),
        ("E(Omega)", Functional::PlanarE, Subject::Domain(PlanarDomain::simple(corpus::ellipse()).map_err(err)?)),
        ("space E(K)", Functional::SpaceE, Subject::Curves(vec![corpus::trefoil()])),
        ("writhe", Functional::Writhe, Subject::Curves(vec![corpus::trefoil()])),
        ("mutual", Functional::Mutual, Subject::Curves(vec![h1, h2])),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, f, s) in &cases {
        let r = invariance_suite(*f, s, 20, 7).map_err(err)?;
        let ratio = r.max_deviation / (1.0 + r.base_value.abs());
        ok &= r.trials.len() == 20 && ratio < INVARIANCE_TOL;
        parts.push(format!("{name} {ratio:.1e}"));
    }
    let mut ladder = Vec::new();
    for rho in [2.0, 4.0, 8.0, 16.0] {
        let (a, b) = corpus::conjugate_pair(rho).map_err(err)?;
        ladder.push((1.0 / rho, space::mutual_energy_space(&a, &b).map_err(err)?.value));
    }
    let largest = ladder.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
    let limit = extrapolate(&ladder, &DivergenceModel::new(&[1])).map_err(err)?.value;
    ok &= largest < CONJUGATE_TOL && limit.abs() < CONJUGATE_TOL;
    parts.push(format!("conjugate pair max |E| {largest:.1e}, limit {limit:.1e}"));
    Ok((ok, format!("{} (tol {INVARIANCE_TOL:e})", parts.join(", "))))
}

fn c7_circle_constants() -> Outcome {
    let c = corpus::unit_circle_space();
    let l = c.arclength();
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, eps) in [0.05, 0.1].into_iter().enumerate() {
        let est = circles::hits_measure(&[&c], eps, 1e3 * c.diameter(), MC_SAMPLES, 70 + i as u64).map_err(err)?;
        let full = est.mean + est.tail_bound;
        let z = (full - 2.0 * PI * PI * l / eps).abs() / est.std_error.max(1e-300);
        let z = if est.std_error == 0.0 && (full / (2.0 * PI * PI * l / eps) - 1.0).abs() < 1e-12 { 0.0 } else { z };
        ok &= z < Z_MAX;
        parts.push(format!("hits eps={eps} z {z:.2}"));
    }
    let (a, b) = corpus::hopf_pair();
    let exact = space::mutual_energy_space(&a, &b).map_err(err)?.value;
    let mc = circles::mc_mutual_circles(&a, &b, MC_SAMPLES, 77).map_err(err)?;
    let z = mc.z_score(exact);
    ok &= z < Z_MAX;
    parts.push(format!("Hopf mutual {exact:.5} vs {:.5} ± {:.5}, z {z:.2}", mc.mean, mc.std_error));
    Ok((ok, parts.join(", ")))
}

fn c8_lines() -> Outcome {
    let cal = lines3::calibrate_line_measure(MC_SAMPLES, 80).map_err(err)?;
    let (a, b) = corpus::hopf_pair();
    let pair = lines3::bp_lines_check(&a, Some(&b), &cal, MC_SAMPLES, 81).map_err(err)?;
    let t = corpus::trefoil();
    let single = lines3::bp_lines_check(&t, None, &cal, MC_SAMPLES, 82).map_err(err)?;
    let detail = format!(
        "constant {:.4} ± {:.4}; Hopf pair z {:.2}; trefoil z {:.2}",
        cal.constant,
        cal.std_error,
        pair.z_score(),
        single.z_score()
    );
    Ok((pair.z_score() < Z_MAX && single.z_score() < Z_MAX, detail))
}

fn c9_chords() -> Outcome {
    let k = corpus::ellipse();
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, r) in [0.3, 0.6, 1.2].into_iter().enumerate() {
        let f = chords::dcb_radius_measure(&k, r).map_err(err)?;
        let mc = circles::linked_measure_fixed_radius(&k, r, MC_SAMPLES, 90 + i as u64).map_err(err)?;
        ok &= mc.z_score(f) < Z_MAX;
        parts.push(format!("r={r} z {:.2}", mc.z_score(f)));
    }
    for (name, c) in [("ellipse", k), ("trefoil", corpus::trefoil())] {
        let lim = chords::chord_limit(&c).map_err(err)?;
        let d = rel(lim.intercept, lim.twice_length);
        ok &= d < CHORD_LIMIT_REL_TOL;
        parts.push(format!("{name} A(0+)/2L-1 {d:.1e}"));
    }
    Ok((ok, parts.join(", ")))
}

fn c10_writhe() -> Outcome {
    let mut planar_max: f64 = 0.0;
    for c in [corpus::ellipse(), corpus::rounded_triangle()] {
        planar_max = planar_max.max(space::writhe(&c).map_err(err)?.value.abs());
    }
    let k = corpus::trefoil();
    let w = space::writhe(&k).map_err(err)?.value;
    let proj = space::projection_writhe(&k, 2000, 2048).map_err(err)?.value;
    let mirror = k.affine(&nalgebra::Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0)), Vec3::zeros()).map_err(err)?;
    let wm = space::writhe(&mirror).map_err(err)?.value;
    let ok = planar_max < PLANAR_WRITHE_TOL && (w - proj).abs() < PROJECTION_WRITHE_TOL && (w + wm).abs() < 1e-8 && w.abs() > 1.0;
    let detail = format!("planar max {planar_max:.1e}; trefoil {w:.6} vs projection {proj:.4}; mirror {wm:.6}");
    Ok((ok, detail))
}

fn c11_pointwise() -> Outcome {
    let mut rng = moebius_energy::rng::stream(1111, 0);
    let mut u = |a: f64, b: f64| a + (b - a) * rng.random::<f64>();
    let n = 10_000;
    let mut worst_sq: f64 = 0.0;
    for _ in 0..n {
        let (w, z) = (Complex64::new(u(-3.0, 3.0), u(-3.0, 3.0)), Complex64::new(u(-3.0, 3.0), u(-3.0, 3.0)));
        if (w - z).norm() < 0.05 {
            continue;
        }
        let v: [(Complex64, Complex64); 4] = std::array::from_fn(|_| {
            (Complex64::new(u(-2.0, 2.0), u(-2.0, 2.0)), Complex64::new(u(-2.0, 2.0), u(-2.0, 2.0)))
        });
        let (re, im, rhs) = crossratio::squares(w, z, v).map_err(err)?;
        let scale = 2.0 * 4f64.powi(4) / (z - w).norm_sqr().powi(2);
        worst_sq = worst_sq.max((re - rhs).abs().max((im - rhs).abs()) / scale);
    }
    let plane = [corpus::ellipse(), corpus::rounded_triangle()];
    let trefoil = corpus::trefoil();
    let (mut worst_plane, mut worst_space): (f64, f64) = (0.0, 0.0);
    for i in 0..n {
        let (s, t) = (u(0.0, 2.0 * PI), u(0.0, 2.0 * PI));
        let d = (s - t).rem_euclid(2.0 * PI);
        if d < 1e-3 || d > 2.0 * PI - 1e-3 {
            continue;
        }
        let c = &plane[i % 2];
        let ch = c.chord_data(s, t).map_err(err)?;
        let (dp, dq) = (c.point_d1(s).1, c.point_d1(t).1);
        let rhs = (ch.theta_p.cos() * ch.theta_q.cos() + ch.theta_p.sin() * ch.theta_q.sin()) * dp.norm() * dq.norm();
        worst_plane = worst_plane.max((dp.dot(&dq) - rhs).abs() / (1.0 + dp.norm() * dq.norm()));
        let ch = trefoil.chord_data(s, t).map_err(err)?;
        let (dp, dq) = (trefoil.point_d1(s).1, trefoil.point_d1(t).1);
        let rhs = (ch.theta_p.cos() * ch.theta_q.cos() + ch.cos_tau * ch.theta_p.sin() * ch.theta_q.sin()) * dp.norm() * dq.norm();
        worst_space = worst_space.max((dp.dot(&dq) - rhs).abs() / (1.0 + dp.norm() * dq.norm()));
    }
    let curves: [&ClosedCurve; 3] = [&plane[0], &plane[1], &trefoil];
    let (mut worst_slope, mut worst_icpt): (f64, f64) = (0.0, 0.0);
    for i in 0..n {
        let c = curves[i % 3];
        let s = u(0.0, 2.0 * PI);
        let kappa = c.curvature(s).abs();
        let a = c.chord_data(s, s + 1e-2).map_err(err)?;
        let b = c.chord_data(s, s + 1e-4).map_err(err)?;
        let slope = (a.theta_p.sin().abs().ln() - b.theta_p.sin().abs().ln()) / (a.r.ln() - b.r.ln());
        worst_slope = worst_slope.max((slope - 1.0).abs());
        worst_icpt = worst_icpt.max(rel(b.theta_p.sin().abs() / b.r, kappa / 2.0));
    }
    let ok = worst_sq < POINTWISE_TOL
        && worst_plane < POINTWISE_TOL
        && worst_space < POINTWISE_TOL
        && worst_slope < SINE_LAW_REL_TOL
        && worst_icpt < SINE_LAW_REL_TOL;
    let detail = format!(
        "squares {worst_sq:.1e}, planar dot form {worst_plane:.1e}, space dot form {worst_space:.1e}, \
         sine-law slope {worst_slope:.1e}, intercept {worst_icpt:.1e}"
    );
    Ok((ok, detail))
}

fn c12_disk_probe() -> Outcome {
    let disk = planar::domain_energy(&corpus::disk()).map_err(err)?.value;
    let mut rng = moebius_energy::rng::stream(1212, 0);
    let mut min = f64::INFINITY;
    let mut evaluated = 0;
    let mut below_printed = 0;
    let printed = (3.0 + 1.0) * PI * PI / 4.0;
    for _ in 0..50 {
        let c = corpus::random_star(&mut rng, 6, 0.4).map_err(err)?;
        let Ok(d) = PlanarDomain::simple(c) else { continue };
        let Ok(e) = planar::domain_energy(&d) else { continue };
        evaluated += 1;
        min = min.min(e.value);
        below_printed += usize::from(e.value < printed);
    }
    let detail = format!(
        "{evaluated} domains, min E {min:.6} vs disk {disk:.6}; flag: the printed bound (3n+k)pi^2/4 = {printed:.6} \
         for n = k = 1 exceeds the disk value, and {below_printed} domains fall below it"
    );
    Ok((evaluated == 50 && min >= disk - 1e-6, detail))
}

#[test]
fn acceptance_suite() {
    let lines = vec![
        criterion(1, "disk and circle oracles on every route", 60, true, c1_oracles),
        criterion(2, "E(Omega) - E(K) = pi^2 chi / 4", 300, true, c2_relation),
        criterion(3, "boundary expansion of the potential", 60, true, c3_asymptotics),
        criterion(4, "counterterm coefficients recovered by free fits", 600, true, c4_counterterms),
        criterion(5, "space routes agree on the trefoil", 900, true, c5_trefoil_routes),
        criterion(6, "Moebius invariance and the conjugate pair", 1200, true, c6_invariance),
        criterion(7, "circle-measure constants", 600, true, c7_circle_constants),
        criterion(8, "line-measure identity transfers after calibration", 600, true, c8_lines),
        criterion(9, "linked-circle measure from chord lengths", 600, true, c9_chords),
        criterion(10, "writhe", 300, true, c10_writhe),
        criterion(11, "pointwise identities at 10^4 evaluations", 60, true, c11_pointwise),
        criterion(12, "disk-minimality probe", 600, false, c12_disk_probe),
    ];
    let failed: Vec<usize> = lines.iter().filter(|l| l.gating && !l.pass).map(|l| l.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
