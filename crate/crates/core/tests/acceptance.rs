//! Acceptance suite: eight criteria, one status line each on stderr.
//!
//! Run alone with `cargo test -p qgraph-core --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use qgraph::circle::{self, build_graph, crossing_values, trace_curve, uniform_grid, verify_factorization, Parity};
use qgraph::constraint::Orientation;
use qgraph::dtn::{derivative_identity_residual, det_identity_residual};
use qgraph::roots::{count_in_disc, find_roots, strip_bound, weyl_coefficient, Rect, RootFinderOptions};
use qgraph::sampling::{self, random_graph_family, RandomGraphSpec};
use qgraph::{assemble, assemble_with, EdgeId, IntExpPoly, MetricGraph};

use common::{log3_over_pi, matches_reference, two_edge_graph, two_edge_reference};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn det_a(c: f64) -> Result<IntExpPoly, String> {
    let g = build_graph(c).map_err(|e| e.to_string())?;
    assemble(&g).and_then(|m| m.determinant()).map_err(|e| e.to_string())
}

fn family() -> Vec<MetricGraph> {
    random_graph_family(2024, 50, &RandomGraphSpec::default())
}

fn matrix_fidelity() -> Outcome {
    let g = two_edge_graph(0.9, 1.7);
    let m = assemble(&g).map_err(|e| e.to_string())?;
    matches_reference(&m, &two_edge_reference())?;
    Ok("7x7 entries equal up to permutation and one Kirchhoff row sign".into())
}

fn factorization() -> Outcome {
    let mut worst: f64 = 0.0;
    for c in [0.0, 0.25, 1.0 / 3.0, 0.5, 0.75] {
        let r = verify_factorization(c, 50, 0).map_err(|e| e.to_string())?;
        ensure(r.max_relative_residual <= 1e-9, || {
            format!("c = {c}: residual {:.3e}", r.max_relative_residual)
        })?;
        worst = worst.max(r.max_relative_residual);
    }
    Ok(format!("max relative residual {worst:.3e} over 5 values of c"))
}

fn closed_form_zeros() -> Outcome {
    let det = det_a(0.0)?;
    let region = Rect::new(-5.5, 5.5, -1.0, 0.5).map_err(|e| e.to_string())?;
    let roots = find_roots(&det, &region, &RootFinderOptions::default()).map_err(|e| e.to_string())?;
    let mut expected: Vec<Complex64> = (-5..=5).map(|n| Complex64::new(f64::from(n), -log3_over_pi())).collect();
    expected.extend((-5..=5).filter(|&n| n != 0).map(|n| Complex64::new(f64::from(n), 0.0)));
    let mut worst: f64 = 0.0;
    for k in &expected {
        let r = roots
            .iter()
            .min_by(|a, b| (a.k - k).norm().total_cmp(&(b.k - k).norm()))
            .ok_or("no roots found")?;
        let err = (r.k - k).norm();
        ensure(err <= 1e-9 && r.multiplicity == 1, || {
            format!("zero {k}: nearest {} (mult {}), error {err:.3e}", r.k, r.multiplicity)
        })?;
        worst = worst.max(err);
    }
    let extra: Vec<_> = roots
        .iter()
        .filter(|r| r.k.norm() > 1e-9 && expected.iter().all(|k| (r.k - k).norm() > 1e-9))
        .collect();
    ensure(extra.is_empty(), || format!("unexpected zeros {extra:?}"))?;
    Ok(format!("{} zeros, max position error {worst:.3e}", expected.len()))
}

fn counting() -> Outcome {
    let opts = RootFinderOptions::default();
    let c0 = det_a(0.0)?;
    let c1 = det_a(1.0)?;
    let n_small = count_in_disc(&c0, 5.5, &opts).map_err(|e| e.to_string())?.count;
    let n_large = count_in_disc(&c0, 20.0, &opts).map_err(|e| e.to_string())?.count;
    let n_one = count_in_disc(&c1, 20.0, &opts).map_err(|e| e.to_string())?.count;
    ensure((n_small, n_large, n_one) == (21, 79, 40), || {
        format!("counts {n_small}, {n_large}, {n_one}; expected 21, 79, 40")
    })?;
    for c in [0.0, 0.25, 1.0 / 3.0, 0.5, 0.75, 0.9] {
        let w = weyl_coefficient(&det_a(c)?).map_err(|e| e.to_string())?;
        let vol = build_graph(c).map_err(|e| e.to_string())?.volume();
        ensure(w == vol && (w - 2.0 * PI).abs() <= 4.0 * f64::EPSILON * PI, || {
            format!("c = {c}: W = {w}, volume {vol}")
        })?;
    }
    let w1 = weyl_coefficient(&c1).map_err(|e| e.to_string())?;
    ensure(w1 == PI, || format!("c = 1: W = {w1}"))?;
    Ok("N = 21, 79 (c = 0) and 40 (c = 1); W = 2π for c < 1, π for c = 1".into())
}

fn balanced_criterion() -> Outcome {
    let (mut weyl, mut non_weyl) = (0, 0);
    for (i, g) in family().iter().enumerate() {
        let det = assemble(g).and_then(|m| m.determinant()).map_err(|e| e.to_string())?;
        let (a_minus, a_plus): (BigInt, BigInt) = det.extreme_coefficients();
        let balanced = !g.classify_weyl().is_weyl;
        ensure(!a_minus.is_zero(), || format!("graph {i}: a⁻ = 0"))?;
        ensure(a_plus.is_zero() == balanced, || {
            format!("graph {i}: a⁺ = {a_plus}, balanced = {balanced}")
        })?;
        if balanced {
            non_weyl += 1;
        } else {
            weyl += 1;
        }
    }
    ensure(weyl > 0 && non_weyl > 0, || format!("family lacks a class: {weyl} Weyl, {non_weyl} non-Weyl"))?;
    Ok(format!("50 graphs: {weyl} Weyl, {non_weyl} with a balanced vertex"))
}

fn dtn_identities() -> Outcome {
    let mut rng = sampling::rng(7);
    let (mut worst_det, mut worst_der): (f64, f64) = (0.0, 0.0);
    for (i, g) in family().iter().enumerate() {
        let det = assemble(g).and_then(|m| m.determinant()).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let k = sampling::sample_k(&mut rng, 5.0, 0.3..=2.0);
            let r_det = det_identity_residual(g, &det, k).map_err(|e| e.to_string())?;
            let r_der = derivative_identity_residual(g, k, 1e-5).map_err(|e| e.to_string())?;
            ensure(r_det <= 1e-8, || format!("graph {i}, k = {k}: det residual {r_det:.3e}"))?;
            ensure(r_der <= 1e-6, || format!("graph {i}, k = {k}: derivative residual {r_der:.3e}"))?;
            worst_det = worst_det.max(r_det);
            worst_der = worst_der.max(r_der);
        }
    }
    Ok(format!("max det residual {worst_det:.3e}, max derivative residual {worst_der:.3e}"))
}

fn orientation_and_symmetry() -> Outcome {
    let mut flips = 0;
    for (i, g) in family().iter().enumerate() {
        let det = assemble(g).and_then(|m| m.determinant()).map_err(|e| e.to_string())?;
        for e in 0..g.edges().len() {
            let flipped = assemble_with(g, &Orientation::canonical(g).flipped(EdgeId(e)))
                .and_then(|m| m.determinant())
                .map_err(|e| e.to_string())?;
            ensure(flipped == det.negate(), || format!("graph {i}, edge {e}: flip is not a negation"))?;
            flips += 1;
        }
    }
    let mut checked = 0;
    for c in [0.0, 0.25, 1.0 / 3.0, 0.5, 1.0] {
        let det = det_a(c)?;
        let k = strip_bound(&det);
        let region = Rect::new(-8.5, 8.5, -k - 0.5, k + 0.5).map_err(|e| e.to_string())?;
        let roots = find_roots(&det, &region, &RootFinderOptions::default()).map_err(|e| e.to_string())?;
        for r in &roots {
            let mirror = -r.k.conj();
            let ok = roots
                .iter()
                .any(|s| (s.k - mirror).norm() <= 1e-9 && s.multiplicity == r.multiplicity);
            ensure(ok, || format!("c = {c}: no mirror image of {}", r.k))?;
            checked += 1;
        }
    }
    Ok(format!("{flips} exact edge flips; {checked} zeros mirrored under k -> -conj(k)"))
}

fn curves() -> Outcome {
    let grid = uniform_grid(400);
    let odd = trace_curve(Parity::Odd, 7, &grid).map_err(|e| e.to_string())?;
    for target in [Ratio::new(1, 7), Ratio::new(3, 7), Ratio::new(5, 7)] {
        let t = target.to_f64().unwrap();
        ensure(odd.crossings.iter().any(|x| (x.measured_c - t).abs() <= 1e-6), || {
            format!("odd n = 7: no touch near c = {target}")
        })?;
    }

    let even = trace_curve(Parity::Even, 4, &grid).map_err(|e| e.to_string())?;
    let targets: Vec<f64> = crossing_values(Parity::Even, 4)
        .into_iter()
        .filter(|(k, _)| *k == 4)
        .map(|(_, c)| c.to_f64().unwrap())
        .collect();
    ensure(targets.len() == 2, || format!("crossing list {targets:?}"))?;
    for &t in &targets {
        ensure(even.crossings.iter().any(|x| (x.measured_c - t).abs() <= 1e-6), || {
            format!("even n = 4: no touch near c = {t}")
        })?;
    }
    ensure(even.crossings.len() == targets.len(), || format!("even n = 4: touches {:?}", even.crossings))?;
    // k = 4 is not a zero of the even factor at c = 1/5 or 3/5.
    for c in [0.2, 0.6] {
        let f = circle::f_even(Complex64::new(4.0, 0.0), c).norm();
        ensure(f > 0.1, || format!("F_even(4, {c}) = {f}"))?;
    }
    ensure(even.diverged && even.last_c < 1.0, || {
        format!("even n = 4: diverged = {}, last c = {}", even.diverged, even.last_c)
    })?;
    Ok(format!(
        "odd n = 7 touches at {:?}; even n = 4 touches at {:?}, diverged at c = {:.6} (Im k = {:.3})",
        odd.crossings.iter().map(|x| x.measured_c).collect::<Vec<_>>(),
        even.crossings.iter().map(|x| x.measured_c).collect::<Vec<_>>(),
        even.last_c,
        even.last_k.im,
    ))
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

#[test]
fn acceptance() {
    let criteria = [
        Criterion { id: 1, name: "matrix fidelity", budget: Duration::from_secs(1), run: matrix_fidelity },
        Criterion { id: 2, name: "factorization", budget: Duration::from_secs(5), run: factorization },
        Criterion { id: 3, name: "closed-form zeros", budget: Duration::from_secs(30), run: closed_form_zeros },
        Criterion { id: 4, name: "counting and Weyl coefficient", budget: Duration::from_secs(120), run: counting },
        Criterion { id: 5, name: "balanced-vertex criterion", budget: Duration::from_secs(120), run: balanced_criterion },
        Criterion { id: 6, name: "DtN identities", budget: Duration::from_secs(120), run: dtn_identities },
        Criterion { id: 7, name: "orientation and symmetry", budget: Duration::from_secs(120), run: orientation_and_symmetry },
        Criterion { id: 8, name: "resonance curves", budget: Duration::from_secs(60), run: curves },
    ];
    let mut failures = Vec::new();
    let mut err = std::io::stderr();
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.budget => Err(format!("{detail}; over time budget {:?}", c.budget)),
            other => other,
        };
        let line = match &outcome {
            Ok(detail) => format!("criterion {} {}: PASS ({detail}) [{elapsed:.2?}]", c.id, c.name),
            Err(why) => format!("criterion {} {}: FAIL ({why}) [{elapsed:.2?}]", c.id, c.name),
        };
        // Written to the stderr handle directly so the lines survive output capture.
        writeln!(err, "{line}").unwrap();
        if outcome.is_err() {
            failures.push(line);
        }
    }
    assert!(failures.is_empty(), "failed criteria:\n{}", failures.join("\n"));
}
