mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use qgraph::circle::{build_graph, crossing_values, f_parity_poly, Parity};
use qgraph::roots::{
    count_in_disc, find_roots, strip_bound, weyl_coefficient, weyl_coefficient_empirical, winding_number,
    Rect, RootFinderOptions,
};
use qgraph::{assemble, IntExpPoly, MetricGraph};

use common::log3_over_pi;

fn det_a(c: f64) -> IntExpPoly {
    assemble(&build_graph(c).unwrap()).unwrap().determinant().unwrap()
}

fn opts() -> RootFinderOptions {
    RootFinderOptions::default()
}

#[test]
fn winding_around_even_resonance_at_zero() {
    let f = f_parity_poly(Parity::Even, 0.0);
    let r = Rect::new(-0.4, 0.4, -0.6, -0.1).unwrap();
    assert_eq!(winding_number(&f, &r).unwrap(), 1);
}

#[test]
fn odd_resonance_at_one() {
    let f = f_parity_poly(Parity::Odd, 0.0);
    let roots = find_roots(&f, &Rect::new(0.5, 1.5, -1.0, 0.0).unwrap(), &opts()).unwrap();
    assert_eq!(roots.len(), 1);
    let expected = Complex64::new(1.0, -log3_over_pi());
    assert_eq!(roots[0].multiplicity, 1);
    assert!((roots[0].k - expected).norm() <= 1e-10, "{}", roots[0].k);
}

#[test]
fn odd_factor_has_real_zero_at_crossing() {
    let f = f_parity_poly(Parity::Odd, 1.0 / 7.0);
    let roots = find_roots(&f, &Rect::new(6.5, 7.5, -1.0, 0.5).unwrap(), &opts()).unwrap();
    let real: Vec<_> = roots.iter().filter(|r| r.k.im.abs() <= 1e-10).collect();
    assert_eq!(real.len(), 1);
    assert!((real[0].k.re - 7.0).abs() <= 1e-10);
}

#[test]
fn real_zeros_of_det_match_crossing_values() {
    for parity in [Parity::Odd, Parity::Even] {
        for (k, c) in crossing_values(parity, 6) {
            let c = *c.numer() as f64 / *c.denom() as f64;
            let det = det_a(c);
            let region = Rect::new(k as f64 - 0.5, k as f64 + 0.5, -0.25, 0.25).unwrap();
            let roots = find_roots(&det, &region, &opts()).unwrap();
            let hit = roots.iter().any(|r| (r.k - Complex64::new(k as f64, 0.0)).norm() <= 1e-8);
            assert!(hit, "{parity:?}: no real zero at k = {k} for c = {c}");
        }
    }
}

#[test]
fn odd_factor_strip_bound() {
    for c in [0.0, 0.25, 0.5, 0.75] {
        let f = f_parity_poly(Parity::Odd, c);
        let k = strip_bound(&f);
        assert!(k >= log3_over_pi(), "c = {c}: K = {k}");
        let roots = find_roots(&f, &Rect::new(-6.5, 6.5, -k - 0.5, k + 0.5).unwrap(), &opts()).unwrap();
        assert!(!roots.is_empty());
        assert!(roots.iter().all(|r| r.k.im.abs() <= k), "c = {c}");
    }
    let exact = strip_bound(&f_parity_poly(Parity::Odd, 0.0));
    assert!((exact - log3_over_pi()).abs() <= 1e-12);
}

#[test]
fn even_factor_strip_bound_near_one() {
    let c = 0.9;
    let f = f_parity_poly(Parity::Even, c);
    let k = strip_bound(&f);
    let rectangle_height = 3f64.ln() / (PI * (1.0 - c));
    // The dominance bound is tighter than the height of the localization
    // rectangles, and still contains every zero.
    assert!(k > 0.0 && k <= rectangle_height);
    let roots = find_roots(&f, &Rect::new(-6.5, 6.5, -k - 0.5, k + 0.5).unwrap(), &opts()).unwrap();
    assert_eq!(roots.len(), 13);
    assert!(roots.iter().all(|r| r.k.im.abs() <= k));
}

#[test]
fn counts_for_circle() {
    let c0 = det_a(0.0);
    let small = count_in_disc(&c0, 5.5, &opts()).unwrap();
    assert_eq!(small.count, 21);
    assert_eq!(small.excluded.len(), 1);
    assert_eq!(count_in_disc(&c0, 20.0, &opts()).unwrap().count, 79);
    let c1 = count_in_disc(&det_a(1.0), 20.0, &opts()).unwrap();
    assert_eq!(c1.count, 40);
    assert!(c1.roots.iter().all(|r| r.multiplicity == 1 && r.k.im.abs() <= 1e-9));
}

#[test]
fn count_report_is_consistent() {
    let det = det_a(1.0 / 3.0);
    let report = count_in_disc(&det, 8.0, &opts()).unwrap();
    let total: u64 = report.roots.iter().map(|r| u64::from(r.multiplicity)).sum();
    assert_eq!(total, report.count);
    for r in &report.roots {
        assert!(r.k.norm() <= 8.0 + 1e-9 && r.k.norm() > 1e-9);
        assert!(r.k.im <= 1e-9);
        assert!(r.k.im.abs() <= report.strip_bound);
    }
}

#[test]
fn weyl_coefficients() {
    assert_eq!(weyl_coefficient(&det_a(0.5)).unwrap(), build_graph(0.5).unwrap().volume());
    assert!((weyl_coefficient(&det_a(0.5)).unwrap() - 2.0 * PI).abs() <= 1e-15);
    assert_eq!(weyl_coefficient(&det_a(1.0)).unwrap(), PI);

    let mut b = MetricGraph::builder();
    let u = b.vertex("u");
    let v = b.vertex("v");
    b.edge(u, v, PI);
    b.edge(u, v, PI);
    let compact = assemble(&b.build()).unwrap().determinant().unwrap();
    assert_eq!(weyl_coefficient(&compact).unwrap(), 2.0 * PI);
}

#[test]
fn counting_function_follows_weyl_law() {
    for c in [0.0, 0.5, 1.0] {
        let det = det_a(c);
        let w = weyl_coefficient(&det).unwrap();
        for radius in [10.0, 15.0, 20.0] {
            let n = count_in_disc(&det, radius, &opts()).unwrap().count as f64;
            let deviation = (n - 2.0 / PI * w * radius).abs();
            assert!(deviation <= 6.0, "c = {c}, R = {radius}: N = {n}, W = {w}");
        }
    }
    let slope = weyl_coefficient_empirical(&det_a(1.0), &[10.25, 15.25, 20.25], &opts()).unwrap();
    assert!((slope - PI).abs() < 0.2, "empirical W = {slope}");
}

#[test]
fn roots_symmetric_and_conserved() {
    for c in [0.0, 1.0 / 3.0, 0.5, 1.0] {
        let det = det_a(c);
        let k = strip_bound(&det);
        let region = Rect::new(-6.5, 6.5, -k - 0.5, k + 0.5).unwrap();
        let roots = find_roots(&det, &region, &opts()).unwrap();
        let total: i64 = roots.iter().map(|r| i64::from(r.multiplicity)).sum();
        assert_eq!(total, winding_number(&det, &region).unwrap());
        for r in &roots {
            let mirror = -r.k.conj();
            let partner = roots
                .iter()
                .find(|s| (s.k - mirror).norm() <= 1e-9)
                .unwrap_or_else(|| panic!("c = {c}: no mirror for {}", r.k));
            assert_eq!(partner.multiplicity, r.multiplicity);
        }
    }
}
