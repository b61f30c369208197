//! Measured invariants of every catalog entry against its closed-form table
//! at seeded random interior points.

mod common;

use bitension_core::catalog;
use bitension_core::geometry::evaluate_point;
use bitension_core::Tolerances;
use common::{entries, random_points};

fn close(what: &str, name: &str, got: f64, want: f64, tol: f64) {
    assert!((got - want).abs() <= tol, "{name}: {what} = {got}, expected {want}");
}

#[test]
fn measured_invariants_match_the_table() {
    let tol = Tolerances::default();
    for (k, entry) in entries().iter().enumerate() {
        let ex = &entry.expected;
        let label = &entry.description;
        for p in random_points(entry, 50, 1000 + k as u64) {
            let e = evaluate_point(&entry.spec, &p, &tol).unwrap();
            if let Some(h) = &ex.h_norm {
                close("|H|", label, e.h_norm, h.value, 1e-8);
            }
            if let Some(a) = &ex.a_squared {
                close("|A|²", label, e.a_squared, a.value, 1e-8);
            }
            if let Some(s) = &ex.scalar_curvature {
                close("s", label, e.scalar_curvature, s.value, 1e-8);
            }
            if let Some(par) = &ex.parallel_h {
                assert_eq!(e.nabla_perp_h < 1e-8, par.value, "{label}: |∇⊥H| = {}", e.nabla_perp_h);
            }
            if let Some(pu) = &ex.pseudo_umbilical {
                assert_eq!(e.pseudo_umbilical < 1e-8, pu.value, "{label}: |A_H - |H|² Id| = {}", e.pseudo_umbilical);
            }
            if let Some(b) = &ex.biharmonic {
                assert_eq!(e.tau2.norm() < 1e-8, b.value, "{label}: |τ₂| = {}", e.tau2.norm());
            }
        }
    }
}

#[test]
fn perturbed_graph_has_varying_mean_curvature() {
    let tol = Tolerances::default();
    let entry = catalog::make_perturbed_graph(0.2);
    let hs: Vec<f64> = random_points(&entry, 50, 7)
        .iter()
        .map(|p| evaluate_point(&entry.spec, p, &tol).unwrap().h_norm)
        .collect();
    let (lo, hi) = hs.iter().fold((f64::MAX, f64::MIN), |(a, b), &h| (a.min(h), b.max(h)));
    assert!(hi - lo > 0.1, "|H| range [{lo}, {hi}]");
}

#[test]
fn every_entry_lies_on_the_unit_sphere() {
    for (k, entry) in entries().iter().enumerate() {
        for p in random_points(entry, 100, 5000 + k as u64) {
            let x = entry.spec.position(&p).unwrap();
            let r2: f64 = x.iter().map(|c| c * c).sum();
            assert!((r2 - 1.0).abs() <= 1e-12, "{}: |φ|² - 1 = {}", entry.description, r2 - 1.0);
        }
    }
}

#[test]
fn build_applies_defaults_and_overrides() {
    let e = catalog::build("hypersphere", &[]).unwrap();
    assert_eq!(e.spec.dim(), 3);
    let e = catalog::build("clifford", &[("a1".into(), 0.6)]).unwrap();
    assert!((e.expected.h_norm.unwrap().value - 1.0 / 18.0).abs() < 1e-15);
    assert!(catalog::build("legendre_torus", &[("a".into(), 0.5)]).is_err());
    for name in catalog::NAMES {
        assert!(catalog::build(name, &[]).is_ok(), "{name}");
    }
}
