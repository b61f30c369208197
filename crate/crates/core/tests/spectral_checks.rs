//! Chen-type fits, centers of mass, lattice orders and the type theorem.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use bitension_core::biharmonic::{spectral_gap_bounds, Survey, Verdict};
use bitension_core::catalog::{self, CatalogEntry};
use bitension_core::grid::GridKind;
use bitension_core::spectral::*;
use bitension_core::{Grid, Tolerances};

fn fit(entry: &CatalogEntry, n: usize) -> SpectralEstimate {
    let tol = Tolerances::default();
    let sample = Grid::sample(&entry.spec, n, 0.05).unwrap();
    let quad = Grid::quadrature(&entry.spec, 17).unwrap();
    chen_fit(&entry.spec, &sample, &quad, entry.compact, &tol).unwrap()
}

#[test]
fn coordinate_laplacians() {
    let tol = Tolerances::default();
    let e = catalog::make_clifford(1, 2, FRAC_1_SQRT_2).unwrap();
    let p = [0.7, 0.4, 1.9];
    let (lap, bilap) = laplace_coords(&e.spec, &p, 2, &tol).unwrap();
    let x = e.spec.position(&p).unwrap();
    for c in 0..5 {
        let k = if c < 2 { 2.0 } else { 4.0 };
        assert!((lap[c] - k * x[c]).abs() < 1e-10);
        assert!((bilap.as_ref().unwrap()[c] - k * k * x[c]).abs() < 1e-9);
    }
    // g = Id and Γ = 0 on the Legendre torus, so Δφ = -(φ_uu + φ_vv).
    let e = catalog::make_legendre_torus();
    let p = [0.3, 1.2];
    let (lap, _) = laplace_coords(&e.spec, &p, 1, &tol).unwrap();
    let jets = e.spec.eval(&p, 2).unwrap();
    for (c, j) in jets.iter().enumerate() {
        let want = -(j.extract(&[2, 0]).unwrap() + j.extract(&[0, 2]).unwrap());
        assert!((lap[c] - want).abs() < 1e-12);
    }
}

#[test]
fn centers_of_mass() {
    let tol = Tolerances::default();
    let com = |e: &CatalogEntry, n: usize| center_of_mass(&e.spec, &Grid::quadrature(&e.spec, n).unwrap(), &tol).unwrap();
    let c = com(&catalog::make_hypersphere(2, FRAC_1_SQRT_2).unwrap(), 33);
    assert!(c.center[..3].iter().all(|x| x.abs() < 1e-10) && (c.center[3] - FRAC_1_SQRT_2).abs() < 1e-10);
    assert!(!c.formal);
    assert!(com(&catalog::make_clifford(1, 2, FRAC_1_SQRT_2).unwrap(), 17).norm() < 1e-10);
    assert!(com(&catalog::make_legendre_torus(), 17).norm() < 1e-12);
    let empty = Grid { kind: GridKind::Quadrature, points: vec![], weights: vec![], per_axis: vec![] };
    assert!(matches!(center_of_mass(&catalog::make_legendre_torus().spec, &empty, &tol), Err(SpectralError::EmptyGrid)));
}

#[test]
fn chen_fits_of_the_examples() {
    let mf = |e: &CatalogEntry| e.spec.dim() as f64;
    for (entry, lp, lq, h) in [
        (catalog::make_clifford(1, 2, FRAC_1_SQRT_2).unwrap(), 2.0, 4.0, 1.0 / 3.0),
        (catalog::make_legendre_torus(), 1.0, 3.0, 0.5),
        (catalog::make_anti_invariant_torus(), 2.0, 4.0, 1.0 / 3.0),
    ] {
        let est = fit(&entry, 9);
        assert_eq!(est.kind, ChenType::TwoType, "{}", entry.description);
        assert!((est.lambda_p - lp).abs() < 1e-7 && (est.lambda_q - lq).abs() < 1e-7, "{est:?}");
        assert!((est.lambda_p - mf(&entry) * (1.0 - h)).abs() < 1e-7);
        assert!((est.lambda_q - mf(&entry) * (1.0 + h)).abs() < 1e-7);
        assert!(est.mass_symmetric && est.residual < 1e-7);
    }
    let est = fit(&catalog::make_hypersphere(3, FRAC_1_SQRT_2).unwrap(), 9);
    assert_eq!(est.kind, ChenType::OneType);
    assert!((est.lambda_p - 6.0).abs() < 1e-7);
    let norm = est.center.iter().map(|x| x * x).sum::<f64>().sqrt();
    assert!((norm - FRAC_1_SQRT_2).abs() < 1e-9 && !est.mass_symmetric);

    let est = fit(&catalog::make_perturbed_graph(0.2), 9);
    assert_eq!(est.kind, ChenType::Indeterminate);
    assert!(est.residual > 1e-2);
}

#[test]
fn fits_are_stable_under_refinement() {
    for entry in [catalog::make_legendre_torus(), catalog::make_anti_invariant_torus()] {
        let (a, b) = (fit(&entry, 9), fit(&entry, 17));
        assert!((a.lambda_p - b.lambda_p).abs() < 1e-9 && (a.lambda_q - b.lambda_q).abs() < 1e-9);
    }
}

#[test]
fn lattice_orders() {
    assert_eq!(torus_order(&[2.0 * PI, SQRT_2 * PI], 1.0, 3.0).unwrap(), [1, 3]);
    assert_eq!(torus_order(&[2.0 * PI, SQRT_2 * PI, 2.0 * PI], 2.0, 4.0).unwrap(), [2, 4]);
    assert!(matches!(torus_order(&[2.0 * PI, SQRT_2 * PI], 1.0, 2.5), Err(SpectralError::NotInSpectrum(_))));
    assert!(torus_spectrum(&[0.0], 3.0).is_err());
    let o = clifford_order(1, 2).unwrap();
    assert_eq!(o.criterion, Some([1, 2]));
    assert_eq!(o.enumerated, [1, 2]);
    assert_eq!(clifford_order(1, 5).unwrap().criterion, None);
}

#[test]
fn first_eigenvalue_bound_on_tori() {
    for (entry, h, equal) in [(catalog::make_legendre_torus(), 0.5, true), (catalog::make_anti_invariant_torus(), 1.0 / 3.0, false)] {
        let lattice = entry.lattice.clone().unwrap();
        let lambda1 = torus_spectrum(&lattice, 10.0).unwrap()[0];
        let bound = spectral_gap_bounds(entry.spec.dim(), h).unwrap().lambda1;
        assert!(lambda1 <= bound + 1e-12);
        assert_eq!((lambda1 - bound).abs() < 1e-12, equal, "λ₁ = {lambda1}, bound {bound}");
    }
}

#[test]
fn type_theorem_branches() {
    let tol = Tolerances::default();
    let run = |entry: &CatalogEntry| {
        let sample = Grid::sample(&entry.spec, 9, 0.05).unwrap();
        let survey = Survey::new(&entry.spec, &sample, &tol, entry.compact);
        let com = center_of_mass(&entry.spec, &Grid::quadrature(&entry.spec, 17).unwrap(), &tol).unwrap();
        let est = chen_fit_survey(&survey, &com, &tol).unwrap();
        type_theorem_check(&survey, &est, &tol)
    };
    let t = run(&catalog::make_hypersphere(3, FRAC_1_SQRT_2).unwrap());
    assert!(t.biharmonic && t.one_type_branch && !t.two_type_branch && t.verdict == Verdict::Pass, "{t:?}");
    let t = run(&catalog::make_clifford(1, 2, FRAC_1_SQRT_2).unwrap());
    assert!(t.biharmonic && t.two_type_branch && t.verdict == Verdict::Pass, "{t:?}");
    let t = run(&catalog::make_clifford(1, 2, 0.6).unwrap());
    assert!(!t.biharmonic && !t.one_type_branch && !t.two_type_branch && t.verdict == Verdict::Pass, "{t:?}");
    let t = run(&catalog::make_perturbed_graph(0.2));
    assert!(matches!(t.verdict, Verdict::NotApplicable(_)));
}
