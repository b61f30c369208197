//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::path::Path;
use std::time::Instant;

use bitension_cli::{load_config_file, render, run, Format};
use bitension_core::biharmonic::*;
use bitension_core::catalog::{self, CatalogEntry, Family};
use bitension_core::spectral::{chen_fit, clifford_order, torus_order, torus_spectrum, ChenType, SpectralEstimate};
use bitension_core::{parse_expression, Grid, Jet, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Collects failed conditions of one criterion.
#[derive(Default)]
struct Criterion {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Criterion {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }
}

fn survey(entry: &CatalogEntry) -> Survey {
    let grid = Grid::sample(&entry.spec, 9, 0.05).unwrap();
    Survey::new(&entry.spec, &grid, &Tolerances::default(), entry.compact)
}

fn fit(entry: &CatalogEntry, n: usize) -> SpectralEstimate {
    let tol = Tolerances::default();
    let sample = Grid::sample(&entry.spec, n, 0.05).unwrap();
    let quad = Grid::quadrature(&entry.spec, 17).unwrap();
    chen_fit(&entry.spec, &sample, &quad, entry.compact, &tol).unwrap()
}

fn clifford(a1: f64) -> CatalogEntry {
    catalog::make_clifford(1, 2, a1).unwrap()
}

fn sphere(m: usize, a: f64) -> CatalogEntry {
    catalog::make_hypersphere(m, a).unwrap()
}

fn biharmonic_examples(c: &mut Criterion) {
    let tol = Tolerances::default();
    for entry in [
        sphere(2, FRAC_1_SQRT_2),
        sphere(3, FRAC_1_SQRT_2),
        clifford(FRAC_1_SQRT_2),
        catalog::make_legendre_torus(),
        catalog::make_anti_invariant_torus(),
    ] {
        let s = survey(&entry);
        c.check(s.failures().is_empty(), || format!("{}: grid errors", entry.description));
        let tau2 = check_bitension(&s, &tol).max;
        let [normal, tangent] = check_general(&s, &tol);
        let worst = tau2.max(normal.max).max(tangent.max);
        c.check(worst < 1e-8, || format!("{}: max residual {worst:e}", entry.description));
        c.note(format!("{} {worst:.1e}", entry.name));
    }

    let s = survey(&sphere(3, 0.6));
    let [normal, _] = check_general(&s, &tol);
    let [hyper, _] = check_hypersurface(&s, &tol);
    let dev = normal.residuals.iter().chain(&hyper.residuals).map(|r| (r - 28.0 / 9.0).abs()).fold(0.0, f64::max);
    c.check(!normal.residuals.is_empty() && dev < 1e-6, || format!("S^3(0.6): normal residual off 28/9 by {dev:e}"));

    // The normal residual alone is (|A|²-m)|H| = 7/1296; |τ₂| = 21/1296.
    let s = survey(&clifford(0.6));
    let tau2 = min_abs(&check_bitension(&s, &tol));
    let [normal, _] = check_general(&s, &tol);
    let dev = normal.residuals.iter().map(|r| (r - 7.0 / 1296.0).abs()).fold(0.0, f64::max);
    c.check(tau2 > 0.01, || format!("S^1(0.6)×S^2(0.8): |τ₂| = {tau2}"));
    c.check(dev < 1e-10, || format!("S^1(0.6)×S^2(0.8): normal residual off 7/1296 by {dev:e}"));
    c.note(format!("controls 28/9, |τ₂| ≥ {tau2:.4}"));
}

fn min_abs(r: &CheckReport) -> f64 {
    r.residuals.iter().map(|r| r.abs()).fold(f64::INFINITY, f64::min)
}

fn invariant_tables(c: &mut Criterion) {
    let cases: [(CatalogEntry, f64, Option<f64>, Option<f64>); 4] = [
        (sphere(3, FRAC_1_SQRT_2), 1.0, Some(3.0), Some(12.0)),
        (clifford(FRAC_1_SQRT_2), 1.0 / 3.0, Some(3.0), Some(4.0)),
        (catalog::make_legendre_torus(), 0.5, None, None),
        (catalog::make_anti_invariant_torus(), 1.0 / 3.0, None, None),
    ];
    for (entry, h, a2, s) in cases {
        let sv = survey(&entry);
        let mut worst = 0.0f64;
        for e in sv.ok() {
            worst = worst.max((e.h_norm - h).abs());
            if let Some(a2) = a2 {
                worst = worst.max((e.a_squared - a2).abs());
            }
            if let Some(s) = s {
                worst = worst.max((e.scalar_curvature - s).abs());
            }
        }
        c.check(sv.ok().count() == 81 || sv.ok().count() == 729, || format!("{}: grid size", entry.name));
        c.check(worst < 1e-8, || format!("{}: deviation {worst:e}", entry.description));
    }
}

fn spectral_fits(c: &mut Criterion) {
    for (entry, lp, lq) in [
        (clifford(FRAC_1_SQRT_2), 2.0, 4.0),
        (catalog::make_legendre_torus(), 1.0, 3.0),
        (catalog::make_anti_invariant_torus(), 2.0, 4.0),
    ] {
        let est = fit(&entry, 9);
        let m = entry.spec.dim() as f64;
        let h = survey(&entry).metadata().h_mean;
        c.check(est.kind == ChenType::TwoType, || format!("{}: {:?}", entry.name, est.kind));
        c.check((est.lambda_p - lp).abs() < 1e-7 && (est.lambda_q - lq).abs() < 1e-7, || {
            format!("{}: λ = ({}, {})", entry.name, est.lambda_p, est.lambda_q)
        });
        c.check((est.lambda_p - m * (1.0 - h)).abs() < 1e-7 && (est.lambda_q - m * (1.0 + h)).abs() < 1e-7, || {
            format!("{}: λ ≠ m(1∓|H|)", entry.name)
        });
        let norm = est.center.iter().map(|x| x * x).sum::<f64>().sqrt();
        c.check(norm < 1e-9, || format!("{}: |φ₀| = {norm:e}", entry.name));
    }
    let est = fit(&sphere(3, FRAC_1_SQRT_2), 9);
    let norm = est.center.iter().map(|x| x * x).sum::<f64>().sqrt();
    c.check(est.kind == ChenType::OneType && (est.lambda_p - 6.0).abs() < 1e-7, || format!("S^3: {est:?}"));
    c.check((norm - FRAC_1_SQRT_2).abs() < 1e-9, || format!("S^3: |φ₀| = {norm}"));
}

fn orders(c: &mut Criterion) {
    for (entry, want) in [(catalog::make_legendre_torus(), [1, 3]), (catalog::make_anti_invariant_torus(), [2, 4])] {
        let est = fit(&entry, 9);
        let got = torus_order(entry.lattice.as_ref().unwrap(), est.lambda_p, est.lambda_q);
        c.check(matches!(got, Ok(o) if o == want), || format!("{}: {got:?}", entry.name));
    }
    let o = clifford_order(1, 2);
    c.check(matches!(&o, Ok(o) if o.criterion == Some([1, 2])), || format!("Clifford(1,2): {o:?}"));
}

fn identities(c: &mut Criterion) {
    let tol = Tolerances::default();
    for entry in [
        sphere(2, FRAC_1_SQRT_2),
        sphere(3, FRAC_1_SQRT_2),
        clifford(FRAC_1_SQRT_2),
        catalog::make_clifford(2, 1, FRAC_1_SQRT_2).unwrap(),
        catalog::make_anti_invariant_torus(),
        catalog::make_composed_equator(),
    ] {
        let s = survey(&entry);
        for r in check_prop31(&s, &tol).iter().chain(check_prop32(&s, &tol).iter()) {
            c.check(r.verdict == Verdict::Pass && r.max < 1e-8, || {
                format!("{}: {} {:?} max {:e}", entry.name, r.name, r.verdict, r.max)
            });
        }
    }
    let legendre = catalog::make_legendre_torus();
    let lambda1 = torus_spectrum(legendre.lattice.as_ref().unwrap(), 10.0).unwrap()[0];
    let bound = spectral_gap_bounds(2, 0.5).unwrap().lambda1;
    c.check((lambda1 - 1.0).abs() < 1e-12 && (bound - 1.0).abs() < 1e-12, || format!("λ₁ = {lambda1}, bound {bound}"));
}

fn gates(c: &mut Criterion) {
    for m in 4..=6 {
        let mf = m as f64;
        let bound = (mf - 2.0) / mf;
        // |H| = 0 is minimal, hence never proper biharmonic.
        c.check(!mean_range_gate(m, 0.0, 1, true).is_admissible(), || format!("m = {m}: |H| = 0 admitted"));
        for k in 1..=10 {
            let h = 0.1 * k as f64;
            let gate = mean_range_gate(m, h, 1, true);
            let admissible = h <= bound + 1e-12 || (h - 1.0).abs() < 1e-12;
            c.check(gate.is_admissible() == admissible, || format!("m = {m}, |H| = {h}: {:?}", gate.verdict));
            let li = li_gate_from_mean(m, h).unwrap();
            if (h - 1.0).abs() < 1e-12 {
                c.check(li.branch == LiBranch::Umbilical, || format!("m = {m}, |H| = 1: {:?}", li.branch));
            } else if h > bound + 1e-12 {
                c.check(li.branch == LiBranch::InteriorContradiction, || format!("m = {m}, |H| = {h}: {:?}", li.branch));
            }
        }
        let li = li_gate_from_mean(m, bound).unwrap();
        let r = 1.0 + (mf * bound * bound - 1.0) / (mf - 1.0);
        let ok = matches!(li.branch, LiBranch::Clifford { c_squared } if (c_squared - (mf - 2.0) / (mf * r)).abs() < 1e-12);
        c.check(ok, || format!("m = {m}, |H| = (m-2)/m: {:?}", li.branch));
    }
}

fn area_scans(c: &mut Criterion) {
    let tol = Tolerances::default();
    let step = 0.01;
    for family in [Family::Hypersphere { m: 2 }, Family::Hypersphere { m: 3 }, Family::Clifford { m1: 1, m2: 2 }] {
        match area_ii_scan(family, 0.3, 0.95, step, 10, 3, 0.05, &tol) {
            Ok(scan) => {
                c.check(scan.locates(FRAC_1_SQRT_2), || {
                    format!("{family:?}: critical {:?}, residual {:?}", scan.critical_brackets, scan.residual_brackets)
                });
                if let Some(&(lo, hi)) = scan.critical_brackets.first() {
                    c.note(format!("{family:?} [{lo:.2}, {hi:.2}]"));
                }
            }
            Err(e) => c.check(false, || format!("{family:?}: {e}")),
        }
    }
    let half = 0.5f64;
    for (entry, want) in [
        (sphere(2, FRAC_1_SQRT_2), 2.0 * PI),
        (sphere(3, FRAC_1_SQRT_2), 2.0 * PI * PI * half.powf(1.5)),
        (clifford(FRAC_1_SQRT_2), 8.0 * PI * PI * half.powf(1.5)),
    ] {
        let got = area_ii(&entry.spec, 12, &tol).unwrap();
        c.check((got - want).abs() < 1e-6, || format!("{}: Area_II = {got}, closed form {want}", entry.description));
    }
}

type Poly = BTreeMap<[u32; 2], i64>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            *out.entry([ea[0] + eb[0], ea[1] + eb[1]]).or_insert(0) += ca * cb;
        }
    }
    out
}

/// `∂^α p (x)`, exactly.
fn poly_derivative_at(p: &Poly, alpha: &[usize], x: [i64; 2]) -> i64 {
    let falling = |e: u32, k: usize| (0..k as i64).map(|j| e as i64 - j).product::<i64>();
    p.iter()
        .filter(|(e, _)| e[0] as usize >= alpha[0] && e[1] as usize >= alpha[1])
        .map(|(e, c)| {
            c * falling(e[0], alpha[0])
                * falling(e[1], alpha[1])
                * x[0].pow(e[0] - alpha[0] as u32)
                * x[1].pow(e[1] - alpha[1] as u32)
        })
        .sum()
}

fn random_poly(rng: &mut ChaCha8Rng) -> (String, Poly) {
    let mut p = Poly::new();
    let mut terms = Vec::new();
    for _ in 0..rng.random_range(1..=3) {
        let (c, i, j) = (rng.random_range(-3i64..=3), rng.random_range(0..=2u32), rng.random_range(0..=2u32));
        *p.entry([i, j]).or_insert(0) += c;
        terms.push(format!("({c})*u^{i}*v^{j}"));
    }
    (terms.join(" + "), p)
}

fn property_suites(c: &mut Criterion) {
    // Products and powers of integer polynomials against exact expansion.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let params = vec!["u".to_string(), "v".to_string()];
    for _ in 0..200 {
        let (sa, pa) = random_poly(&mut rng);
        let (sb, pb) = random_poly(&mut rng);
        let k = rng.random_range(0..=2u32);
        let src = format!("(({sa}) * ({sb}))^{k}");
        let mut oracle = Poly::from([([0, 0], 1)]);
        for _ in 0..k {
            oracle = poly_mul(&oracle, &poly_mul(&pa, &pb));
        }
        let x = [rng.random_range(-2i64..=2), rng.random_range(-2i64..=2)];
        let jet = parse_expression(&src, &params).unwrap().eval(&[x[0] as f64, x[1] as f64], 4, &params).unwrap();
        for alpha in Jet::multi_indices(2, 4) {
            let (got, want) = (jet.extract(&alpha).unwrap(), poly_derivative_at(&oracle, &alpha, x) as f64);
            c.check(got == want, || format!("{src} at {x:?}, α = {alpha:?}: {got} vs {want}"));
        }
    }
    // Leibniz rule on integer jets, exactly.
    for nv in 1..=3 {
        for order in 1..=4 {
            let coeffs = |rng: &mut ChaCha8Rng| -> Vec<f64> {
                let n = Jet::multi_indices(nv, order).len();
                (0..n).map(|_| rng.random_range(-3i64..=3) as f64).collect()
            };
            let a = Jet::from_coeffs(nv, order, &coeffs(&mut rng)).unwrap();
            let b = Jet::from_coeffs(nv, order, &coeffs(&mut rng)).unwrap();
            for i in 0..nv {
                let lhs = (a * b).derive(i).unwrap();
                let rhs = (a.derive(i).unwrap() * b) + (a * b.derive(i).unwrap());
                c.check(lhs.coeffs() == rhs.coeffs(), || format!("product rule, {nv} vars, order {order}"));
            }
        }
    }
    // Catalog components print and parse back to the same tree.
    for name in catalog::NAMES {
        let entry = catalog::build(name, &[]).unwrap();
        let spec = &entry.spec;
        for e in spec.components() {
            let back = parse_expression(&e.to_source(spec.params()), spec.params());
            c.check(back.as_ref() == Ok(e), || format!("{name}: round trip of {}", e.to_source(spec.params())));
        }
    }
    // Byte-identical reports regardless of thread count.
    let cfg = load_config_file(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/clifford.toml").to_str().unwrap(),
        &["grid.points_per_dim=5".to_string()],
    )
    .unwrap();
    let report = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| render(&run(&cfg).unwrap(), Format::Json))
    };
    let (a, b, d) = (report(1), report(4), report(4));
    c.check(a == b && b == d, || "reports differ between runs".into());
    // Chen fits are stable under grid refinement.
    for entry in [clifford(FRAC_1_SQRT_2), catalog::make_legendre_torus(), catalog::make_anti_invariant_torus()] {
        let (coarse, fine) = (fit(&entry, 9), fit(&entry, 17));
        let dev = (coarse.lambda_p - fine.lambda_p).abs().max((coarse.lambda_q - fine.lambda_q).abs());
        c.check(dev < 1e-9, || format!("{}: refinement moves λ by {dev:e}", entry.name));
    }
}

fn main() {
    type Suite = fn(&mut Criterion);
    let criteria: [(&str, Suite); 8] = [
        ("biharmonicity of the example families", biharmonic_examples),
        ("invariant tables", invariant_tables),
        ("spectral decompositions", spectral_fits),
        ("orders", orders),
        ("parallel-H identities and the λ₁ bound", identities),
        ("mean curvature gates", gates),
        ("Area_II scans", area_scans),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut c = Criterion::default();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| f(&mut c)));
        if let Err(e) = outcome {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            c.failures.push(format!("panicked: {}", msg.unwrap_or_default()));
        }
        let secs = start.elapsed().as_secs_f64();
        if c.failures.is_empty() {
            let notes = if c.notes.is_empty() { String::new() } else { format!(" ({})", c.notes.join("; ")) };
            println!("criterion {}: PASS  {title}{notes} [{secs:.1}s]", i + 1);
        } else {
            failed += 1;
            println!("criterion {}: FAIL  {title} [{secs:.1}s]", i + 1);
            for f in c.failures.iter().take(10) {
                println!("    {f}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
