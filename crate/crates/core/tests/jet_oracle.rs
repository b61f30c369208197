//! Jets against an independent integer polynomial oracle: every derivative
//! of order ≤ 4 must agree exactly.

use std::collections::BTreeMap;

use bitension_core::dsl::parse_expression;
use bitension_core::jet::Jet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Poly = BTreeMap<[u32; 3], i64>;

fn constant(c: i64) -> Poly {
    let mut p = Poly::new();
    if c != 0 {
        p.insert([0, 0, 0], c);
    }
    p
}

fn var(i: usize) -> Poly {
    let mut e = [0, 0, 0];
    e[i] = 1;
    Poly::from([(e, 1)])
}

fn add(a: &Poly, b: &Poly, sign: i64) -> Poly {
    let mut out = a.clone();
    for (e, c) in b {
        *out.entry(*e).or_insert(0) += sign * c;
    }
    out.retain(|_, c| *c != 0);
    out
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
            *out.entry(e).or_insert(0) += ca * cb;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn differentiate(p: &Poly, i: usize) -> Poly {
    let mut out = Poly::new();
    for (e, c) in p {
        if e[i] > 0 {
            let mut d = *e;
            d[i] -= 1;
            *out.entry(d).or_insert(0) += c * e[i] as i64;
        }
    }
    out
}

fn evaluate(p: &Poly, x: &[i64]) -> i64 {
    p.iter()
        .map(|(e, c)| c * (0..3).map(|i| x[i].pow(e[i])).product::<i64>())
        .sum()
}

const NAMES: [&str; 3] = ["u", "v", "w"];

/// Random expression over `nv` variables with its oracle polynomial.
fn random_expr(rng: &mut ChaCha8Rng, nv: usize, depth: u32) -> (String, Poly) {
    if depth == 0 || rng.random_bool(0.25) {
        return if rng.random_bool(0.6) {
            let i = rng.random_range(0..nv);
            (NAMES[i].to_string(), var(i))
        } else {
            let c = rng.random_range(-3i64..=3);
            (if c < 0 { format!("({c})") } else { c.to_string() }, constant(c))
        };
    }
    let (sa, pa) = random_expr(rng, nv, depth - 1);
    match rng.random_range(0..5) {
        0 => {
            let (sb, pb) = random_expr(rng, nv, depth - 1);
            (format!("({sa} + {sb})"), add(&pa, &pb, 1))
        }
        1 => {
            let (sb, pb) = random_expr(rng, nv, depth - 1);
            (format!("({sa} - {sb})"), add(&pa, &pb, -1))
        }
        2 | 3 => {
            let (sb, pb) = random_expr(rng, nv, depth - 1);
            (format!("({sa} * {sb})"), mul(&pa, &pb))
        }
        _ => {
            let k = rng.random_range(0..=3u32);
            let mut p = constant(1);
            for _ in 0..k {
                p = mul(&p, &pa);
            }
            (format!("({sa})^{k}"), p)
        }
    }
}

#[test]
fn every_derivative_matches_the_polynomial_oracle_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    let mut checked = 0usize;
    for case in 0..400 {
        let nv = 1 + case % 3;
        let (src, poly) = random_expr(&mut rng, nv, 4);
        let params: Vec<String> = NAMES[..nv].iter().map(|s| s.to_string()).collect();
        let expr = parse_expression(&src, &params).unwrap();
        let point: Vec<i64> = (0..3).map(|i| if i < nv { rng.random_range(-2i64..=2) } else { 0 }).collect();
        let fpoint: Vec<f64> = point[..nv].iter().map(|&x| x as f64).collect();
        let jet = expr.eval(&fpoint, 4, &params).unwrap();
        for alpha in Jet::multi_indices(nv, 4) {
            let mut d = poly.clone();
            for (i, &k) in alpha.iter().enumerate() {
                for _ in 0..k {
                    d = differentiate(&d, i);
                }
            }
            let want = evaluate(&d, &point) as f64;
            let got = jet.extract(&alpha).unwrap();
            assert_eq!(got, want, "{src} at {point:?}, alpha {alpha:?}");
            checked += 1;
        }
    }
    assert!(checked > 5000);
}
