//! Example immersions with closed-form invariants.
//!
//! Every entry is built from DSL text, so the fixtures exercise the parser
//! and the evaluator as much as the geometry kernel.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use thiserror::Error;

use crate::dsl::{ImmersionSpec, SpecError};

/// An expected value together with where it comes from.
#[derive(Debug, Clone, PartialEq)]
pub struct Cited<T> {
    pub value: T,
    pub source: &'static str,
}

fn cite<T>(value: T, source: &'static str) -> Option<Cited<T>> {
    Some(Cited { value, source })
}

/// Closed-form invariants of a catalog entry. `None` means not tabulated.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Expected {
    pub h_norm: Option<Cited<f64>>,
    pub a_squared: Option<Cited<f64>>,
    pub scalar_curvature: Option<Cited<f64>>,
    pub lambda_p: Option<Cited<f64>>,
    pub lambda_q: Option<Cited<f64>>,
    /// `|φ₀|`
    pub center_norm: Option<Cited<f64>>,
    pub parallel_h: Option<Cited<bool>>,
    pub pseudo_umbilical: Option<Cited<bool>>,
    pub mass_symmetric: Option<Cited<bool>>,
    pub cmc: Option<Cited<bool>>,
    pub biharmonic: Option<Cited<bool>>,
    pub order: Option<Cited<[usize; 2]>>,
}

/// Restricted one-parameter families for the `Area_II` scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `S^m(a) ⊂ S^{m+1}`
    Hypersphere { m: usize },
    /// `S^{m1}(a) × S^{m2}(√(1-a²)) ⊂ S^{m+1}`
    Clifford { m1: usize, m2: usize },
}

impl Family {
    pub fn at(self, a: f64) -> Result<CatalogEntry, CatalogError> {
        match self {
            Family::Hypersphere { m } => make_hypersphere(m, a),
            Family::Clifford { m1, m2 } => make_clifford(m1, m2, a),
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Family::Hypersphere { m } => m,
            Family::Clifford { m1, m2 } => m1 + m2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    pub spec: ImmersionSpec,
    pub expected: Expected,
    /// Rectangular lattice periods for flat tori.
    pub lattice: Option<Vec<f64>>,
    /// Whether the parameter domain covers a compact manifold.
    pub compact: bool,
    /// Parameters used to build the entry.
    pub params: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry {0:?}")]
    UnknownName(String),
    #[error("catalog entry {entry:?} takes no parameter {param:?}")]
    UnknownParam { entry: String, param: String },
    #[error("invalid parameter {param} = {value}: {reason}")]
    BadParam { param: &'static str, value: f64, reason: &'static str },
    #[error(transparent)]
    Spec(#[from] SpecError),
}

/// Names addressable from configuration files.
pub const NAMES: [&str; 6] = [
    "hypersphere",
    "clifford",
    "legendre_torus",
    "anti_invariant_torus",
    "perturbed_graph",
    "composed_equator",
];

fn lit(x: f64) -> String {
    if x < 0.0 {
        format!("({x:?})")
    } else {
        format!("{x:?}")
    }
}

/// Round sphere `S^k(r)` in `k+1` coordinates over the given parameters.
fn round_sphere(r: &str, p: &[&str]) -> Vec<String> {
    match p {
        [u] => vec![format!("{r}*cos({u})"), format!("{r}*sin({u})")],
        [u, v] => vec![
            format!("{r}*cos({u})*sin({v})"),
            format!("{r}*sin({u})*sin({v})"),
            format!("{r}*cos({v})"),
        ],
        [u, v, w] => vec![
            format!("{r}*cos({u})*sin({v})*sin({w})"),
            format!("{r}*sin({u})*sin({v})*sin({w})"),
            format!("{r}*cos({v})*sin({w})"),
            format!("{r}*cos({w})"),
        ],
        _ => unreachable!("sphere dimension checked by caller"),
    }
}

/// Polar domain: the first angle is periodic, the others run over `[0, π]`.
fn polar_domain(k: usize) -> (Vec<(f64, f64)>, Vec<bool>) {
    let mut d = vec![(0.0, 2.0 * PI)];
    let mut p = vec![true];
    for _ in 1..k {
        d.push((0.0, PI));
        p.push(false);
    }
    (d, p)
}

fn is_half(a: f64) -> bool {
    (a - FRAC_1_SQRT_2).abs() < 1e-12
}

fn spec_from(
    name: &str,
    params: &[&str],
    comps: &[String],
    domain: &[(f64, f64)],
    periodic: &[bool],
) -> Result<ImmersionSpec, CatalogError> {
    let refs: Vec<&str> = comps.iter().map(String::as_str).collect();
    Ok(ImmersionSpec::parse(name, params, &refs, comps.len(), domain, periodic, true)?)
}

/// `S^m(a) ⊂ S^{m+1}` at height `b = √(1-a²)`, for `m ∈ {2, 3}`.
pub fn make_hypersphere(m: usize, a: f64) -> Result<CatalogEntry, CatalogError> {
    if !(2..=3).contains(&m) {
        return Err(CatalogError::BadParam { param: "m", value: m as f64, reason: "supported dimensions are 2 and 3" });
    }
    if !(a > 0.0 && a <= 1.0) {
        return Err(CatalogError::BadParam { param: "a", value: a, reason: "radius must lie in (0, 1]" });
    }
    let b = (1.0 - a * a).max(0.0).sqrt();
    let params = ["u", "v", "w"];
    let mut comps = round_sphere(&lit(a), &params[..m]);
    comps.push(lit(b));
    let (domain, periodic) = polar_domain(m);
    let spec = spec_from("hypersphere", &params[..m], &comps, &domain, &periodic)?;

    let mf = m as f64;
    let biharmonic = is_half(a) || b == 0.0;
    let mut expected = Expected {
        h_norm: cite(b / a, "|H| = b/a for the small hypersphere of radius a"),
        a_squared: cite(mf * b * b / (a * a), "|A|² = m b²/a² for the small hypersphere"),
        scalar_curvature: cite(mf * (mf - 1.0) / (a * a), "round sphere of radius a: s = m(m-1)/a²"),
        lambda_p: cite(mf / (a * a), "1-type: Δφ = (m/a²)(φ - φ₀)"),
        center_norm: cite(b, "center of mass (0, ..., 0, b)"),
        parallel_h: cite(true, "∇⊥H = 0 on every small hypersphere"),
        pseudo_umbilical: cite(true, "A_H = (b/a)² Id"),
        mass_symmetric: cite(b == 0.0, "center of mass (0, ..., 0, b)"),
        cmc: cite(true, "homogeneous"),
        biharmonic: cite(biharmonic, "biharmonic iff a = 1/√2 (or a = 1, totally geodesic)"),
        ..Expected::default()
    };
    if is_half(a) {
        expected.lambda_p = cite(2.0 * mf, "1-type with eigenvalue 2m at radius 1/√2");
        expected.scalar_curvature = cite(mf * mf * 2.0 - 2.0 * mf, "s = m²(1+|H|²) - 2m with |H| = 1");
        expected.center_norm = cite(FRAC_1_SQRT_2, "center of mass (0, ..., 0, 1/√2)");
    }
    Ok(CatalogEntry {
        name: "hypersphere".into(),
        description: format!("S^{m}({a}) ⊂ S^{}", m + 1),
        spec,
        expected,
        lattice: None,
        compact: true,
        params: vec![("m".into(), mf), ("a".into(), a)],
    })
}

/// Generalized Clifford torus `S^{m1}(a1) × S^{m2}(a2) ⊂ S^{m+1}`, `a2 = √(1-a1²)`.
pub fn make_clifford(m1: usize, m2: usize, a1: f64) -> Result<CatalogEntry, CatalogError> {
    if m1 == 0 || m2 == 0 || m1 + m2 > 3 {
        return Err(CatalogError::BadParam {
            param: "m1 + m2",
            value: (m1 + m2) as f64,
            reason: "factors need positive dimension and m1 + m2 ≤ 3",
        });
    }
    if !(a1 > 0.0 && a1 < 1.0) {
        return Err(CatalogError::BadParam { param: "a1", value: a1, reason: "radius must lie in (0, 1)" });
    }
    let a2 = (1.0 - a1 * a1).sqrt();
    let params = ["u", "v", "w"];
    let m = m1 + m2;
    let mut comps = round_sphere(&lit(a1), &params[..m1]);
    comps.extend(round_sphere(&lit(a2), &params[m1..m]));
    let (d1, p1) = polar_domain(m1);
    let (d2, p2) = polar_domain(m2);
    let domain: Vec<_> = d1.into_iter().chain(d2).collect();
    let periodic: Vec<_> = p1.into_iter().chain(p2).collect();
    let spec = spec_from("clifford", &params[..m], &comps, &domain, &periodic)?;

    let (f1, f2, mf) = (m1 as f64, m2 as f64, m as f64);
    let h = (a2 * a2 * f1 - a1 * a1 * f2).abs() / (a1 * a2 * mf);
    let (l1, l2) = (f1 / (a1 * a1), f2 / (a2 * a2));
    let half = is_half(a1);
    let mut expected = Expected {
        h_norm: cite(h, "|H| = |a2² m1 - a1² m2| / (a1 a2 m)"),
        a_squared: cite((a2 / a1).powi(2) * f1 + (a1 / a2).powi(2) * f2, "|A|² = (a2/a1)² m1 + (a1/a2)² m2"),
        scalar_curvature: cite(
            f1 * (f1 - 1.0) / (a1 * a1) + f2 * (f2 - 1.0) / (a2 * a2),
            "product of round spheres of radii a1, a2",
        ),
        lambda_p: cite(l1.min(l2), "factor eigenvalues m1/a1² and m2/a2²"),
        lambda_q: cite(l1.max(l2), "factor eigenvalues m1/a1² and m2/a2²"),
        center_norm: cite(0.0, "each factor is centered at the origin"),
        parallel_h: cite(true, "∇⊥H = 0 on every Clifford torus"),
        pseudo_umbilical: cite(h < 1e-12, "A_H has eigenvalues of opposite sign unless H = 0"),
        mass_symmetric: cite(true, "each factor is centered at the origin"),
        cmc: cite(true, "homogeneous"),
        biharmonic: cite(
            (half && m1 != m2) || (a2 * a2 * f1 - a1 * a1 * f2).abs() < 1e-12,
            "proper biharmonic iff a1 = a2 = 1/√2 and m1 ≠ m2; minimal iff a1² = m1/m",
        ),
        ..Expected::default()
    };
    if half && m1 != m2 {
        expected.h_norm = cite((f2 - f1).abs() / mf, "|H| = |m2 - m1| / (m1 + m2) at a1 = a2 = 1/√2");
        expected.lambda_p = cite(2.0 * f1.min(f2), "Δφ_p = 2 m1 φ_p, Δφ_q = 2 m2 φ_q");
        expected.lambda_q = cite(2.0 * f1.max(f2), "Δφ_p = 2 m1 φ_p, Δφ_q = 2 m2 φ_q");
        if f1.max(f2) <= 2.0 * (f1.min(f2) + 1.0) {
            expected.order = cite([1, 2], "order [1, 2] iff m2 ≤ 2(m1 + 1)");
        }
        expected.scalar_curvature = cite(mf * mf * (1.0 + h * h) - 2.0 * mf, "s = m²(1+|H|²) - 2m");
    }
    Ok(CatalogEntry {
        name: "clifford".into(),
        description: format!("S^{m1}({a1}) × S^{m2}({a2}) ⊂ S^{}", m + 1),
        spec,
        expected,
        lattice: None,
        compact: true,
        params: vec![("m1".into(), f1), ("m2".into(), f2), ("a1".into(), a1)],
    })
}

/// Real form of `(1/√2)(e^{iu}, i e^{-iu} sin √2v, i e^{-iu} cos √2v)`.
pub fn make_legendre_torus() -> CatalogEntry {
    let s = "(1/sqrt(2))";
    let comps: Vec<String> = [
        "cos(u)",
        "sin(u)",
        "sin(u)*sin(sqrt(2)*v)",
        "cos(u)*sin(sqrt(2)*v)",
        "sin(u)*cos(sqrt(2)*v)",
        "cos(u)*cos(sqrt(2)*v)",
    ]
    .iter()
    .map(|c| format!("{s}*{c}"))
    .collect();
    let lattice = vec![2.0 * PI, SQRT_2 * PI];
    let domain = [(0.0, lattice[0]), (0.0, lattice[1])];
    let spec = spec_from("legendre_torus", &["u", "v"], &comps, &domain, &[true, true]).expect("catalog text parses");
    let expected = Expected {
        h_norm: cite(0.5, "constant mean curvature |H| = 1/2"),
        a_squared: cite(3.0, "flat metric and the Gauss equation: |A|² = m(m-1) + m²|H|²"),
        scalar_curvature: cite(0.0, "flat torus"),
        lambda_p: cite(1.0, "2-type with eigenvalues 1 and 3"),
        lambda_q: cite(3.0, "2-type with eigenvalues 1 and 3"),
        center_norm: cite(0.0, "every component has zero mean over the lattice"),
        parallel_h: cite(false, "the mean curvature vector field is not parallel"),
        pseudo_umbilical: cite(false, "A_H has eigenvalues 0 and 1/2"),
        mass_symmetric: cite(true, "every component has zero mean over the lattice"),
        cmc: cite(true, "constant mean curvature |H| = 1/2"),
        biharmonic: cite(true, "proper biharmonic Legendre immersion"),
        order: cite([1, 3], "[1, 3]-order immersion"),
    };
    CatalogEntry {
        name: "legendre_torus".into(),
        description: "flat Legendre torus in S^5".into(),
        spec,
        expected,
        lattice: Some(lattice),
        compact: true,
        params: Vec::new(),
    }
}

/// Real form of `(1/√2) e^{iw}(e^{iu}, i e^{-iu} sin √2v, i e^{-iu} cos √2v)`.
pub fn make_anti_invariant_torus() -> CatalogEntry {
    let s = "(1/sqrt(2))";
    let comps: Vec<String> = [
        "cos(u+w)",
        "sin(u+w)",
        "(-sin(w-u))*sin(sqrt(2)*v)",
        "cos(w-u)*sin(sqrt(2)*v)",
        "(-sin(w-u))*cos(sqrt(2)*v)",
        "cos(w-u)*cos(sqrt(2)*v)",
    ]
    .iter()
    .map(|c| format!("{s}*{c}"))
    .collect();
    let lattice = vec![2.0 * PI, SQRT_2 * PI, 2.0 * PI];
    let domain = [(0.0, lattice[0]), (0.0, lattice[1]), (0.0, lattice[2])];
    let spec = spec_from("anti_invariant_torus", &["u", "v", "w"], &comps, &domain, &[true, true, true])
        .expect("catalog text parses");
    let expected = Expected {
        h_norm: cite(1.0 / 3.0, "constant mean curvature |H| = 1/3"),
        a_squared: cite(7.0, "flat metric and the Gauss equation: |A|² = m(m-1) + m²|H|²"),
        scalar_curvature: cite(0.0, "flat torus"),
        lambda_p: cite(2.0, "2-type with eigenvalues 2 and 4"),
        lambda_q: cite(4.0, "2-type with eigenvalues 2 and 4"),
        center_norm: cite(0.0, "every component has zero mean over the lattice"),
        parallel_h: cite(true, "the mean curvature vector field is parallel"),
        pseudo_umbilical: cite(false, "A_H is not a multiple of the identity"),
        mass_symmetric: cite(true, "every component has zero mean over the lattice"),
        cmc: cite(true, "constant mean curvature |H| = 1/3"),
        biharmonic: cite(true, "proper biharmonic anti-invariant immersion"),
        order: cite([2, 4], "[2, 4]-order immersion"),
    };
    CatalogEntry {
        name: "anti_invariant_torus".into(),
        description: "flat anti-invariant 3-torus in S^5 (double cover of its image)".into(),
        spec,
        expected,
        lattice: Some(lattice),
        compact: true,
        params: Vec::new(),
    }
}

/// Non-CMC control: `φ = (cos h · n, sin h)` with `h = π/4 + ε cos v` and
/// `n` the unit 2-sphere in polar coordinates.
pub fn make_perturbed_graph(epsilon: f64) -> CatalogEntry {
    let h = format!("(pi/4 + {}*cos(v))", lit(epsilon));
    let mut comps = round_sphere(&format!("cos{h}"), &["u", "v"]);
    comps.push(format!("sin{h}"));
    let (domain, periodic) = polar_domain(2);
    let spec = spec_from("perturbed_graph", &["u", "v"], &comps, &domain, &periodic).expect("catalog text parses");
    let flat = epsilon == 0.0;
    let expected = Expected {
        cmc: cite(flat, "|H| varies with v unless ε = 0"),
        biharmonic: cite(flat, "built to violate constant mean curvature"),
        ..Expected::default()
    };
    CatalogEntry {
        name: "perturbed_graph".into(),
        description: format!("graph over S^2 at height π/4 + {epsilon} cos v in S^3"),
        spec,
        expected,
        lattice: None,
        compact: true,
        params: vec![("epsilon".into(), epsilon)],
    }
}

/// The equator `S²(1)` of `S³(1/√2)`, which sits in `S⁴` as a small hypersphere.
pub fn make_composed_equator() -> CatalogEntry {
    let mut comps = round_sphere("(1/sqrt(2))", &["u", "v"]);
    comps.push("0".into());
    comps.push("(1/sqrt(2))".into());
    let (domain, periodic) = polar_domain(2);
    let spec = spec_from("composed_equator", &["u", "v"], &comps, &domain, &periodic).expect("catalog text parses");
    let expected = Expected {
        h_norm: cite(1.0, "composition of a minimal submanifold with S^{n-1}(1/√2): |H| = 1"),
        a_squared: cite(2.0, "A_H = Id and the other normal direction is totally geodesic"),
        scalar_curvature: cite(4.0, "round sphere of radius 1/√2"),
        lambda_p: cite(4.0, "1-type with eigenvalue 2m"),
        center_norm: cite(FRAC_1_SQRT_2, "center of mass (0, 0, 0, 0, 1/√2)"),
        parallel_h: cite(true, "H is the unit radial field of S³(1/√2)"),
        pseudo_umbilical: cite(true, "pseudo-umbilical: A_H = |H|² Id"),
        mass_symmetric: cite(false, "center of mass (0, 0, 0, 0, 1/√2)"),
        cmc: cite(true, "|H| = 1"),
        biharmonic: cite(true, "proper biharmonic by composition"),
        ..Expected::default()
    };
    CatalogEntry {
        name: "composed_equator".into(),
        description: "equator of S^3(1/√2) ⊂ S^4".into(),
        spec,
        expected,
        lattice: None,
        compact: true,
        params: Vec::new(),
    }
}

/// Build a named entry from `(key, value)` parameters; missing keys take defaults.
pub fn build(name: &str, params: &[(String, f64)]) -> Result<CatalogEntry, CatalogError> {
    let allowed: &[&str] = match name {
        "hypersphere" => &["m", "a"],
        "clifford" => &["m1", "m2", "a1"],
        "perturbed_graph" => &["epsilon"],
        "legendre_torus" | "anti_invariant_torus" | "composed_equator" => &[],
        _ => return Err(CatalogError::UnknownName(name.to_string())),
    };
    if let Some((k, _)) = params.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        return Err(CatalogError::UnknownParam { entry: name.to_string(), param: k.clone() });
    }
    let get = |k: &str, default: f64| params.iter().rev().find(|(n, _)| n == k).map_or(default, |p| p.1);
    let int = |k: &'static str, default: f64| -> Result<usize, CatalogError> {
        let v = get(k, default);
        if v.fract() != 0.0 || v < 0.0 {
            return Err(CatalogError::BadParam { param: k, value: v, reason: "must be a nonnegative integer" });
        }
        Ok(v as usize)
    };
    match name {
        "hypersphere" => make_hypersphere(int("m", 3.0)?, get("a", FRAC_1_SQRT_2)),
        "clifford" => make_clifford(int("m1", 1.0)?, int("m2", 2.0)?, get("a1", FRAC_1_SQRT_2)),
        "perturbed_graph" => Ok(make_perturbed_graph(get("epsilon", 0.2))),
        "legendre_torus" => Ok(make_legendre_torus()),
        "anti_invariant_torus" => Ok(make_anti_invariant_torus()),
        _ => Ok(make_composed_equator()),
    }
}
