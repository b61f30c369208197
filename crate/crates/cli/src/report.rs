//! Report document and its JSON, CSV and text renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// A number rendered with 17 significant digits; non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

/// `x` in scientific notation with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(fmt17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

fn text(x: Num) -> String {
    if x.0.is_finite() {
        fmt17(x.0)
    } else {
        "-".into()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub immersion: Option<ImmersionInfo>,
    pub grid: Option<GridInfo>,
    pub tolerances: ToleranceInfo,
    pub invariants: Option<Invariants>,
    pub checks: Vec<CheckEntry>,
    /// Catalog closed forms against measured values.
    pub expectations: Vec<ExpectationEntry>,
    pub spectral: Option<SpectralInfo>,
    pub gates: Option<GatesInfo>,
    pub scan: Option<ScanInfo>,
    pub failures: Vec<FailureInfo>,
    pub summary: Summary,
}

#[derive(Debug, Clone, Serialize)]
pub struct ImmersionInfo {
    pub name: String,
    pub source: &'static str,
    pub description: String,
    pub m: usize,
    pub sphere_dim: usize,
    pub codim: usize,
    pub compact: bool,
    pub params: BTreeMap<String, Num>,
    pub parameters: Vec<String>,
    pub components: Vec<String>,
    pub domain: Vec<[Num; 2]>,
    pub periodic: Vec<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridInfo {
    pub points_per_dim: usize,
    pub offset: Num,
    pub quadrature_points: usize,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ToleranceInfo {
    pub constraint: Num,
    pub sphere_abort: Num,
    pub residual: Num,
    pub max_condition: Num,
    pub spectral: Num,
    pub conditioning: Num,
    pub mass: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct Invariants {
    /// `[min, max]` over the grid.
    pub h_norm: [Num; 2],
    pub h_mean: Num,
    pub a_squared: [Num; 2],
    pub scalar_curvature: [Num; 2],
    pub nabla_perp_h_max: Num,
    pub pseudo_umbilical_max: Num,
    pub parallel_h: bool,
    pub cmc: bool,
    pub minimal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub name: String,
    /// `pass`, `fail` or `not-applicable`
    pub verdict: String,
    pub reason: Option<String>,
    pub max: Num,
    pub mean: Num,
    pub tolerance: Num,
    pub points: usize,
    pub errors: usize,
    pub extra: BTreeMap<String, Num>,
    pub expected: Option<String>,
    pub expectation_met: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Quantity {
    Number(Num),
    Flag(bool),
    Order(Vec<usize>),
}

impl Quantity {
    fn render(&self) -> String {
        match self {
            Quantity::Number(x) => text(*x),
            Quantity::Flag(b) => b.to_string(),
            Quantity::Order(o) => format!("{o:?}"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpectationEntry {
    pub quantity: String,
    pub expected: Quantity,
    /// For pointwise quantities, the grid value farthest from the expectation.
    pub measured: Quantity,
    pub agrees: bool,
    pub source: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralInfo {
    pub chen_type: String,
    pub lambda_p: Num,
    pub lambda_q: Num,
    pub residual: Num,
    pub one_type_residual: Num,
    pub two_type_residual: Option<Num>,
    pub center: Vec<Num>,
    pub center_norm: Num,
    pub mass_symmetric: bool,
    /// `null` when unknown.
    pub order: Option<Vec<usize>>,
    pub order_route: Option<String>,
    pub formal: bool,
    pub type_theorem: TypeTheoremInfo,
}

#[derive(Debug, Clone, Serialize)]
pub struct TypeTheoremInfo {
    pub biharmonic: bool,
    pub one_type_branch: bool,
    pub two_type_branch: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct GatesInfo {
    pub proper_biharmonic_cmc: bool,
    pub mean_range: MeanRangeInfo,
    pub pinching: Option<PinchingInfo>,
    pub spectral_gap: Option<GapInfo>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeanRangeInfo {
    pub h_norm: Num,
    pub verdict: String,
    pub model: Option<String>,
    pub rule: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct PinchingInfo {
    pub branch: String,
    pub detail: Option<String>,
    pub c_squared: Option<Num>,
    pub r: Num,
    pub b2: Num,
    pub lower: Num,
    pub upper: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapInfo {
    pub lambda1: Num,
    pub ricci: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanInfo {
    pub family: String,
    pub a_min: Num,
    pub a_max: Num,
    pub step: Num,
    pub quadrature_points: usize,
    pub sample_points: usize,
    pub rows: Vec<ScanRowInfo>,
    pub critical_brackets: Vec<[Num; 2]>,
    pub residual_brackets: Vec<[Num; 2]>,
    pub minimal_brackets: Vec<[Num; 2]>,
    /// A single critical bracket of `Area_II` meets the single residual zero.
    pub joint: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRowInfo {
    pub a: Num,
    pub residual_normal: Num,
    pub residual_tangent: Num,
    pub area_ii: Num,
    pub d_area_ii: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct FailureInfo {
    pub point: Vec<Num>,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub not_applicable: usize,
    pub unmet_expectations: usize,
    pub exit_code: i32,
}

impl Summary {
    pub fn from_checks(checks: &[CheckEntry]) -> Summary {
        let count = |label: &str| checks.iter().filter(|c| c.verdict == label).count();
        let unmet = checks.iter().filter(|c| !c.expectation_met).count();
        Summary {
            passed: count("pass"),
            failed: count("fail"),
            not_applicable: count("not-applicable"),
            unmet_expectations: unmet,
            exit_code: if unmet == 0 { crate::run::EXIT_PASS } else { crate::run::EXIT_FAIL },
        }
    }
}

pub fn to_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub const CSV_HEADER: &str = "a,residual_normal,residual_tangent,area_II,d_area_II";

pub fn scan_csv(scan: &ScanInfo) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &scan.rows {
        let cells = [r.a, r.residual_normal, r.residual_tangent, r.area_ii, r.d_area_ii].map(|x| {
            if x.0.is_finite() {
                fmt17(x.0)
            } else {
                String::new()
            }
        });
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Scan table when present, else one row per check.
pub fn to_csv(report: &Report) -> String {
    if let (Some(scan), "scan") = (&report.scan, report.command) {
        return scan_csv(scan);
    }
    let mut out = String::from("check,verdict,max,mean,tolerance,expectation_met\n");
    for c in &report.checks {
        let n = |x: Num| if x.0.is_finite() { fmt17(x.0) } else { String::new() };
        let _ = writeln!(out, "{},{},{},{},{},{}", c.name, c.verdict, n(c.max), n(c.mean), n(c.tolerance), c.expectation_met);
    }
    out
}

pub fn to_text(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", report.tool, report.version, report.command);
    if let Some(im) = &report.immersion {
        let _ = writeln!(out, "immersion: {} [{}], M^{} in S^{}, compact = {}", im.description, im.source, im.m, im.sphere_dim, im.compact);
    }
    if let Some(g) = &report.grid {
        let _ = writeln!(out, "grid: {} points ({} per axis, offset {})", g.points, g.points_per_dim, text(g.offset));
    }
    if let Some(inv) = &report.invariants {
        let _ = writeln!(
            out,
            "|H| in [{}, {}], |A|² in [{}, {}], s in [{}, {}]",
            text(inv.h_norm[0]),
            text(inv.h_norm[1]),
            text(inv.a_squared[0]),
            text(inv.a_squared[1]),
            text(inv.scalar_curvature[0]),
            text(inv.scalar_curvature[1])
        );
    }
    let _ = writeln!(out, "checks:");
    for c in &report.checks {
        let mark = if c.expectation_met { " " } else { "!" };
        let _ = write!(out, "{mark} {:<26} {:<15} max {}", c.name, c.verdict, text(c.max));
        if let Some(why) = &c.reason {
            let _ = write!(out, "  ({why})");
        }
        out.push('\n');
    }
    if !report.expectations.is_empty() {
        let _ = writeln!(out, "catalog table:");
        for e in &report.expectations {
            let mark = if e.agrees { " " } else { "!" };
            let _ = writeln!(out, "{mark} {:<18} expected {:<24} measured {}", e.quantity, e.expected.render(), e.measured.render());
        }
    }
    if let Some(sp) = &report.spectral {
        let _ = writeln!(
            out,
            "spectral: {} λ = ({}, {}), residual {}, |φ₀| = {}, order {}",
            sp.chen_type,
            text(sp.lambda_p),
            text(sp.lambda_q),
            text(sp.residual),
            text(sp.center_norm),
            sp.order.as_ref().map_or("unknown".to_string(), |o| format!("{o:?}"))
        );
    }
    if let Some(g) = &report.gates {
        let _ = writeln!(out, "mean range: {} ({})", g.mean_range.verdict, g.mean_range.rule);
        if let Some(p) = &g.pinching {
            let _ = writeln!(out, "pinching: {} (r = {}, |B|² = {})", p.branch, text(p.r), text(p.b2));
        }
    }
    if let Some(scan) = &report.scan {
        let _ = writeln!(out, "Area_II scan of {}:", scan.family);
        let _ = writeln!(out, "{CSV_HEADER}");
        out.push_str(&scan_csv(scan).lines().skip(1).collect::<Vec<_>>().join("\n"));
        out.push('\n');
        let b = |v: &[[Num; 2]]| v.iter().map(|[x, y]| format!("[{}, {}]", x.0, y.0)).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "critical: {}  residual zero: {}  joint: {}", b(&scan.critical_brackets), b(&scan.residual_brackets), scan.joint);
    }
    if !report.failures.is_empty() {
        let _ = writeln!(out, "{} point(s) failed to evaluate", report.failures.len());
    }
    let s = &report.summary;
    let _ = writeln!(
        out,
        "summary: {} pass, {} fail, {} not applicable, {} unmet expectation(s); exit {}",
        s.passed, s.failed, s.not_applicable, s.unmet_expectations, s.exit_code
    );
    out
}

pub fn render(report: &Report, format: crate::config::Format) -> String {
    match format {
        crate::config::Format::Json => to_json(report),
        crate::config::Format::Csv => to_csv(report),
        crate::config::Format::Text => to_text(report),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_seventeen_digits() {
        assert_eq!(fmt17(1.0 / 3.0), "3.3333333333333331e-1");
        assert_eq!(serde_json::to_string(&Num(2.0)).unwrap(), "2.0000000000000000e0");
        assert_eq!(serde_json::to_string(&Num(f64::NAN)).unwrap(), "null");
        let back: f64 = serde_json::from_str(&serde_json::to_string(&Num(0.1 + 0.2)).unwrap()).unwrap();
        assert_eq!(back, 0.1 + 0.2);
    }
}
