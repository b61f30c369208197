//! Characterization systems and identities of biharmonic submanifolds of
//! spheres, evaluated over sample grids.

mod gates;
mod scan;

pub use gates::{
    li_gate, li_gate_from_mean, mean_range_gate, spectral_gap_bounds, GapBounds, GateError, LiBranch, LiOutcome,
    RangeOutcome, RangeVerdict,
};
pub use scan::{area_ii, area_ii_scan, AreaScan, ScanError, ScanRow};

use nalgebra::DVector;

use crate::dsl::ImmersionSpec;
use crate::geometry::{evaluate_point, map_grid, GeometryError, PointEval};
use crate::grid::Grid;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable(String),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable(_) => "not-applicable",
        }
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail)
    }
}

/// Grid-level context recorded with every report.
#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub m: usize,
    /// Dimension of the target sphere.
    pub n: usize,
    pub points: usize,
    pub h_min: f64,
    pub h_max: f64,
    pub h_mean: f64,
    pub compact: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointFailure {
    pub point: Vec<f64>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    /// One residual per successfully evaluated point, in grid order.
    pub residuals: Vec<f64>,
    pub max: f64,
    pub mean: f64,
    pub verdict: Verdict,
    pub tolerance: f64,
    pub metadata: Metadata,
    pub errors: Vec<PointFailure>,
    /// Named auxiliary maxima (e.g. each trace placement separately).
    pub extra: Vec<(String, f64)>,
}

/// Pointwise evaluations of one immersion on one grid, shared by every check.
#[derive(Debug, Clone)]
pub struct Survey {
    pub points: Vec<Vec<f64>>,
    pub evals: Vec<Result<PointEval, GeometryError>>,
    pub m: usize,
    pub n: usize,
    pub compact: bool,
}

impl Survey {
    /// Evaluate every grid point in parallel; results keep grid order.
    pub fn new(spec: &ImmersionSpec, grid: &Grid, tol: &Tolerances, compact: bool) -> Survey {
        let evals = map_grid(grid, |p| evaluate_point(spec, p, tol));
        Survey { points: grid.points.clone(), evals, m: spec.dim(), n: spec.sphere_dim(), compact }
    }

    pub fn ok(&self) -> impl Iterator<Item = &PointEval> {
        self.evals.iter().filter_map(|e| e.as_ref().ok())
    }

    pub fn failures(&self) -> Vec<PointFailure> {
        self.points
            .iter()
            .zip(&self.evals)
            .filter_map(|(p, e)| e.as_ref().err().map(|e| PointFailure { point: p.clone(), message: e.to_string() }))
            .collect()
    }

    pub fn error_fraction(&self) -> f64 {
        if self.evals.is_empty() {
            return 0.0;
        }
        self.evals.iter().filter(|e| e.is_err()).count() as f64 / self.evals.len() as f64
    }

    pub fn metadata(&self) -> Metadata {
        let h: Vec<f64> = self.ok().map(|e| e.h_norm).collect();
        let (h_min, h_max) = h.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        let h_mean = if h.is_empty() { f64::NAN } else { h.iter().sum::<f64>() / h.len() as f64 };
        Metadata { m: self.m, n: self.n, points: self.points.len(), h_min, h_max, h_mean, compact: self.compact }
    }

    fn max_of(&self, f: impl Fn(&PointEval) -> f64) -> f64 {
        self.ok().map(f).fold(0.0, f64::max)
    }

    /// `|∇⊥H| < tol` everywhere.
    pub fn parallel_h(&self, tol: f64) -> bool {
        self.max_of(|e| e.nabla_perp_h) < tol
    }

    /// `max |H| - min |H| < tol`.
    pub fn cmc(&self, tol: f64) -> bool {
        let md = self.metadata();
        md.h_max - md.h_min < tol
    }

    pub fn minimal(&self, tol: f64) -> bool {
        self.max_of(|e| e.h_norm) < tol
    }

    /// Both general residuals below `tol` at every point.
    pub fn biharmonic(&self, tol: f64) -> bool {
        self.evals.iter().all(|e| e.is_ok())
            && self.max_of(|e| e.normal_residual.norm()) < tol
            && self.max_of(|e| e.tangent_residual.norm()) < tol
    }

    /// A report from one residual per point; `applicable` gives the
    /// not-applicable reason, if any.
    pub fn report(
        &self,
        name: &str,
        tolerance: f64,
        applicable: Option<String>,
        f: impl Fn(&PointEval) -> f64,
    ) -> CheckReport {
        let residuals: Vec<f64> = self.ok().map(f).collect();
        let max = residuals.iter().fold(0.0f64, |a, &x| if a.is_nan() || x.is_nan() { f64::NAN } else { a.max(x) });
        let mean = if residuals.is_empty() { f64::NAN } else { residuals.iter().sum::<f64>() / residuals.len() as f64 };
        let errors = self.failures();
        let verdict = match applicable {
            Some(reason) => Verdict::NotApplicable(reason),
            None if errors.is_empty() && !residuals.is_empty() && max < tolerance => Verdict::Pass,
            None => Verdict::Fail,
        };
        CheckReport {
            name: name.to_string(),
            residuals,
            max,
            mean,
            verdict,
            tolerance,
            metadata: self.metadata(),
            errors,
            extra: Vec::new(),
        }
    }
}

fn norm(v: &DVector<f64>) -> f64 {
    v.norm()
}

/// `|τ₂|` at every point.
pub fn check_bitension(s: &Survey, tol: &Tolerances) -> CheckReport {
    s.report("bitension", tol.residual, None, |e| norm(&e.tau2))
}

/// Normal and tangent parts of the general characterization system.
pub fn check_general(s: &Survey, tol: &Tolerances) -> [CheckReport; 2] {
    [
        s.report("general_normal", tol.residual, None, |e| norm(&e.normal_residual)),
        s.report("general_tangent", tol.residual, None, |e| norm(&e.tangent_residual)),
    ]
}

fn not_parallel(s: &Survey, tol: &Tolerances) -> Option<String> {
    (!s.parallel_h(tol.residual)).then(|| "mean curvature vector field is not parallel".to_string())
}

/// `trace B(·, A_H ·) - mH` for parallel mean curvature.
pub fn check_parallel_h(s: &Survey, tol: &Tolerances) -> CheckReport {
    let m = s.m as f64;
    s.report("parallel_h", tol.residual, not_parallel(s, tol), |e| {
        (trace_b_ah(e) - &e.frame.mean_curvature * m).norm()
    })
}

fn trace_b_ah(e: &PointEval) -> DVector<f64> {
    let f = &e.frame;
    let m = f.dim();
    let a = f.shape_coords(&f.mean_curvature);
    let mut out = DVector::zeros(f.ambient_dim());
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                out.axpy(f.g_inv[(i, j)] * a[(k, j)], &f.sff[i][k], 1.0);
            }
        }
    }
    out
}

fn hypersurface_gate(s: &Survey, tol: &Tolerances) -> Option<String> {
    if s.n != s.m + 1 {
        Some(format!("codimension {} (hypersurfaces only)", s.n - s.m))
    } else if s.minimal(tol.residual) {
        Some("|H| = 0".to_string())
    } else {
        None
    }
}

/// Normal and tangent displays of the hypersurface system.
pub fn check_hypersurface(s: &Survey, tol: &Tolerances) -> [CheckReport; 2] {
    let na = hypersurface_gate(s, tol);
    let hs = |e: &PointEval| e.hypersurface.clone();
    [
        s.report("hypersurface_normal", tol.residual, na.clone(), |e| hs(e).map_or(f64::NAN, |h| h.normal.norm())),
        s.report("hypersurface_tangent", tol.residual, na, |e| {
            hs(e).and_then(|h| h.tangent).map_or(f64::NAN, |t| t.norm())
        }),
    ]
}

/// `| |A|² - m |` for constant mean curvature hypersurfaces.
pub fn check_cmc_hypersurface(s: &Survey, tol: &Tolerances) -> CheckReport {
    let na = hypersurface_gate(s, tol)
        .or_else(|| (!s.cmc(tol.residual)).then(|| "|H| is not constant on the grid".to_string()));
    s.report("cmc_hypersurface", tol.residual, na, |e| {
        e.hypersurface.as_ref().map_or(f64::NAN, |h| h.cmc_defect.abs())
    })
}

fn identity_gate(s: &Survey, tol: &Tolerances) -> Option<String> {
    not_parallel(s, tol).or_else(|| {
        (!s.biharmonic(tol.residual)).then(|| "not biharmonic on the grid; residuals are informational".to_string())
    })
}

/// Identities for parallel mean curvature: `|A_H|² = m|H|²`,
/// `trace ∇A_H = 0` and `<trace (∇⊥B)(X, ·, A_H ·), H> = 0`.
pub fn check_prop31(s: &Survey, tol: &Tolerances) -> [CheckReport; 3] {
    let na = identity_gate(s, tol);
    let mut third = s.report("parallel_nabla_b", tol.residual, na.clone(), |e| {
        e.prop31.nabla_b_first.max(e.prop31.nabla_b_second)
    });
    third.extra = vec![
        ("first_argument".into(), s.max_of(|e| e.prop31.nabla_b_first)),
        ("second_argument".into(), s.max_of(|e| e.prop31.nabla_b_second)),
    ];
    [
        s.report("parallel_ah_norm", tol.residual, na.clone(), |e| e.prop31.ah_norm.abs()),
        s.report("parallel_trace_nabla_ah", tol.residual, na, |e| e.prop31.trace_nabla_ah),
        third,
    ]
}

/// Eigenbasis identities of `A_H` for parallel mean curvature.
pub fn check_prop32(s: &Survey, tol: &Tolerances) -> [CheckReport; 3] {
    let na = identity_gate(s, tol);
    let dev = s.max_of(|e| e.prop32.basis_deviation);
    let mut out = [
        s.report("eigen_trace", tol.residual, na.clone(), |e| e.prop32.trace.abs().max(e.prop32.trace_sq.abs())),
        s.report("eigen_mixed", tol.residual, na.clone(), |e| e.prop32.mixed.abs()),
        s.report("eigen_product", tol.residual, na, |e| e.prop32.product.abs()),
    ];
    for r in out.iter_mut().skip(1) {
        r.extra.push(("basis_deviation".into(), dev));
        if dev >= tol.residual && r.verdict == Verdict::Pass {
            r.verdict = Verdict::Fail;
        }
    }
    out
}

/// `s = m²(1+|H|²) - 2m` for proper biharmonic constant mean curvature hypersurfaces.
pub fn check_scalar_curvature(s: &Survey, tol: &Tolerances) -> CheckReport {
    let na = hypersurface_gate(s, tol)
        .or_else(|| (!s.cmc(tol.residual)).then(|| "|H| is not constant on the grid".to_string()))
        .or_else(|| (!s.biharmonic(tol.residual)).then(|| "not biharmonic on the grid".to_string()));
    let m = s.m as f64;
    s.report("scalar_curvature", tol.residual, na, |e| {
        (e.scalar_curvature - (m * m * (1.0 + e.h_norm * e.h_norm) - 2.0 * m)).abs()
    })
}

/// `|A_H - |H|² Id|`.
pub fn check_pseudo_umbilical(s: &Survey, tol: &Tolerances) -> CheckReport {
    s.report("pseudo_umbilical", tol.residual, None, |e| e.pseudo_umbilical)
}

/// Every check of this module, in a fixed order.
pub fn run_all(s: &Survey, tol: &Tolerances) -> Vec<CheckReport> {
    let mut out = vec![check_bitension(s, tol)];
    out.extend(check_general(s, tol));
    out.push(check_parallel_h(s, tol));
    out.extend(check_hypersurface(s, tol));
    out.push(check_cmc_hypersurface(s, tol));
    out.extend(check_prop31(s, tol));
    out.extend(check_prop32(s, tol));
    out.push(check_scalar_curvature(s, tol));
    out
}
