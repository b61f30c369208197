//! Orchestration of a configured run into a [`Report`].

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use bitension_core::biharmonic::{self as bh, AreaScan, CheckReport, RangeVerdict, ScanError, Survey, Verdict};
use bitension_core::catalog::CatalogEntry;
use bitension_core::spectral::{self, ChenType, SpectralEstimate, SpectralError, TypeCheck};
use bitension_core::{Grid, Tolerances};
use thiserror::Error;

use crate::config::{ConfigError, Immersion, RunConfig, ScanConfig};
use crate::report::*;

/// Largest fraction of grid points allowed to fail before the run aborts.
pub const MAX_ERROR_FRACTION: f64 = 0.1;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical abort: {0}")]
    Abort(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Abort(_) => EXIT_ABORT,
        }
    }
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_ABORT: i32 = 3;

fn spectral_error(e: SpectralError) -> RunError {
    RunError::Abort(format!("spectral analysis: {e}"))
}

fn scan_error(e: ScanError) -> RunError {
    match e {
        ScanError::BadRange { .. } | ScanError::Catalog { .. } | ScanError::Codimension(_) => {
            RunError::Config(ConfigError::Invalid(format!("scan: {e}")))
        }
        other => RunError::Abort(format!("scan: {other}")),
    }
}

fn immersion_info(im: &Immersion) -> ImmersionInfo {
    let spec = &im.spec;
    ImmersionInfo {
        name: spec.name().to_string(),
        source: if im.entry.is_some() { "catalog" } else { "dsl" },
        description: im.description.clone(),
        m: spec.dim(),
        sphere_dim: spec.sphere_dim(),
        codim: spec.codim(),
        compact: im.compact,
        params: im.params.iter().map(|(k, v)| (k.clone(), Num(*v))).collect(),
        parameters: spec.params().to_vec(),
        components: spec.sources().to_vec(),
        domain: spec.domain().iter().map(|&(lo, hi)| [Num(lo), Num(hi)]).collect(),
        periodic: spec.periodic().to_vec(),
    }
}

fn tolerance_info(t: &Tolerances) -> ToleranceInfo {
    ToleranceInfo {
        constraint: Num(t.constraint),
        sphere_abort: Num(t.sphere_abort),
        residual: Num(t.residual),
        max_condition: Num(t.max_condition),
        spectral: Num(t.spectral),
        conditioning: Num(t.conditioning),
        mass: Num(t.mass),
    }
}

fn range(s: &Survey, f: impl Fn(&bitension_core::PointEval) -> f64) -> [Num; 2] {
    let (lo, hi) = s.ok().map(&f).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    [Num(lo), Num(hi)]
}

fn invariants(s: &Survey, tol: f64) -> Invariants {
    let md = s.metadata();
    Invariants {
        h_norm: range(s, |e| e.h_norm),
        h_mean: Num(md.h_mean),
        a_squared: range(s, |e| e.a_squared),
        scalar_curvature: range(s, |e| e.scalar_curvature),
        nabla_perp_h_max: Num(s.ok().map(|e| e.nabla_perp_h).fold(0.0, f64::max)),
        pseudo_umbilical_max: Num(s.ok().map(|e| e.pseudo_umbilical).fold(0.0, f64::max)),
        parallel_h: s.parallel_h(tol),
        cmc: s.cmc(tol),
        minimal: s.minimal(tol),
    }
}

fn check_entry(r: &CheckReport) -> CheckEntry {
    let (verdict, reason) = match &r.verdict {
        Verdict::NotApplicable(why) => ("not-applicable", Some(why.clone())),
        v => (v.label(), None),
    };
    CheckEntry {
        name: r.name.clone(),
        verdict: verdict.to_string(),
        reason,
        max: Num(r.max),
        mean: Num(r.mean),
        tolerance: Num(r.tolerance),
        points: r.residuals.len(),
        errors: r.errors.len(),
        extra: r.extra.iter().map(|(k, v)| (k.clone(), Num(*v))).collect(),
        expected: None,
        expectation_met: true,
    }
}

fn simple_entry(name: &str, verdict: &Verdict, tolerance: f64) -> CheckEntry {
    let (label, reason) = match verdict {
        Verdict::NotApplicable(why) => ("not-applicable", Some(why.clone())),
        v => (v.label(), None),
    };
    CheckEntry {
        name: name.to_string(),
        verdict: label.to_string(),
        reason,
        max: Num(f64::NAN),
        mean: Num(f64::NAN),
        tolerance: Num(tolerance),
        points: 0,
        errors: 0,
        extra: BTreeMap::new(),
        expected: None,
        expectation_met: true,
    }
}

fn order_of(entry: Option<&CatalogEntry>, est: &SpectralEstimate) -> Result<(Option<[usize; 2]>, Option<&'static str>), RunError> {
    if est.kind != ChenType::TwoType {
        return Ok((None, None));
    }
    let Some(entry) = entry else { return Ok((None, None)) };
    if let Some(lattice) = &entry.lattice {
        return match spectral::torus_order(lattice, est.lambda_p, est.lambda_q) {
            Ok(o) => Ok((Some(o), Some("flat-torus lattice spectrum"))),
            Err(SpectralError::NotInSpectrum(_)) => Ok((None, None)),
            Err(e) => Err(spectral_error(e)),
        };
    }
    let param = |k: &str| entry.params.iter().find(|(n, _)| n == k).map(|p| p.1);
    if entry.name == "clifford" && param("a1").is_some_and(|a| (a - FRAC_1_SQRT_2).abs() < 1e-12) {
        let (m1, m2) = (param("m1").unwrap_or(0.0) as usize, param("m2").unwrap_or(0.0) as usize);
        if m1 != m2 {
            let o = spectral::clifford_order(m1, m2).map_err(spectral_error)?;
            return Ok((o.criterion, o.criterion.map(|_| "product-sphere criterion m_large ≤ 2(m_small + 1)")));
        }
    }
    Ok((None, None))
}

fn spectral_info(est: &SpectralEstimate, com_formal: bool, order: Option<[usize; 2]>, route: Option<&'static str>, tc: &TypeCheck) -> SpectralInfo {
    let center_norm = est.center.iter().map(|x| x * x).sum::<f64>().sqrt();
    SpectralInfo {
        chen_type: est.kind.label().to_string(),
        lambda_p: Num(est.lambda_p),
        lambda_q: Num(est.lambda_q),
        residual: Num(est.residual),
        one_type_residual: Num(est.one_type_residual),
        two_type_residual: est.two_type_residual.map(Num),
        center: est.center.iter().map(|&x| Num(x)).collect(),
        center_norm: Num(center_norm),
        mass_symmetric: est.mass_symmetric,
        order: order.map(|o| o.to_vec()),
        order_route: route.map(str::to_string),
        formal: est.formal || com_formal,
        type_theorem: TypeTheoremInfo {
            biharmonic: tc.biharmonic,
            one_type_branch: tc.one_type_branch,
            two_type_branch: tc.two_type_branch,
            detail: tc.detail.clone(),
        },
    }
}

fn gates(s: &Survey, tol: &Tolerances) -> (GatesInfo, Verdict) {
    let inv = invariants(s, tol.residual);
    let m = s.m;
    let codim = s.n - s.m;
    let h = inv.h_mean.0;
    let proper_cmc = s.biharmonic(tol.residual) && inv.cmc && !inv.minimal;
    let range = bh::mean_range_gate(m, h, codim, s.compact);
    let mean_range = MeanRangeInfo {
        h_norm: Num(h),
        verdict: match &range.verdict {
            RangeVerdict::Admissible => "admissible",
            RangeVerdict::Excluded => "excluded",
            RangeVerdict::BoundaryCase(_) => "boundary-case",
        }
        .to_string(),
        model: match &range.verdict {
            RangeVerdict::BoundaryCase(label) => Some(label.clone()),
            _ => None,
        },
        rule: range.rule.to_string(),
    };
    let pinching = (codim == 1 && m >= 3 && inv.cmc).then(|| {
        let s_mean = s.ok().map(|e| e.scalar_curvature).sum::<f64>() / s.ok().count().max(1) as f64;
        let b2 = s.ok().map(|e| e.a_squared).sum::<f64>() / s.ok().count().max(1) as f64;
        let r = s_mean / (m * (m - 1)) as f64;
        let o = bh::li_gate(m, r, b2).expect("m ≥ 3");
        PinchingInfo {
            branch: o.branch.label().to_string(),
            detail: match &o.branch {
                bh::LiBranch::HypothesesFail(why) => Some(why.clone()),
                _ => None,
            },
            c_squared: match o.branch {
                bh::LiBranch::Clifford { c_squared } => Some(Num(c_squared)),
                _ => None,
            },
            r: Num(o.r),
            b2: Num(o.b2),
            lower: Num(o.lower),
            upper: Num(o.upper),
        }
    });
    let gap = bh::spectral_gap_bounds(m, h).map(|g| GapInfo { lambda1: Num(g.lambda1), ricci: Num(g.ricci) });
    let verdict = if !proper_cmc {
        Verdict::NotApplicable("gates constrain proper biharmonic submanifolds with constant mean curvature".into())
    } else if range.is_admissible() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    (GatesInfo { mean_range, pinching, spectral_gap: gap, proper_biharmonic_cmc: proper_cmc }, verdict)
}

fn compare_table(
    entry: &CatalogEntry,
    s: &Survey,
    est: Option<&SpectralEstimate>,
    order: Option<[usize; 2]>,
    tol: &Tolerances,
) -> Vec<ExpectationEntry> {
    let ex = &entry.expected;
    let mut out = Vec::new();
    let mut scalar = |quantity: &str, c: &Option<bitension_core::catalog::Cited<f64>>, measured: Option<f64>, slack: f64| {
        if let (Some(c), Some(m)) = (c, measured) {
            out.push(ExpectationEntry {
                quantity: quantity.to_string(),
                expected: Quantity::Number(Num(c.value)),
                measured: Quantity::Number(Num(m)),
                agrees: (m - c.value).abs() <= slack,
                source: c.source.to_string(),
            });
        }
    };
    let worst = |f: &dyn Fn(&bitension_core::PointEval) -> f64, v: f64| {
        s.ok().map(f).fold(v, |w, x| if (x - v).abs() > (w - v).abs() { x } else { w })
    };
    if let Some(c) = &ex.h_norm {
        scalar("h_norm", &ex.h_norm, Some(worst(&|e| e.h_norm, c.value)), tol.residual);
    }
    if let Some(c) = &ex.a_squared {
        scalar("a_squared", &ex.a_squared, Some(worst(&|e| e.a_squared, c.value)), tol.residual);
    }
    if let Some(c) = &ex.scalar_curvature {
        scalar("scalar_curvature", &ex.scalar_curvature, Some(worst(&|e| e.scalar_curvature, c.value)), tol.residual);
    }
    if let Some(est) = est {
        let fitted = est.kind != ChenType::Indeterminate;
        scalar("lambda_p", &ex.lambda_p, fitted.then_some(est.lambda_p), tol.spectral);
        scalar("lambda_q", &ex.lambda_q, (est.kind == ChenType::TwoType).then_some(est.lambda_q), tol.spectral);
        let norm = est.center.iter().map(|x| x * x).sum::<f64>().sqrt();
        scalar("center_norm", &ex.center_norm, Some(norm), tol.mass);
    }
    let mut flag = |quantity: &str, c: &Option<bitension_core::catalog::Cited<bool>>, measured: Option<bool>| {
        if let (Some(c), Some(m)) = (c, measured) {
            out.push(ExpectationEntry {
                quantity: quantity.to_string(),
                expected: Quantity::Flag(c.value),
                measured: Quantity::Flag(m),
                agrees: m == c.value,
                source: c.source.to_string(),
            });
        }
    };
    flag("parallel_h", &ex.parallel_h, Some(s.parallel_h(tol.residual)));
    flag("pseudo_umbilical", &ex.pseudo_umbilical, Some(s.ok().all(|e| e.pseudo_umbilical < tol.residual)));
    flag("cmc", &ex.cmc, Some(s.cmc(tol.residual)));
    flag("biharmonic", &ex.biharmonic, Some(s.biharmonic(tol.residual)));
    flag("mass_symmetric", &ex.mass_symmetric, est.map(|e| e.mass_symmetric));
    if let (Some(c), Some(o)) = (&ex.order, order) {
        out.push(ExpectationEntry {
            quantity: "order".into(),
            expected: Quantity::Order(c.value.to_vec()),
            measured: Quantity::Order(o.to_vec()),
            agrees: o == c.value,
            source: c.source.to_string(),
        });
    }
    out
}

fn scan_info(scan: &AreaScan, cfg: &ScanConfig) -> ScanInfo {
    let family = match scan.family {
        bitension_core::Family::Hypersphere { m } => format!("hypersphere(m={m})"),
        bitension_core::Family::Clifford { m1, m2 } => format!("clifford(m1={m1}, m2={m2})"),
    };
    let pairs = |b: &[(f64, f64)]| b.iter().map(|&(x, y)| [Num(x), Num(y)]).collect();
    ScanInfo {
        family,
        a_min: Num(cfg.a_min),
        a_max: Num(cfg.a_max),
        step: Num(cfg.step),
        quadrature_points: cfg.quadrature_points,
        sample_points: cfg.sample_points,
        rows: scan
            .rows
            .iter()
            .map(|r| ScanRowInfo {
                a: Num(r.a),
                residual_normal: Num(r.residual_normal),
                residual_tangent: Num(r.residual_tangent),
                area_ii: Num(r.area_ii),
                d_area_ii: Num(r.d_area_ii),
            })
            .collect(),
        critical_brackets: pairs(&scan.critical_brackets),
        residual_brackets: pairs(&scan.residual_brackets),
        minimal_brackets: pairs(&scan.minimal_brackets),
        joint: scan_joint(scan),
    }
}

/// One critical bracket of `Area_II` coinciding with the one zero of the normal residual.
pub fn scan_joint(scan: &AreaScan) -> bool {
    match (&scan.critical_brackets[..], &scan.residual_brackets[..]) {
        ([(a, b)], [(c, d)]) => a - scan.step * 0.5 <= *d && *c <= b + scan.step * 0.5,
        _ => false,
    }
}

pub fn run_scan_only(cfg: &ScanConfig, tol: &Tolerances, offset: f64) -> Result<ScanInfo, RunError> {
    let family = cfg.family()?;
    let scan = bh::area_ii_scan(family, cfg.a_min, cfg.a_max, cfg.step, cfg.quadrature_points, cfg.sample_points, offset, tol)
        .map_err(scan_error)?;
    Ok(scan_info(&scan, cfg))
}

fn header(command: &'static str) -> (&'static str, &'static str, &'static str) {
    ("bitension", env!("CARGO_PKG_VERSION"), command)
}

/// Resolve tolerances from the config and the environment.
pub fn tolerances(cfg: &RunConfig) -> Result<Tolerances, RunError> {
    Ok(cfg.tolerances.resolve(crate::config::env_tolerance()?))
}

/// `verify`: every enabled check on the configured immersion.
pub fn run(cfg: &RunConfig) -> Result<Report, RunError> {
    let tol = tolerances(cfg)?;
    let im = cfg.immersion()?;
    let spec = &im.spec;
    let sample = Grid::sample(spec, cfg.grid.points_per_dim, cfg.grid.offset)
        .map_err(|e| ConfigError::Invalid(format!("grid: {e}")))?;
    spec.validate_sphere(sample.points.iter().map(Vec::as_slice), tol.constraint).map_err(ConfigError::from)?;
    let survey = Survey::new(spec, &sample, &tol, im.compact);
    let fraction = survey.error_fraction();
    if fraction > MAX_ERROR_FRACTION {
        let first = survey.failures().into_iter().next().map(|f| format!(" (first at {:?}: {})", f.point, f.message));
        return Err(RunError::Abort(format!(
            "{:.1}% of {} grid points failed to evaluate{}",
            100.0 * fraction,
            survey.points.len(),
            first.unwrap_or_default()
        )));
    }

    let mut checks: Vec<CheckEntry> = Vec::new();
    let c = &cfg.checks;
    if c.bitension {
        checks.push(check_entry(&bh::check_bitension(&survey, &tol)));
    }
    if c.characterization {
        checks.extend(bh::check_general(&survey, &tol).iter().map(check_entry));
        checks.push(check_entry(&bh::check_parallel_h(&survey, &tol)));
        checks.extend(bh::check_hypersurface(&survey, &tol).iter().map(check_entry));
        checks.push(check_entry(&bh::check_cmc_hypersurface(&survey, &tol)));
    }
    if c.prop31 {
        checks.extend(bh::check_prop31(&survey, &tol).iter().map(check_entry));
    }
    if c.prop32 {
        checks.extend(bh::check_prop32(&survey, &tol).iter().map(check_entry));
    }
    if c.scalar {
        checks.push(check_entry(&bh::check_scalar_curvature(&survey, &tol)));
    }

    let mut spectral_report = None;
    let mut estimate = None;
    let mut order = None;
    if c.spectral {
        let quad = Grid::quadrature(spec, cfg.grid.quadrature_points)
            .map_err(|e| ConfigError::Invalid(format!("grid: {e}")))?;
        let com = spectral::center_of_mass(spec, &quad, &tol).map_err(spectral_error)?;
        let est = spectral::chen_fit_survey(&survey, &com, &tol).map_err(spectral_error)?;
        let tc = spectral::type_theorem_check(&survey, &est, &tol);
        let (o, route) = order_of(im.entry.as_ref(), &est)?;
        let fit_verdict = if est.kind == ChenType::Indeterminate {
            Verdict::NotApplicable("not of type 1 or 2 within the spectral tolerance".into())
        } else {
            Verdict::Pass
        };
        let mut fit = simple_entry("spectral_fit", &fit_verdict, tol.spectral);
        fit.max = Num(est.residual);
        fit.points = survey.ok().count();
        checks.push(fit);
        checks.push(simple_entry("type_theorem", &tc.verdict, tol.residual));
        spectral_report = Some(spectral_info(&est, com.formal, o, route, &tc));
        order = o;
        estimate = Some(est);
    }

    let mut gates_report = None;
    if c.gates {
        let (g, verdict) = gates(&survey, &tol);
        checks.push(simple_entry("gates", &verdict, tol.residual));
        gates_report = Some(g);
    }

    let mut scan_report = None;
    if c.area_ii_scan {
        let scan_cfg = cfg.scan.as_ref().expect("validated");
        let info = run_scan_only(scan_cfg, &tol, cfg.grid.offset)?;
        let verdict = if info.joint { Verdict::Pass } else { Verdict::Fail };
        checks.push(simple_entry("area_ii_scan", &verdict, tol.residual));
        scan_report = Some(info);
    }

    let expectations = match &im.entry {
        Some(entry) => {
            let table = compare_table(entry, &survey, estimate.as_ref(), order, &tol);
            let verdict = if table.iter().all(|e| e.agrees) { Verdict::Pass } else { Verdict::Fail };
            checks.push(simple_entry("catalog_table", &verdict, tol.residual));
            table
        }
        None => Vec::new(),
    };

    for (name, label) in &cfg.expect {
        let entry = checks
            .iter_mut()
            .find(|e| &e.name == name)
            .ok_or_else(|| ConfigError::Invalid(format!("expect.{name}: no such check in this run")))?;
        entry.expected = Some(label.clone());
    }
    for e in &mut checks {
        e.expectation_met = match &e.expected {
            Some(label) => &e.verdict == label,
            None => e.verdict != "fail",
        };
    }

    let failures: Vec<FailureInfo> = survey
        .failures()
        .into_iter()
        .map(|f| FailureInfo { point: f.point.iter().map(|&x| Num(x)).collect(), message: f.message })
        .collect();
    let summary = Summary::from_checks(&checks);
    let (tool, version, command) = header("verify");
    Ok(Report {
        tool,
        version,
        command,
        immersion: Some(immersion_info(&im)),
        grid: Some(GridInfo {
            points_per_dim: cfg.grid.points_per_dim,
            offset: Num(cfg.grid.offset),
            quadrature_points: cfg.grid.quadrature_points,
            points: survey.points.len(),
        }),
        tolerances: tolerance_info(&tol),
        invariants: Some(invariants(&survey, tol.residual)),
        checks,
        expectations,
        spectral: spectral_report,
        gates: gates_report,
        scan: scan_report,
        failures,
        summary,
    })
}

/// `scan`: the `Area_II` family scan alone.
pub fn run_scan(cfg: &RunConfig) -> Result<Report, RunError> {
    let tol = tolerances(cfg)?;
    let scan_cfg = cfg.scan.as_ref().ok_or_else(|| ConfigError::Invalid("the scan command needs a [scan] section".into()))?;
    let info = run_scan_only(scan_cfg, &tol, cfg.grid.offset)?;
    let verdict = if info.joint { Verdict::Pass } else { Verdict::Fail };
    let checks = vec![simple_entry("area_ii_scan", &verdict, tol.residual)];
    let summary = Summary::from_checks(&checks);
    let (tool, version, command) = header("scan");
    Ok(Report {
        tool,
        version,
        command,
        immersion: None,
        grid: None,
        tolerances: tolerance_info(&tol),
        invariants: None,
        checks,
        expectations: Vec::new(),
        spectral: None,
        gates: None,
        scan: Some(info),
        failures: Vec::new(),
        summary,
    })
}
