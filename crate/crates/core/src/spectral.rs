//! Chen-type spectral analysis of the position vector.

use nalgebra::{DVector, Matrix2, Vector2};
use rayon::prelude::*;
use thiserror::Error;

use crate::biharmonic::{Survey, Verdict};
use crate::dsl::ImmersionSpec;
use crate::geometry::{self, frame_at_order, GeometryError, LocalGeometry};
use crate::grid::Grid;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("empty grid")]
    EmptyGrid,
    #[error("eigenvalue {0} is not in the lattice spectrum")]
    NotInSpectrum(f64),
    #[error("lattice periods must be positive and finite")]
    BadLattice,
}

/// `Δφ` and, for `depth = 2`, `Δ²φ` at one point.
pub fn laplace_coords(
    spec: &ImmersionSpec,
    point: &[f64],
    depth: usize,
    tol: &Tolerances,
) -> Result<(DVector<f64>, Option<DVector<f64>>), SpectralError> {
    let local = LocalGeometry::new(spec, point, 2 * depth.clamp(1, 2), tol)?;
    Ok(geometry::laplace_coords(&local, depth)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CenterOfMass {
    pub center: Vec<f64>,
    pub volume: f64,
    /// The domain does not cover a closed manifold; the value depends on the parametrization.
    pub formal: bool,
}

impl CenterOfMass {
    pub fn norm(&self) -> f64 {
        self.center.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// `φ₀ = (1/Vol) ∫ φ v_g` over a quadrature grid.
pub fn center_of_mass(spec: &ImmersionSpec, grid: &Grid, tol: &Tolerances) -> Result<CenterOfMass, SpectralError> {
    if grid.is_empty() {
        return Err(SpectralError::EmptyGrid);
    }
    let parts: Vec<(DVector<f64>, f64)> = grid
        .points
        .par_iter()
        .zip(&grid.weights)
        .map(|(p, w)| {
            let f = frame_at_order(spec, p, 2, tol)?;
            let dv = w * f.volume_element();
            Ok((&f.position * dv, dv))
        })
        .collect::<Result<_, GeometryError>>()?;
    let mut sum = DVector::zeros(spec.ambient_dim());
    let mut volume = 0.0;
    for (v, dv) in &parts {
        sum += v;
        volume += dv;
    }
    let closed = spec.is_closed() || spec.periodic().iter().all(|&p| p);
    Ok(CenterOfMass { center: (sum / volume).iter().copied().collect(), volume, formal: !closed })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChenType {
    OneType,
    TwoType,
    Indeterminate,
}

impl ChenType {
    pub fn label(self) -> &'static str {
        match self {
            ChenType::OneType => "1-type",
            ChenType::TwoType => "2-type",
            ChenType::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEstimate {
    /// Equal to `lambda_q` for 1-type fits.
    pub lambda_p: f64,
    pub lambda_q: f64,
    /// Residual of the accepted model (the 2-type model when indeterminate).
    pub residual: f64,
    /// `max |Δφ - λ(φ - φ₀)|` of the best single-eigenvalue fit.
    pub one_type_residual: f64,
    /// `max |Δ²φ - σΔφ + π(φ - φ₀)|`, absent when the system is singular.
    pub two_type_residual: Option<f64>,
    pub center: Vec<f64>,
    pub mass_symmetric: bool,
    pub kind: ChenType,
    pub order: Option<[usize; 2]>,
    /// The fit is not backed by a compact manifold.
    pub formal: bool,
}

/// Fit `Δφ = λ(φ - φ₀)`, then `Δ²φ = σΔφ - π(φ - φ₀)` by least squares over
/// every point and component of the survey.
pub fn chen_fit_survey(survey: &Survey, com: &CenterOfMass, tol: &Tolerances) -> Result<SpectralEstimate, SpectralError> {
    if let Some(Err(e)) = survey.evals.iter().find(|e| e.is_err()) {
        return Err(e.clone().into());
    }
    let phi0 = DVector::from_vec(com.center.clone());
    let rows: Vec<(DVector<f64>, DVector<f64>, DVector<f64>)> = survey
        .ok()
        .map(|e| (e.bilaplacian.clone(), e.laplacian.clone(), &e.frame.position - &phi0))
        .collect();
    if rows.is_empty() {
        return Err(SpectralError::EmptyGrid);
    }

    let (mut num, mut den) = (0.0, 0.0);
    for (_, l, c) in &rows {
        num += l.dot(c);
        den += c.norm_squared();
    }
    let lambda = num / den;
    let one = rows.iter().map(|(_, l, c)| (l - c * lambda).norm()).fold(0.0, f64::max);

    // y = σ x1 + π x2 with x1 = Δφ, x2 = -(φ - φ₀)
    let mut m: Matrix2<f64> = Matrix2::zeros();
    let mut rhs: Vector2<f64> = Vector2::zeros();
    for (b, l, c) in &rows {
        let x2 = -c;
        m[(0, 0)] += l.norm_squared();
        m[(0, 1)] += l.dot(&x2);
        m[(1, 1)] += x2.norm_squared();
        rhs[0] += b.dot(l);
        rhs[1] += b.dot(&x2);
    }
    m[(1, 0)] = m[(0, 1)];
    let scale = m[(0, 0)] * m[(1, 1)];
    let singular = !(scale > 0.0) || m.determinant() / scale < tol.conditioning;
    let two = if singular {
        None
    } else {
        m.lu().solve(&rhs).map(|sol| {
            let (sigma, pi): (f64, f64) = (sol[0], sol[1]);
            let res = rows
                .iter()
                .map(|(b, l, c)| {
                    let r: DVector<f64> = b - l * sigma + c * pi;
                    r.norm()
                })
                .fold(0.0, f64::max);
            let disc = (sigma * sigma - 4.0 * pi).max(0.0).sqrt();
            (0.5 * (sigma - disc), 0.5 * (sigma + disc), res)
        })
    };

    let mass_symmetric = com.norm() < tol.mass;
    let base = SpectralEstimate {
        lambda_p: lambda,
        lambda_q: lambda,
        residual: one,
        one_type_residual: one,
        two_type_residual: two.map(|t| t.2),
        center: com.center.clone(),
        mass_symmetric,
        kind: ChenType::OneType,
        order: None,
        formal: com.formal || !survey.compact,
    };
    if one < tol.spectral {
        return Ok(base);
    }
    Ok(match two {
        Some((p, q, res)) => SpectralEstimate {
            lambda_p: p,
            lambda_q: q,
            residual: res,
            kind: if res < tol.spectral { ChenType::TwoType } else { ChenType::Indeterminate },
            ..base
        },
        None => SpectralEstimate { kind: ChenType::Indeterminate, ..base },
    })
}

/// [`chen_fit_survey`] on a fresh survey of `sample` with `φ₀` from `quadrature`.
pub fn chen_fit(
    spec: &ImmersionSpec,
    sample: &Grid,
    quadrature: &Grid,
    compact: bool,
    tol: &Tolerances,
) -> Result<SpectralEstimate, SpectralError> {
    let com = center_of_mass(spec, quadrature, tol)?;
    chen_fit_survey(&Survey::new(spec, sample, tol, compact), &com, tol)
}

fn rank_of(spectrum: &[f64], lambda: f64) -> Result<usize, SpectralError> {
    spectrum
        .iter()
        .position(|&x| (x - lambda).abs() <= 1e-9 * lambda.abs().max(1.0))
        .map(|i| i + 1)
        .ok_or(SpectralError::NotInSpectrum(lambda))
}

fn distinct_sorted(mut v: Vec<f64>, upto: f64) -> Vec<f64> {
    v.retain(|&x| x > 1e-12 && x <= upto);
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1.0));
    v
}

/// Distinct nonzero eigenvalues `Σ (2π k_i / L_i)²` of a flat rectangular torus, up to `upto`.
pub fn torus_spectrum(periods: &[f64], upto: f64) -> Result<Vec<f64>, SpectralError> {
    if periods.is_empty() || periods.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(SpectralError::BadLattice);
    }
    let freq: Vec<f64> = periods.iter().map(|l| 2.0 * std::f64::consts::PI / l).collect();
    let bound: Vec<i64> = freq.iter().map(|w| (upto.sqrt() / w).floor() as i64 + 1).collect();
    let mut values = vec![0.0];
    for (w, b) in freq.iter().zip(&bound) {
        let mut next = Vec::with_capacity(values.len() * (2 * *b as usize + 1));
        for v in &values {
            for k in -b..=*b {
                next.push(v + (w * k as f64).powi(2));
            }
        }
        next.retain(|&x| x <= upto * (1.0 + 1e-9));
        values = next;
    }
    Ok(distinct_sorted(values, upto * (1.0 + 1e-9)))
}

/// Order `[p, q]`: ranks of `λ_p`, `λ_q` in the distinct nonzero lattice spectrum.
pub fn torus_order(periods: &[f64], lambda_p: f64, lambda_q: f64) -> Result<[usize; 2], SpectralError> {
    let spectrum = torus_spectrum(periods, lambda_p.max(lambda_q) + 1.0)?;
    Ok([rank_of(&spectrum, lambda_p)?, rank_of(&spectrum, lambda_q)?])
}

/// Both routes to the order of the mass-symmetric 2-type Clifford torus
/// `S^{m1}(1/√2) × S^{m2}(1/√2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordOrder {
    /// `[1, 2]` when `m_large ≤ 2(m_small + 1)`, else `None` (order not `[1, 2]`).
    pub criterion: Option<[usize; 2]>,
    /// Ranks of `2 m1`, `2 m2` in the product-sphere spectrum.
    pub enumerated: [usize; 2],
}

/// Distinct nonzero eigenvalues `j(j+m1-1)/a1² + k(k+m2-1)/a2²` of a product of round spheres.
pub fn product_sphere_spectrum(m1: usize, a1: f64, m2: usize, a2: f64, upto: f64) -> Vec<f64> {
    let level = |j: usize, m: usize, a: f64| (j * (j + m - 1)) as f64 / (a * a);
    let mut values = Vec::new();
    let mut j = 0;
    while level(j, m1, a1) <= upto {
        let mut k = 0;
        while level(j, m1, a1) + level(k, m2, a2) <= upto {
            values.push(level(j, m1, a1) + level(k, m2, a2));
            k += 1;
        }
        j += 1;
    }
    distinct_sorted(values, upto)
}

pub fn clifford_order(m1: usize, m2: usize) -> Result<CliffordOrder, SpectralError> {
    let (small, large) = (m1.min(m2), m1.max(m2));
    let criterion = (large <= 2 * (small + 1)).then_some([1, 2]);
    let a = std::f64::consts::FRAC_1_SQRT_2;
    let (lp, lq) = (2.0 * small as f64, 2.0 * large as f64);
    let spectrum = product_sphere_spectrum(m1, a, m2, a, lq + 1.0);
    Ok(CliffordOrder { criterion, enumerated: [rank_of(&spectrum, lp)?, rank_of(&spectrum, lq)?] })
}

/// Consistency of the biharmonic verdict with the spectral description of
/// constant mean curvature biharmonic submanifolds.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeCheck {
    pub biharmonic: bool,
    /// `|H| = 1`, 1-type with `λ = 2m` and `|φ₀| = 1/√2`.
    pub one_type_branch: bool,
    /// `|H| ∈ (0, 1)`, mass-symmetric 2-type with `λ = m(1 ∓ |H|)`.
    pub two_type_branch: bool,
    pub verdict: Verdict,
    pub detail: String,
    pub formal: bool,
}

pub fn type_theorem_check(survey: &Survey, estimate: &SpectralEstimate, tol: &Tolerances) -> TypeCheck {
    let md = survey.metadata();
    let formal = estimate.formal;
    let mut check = TypeCheck {
        biharmonic: survey.biharmonic(tol.residual) && !survey.minimal(tol.residual),
        one_type_branch: false,
        two_type_branch: false,
        verdict: Verdict::Pass,
        detail: String::new(),
        formal,
    };
    if !survey.cmc(tol.residual) {
        check.verdict = Verdict::NotApplicable("|H| is not constant on the grid".into());
        return check;
    }
    let m = survey.m as f64;
    let h = md.h_mean;
    let near = |x: f64, y: f64| (x - y).abs() <= tol.spectral * y.abs().max(1.0);
    let center_norm = estimate.center.iter().map(|x| x * x).sum::<f64>().sqrt();
    check.one_type_branch = (h - 1.0).abs() < tol.residual
        && estimate.kind == ChenType::OneType
        && near(estimate.lambda_p, 2.0 * m)
        && (center_norm - std::f64::consts::FRAC_1_SQRT_2).abs() < tol.mass;
    check.two_type_branch = h > tol.residual
        && h < 1.0 - tol.residual
        && estimate.mass_symmetric
        && estimate.kind == ChenType::TwoType
        && near(estimate.lambda_p, m * (1.0 - h))
        && near(estimate.lambda_q, m * (1.0 + h));
    let spectral = check.one_type_branch || check.two_type_branch;
    check.detail = format!(
        "biharmonic: {}; spectral side: {} ({}, λ = {:.12}, {:.12}, |φ₀| = {:.3e})",
        check.biharmonic,
        spectral,
        estimate.kind.label(),
        estimate.lambda_p,
        estimate.lambda_q,
        center_norm
    );
    if check.biharmonic != spectral {
        check.verdict = Verdict::Fail;
    }
    check
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, SQRT_2};

    #[test]
    fn lattice_ranks() {
        assert_eq!(torus_order(&[2.0 * PI, SQRT_2 * PI], 1.0, 3.0).unwrap(), [1, 3]);
        assert_eq!(torus_order(&[2.0 * PI, SQRT_2 * PI, 2.0 * PI], 2.0, 4.0).unwrap(), [2, 4]);
        assert_eq!(torus_order(&[2.0 * PI], 1.5, 4.0), Err(SpectralError::NotInSpectrum(1.5)));
        let s = torus_spectrum(&[2.0 * PI, SQRT_2 * PI], 6.5).unwrap();
        let want = [1.0, 2.0, 3.0, 4.0, 6.0];
        assert_eq!(s.len(), want.len());
        assert!(s.iter().zip(want).all(|(x, y)| (x - y).abs() < 1e-12));
    }

    #[test]
    fn clifford_order_routes_agree() {
        for m1 in 1..6 {
            for m2 in 1..12 {
                if m1 == m2 {
                    continue;
                }
                let o = clifford_order(m1, m2).unwrap();
                assert_eq!(o.criterion == Some([1, 2]), o.enumerated == [1, 2], "m1={m1} m2={m2}: {o:?}");
            }
        }
        assert_eq!(clifford_order(1, 2).unwrap().enumerated, [1, 2]);
    }
}
