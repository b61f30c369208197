//! `Area_II = ∫ √|det A| v_g` along restricted one-parameter families.

use nalgebra::DVector;
use rayon::prelude::*;
use thiserror::Error;

use crate::catalog::{CatalogError, Family};
use crate::dsl::ImmersionSpec;
use crate::geometry::{frame_at_order, GeometryError};
use crate::grid::{Grid, GridError};
use crate::tolerance::Tolerances;

use super::Survey;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScanError {
    #[error("scan range [{lo}, {hi}] with step {step} must lie inside (0, 1) with lo < hi and step > 0")]
    BadRange { lo: f64, hi: f64, step: f64 },
    #[error("family member at a = {a}: {source}")]
    Catalog {
        a: f64,
        #[source]
        source: CatalogError,
    },
    #[error("Area_II needs a hypersurface, got codimension {0}")]
    Codimension(usize),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// `∫ √|det A| √det g` by quadrature with `n` nodes per axis.
pub fn area_ii(spec: &ImmersionSpec, n: usize, tol: &Tolerances) -> Result<f64, ScanError> {
    if spec.codim() != 1 {
        return Err(ScanError::Codimension(spec.codim()));
    }
    let grid = Grid::quadrature(spec, n)?;
    let terms: Vec<f64> = grid
        .points
        .par_iter()
        .zip(&grid.weights)
        .map(|(p, w)| {
            let f = frame_at_order(spec, p, 2, tol)?;
            Ok(w * f.shape_operators[0].determinant().abs().sqrt() * f.volume_element())
        })
        .collect::<Result<_, GeometryError>>()?;
    Ok(terms.iter().sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub a: f64,
    /// `<Δ⊥H - (m-|A|²)H, ν>` of largest magnitude over the sample grid, where
    /// the unit normal `ν` is carried continuously along the family.
    pub residual_normal: f64,
    /// `<H, ν>` at the first sample point; changes sign where the family is minimal.
    pub h_signed: f64,
    /// Largest `|2A(grad|H|) + m|H| grad|H||` over the sample grid.
    pub residual_tangent: f64,
    pub area_ii: f64,
    /// Central difference over neighbouring rows (one-sided at the ends).
    pub d_area_ii: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AreaScan {
    pub family: Family,
    pub rows: Vec<ScanRow>,
    pub step: f64,
    /// Consecutive rows between which `dArea_II/da` changes sign.
    pub critical_brackets: Vec<(f64, f64)>,
    /// Rows where the normal residual vanishes or brackets a sign change.
    pub residual_brackets: Vec<(f64, f64)>,
    /// Brackets of minimal members (sign changes of `<H, ν>`).
    pub minimal_brackets: Vec<(f64, f64)>,
}

impl AreaScan {
    /// Single critical bracket and single residual zero, both containing `target`.
    pub fn locates(&self, target: f64) -> bool {
        let inside = |b: &[(f64, f64)]| b.len() == 1 && b[0].0 <= target && target <= b[0].1;
        inside(&self.critical_brackets) && inside(&self.residual_brackets)
    }
}

fn brackets(rows: &[ScanRow], key: impl Fn(&ScanRow) -> f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for w in rows.windows(2) {
        let (x, y) = (key(&w[0]), key(&w[1]));
        if x == 0.0 {
            out.push((w[0].a, w[0].a));
        } else if x * y < 0.0 {
            out.push((w[0].a, w[1].a));
        }
    }
    if let Some(last) = rows.last() {
        if key(last) == 0.0 {
            out.push((last.a, last.a));
        }
    }
    out
}

/// Evaluate the family at `a = lo, lo + step, …` up to `hi`, with `quad_n`
/// quadrature nodes and `sample_n` residual sample nodes per axis.
pub fn area_ii_scan(
    family: Family,
    lo: f64,
    hi: f64,
    step: f64,
    quad_n: usize,
    sample_n: usize,
    offset: f64,
    tol: &Tolerances,
) -> Result<AreaScan, ScanError> {
    if !(lo > 0.0 && hi < 1.0 && lo < hi && step > 0.0) {
        return Err(ScanError::BadRange { lo, hi, step });
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    let values: Vec<f64> = (0..count).map(|k| lo + k as f64 * step).collect();
    let mut rows = Vec::with_capacity(count);
    let mut normals: Option<Vec<DVector<f64>>> = None;
    for &a in &values {
        let entry = family.at(a).map_err(|source| ScanError::Catalog { a, source })?;
        let spec = &entry.spec;
        let area = area_ii(spec, quad_n, tol)?;
        let survey = Survey::new(spec, &Grid::sample(spec, sample_n, offset)?, tol, true);
        if let Some(Err(e)) = survey.evals.iter().find(|e| e.is_err()) {
            return Err(e.clone().into());
        }
        let evals: Vec<_> = survey.ok().collect();
        let oriented: Vec<DVector<f64>> = evals
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let nu = e.frame.normal_frame[0].clone();
                let reference = normals.as_ref().map_or_else(|| e.frame.mean_curvature.clone(), |n| n[k].clone());
                if nu.dot(&reference) < 0.0 {
                    -nu
                } else {
                    nu
                }
            })
            .collect();
        let mut normal = 0.0f64;
        let mut tangent = 0.0f64;
        for (e, nu) in evals.iter().zip(&oriented) {
            let hs = e.hypersurface.as_ref().ok_or(ScanError::Codimension(spec.codim()))?;
            let s = hs.normal.dot(nu);
            if s.abs() > normal.abs() {
                normal = s;
            }
            tangent = tangent.max(hs.tangent.as_ref().map_or(0.0, |t| t.norm()));
        }
        let h_signed = evals[0].frame.mean_curvature.dot(&oriented[0]);
        rows.push(ScanRow {
            a,
            residual_normal: normal,
            h_signed,
            residual_tangent: tangent,
            area_ii: area,
            d_area_ii: 0.0,
        });
        normals = Some(oriented);
    }
    let n = rows.len();
    for i in 0..n {
        let (l, r) = (i.saturating_sub(1), (i + 1).min(n - 1));
        rows[i].d_area_ii = if l == r { 0.0 } else { (rows[r].area_ii - rows[l].area_ii) / (rows[r].a - rows[l].a) };
    }
    let critical_brackets = brackets(&rows, |r| r.d_area_ii);
    let residual_brackets = brackets(&rows, |r| r.residual_normal);
    let minimal_brackets = brackets(&rows, |r| r.h_signed);
    Ok(AreaScan { family, rows, step, critical_brackets, residual_brackets, minimal_brackets })
}
