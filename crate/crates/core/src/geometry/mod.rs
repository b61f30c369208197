//! Extrinsic and intrinsic geometry of parametrized submanifolds of unit spheres.
//!
//! Every quantity is computed from Taylor jets of the Euclidean position
//! vector `φ: M → S^n ⊂ R^{n+1}`. Sphere quantities come from Euclidean ones
//! through `H_S = H_R + φ` and the projection `P(w) = w - <w, φ> φ`. The
//! Laplacian convention is `Δ = -trace ∇²`, so spectra are nonnegative.

mod frame;
mod local;
mod point;

pub use frame::{frame_at, frame_at_order, shape_operator_norms, FrameData, ShapeNorms};
pub use local::LocalGeometry;
pub use point::{evaluate_point, HypersurfaceTerms, PointEval, Prop31Terms, Prop32Terms};

use nalgebra::DVector;
use rayon::prelude::*;
use thiserror::Error;

use crate::dsl::{EvalError, ImmersionSpec};
use crate::grid::Grid;
use crate::jet::{JetError, MAX_ORDER};
use crate::tolerance::Tolerances;
use local::{dot, values};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("not an immersion at point {point:?} (metric condition number {condition:e})")]
    NotImmersion { point: Vec<f64>, condition: f64 },
    #[error("not a spherical immersion at point {point:?} (|φ|² - 1 = {deviation:e})")]
    NotSpherical { point: Vec<f64>, deviation: f64 },
    #[error("jets of order {needed} required, have {have}")]
    InsufficientOrder { needed: usize, have: usize },
    #[error("point has {found} coordinate(s), expected {expected}")]
    PointDimension { expected: usize, found: usize },
    #[error("({i}, {j}) is not a coordinate plane of a {dim}-dimensional manifold")]
    BadPlane { i: usize, j: usize, dim: usize },
    #[error("empty grid")]
    EmptyGrid,
}

fn dvec(v: &[crate::jet::Jet]) -> DVector<f64> {
    DVector::from_vec(values(v))
}

/// `∇⊥_{∂_i} H`; needs jets of order ≥ 3.
pub fn normal_derivative_h(local: &LocalGeometry, i: usize) -> Result<DVector<f64>, GeometryError> {
    local.require(3)?;
    if i >= local.dim() {
        return Err(GeometryError::BadPlane { i, j: i, dim: local.dim() });
    }
    Ok(dvec(&local.normal_covariant(&local.mean, i)))
}

/// `Δ⊥H = -Σ g^{ij}(∇⊥_i ∇⊥_j H - Γ^k_{ij} ∇⊥_k H)`; needs order-4 jets.
pub fn normal_laplacian_h(local: &LocalGeometry) -> Result<DVector<f64>, GeometryError> {
    local.require(4)?;
    Ok(dvec(&local.connection_laplacian(&local.mean, |v, i| local.normal_covariant(v, i))))
}

/// Tension field `τ = m H`.
pub fn tension(local: &LocalGeometry) -> DVector<f64> {
    dvec(&local.mean) * local.dim() as f64
}

/// Bitension field `τ₂ = -Δτ - trace R(dφ, τ)dφ = -Δτ + mτ` for the unit sphere,
/// with `Δ` the rough Laplacian of the pullback connection.
pub fn bitension(local: &LocalGeometry) -> Result<DVector<f64>, GeometryError> {
    local.require(4)?;
    let m = local.dim() as f64;
    let tau: Vec<_> = local.mean.iter().map(|c| c.scale(m)).collect();
    let rough = local.connection_laplacian(&tau, |v, i| local.sphere_covariant(v, i));
    Ok(dvec(&tau) * m - dvec(&rough))
}

/// `grad |H|² = g^{ij} ∂_j(|H|²) ∂_i φ`; needs jets of order ≥ 3.
pub fn grad_h2(local: &LocalGeometry) -> Result<DVector<f64>, GeometryError> {
    local.require(3)?;
    let h2 = dot(&local.mean, &local.mean);
    let m = local.dim();
    let d: Vec<f64> = (0..m).map(|j| h2.derive(j).map(|x| x.value())).collect::<Result<_, _>>()?;
    let mut out = DVector::zeros(local.ambient_dim());
    for i in 0..m {
        let c: f64 = (0..m).map(|j| local.metric_inv[i][j].value() * d[j]).sum();
        out.axpy(c, &dvec(&local.dphi[i]), 1.0);
    }
    Ok(out)
}

/// Sectional curvature of the intrinsic metric on the plane of orthonormal
/// coordinate vectors `x, y`, from Christoffel symbols of `g` alone.
pub fn intrinsic_sectional(local: &LocalGeometry, x: &[f64], y: &[f64]) -> Result<f64, GeometryError> {
    local.require(3)?;
    let m = local.dim();
    let dg: Vec<Vec<Vec<_>>> = (0..m)
        .map(|l| (0..m).map(|i| (0..m).map(|j| local.metric[i][j].derive(l)).collect::<Result<Vec<_>, _>>()).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;
    // Γ^k_{ij} = ½ g^{kl} (∂_i g_{jl} + ∂_j g_{il} - ∂_l g_{ij})
    let gamma: Vec<Vec<Vec<crate::jet::Jet>>> = (0..m)
        .map(|k| {
            (0..m)
                .map(|i| {
                    (0..m)
                        .map(|j| {
                            let mut acc = crate::jet::Jet::constant(0.0, m, local.order() - 2);
                            for l in 0..m {
                                let s = (dg[i][j][l] + dg[j][i][l]) - dg[l][i][j];
                                acc += &(local.metric_inv[k][l] * s);
                            }
                            acc.scale(0.5)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    // R^l_{ijk} = ∂_i Γ^l_{jk} - ∂_j Γ^l_{ik} + Γ^l_{ip} Γ^p_{jk} - Γ^l_{jp} Γ^p_{ik}
    let riemann_up = |l: usize, i: usize, j: usize, k: usize| -> Result<f64, JetError> {
        let mut r = gamma[l][j][k].derive(i)?.value() - gamma[l][i][k].derive(j)?.value();
        for p in 0..m {
            r += gamma[l][i][p].value() * gamma[p][j][k].value() - gamma[l][j][p].value() * gamma[p][i][k].value();
        }
        Ok(r)
    };
    let mut num = 0.0;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let w = x[i] * y[j] * y[k];
                if w == 0.0 {
                    continue;
                }
                for l in 0..m {
                    // lower the last index against X
                    let lowered: f64 = (0..m).map(|q| local.metric[l][q].value() * x[q]).sum();
                    if lowered != 0.0 {
                        num += w * riemann_up(l, i, j, k)? * lowered;
                    }
                }
            }
        }
    }
    let g = |a: &[f64], b: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                s += a[i] * local.metric[i][j].value() * b[j];
            }
        }
        s
    };
    let area = g(x, x) * g(y, y) - g(x, y).powi(2);
    Ok(num / area)
}

/// `½ ∫ |τ|² v_g` by quadrature over `grid`.
pub fn bienergy(spec: &ImmersionSpec, grid: &Grid, tol: &Tolerances) -> Result<f64, GeometryError> {
    if grid.is_empty() {
        return Err(GeometryError::EmptyGrid);
    }
    let terms: Vec<f64> = grid
        .points
        .par_iter()
        .zip(&grid.weights)
        .map(|(p, w)| {
            let local = LocalGeometry::new(spec, p, 2, tol)?;
            let frame = FrameData::from_local(&local);
            Ok(w * 0.5 * tension(&local).norm_squared() * frame.volume_element())
        })
        .collect::<Result<_, GeometryError>>()?;
    Ok(terms.iter().sum())
}

/// Euclidean Laplacians `Δφ` and `Δ²φ` of the coordinate functions.
pub fn laplace_coords(local: &LocalGeometry, depth: usize) -> Result<(DVector<f64>, Option<DVector<f64>>), GeometryError> {
    local.require(2 * depth.max(1))?;
    let first: Vec<_> = local.phi.iter().map(|c| local.scalar_laplacian(c)).collect();
    let second = (depth >= 2).then(|| dvec(&first.iter().map(|c| local.scalar_laplacian(c)).collect::<Vec<_>>()));
    Ok((dvec(&first), second))
}

/// Evaluate `f` at every grid point in parallel; output order matches the grid.
pub fn map_grid<T, F>(grid: &Grid, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&[f64]) -> T + Sync,
{
    grid.points.par_iter().map(|p| f(p)).collect()
}

/// Full jet order used by the pointwise checks.
pub const CHECK_ORDER: usize = MAX_ORDER;
