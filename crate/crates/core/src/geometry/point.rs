//! Every pointwise quantity entering the biharmonic and spectral checks.

use nalgebra::{DMatrix, DVector};

use super::frame::FrameData;
use super::local::{dot, values, LocalGeometry};
use super::{grad_h2, laplace_coords, normal_laplacian_h, GeometryError};
use crate::dsl::ImmersionSpec;
use crate::jet::{Jet, MAX_ORDER};
use crate::tolerance::Tolerances;

/// Terms of the hypersurface characterization (codimension 1 only).
#[derive(Debug, Clone, PartialEq)]
pub struct HypersurfaceTerms {
    /// `Δ⊥H - (m - |A|²) H`
    pub normal: DVector<f64>,
    /// `2 A(grad|H|) + m |H| grad|H|`, undefined where `H = 0`.
    pub tangent: Option<DVector<f64>>,
    /// `|A|² - m`
    pub cmc_defect: f64,
    /// `det A_η` in an orthonormal basis
    pub shape_det: f64,
}

/// Identities for parallel mean curvature, as residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct Prop31Terms {
    /// `|A_H|² - m|H|²`
    pub ah_norm: f64,
    /// `|trace ∇A_H|`
    pub trace_nabla_ah: f64,
    /// `max_X |<trace (∇⊥B)(X, ·, A_H ·), H>|` over an orthonormal basis
    pub nabla_b_first: f64,
    /// `max_X |<trace (∇⊥B)(·, X, A_H ·), H>|`
    pub nabla_b_second: f64,
}

/// Eigenbasis identities of `A_H`, as residuals (left side minus right side).
#[derive(Debug, Clone, PartialEq)]
pub struct Prop32Terms {
    /// `Σ a_i - m|H|²`
    pub trace: f64,
    /// `Σ a_i² - m|H|²`
    pub trace_sq: f64,
    /// `(2m-1) m|H|² - ½ Σ (a_i + a_j)(K_ij + |B_ij|²)`
    pub mixed: f64,
    /// `(m-1+m|H|²) m|H|² - Σ a_i a_j (K_ij + |B_ij|²)`
    pub product: f64,
    /// Right side of `mixed` (for reporting).
    pub mixed_rhs: f64,
    /// Right side of `product`.
    pub product_rhs: f64,
    /// Largest change of `mixed`/`product` under rotations inside repeated eigenspaces.
    pub basis_deviation: f64,
}

/// Pointwise evaluation of one immersion at one parameter point.
#[derive(Debug, Clone)]
pub struct PointEval {
    pub frame: FrameData,
    pub h_norm: f64,
    pub a_squared: f64,
    pub ah_squared: f64,
    pub ah_eigenvalues: Vec<f64>,
    pub scalar_curvature: f64,
    pub tau: DVector<f64>,
    pub tau2: DVector<f64>,
    /// Normal and tangential (to `M`) parts of `τ₂`.
    pub tau2_normal: DVector<f64>,
    pub tau2_tangent: DVector<f64>,
    /// `Δ⊥H + trace B(·, A_H ·) - mH`
    pub normal_residual: DVector<f64>,
    /// `4 trace A_{∇⊥H}(·) + m grad|H|²`
    pub tangent_residual: DVector<f64>,
    /// `|∇⊥H|` (norm over an orthonormal basis)
    pub nabla_perp_h: f64,
    pub grad_h2: DVector<f64>,
    pub hypersurface: Option<HypersurfaceTerms>,
    pub prop31: Prop31Terms,
    pub prop32: Prop32Terms,
    /// `|A_H - |H|² Id|`
    pub pseudo_umbilical: f64,
    pub laplacian: DVector<f64>,
    pub bilaplacian: DVector<f64>,
    /// `√det g`
    pub volume_element: f64,
}

fn dv(v: &[Jet]) -> DVector<f64> {
    DVector::from_vec(values(v))
}

/// Evaluate everything at `point` from order-4 jets.
pub fn evaluate_point(spec: &ImmersionSpec, point: &[f64], tol: &Tolerances) -> Result<PointEval, GeometryError> {
    let local = LocalGeometry::new(spec, point, MAX_ORDER, tol)?;
    let frame = FrameData::from_local(&local);
    let m = local.dim();
    let mf = m as f64;
    let n = local.ambient_dim();
    let norms = frame.shape_norms();
    let h = frame.mean_curvature.clone();
    let h_norm = frame.mean_norm;

    let tau = &h * mf;
    let tau2 = super::bitension(&local)?;
    let tau2_normal = frame.normal_part(&tau2);
    let tau2_tangent = frame.tangent_vector(&frame.tangent_coords(&tau2));

    // normal system
    let lap_h = normal_laplacian_h(&local)?;
    let ah_coords = frame.shape_coords(&h);
    let mut trace_b_ah = DVector::zeros(n);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let c = frame.g_inv[(i, j)] * ah_coords[(k, j)];
                trace_b_ah.axpy(c, &frame.sff[i][k], 1.0);
            }
        }
    }
    let normal_residual = &lap_h + &trace_b_ah - &h * mf;

    // tangent system
    let dh: Vec<DVector<f64>> = (0..m).map(|i| dv(&local.normal_covariant(&local.mean, i))).collect();
    let mut trace_a_dh = DVector::zeros(n);
    let mut nabla_sq = 0.0;
    for i in 0..m {
        for j in 0..m {
            let gij = frame.g_inv[(i, j)];
            nabla_sq += gij * dh[i].dot(&dh[j]);
            let mut e = vec![0.0; m];
            e[j] = 1.0;
            trace_a_dh.axpy(gij, &frame.shape_apply(&dh[i], &e), 1.0);
        }
    }
    let grad = grad_h2(&local)?;
    let tangent_residual = &trace_a_dh * 4.0 + &grad * mf;

    let hypersurface = (local.ambient_dim() == m + 2).then(|| {
        let shape_det = frame.shape_operators[0].determinant();
        let normal = &lap_h - &h * (mf - norms.a_squared);
        let tangent = (h_norm > 1e-12).then(|| {
            let eta = &h / h_norm;
            let grad_norm = &grad / (2.0 * h_norm);
            let coords = frame.tangent_coords(&grad_norm);
            frame.shape_apply(&eta, &coords) * 2.0 + grad_norm * (mf * h_norm)
        });
        HypersurfaceTerms { normal, tangent, cmc_defect: norms.a_squared - mf, shape_det }
    });

    let prop31 = prop31_terms(&local, &frame, norms.ah_squared)?;
    let prop32 = prop32_terms(&frame, &norms.ah_eigenvalues, &norms.ah_eigenvectors);

    let ah = frame.shape_matrix(&h);
    let pseudo_umbilical = (ah - DMatrix::identity(m, m) * (h_norm * h_norm)).norm();

    let (laplacian, bilaplacian) = laplace_coords(&local, 2)?;
    let bilaplacian = bilaplacian.expect("depth 2");

    Ok(PointEval {
        h_norm,
        a_squared: norms.a_squared,
        ah_squared: norms.ah_squared,
        ah_eigenvalues: norms.ah_eigenvalues,
        scalar_curvature: frame.scalar_curvature(),
        volume_element: frame.volume_element(),
        tau,
        tau2,
        tau2_normal,
        tau2_tangent,
        normal_residual,
        tangent_residual,
        nabla_perp_h: nabla_sq.max(0.0).sqrt(),
        grad_h2: grad,
        hypersurface,
        prop31,
        prop32,
        pseudo_umbilical,
        laplacian,
        bilaplacian,
        frame,
    })
}

fn prop31_terms(local: &LocalGeometry, frame: &FrameData, ah_squared: f64) -> Result<Prop31Terms, GeometryError> {
    let m = local.dim();
    let h2 = frame.mean_norm * frame.mean_norm;
    // (A_H)^k_j = g^{kl} <B_jl, H> as jets
    let lowered: Vec<Vec<Jet>> = (0..m).map(|l| (0..m).map(|j| dot(&local.sff[j][l], &local.mean)).collect()).collect();
    let a: Vec<Vec<Jet>> = (0..m)
        .map(|k| {
            (0..m)
                .map(|j| {
                    let mut acc = local.metric_inv[k][0] * lowered[0][j];
                    for l in 1..m {
                        acc += &(local.metric_inv[k][l] * lowered[l][j]);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let gam = |k: usize, i: usize, j: usize| frame.christoffel[k][(i, j)];
    let av = |k: usize, j: usize| a[k][j].value();

    // (trace ∇A_H)^k = g^{ij} (∂_i A^k_j + Γ^k_ip A^p_j - Γ^p_ij A^k_p)
    let mut tr = vec![0.0; m];
    for (k, t) in tr.iter_mut().enumerate() {
        for i in 0..m {
            for j in 0..m {
                let mut d = a[k][j].derive(i)?.value();
                for p in 0..m {
                    d += gam(k, i, p) * av(p, j) - gam(p, i, j) * av(k, p);
                }
                *t += frame.g_inv[(i, j)] * d;
            }
        }
    }
    let trace_nabla_ah = frame.tangent_vector(&tr).norm();

    // (∇⊥B)_{ijk} = Q(∂_i B_jk) - Γ^p_ij B_pk - Γ^p_ik B_jp, contracted with H
    let mut nb = vec![vec![vec![0.0; m]; m]; m];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let mut v = dv(&local.normal_covariant(&local.sff[j][k], i));
                for p in 0..m {
                    v.axpy(-gam(p, i, j), &frame.sff[p][k], 1.0);
                    v.axpy(-gam(p, i, k), &frame.sff[j][p], 1.0);
                }
                nb[i][j][k] = v.dot(&frame.mean_curvature);
            }
        }
    }
    let (mut first, mut second) = (0.0f64, 0.0f64);
    for x in &frame.onb {
        let (mut s1, mut s2) = (0.0, 0.0);
        for i in 0..m {
            for j in 0..m {
                for l in 0..m {
                    for k in 0..m {
                        let w = x[i] * frame.g_inv[(j, l)] * av(k, l);
                        s1 += w * nb[i][j][k];
                        s2 += w * nb[j][i][k];
                    }
                }
            }
        }
        first = first.max(s1.abs());
        second = second.max(s2.abs());
    }
    Ok(Prop31Terms {
        ah_norm: ah_squared - m as f64 * h2,
        trace_nabla_ah,
        nabla_b_first: first,
        nabla_b_second: second,
    })
}

fn prop32_sums(frame: &FrameData, basis: &[Vec<f64>]) -> (f64, f64) {
    let m = basis.len();
    let h = &frame.mean_curvature;
    let a: Vec<f64> = basis.iter().map(|e| frame.sff_on(e, e).dot(h)).collect();
    let (mut mixed, mut product) = (0.0, 0.0);
    for i in 0..m {
        for j in 0..m {
            let k = if i == j { 0.0 } else { frame.gauss_sectional(&basis[i], &basis[j]) };
            let w = k + frame.sff_on(&basis[i], &basis[j]).norm_squared();
            mixed += 0.5 * (a[i] + a[j]) * w;
            product += a[i] * a[j] * w;
        }
    }
    (mixed, product)
}

fn prop32_terms(frame: &FrameData, eig: &[f64], vecs: &[Vec<f64>]) -> Prop32Terms {
    let m = eig.len();
    let mf = m as f64;
    let mh2 = mf * frame.mean_norm * frame.mean_norm;
    let (mixed_rhs, product_rhs) = prop32_sums(frame, vecs);

    // rotate inside every cluster of (numerically) repeated eigenvalues
    let scale = eig.iter().fold(1.0f64, |s, x| s.max(x.abs()));
    let mut rotated = vecs.to_vec();
    let mut any = false;
    for i in 1..m {
        if (eig[i] - eig[i - 1]).abs() <= 1e-8 * scale {
            any = true;
            let (c, s) = (0.6f64.cos(), 0.6f64.sin());
            let (p, q) = (rotated[i - 1].clone(), rotated[i].clone());
            for k in 0..m {
                rotated[i - 1][k] = c * p[k] - s * q[k];
                rotated[i][k] = s * p[k] + c * q[k];
            }
        }
    }
    let basis_deviation = if any {
        let (mr, pr) = prop32_sums(frame, &rotated);
        (mr - mixed_rhs).abs().max((pr - product_rhs).abs())
    } else {
        0.0
    };

    Prop32Terms {
        trace: eig.iter().sum::<f64>() - mh2,
        trace_sq: eig.iter().map(|a| a * a).sum::<f64>() - mh2,
        mixed: (2.0 * mf - 1.0) * mh2 - mixed_rhs,
        product: (mf - 1.0 + mh2) * mh2 - product_rhs,
        mixed_rhs,
        product_rhs,
        basis_deviation,
    }
}
