use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::local::{values, LocalGeometry};
use super::GeometryError;
use crate::dsl::ImmersionSpec;
use crate::jet::{Jet, MAX_ORDER};
use crate::tolerance::Tolerances;

/// Pointwise geometry of `M^m ⊂ S^n` at one parameter point.
///
/// Vectors live in `R^{n+1}`. Matrices indexed by tangent directions use the
/// coordinate basis `∂_i φ` unless stated otherwise; `onb[a]` holds the
/// coordinate coefficients of the `a`-th vector of the Gram–Schmidt
/// orthonormal basis `e_a = Σ_i onb[a][i] ∂_i φ`.
#[derive(Debug, Clone)]
pub struct FrameData {
    pub point: Vec<f64>,
    pub position: DVector<f64>,
    /// Component jets of `φ`.
    pub jets: Vec<Jet>,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    /// `christoffel[k][(i, j)] = Γ^k_{ij}`
    pub christoffel: Vec<DMatrix<f64>>,
    pub tangent_basis: Vec<DVector<f64>>,
    pub onb: Vec<Vec<f64>>,
    pub normal_frame: Vec<DVector<f64>>,
    /// `sff[i][j] = B(∂_i, ∂_j)`
    pub sff: Vec<Vec<DVector<f64>>>,
    pub mean_curvature: DVector<f64>,
    pub mean_norm: f64,
    /// Shape operator `A_{ξ_α}` for each normal frame vector, in the orthonormal basis.
    pub shape_operators: Vec<DMatrix<f64>>,
}

/// Norms and spectrum of the shape operators.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeNorms {
    /// `|A|² = Σ_α |A_{ξ_α}|²`
    pub a_squared: f64,
    /// `|A_H|²`
    pub ah_squared: f64,
    /// Eigenvalues `a_i` of `A_H`, ascending (hypersurface signs are up to the
    /// global normal orientation only through `H` itself, so they are fixed).
    pub ah_eigenvalues: Vec<f64>,
    /// Coordinate coefficients of an orthonormal eigenbasis, matching `ah_eigenvalues`.
    pub ah_eigenvectors: Vec<Vec<f64>>,
}

fn vec_of(v: &[Jet]) -> DVector<f64> {
    DVector::from_vec(values(v))
}

impl FrameData {
    pub(crate) fn from_local(local: &LocalGeometry) -> FrameData {
        let m = local.m;
        let g = DMatrix::from_fn(m, m, |i, j| local.metric[i][j].value());
        let g_inv = DMatrix::from_fn(m, m, |i, j| local.metric_inv[i][j].value());
        let christoffel = (0..m)
            .map(|k| DMatrix::from_fn(m, m, |i, j| local.christoffel[k][i][j].value()))
            .collect();
        let tangent_basis: Vec<DVector<f64>> = local.dphi.iter().map(|d| vec_of(d)).collect();
        let position = vec_of(&local.phi);
        let sff: Vec<Vec<DVector<f64>>> =
            local.sff.iter().map(|row| row.iter().map(|b| vec_of(b)).collect()).collect();
        let mean_curvature = vec_of(&local.mean);
        let mean_norm = mean_curvature.norm();

        let onb = gram_schmidt(&g);
        let mut frame = FrameData {
            point: local.point.clone(),
            position,
            jets: local.phi.clone(),
            g,
            g_inv,
            christoffel,
            tangent_basis,
            onb,
            normal_frame: Vec::new(),
            sff,
            mean_curvature,
            mean_norm,
            shape_operators: Vec::new(),
        };
        frame.normal_frame = frame.build_normal_frame();
        frame.shape_operators = frame.normal_frame.iter().map(|xi| frame.shape_matrix(xi)).collect();
        frame
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.position.len()
    }

    /// Tangent vector `Σ_i x^i ∂_i φ`.
    pub fn tangent_vector(&self, coords: &[f64]) -> DVector<f64> {
        let mut v = DVector::zeros(self.ambient_dim());
        for (x, d) in coords.iter().zip(&self.tangent_basis) {
            v.axpy(*x, d, 1.0);
        }
        v
    }

    /// Coordinates of the tangential part of an ambient vector.
    pub fn tangent_coords(&self, v: &DVector<f64>) -> Vec<f64> {
        let proj = DVector::from_iterator(self.dim(), self.tangent_basis.iter().map(|d| d.dot(v)));
        (&self.g_inv * proj).iter().copied().collect()
    }

    /// Component of `v` normal to `M` in `T S^n`.
    pub fn normal_part(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut out = v - &self.position * self.position.dot(v);
        let t = self.tangent_vector(&self.tangent_coords(v));
        out -= t;
        out
    }

    /// `B(X, Y)` for coordinate vectors.
    pub fn sff_on(&self, x: &[f64], y: &[f64]) -> DVector<f64> {
        let mut out = DVector::zeros(self.ambient_dim());
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                out.axpy(xi * yj, &self.sff[i][j], 1.0);
            }
        }
        out
    }

    /// `<B(e_a, e_b), ξ>` in the orthonormal basis.
    pub fn shape_matrix(&self, xi: &DVector<f64>) -> DMatrix<f64> {
        let m = self.dim();
        DMatrix::from_fn(m, m, |a, b| self.sff_on(&self.onb[a], &self.onb[b]).dot(xi))
    }

    /// Coordinate matrix `(A_ξ)^k_j = g^{kl} <B_{jl}, ξ>`.
    pub fn shape_coords(&self, xi: &DVector<f64>) -> DMatrix<f64> {
        let m = self.dim();
        let lowered = DMatrix::from_fn(m, m, |l, j| self.sff[j][l].dot(xi));
        &self.g_inv * lowered
    }

    /// `A_ξ X` as an ambient tangent vector.
    pub fn shape_apply(&self, xi: &DVector<f64>, x: &[f64]) -> DVector<f64> {
        let a = self.shape_coords(xi);
        let coords: Vec<f64> = (0..self.dim()).map(|k| (0..self.dim()).map(|j| a[(k, j)] * x[j]).sum()).collect();
        self.tangent_vector(&coords)
    }

    fn build_normal_frame(&self) -> Vec<DVector<f64>> {
        let n = self.ambient_dim();
        let codim = n - 1 - self.dim();
        let mut frame: Vec<DVector<f64>> = Vec::with_capacity(codim);
        let mut used = vec![false; n];
        for _ in 0..codim {
            let mut best: Option<(usize, DVector<f64>, f64)> = None;
            for (axis, taken) in used.iter().enumerate() {
                if *taken {
                    continue;
                }
                let mut v = self.normal_part(&DVector::from_fn(n, |c, _| if c == axis { 1.0 } else { 0.0 }));
                for f in &frame {
                    let d = f.dot(&v);
                    v.axpy(-d, f, 1.0);
                }
                let r = v.norm();
                if best.as_ref().is_none_or(|(_, _, b)| r > *b) {
                    best = Some((axis, v, r));
                }
            }
            let (axis, v, r) = best.expect("axis available");
            used[axis] = true;
            frame.push(v / r);
        }
        frame
    }

    pub fn shape_norms(&self) -> ShapeNorms {
        let a_squared = self.shape_operators.iter().map(|a| a.norm_squared()).sum();
        let ah = self.shape_matrix(&self.mean_curvature);
        let ah_squared = ah.norm_squared();
        let eig = SymmetricEigen::new(ah);
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let ah_eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let ah_eigenvectors = order
            .iter()
            .map(|&k| {
                let col = eig.eigenvectors.column(k);
                (0..self.dim())
                    .map(|i| (0..self.dim()).map(|a| col[a] * self.onb[a][i]).sum())
                    .collect()
            })
            .collect();
        ShapeNorms { a_squared, ah_squared, ah_eigenvalues, ah_eigenvectors }
    }

    /// Sectional curvature of the plane spanned by orthonormal coordinate vectors,
    /// through the Gauss equation with ambient curvature 1.
    pub fn gauss_sectional(&self, x: &[f64], y: &[f64]) -> f64 {
        let bxx = self.sff_on(x, x);
        let byy = self.sff_on(y, y);
        let bxy = self.sff_on(x, y);
        1.0 + bxx.dot(&byy) - bxy.norm_squared()
    }

    /// `K(e_i, e_j)` in the Gram–Schmidt orthonormal basis.
    pub fn sectional_curvature(&self, i: usize, j: usize) -> Result<f64, GeometryError> {
        let m = self.dim();
        if i == j || i >= m || j >= m {
            return Err(GeometryError::BadPlane { i, j, dim: m });
        }
        Ok(self.gauss_sectional(&self.onb[i], &self.onb[j]))
    }

    /// `s = Σ_{i≠j} K_ij`
    pub fn scalar_curvature(&self) -> f64 {
        let m = self.dim();
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                if i != j {
                    s += self.gauss_sectional(&self.onb[i], &self.onb[j]);
                }
            }
        }
        s
    }

    /// `√det g`
    pub fn volume_element(&self) -> f64 {
        self.g.determinant().abs().sqrt()
    }
}

/// Coefficients of the Gram–Schmidt orthonormalization of the coordinate basis
/// (in index order) with respect to `g`.
pub(crate) fn gram_schmidt(g: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let m = g.nrows();
    let inner = |a: &[f64], b: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                s += a[i] * g[(i, j)] * b[j];
            }
        }
        s
    };
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(m);
    for k in 0..m {
        let mut v: Vec<f64> = (0..m).map(|i| if i == k { 1.0 } else { 0.0 }).collect();
        for e in &out {
            let d = inner(&v, e);
            for i in 0..m {
                v[i] -= d * e[i];
            }
        }
        let n = inner(&v, &v).sqrt();
        v.iter_mut().for_each(|x| *x /= n);
        out.push(v);
    }
    out
}

/// All pointwise frame data at `point`, from order-4 jets.
pub fn frame_at(spec: &ImmersionSpec, point: &[f64], tol: &Tolerances) -> Result<FrameData, GeometryError> {
    frame_at_order(spec, point, MAX_ORDER, tol)
}

/// As [`frame_at`], with jets of the given order (at least 2).
pub fn frame_at_order(
    spec: &ImmersionSpec,
    point: &[f64],
    order: usize,
    tol: &Tolerances,
) -> Result<FrameData, GeometryError> {
    Ok(FrameData::from_local(&LocalGeometry::new(spec, point, order, tol)?))
}

/// `|A|²`, `|A_H|²` and the spectrum of `A_H`.
pub fn shape_operator_norms(frame: &FrameData) -> ShapeNorms {
    frame.shape_norms()
}
