//! Jet-valued geometric fields of `φ: M^m → S^n ⊂ R^{n+1}` around one point.

use nalgebra::{DMatrix, SymmetricEigen};

use super::GeometryError;
use crate::dsl::ImmersionSpec;
use crate::jet::{Jet, JetError};
use crate::tolerance::Tolerances;

pub(crate) fn dot(a: &[Jet], b: &[Jet]) -> Jet {
    let mut acc = a[0] * b[0];
    for (x, y) in a.iter().zip(b).skip(1) {
        acc += &(x * y);
    }
    acc
}

pub(crate) fn axpy(acc: &mut [Jet], s: &Jet, v: &[Jet]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a = *a + (s * x);
    }
}

pub(crate) fn values(v: &[Jet]) -> Vec<f64> {
    v.iter().map(Jet::value).collect()
}

fn derive_vec(v: &[Jet], i: usize) -> Vec<Jet> {
    v.iter().map(|c| c.derive(i).expect("order checked by caller")).collect()
}

/// Gauss–Jordan inverse of a symmetric positive definite jet matrix.
fn invert(mut a: Vec<Vec<Jet>>) -> Result<Vec<Vec<Jet>>, JetError> {
    let n = a.len();
    let (nv, order) = (a[0][0].num_vars(), a[0][0].order());
    let mut inv: Vec<Vec<Jet>> = (0..n)
        .map(|i| (0..n).map(|j| Jet::constant(if i == j { 1.0 } else { 0.0 }, nv, order)).collect())
        .collect();
    for col in 0..n {
        let pivot = a[col][col].recip()?;
        for j in 0..n {
            a[col][j] = a[col][j] * pivot;
            inv[col][j] = inv[col][j] * pivot;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r][col];
            for j in 0..n {
                a[r][j] = a[r][j] - (f * a[col][j]);
                inv[r][j] = inv[r][j] - (f * inv[col][j]);
            }
        }
    }
    Ok(inv)
}

/// Taylor expansions of the immersion and its first geometric fields.
///
/// With jets of order `k` for `φ`: `dφ`, `g`, `g⁻¹` carry order `k-1`;
/// Christoffel symbols, `B` and `H` carry order `k-2`.
#[derive(Debug, Clone)]
pub struct LocalGeometry {
    pub(crate) point: Vec<f64>,
    pub(crate) m: usize,
    pub(crate) order: usize,
    pub(crate) phi: Vec<Jet>,
    /// `dphi[i][c] = ∂_i φ_c`
    pub(crate) dphi: Vec<Vec<Jet>>,
    pub(crate) metric: Vec<Vec<Jet>>,
    pub(crate) metric_inv: Vec<Vec<Jet>>,
    /// `christoffel[k][i][j] = Γ^k_{ij}`
    pub(crate) christoffel: Vec<Vec<Vec<Jet>>>,
    /// `sff[i][j]` = second fundamental form of `M` in `S^n` as an ambient vector.
    pub(crate) sff: Vec<Vec<Vec<Jet>>>,
    /// Mean curvature vector of `M` in `S^n`.
    pub(crate) mean: Vec<Jet>,
}

impl LocalGeometry {
    pub fn new(spec: &ImmersionSpec, point: &[f64], order: usize, tol: &Tolerances) -> Result<Self, GeometryError> {
        if order < 2 {
            return Err(GeometryError::InsufficientOrder { needed: 2, have: order });
        }
        let m = spec.dim();
        if point.len() != m {
            return Err(GeometryError::PointDimension { expected: m, found: point.len() });
        }
        let phi = spec.eval(point, order)?;
        let radius2: f64 = phi.iter().map(|c| c.value() * c.value()).sum();
        if (radius2 - 1.0).abs() > tol.sphere_abort {
            return Err(GeometryError::NotSpherical { point: point.to_vec(), deviation: radius2 - 1.0 });
        }
        let dphi: Vec<Vec<Jet>> = (0..m).map(|i| derive_vec(&phi, i)).collect();
        let metric: Vec<Vec<Jet>> = (0..m).map(|i| (0..m).map(|j| dot(&dphi[i], &dphi[j])).collect()).collect();

        let g = DMatrix::from_fn(m, m, |i, j| metric[i][j].value());
        let eig = SymmetricEigen::new(g).eigenvalues;
        let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if !(condition <= tol.max_condition) {
            return Err(GeometryError::NotImmersion { point: point.to_vec(), condition });
        }
        let metric_inv = invert(metric.clone())?;

        let hess: Vec<Vec<Vec<Jet>>> =
            (0..m).map(|i| (0..m).map(|j| derive_vec(&dphi[j], i)).collect()).collect();
        // first kind: Γ_{l,ij} = <∂_i∂_j φ, ∂_l φ>
        let first: Vec<Vec<Vec<Jet>>> = (0..m)
            .map(|l| (0..m).map(|i| (0..m).map(|j| dot(&hess[i][j], &dphi[l])).collect()).collect())
            .collect();
        let christoffel: Vec<Vec<Vec<Jet>>> = (0..m)
            .map(|k| {
                (0..m)
                    .map(|i| {
                        (0..m)
                            .map(|j| {
                                let mut acc = metric_inv[k][0] * first[0][i][j];
                                for l in 1..m {
                                    acc += &(metric_inv[k][l] * first[l][i][j]);
                                }
                                acc
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();

        // Euclidean second fundamental form, then shift by g_ij φ to land in T S^n.
        let sff: Vec<Vec<Vec<Jet>>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let mut b = hess[i][j].clone();
                        for k in 0..m {
                            axpy(&mut b, &-&christoffel[k][i][j], &dphi[k]);
                        }
                        axpy(&mut b, &metric[i][j], &phi);
                        b
                    })
                    .collect()
            })
            .collect();

        let mut mean: Vec<Jet> = vec![Jet::constant(0.0, m, order - 2); phi.len()];
        for i in 0..m {
            for j in 0..m {
                axpy(&mut mean, &metric_inv[i][j], &sff[i][j]);
            }
        }
        let mean = mean.iter().map(|c| c.scale(1.0 / m as f64)).collect();

        Ok(LocalGeometry {
            point: point.to_vec(),
            m,
            order,
            phi,
            dphi,
            metric,
            metric_inv,
            christoffel,
            sff,
            mean,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn ambient_dim(&self) -> usize {
        self.phi.len()
    }

    pub(crate) fn require(&self, needed: usize) -> Result<(), GeometryError> {
        if self.order < needed {
            return Err(GeometryError::InsufficientOrder { needed, have: self.order });
        }
        Ok(())
    }

    /// `v - <v, φ> φ`
    pub(crate) fn sphere_tangent(&self, v: &[Jet]) -> Vec<Jet> {
        let r = -dot(v, &self.phi);
        let mut out = v.to_vec();
        axpy(&mut out, &r, &self.phi);
        out
    }

    /// Coordinates `X^i = g^{ij} <v, ∂_j φ>` of the tangential part of `v`.
    pub(crate) fn tangent_coords(&self, v: &[Jet]) -> Vec<Jet> {
        let proj: Vec<Jet> = self.dphi.iter().map(|d| dot(v, d)).collect();
        (0..self.m)
            .map(|i| {
                let mut acc = self.metric_inv[i][0] * proj[0];
                for j in 1..self.m {
                    acc += &(self.metric_inv[i][j] * proj[j]);
                }
                acc
            })
            .collect()
    }

    /// Component of `v` normal to `M` inside `T S^n`.
    pub(crate) fn normal_part(&self, v: &[Jet]) -> Vec<Jet> {
        let coords = self.tangent_coords(v);
        let mut out = self.sphere_tangent(v);
        for (x, d) in coords.iter().zip(&self.dphi) {
            axpy(&mut out, &-x, d);
        }
        out
    }

    /// `∇^φ_{∂_i} v` on the pullback of `T S^n`.
    pub(crate) fn sphere_covariant(&self, v: &[Jet], i: usize) -> Vec<Jet> {
        self.sphere_tangent(&derive_vec(v, i))
    }

    /// `∇⊥_{∂_i} v` in the normal bundle of `M` in `S^n`.
    pub(crate) fn normal_covariant(&self, v: &[Jet], i: usize) -> Vec<Jet> {
        self.normal_part(&derive_vec(v, i))
    }

    /// `-g^{ij}(∇_i ∇_j v - Γ^k_{ij} ∇_k v)` for the given connection; two orders are consumed.
    pub(crate) fn connection_laplacian<F>(&self, v: &[Jet], conn: F) -> Vec<Jet>
    where
        F: Fn(&[Jet], usize) -> Vec<Jet>,
    {
        let m = self.m;
        let first: Vec<Vec<Jet>> = (0..m).map(|j| conn(v, j)).collect();
        let order = first[0][0].order() - 1;
        let mut out = vec![Jet::constant(0.0, m, order); v.len()];
        for i in 0..m {
            for j in 0..m {
                let mut hess = conn(&first[j], i);
                for k in 0..m {
                    axpy(&mut hess, &-&self.christoffel[k][i][j], &first[k]);
                }
                axpy(&mut out, &-&self.metric_inv[i][j], &hess);
            }
        }
        out
    }

    /// Laplace–Beltrami operator `Δf = -g^{ij}(∂_i∂_j f - Γ^k_{ij} ∂_k f)` (nonnegative spectrum).
    pub(crate) fn scalar_laplacian(&self, f: &Jet) -> Jet {
        let v = [*f];
        self.connection_laplacian(&v, derive_vec)[0]
    }
}
