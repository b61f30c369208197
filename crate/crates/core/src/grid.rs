//! Tensor-product parameter grids.
//!
//! Two kinds are used: *sample* grids for pointwise checks (uniform nodes,
//! pulled away from the ends of non-periodic axes by a boundary offset) and
//! *quadrature* grids for integrals (trapezoid rule on periodic axes,
//! Gauss–Legendre on the others).

use thiserror::Error;

use crate::dsl::ImmersionSpec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid needs at least {min} point(s) per axis, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("boundary offset fraction {0} must lie in [0, 0.5)")]
    BadOffset(f64),
    #[error("grid is empty")]
    Empty,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Sample,
    Quadrature,
}

/// Nodes of a tensor grid with product weights (`Σ weights` = parameter volume
/// for quadrature grids).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub kind: GridKind,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub per_axis: Vec<usize>,
}

impl Grid {
    /// Uniform sample grid: periodic axes get `n` equispaced nodes over one
    /// period, other axes `n` equispaced nodes in `[lo + ε, hi - ε]` with
    /// `ε = offset · (hi - lo)`.
    pub fn sample(spec: &ImmersionSpec, n: usize, offset: f64) -> Result<Grid, GridError> {
        if n < 3 {
            return Err(GridError::TooFewPoints { min: 3, got: n });
        }
        if !(0.0..0.5).contains(&offset) {
            return Err(GridError::BadOffset(offset));
        }
        let axes: Vec<(Vec<f64>, Vec<f64>)> = spec
            .domain()
            .iter()
            .zip(spec.periodic())
            .map(|(&(lo, hi), &periodic)| {
                let span = hi - lo;
                if periodic {
                    let h = span / n as f64;
                    ((0..n).map(|k| lo + k as f64 * h).collect(), vec![h; n])
                } else {
                    let (a, b) = (lo + offset * span, hi - offset * span);
                    let h = (b - a) / (n - 1) as f64;
                    let nodes = (0..n).map(|k| a + k as f64 * h).collect();
                    let mut w = vec![h; n];
                    w[0] *= 0.5;
                    w[n - 1] *= 0.5;
                    (nodes, w)
                }
            })
            .collect();
        Ok(Self::tensor(GridKind::Sample, &axes))
    }

    /// Quadrature grid with `n` nodes per axis.
    pub fn quadrature(spec: &ImmersionSpec, n: usize) -> Result<Grid, GridError> {
        if n < 1 {
            return Err(GridError::TooFewPoints { min: 1, got: n });
        }
        let (gl_x, gl_w) = gauss_legendre(n);
        let axes: Vec<(Vec<f64>, Vec<f64>)> = spec
            .domain()
            .iter()
            .zip(spec.periodic())
            .map(|(&(lo, hi), &periodic)| {
                let span = hi - lo;
                if periodic {
                    let h = span / n as f64;
                    ((0..n).map(|k| lo + k as f64 * h).collect(), vec![h; n])
                } else {
                    let half = 0.5 * span;
                    let mid = lo + half;
                    (
                        gl_x.iter().map(|x| mid + half * x).collect(),
                        gl_w.iter().map(|w| half * w).collect(),
                    )
                }
            })
            .collect();
        Ok(Self::tensor(GridKind::Quadrature, &axes))
    }

    /// Grid from explicit points (unit weights).
    pub fn from_points(points: Vec<Vec<f64>>) -> Result<Grid, GridError> {
        if points.is_empty() {
            return Err(GridError::Empty);
        }
        let n = points.len();
        Ok(Grid { kind: GridKind::Sample, points, weights: vec![1.0; n], per_axis: vec![n] })
    }

    fn tensor(kind: GridKind, axes: &[(Vec<f64>, Vec<f64>)]) -> Grid {
        let mut points = vec![Vec::new()];
        let mut weights = vec![1.0];
        for (nodes, w) in axes {
            let mut np = Vec::with_capacity(points.len() * nodes.len());
            let mut nw = Vec::with_capacity(points.len() * nodes.len());
            for (p, pw) in points.iter().zip(&weights) {
                for (x, xw) in nodes.iter().zip(w) {
                    let mut q = p.clone();
                    q.push(*x);
                    np.push(q);
                    nw.push(pw * xw);
                }
            }
            points = np;
            weights = nw;
        }
        Grid { kind, points, weights, per_axis: axes.iter().map(|a| a.0.len()).collect() }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
