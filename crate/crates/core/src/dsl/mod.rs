//! Immersion component expressions and the [`ImmersionSpec`] that bundles them.

mod expr;
mod parser;

pub use expr::{BinOp, EvalError, Expr, Func};
pub use parser::{parse_expression, ParseError};

use thiserror::Error;

use crate::jet::{Jet, MAX_VARS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("component {component}: {source}")]
    Parse {
        component: usize,
        #[source]
        source: ParseError,
    },
    #[error("expected {expected} component(s), found {found}")]
    Arity { expected: usize, found: usize },
    #[error("{0} parameter(s) declared; between 1 and {MAX_VARS} are supported")]
    Dimension(usize),
    #[error("ambient dimension {ambient} must exceed intrinsic dimension {m}")]
    Codimension { m: usize, ambient: usize },
    #[error("parameter {name:?} is reserved or duplicated")]
    BadParameter { name: String },
    #[error("parameter {index} has an empty domain [{lo}, {hi}]")]
    EmptyDomain { index: usize, lo: f64, hi: f64 },
    #[error("{field} lists {found} entries for {expected} parameter(s)")]
    FieldLength {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("sum of squared components is {value} at {point:?}, not 1")]
    NotSpherical { point: Vec<f64>, value: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A parametrization `M^m → S^n ⊂ R^{n+1}` by component expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct ImmersionSpec {
    name: String,
    params: Vec<String>,
    sources: Vec<String>,
    components: Vec<Expr>,
    domain: Vec<(f64, f64)>,
    periodic: Vec<bool>,
    closed: bool,
}

impl ImmersionSpec {
    /// Parse components over the named parameters.
    ///
    /// `domain[i]` is the parameter interval; a periodic parameter has period
    /// `hi - lo`. `closed` states that the domain covers a closed manifold
    /// (e.g. polar coordinates on a sphere), which cannot be detected from
    /// the parametrization.
    pub fn parse(
        name: &str,
        params: &[&str],
        components: &[&str],
        ambient_dim: usize,
        domain: &[(f64, f64)],
        periodic: &[bool],
        closed: bool,
    ) -> Result<Self, SpecError> {
        let params: Vec<String> = params.iter().map(|s| s.to_string()).collect();
        let m = params.len();
        if m == 0 || m > MAX_VARS {
            return Err(SpecError::Dimension(m));
        }
        for (i, p) in params.iter().enumerate() {
            if p == "pi" || Func::from_name(p).is_some() || params[..i].contains(p) {
                return Err(SpecError::BadParameter { name: p.clone() });
            }
        }
        if components.len() != ambient_dim {
            return Err(SpecError::Arity { expected: ambient_dim, found: components.len() });
        }
        if ambient_dim < m + 2 {
            return Err(SpecError::Codimension { m, ambient: ambient_dim });
        }
        if domain.len() != m {
            return Err(SpecError::FieldLength { field: "domain", expected: m, found: domain.len() });
        }
        if periodic.len() != m {
            return Err(SpecError::FieldLength { field: "periodic", expected: m, found: periodic.len() });
        }
        for (index, &(lo, hi)) in domain.iter().enumerate() {
            if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
                return Err(SpecError::EmptyDomain { index, lo, hi });
            }
        }
        let parsed = components
            .iter()
            .enumerate()
            .map(|(component, src)| {
                parse_expression(src, &params).map_err(|source| SpecError::Parse { component, source })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ImmersionSpec {
            name: name.to_string(),
            params,
            sources: components.iter().map(|s| s.to_string()).collect(),
            components: parsed,
            domain: domain.to_vec(),
            periodic: periodic.to_vec(),
            closed,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Intrinsic dimension `m`.
    pub fn dim(&self) -> usize {
        self.params.len()
    }

    /// Number of Euclidean components, `n + 1`.
    pub fn ambient_dim(&self) -> usize {
        self.components.len()
    }

    /// Dimension `n` of the target sphere.
    pub fn sphere_dim(&self) -> usize {
        self.components.len() - 1
    }

    /// Codimension of `M` in `S^n`.
    pub fn codim(&self) -> usize {
        self.sphere_dim() - self.dim()
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn sources(&self) -> &[String] {
        &self.sources
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn periodic(&self) -> &[bool] {
        &self.periodic
    }

    /// Period of parameter `i`, if periodic.
    pub fn period(&self, i: usize) -> Option<f64> {
        self.periodic[i].then(|| self.domain[i].1 - self.domain[i].0)
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Component jets at `point`.
    pub fn eval(&self, point: &[f64], order: usize) -> Result<Vec<Jet>, EvalError> {
        self.components.iter().map(|e| e.eval(point, order, &self.params)).collect()
    }

    /// Position vector at `point`.
    pub fn position(&self, point: &[f64]) -> Result<Vec<f64>, EvalError> {
        Ok(self.eval(point, 0)?.iter().map(Jet::value).collect())
    }

    /// Check `Σ φ_c² = 1` at every point within `tol`.
    pub fn validate_sphere<'a, I>(&self, points: I, tol: f64) -> Result<(), SpecError>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        for p in points {
            let value: f64 = self.position(p)?.iter().map(|x| x * x).sum();
            if (value - 1.0).abs() > tol {
                return Err(SpecError::NotSpherical { point: p.to_vec(), value });
            }
        }
        Ok(())
    }
}
