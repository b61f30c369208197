//! Numerical verification of biharmonic submanifolds of unit spheres.
//!
//! Immersions `φ: M^m → S^n ⊂ R^{n+1}` are given by component expressions
//! and evaluated as truncated Taylor jets, from which every extrinsic and
//! intrinsic quantity is assembled exactly up to rounding.

// Tensor code indexes several arrays per loop, and `!(x > y)` rejects NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod biharmonic;
pub mod catalog;
pub mod dsl;
pub mod geometry;
pub mod grid;
pub mod jet;
pub mod spectral;
pub mod tolerance;

pub use biharmonic::{CheckReport, Survey, Verdict};
pub use catalog::{CatalogEntry, Family};
pub use dsl::{parse_expression, Expr, ImmersionSpec};
pub use geometry::{frame_at, FrameData, GeometryError, PointEval};
pub use grid::Grid;
pub use jet::Jet;
pub use spectral::SpectralEstimate;
pub use tolerance::Tolerances;
