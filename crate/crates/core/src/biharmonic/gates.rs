//! Scalar inequality gates on `m`, `|H|` and `|B|²`.

use thiserror::Error;

/// Equality slack used when deciding boundary cases.
const EQ: f64 = 1e-9;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= EQ * a.abs().max(b.abs()).max(1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub enum RangeVerdict {
    Admissible,
    Excluded,
    /// Admissible value attained only by the named model.
    BoundaryCase(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RangeOutcome {
    pub verdict: RangeVerdict,
    /// The rule that decided the verdict.
    pub rule: &'static str,
}

impl RangeOutcome {
    pub fn is_admissible(&self) -> bool {
        !matches!(self.verdict, RangeVerdict::Excluded)
    }
}

const RULE_GENERAL: &str = "proper biharmonic submanifolds with constant mean curvature have |H| in (0, 1]";
const RULE_HYPERSURFACE: &str =
    "compact proper biharmonic hypersurfaces with constant mean curvature and m ≥ 4 have |H| in (0, (m-2)/m] ∪ {1}";

/// Admissible values of `|H|` for a proper biharmonic submanifold with
/// constant mean curvature.
pub fn mean_range_gate(m: usize, h_norm: f64, codim: usize, compact: bool) -> RangeOutcome {
    let general = |verdict| RangeOutcome { verdict, rule: RULE_GENERAL };
    if !(h_norm > 0.0) || (h_norm > 1.0 && !close(h_norm, 1.0)) {
        return general(RangeVerdict::Excluded);
    }
    if codim == 1 && m >= 4 && compact {
        let hyper = |verdict| RangeOutcome { verdict, rule: RULE_HYPERSURFACE };
        let bound = (m as f64 - 2.0) / m as f64;
        return if close(h_norm, 1.0) {
            hyper(RangeVerdict::BoundaryCase(format!("S^{m}(1/√2)")))
        } else if close(h_norm, bound) {
            hyper(RangeVerdict::BoundaryCase(format!("S^1(1/√2)×S^{}(1/√2)", m - 1)))
        } else if h_norm < bound {
            hyper(RangeVerdict::Admissible)
        } else {
            hyper(RangeVerdict::Excluded)
        };
    }
    if close(h_norm, 1.0) {
        general(RangeVerdict::BoundaryCase(format!("minimal submanifold of S^{{n-1}}(1/√2) (m = {m})")))
    } else {
        general(RangeVerdict::Admissible)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GateError {
    #[error("the pinching gate needs m ≥ 3, got {0}")]
    DimensionTooSmall(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum LiBranch {
    HypothesesFail(String),
    /// Lower bound attained: totally umbilical.
    Umbilical,
    /// Upper bound attained: `S^1(√(1-c²)) × S^{m-1}(c)`.
    Clifford { c_squared: f64 },
    /// Both inequalities strict, so neither rigidity case applies.
    InteriorContradiction,
}

impl LiBranch {
    pub fn label(&self) -> &'static str {
        match self {
            LiBranch::HypothesesFail(_) => "hypotheses-fail",
            LiBranch::Umbilical => "umbilical-branch",
            LiBranch::Clifford { .. } => "clifford-branch",
            LiBranch::InteriorContradiction => "interior-contradiction",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiOutcome {
    pub branch: LiBranch,
    pub r: f64,
    pub b2: f64,
    /// `m(r - 1)`
    pub lower: f64,
    /// `(m-1)(m(r-1)+2)/(m-2) + (m-2)/(m(r-1)+2)`
    pub upper: f64,
}

/// Pinching gate for hypersurfaces with constant normalized scalar curvature
/// `r ≥ 1`: `m(r-1) ≤ |B|² ≤ upper`, rigid at both ends.
pub fn li_gate(m: usize, r: f64, b2: f64) -> Result<LiOutcome, GateError> {
    if m < 3 {
        return Err(GateError::DimensionTooSmall(m));
    }
    let mf = m as f64;
    let x = mf * (r - 1.0) + 2.0;
    let lower = mf * (r - 1.0);
    let upper = (mf - 1.0) * x / (mf - 2.0) + (mf - 2.0) / x;
    let branch = if r < 1.0 && !close(r, 1.0) {
        LiBranch::HypothesesFail(format!("normalized scalar curvature r = {r} < 1"))
    } else if close(b2, lower) {
        LiBranch::Umbilical
    } else if close(b2, upper) {
        LiBranch::Clifford { c_squared: (mf - 2.0) / (mf * r) }
    } else if b2 < lower || b2 > upper {
        LiBranch::HypothesesFail(format!("|B|² = {b2} outside [{lower}, {upper}]"))
    } else {
        LiBranch::InteriorContradiction
    };
    Ok(LiOutcome { branch, r, b2, lower, upper })
}

/// The gate fed by a biharmonic constant mean curvature hypersurface:
/// `t = m|H|² - 1`, `r = 1 + t/(m-1)` and `|B|² = m`.
pub fn li_gate_from_mean(m: usize, h_norm: f64) -> Result<LiOutcome, GateError> {
    let mf = m as f64;
    let t = mf * h_norm * h_norm - 1.0;
    li_gate(m, 1.0 + t / (mf - 1.0), mf)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapBounds {
    /// `λ₁ ≤ m(1 - |H|)`
    pub lambda1: f64,
    /// `Ric ≥ c` forces `c ≤ (m-1)(1 - |H|)`
    pub ricci: f64,
}

/// Upper bounds for mass-symmetric compact proper biharmonic submanifolds
/// with `|H| ∈ (0, 1)`; `None` outside that range.
pub fn spectral_gap_bounds(m: usize, h_norm: f64) -> Option<GapBounds> {
    if !(h_norm > 0.0 && h_norm < 1.0) {
        return None;
    }
    let mf = m as f64;
    Some(GapBounds { lambda1: mf * (1.0 - h_norm), ricci: (mf - 1.0) * (1.0 - h_norm) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn range_examples() {
        assert_eq!(mean_range_gate(5, 0.7, 1, true).verdict, RangeVerdict::Excluded);
        assert_eq!(
            mean_range_gate(4, 0.5, 1, true).verdict,
            RangeVerdict::BoundaryCase("S^1(1/√2)×S^3(1/√2)".into())
        );
        assert_eq!(mean_range_gate(3, 1.2, 2, false).verdict, RangeVerdict::Excluded);
        assert_eq!(mean_range_gate(4, 1.0, 1, true).verdict, RangeVerdict::BoundaryCase("S^4(1/√2)".into()));
        assert_eq!(mean_range_gate(3, 0.9, 1, true).verdict, RangeVerdict::Admissible);
        assert_eq!(mean_range_gate(3, 0.0, 1, true).verdict, RangeVerdict::Excluded);
    }

    #[test]
    fn pinching_examples() {
        let o = li_gate_from_mean(4, 1.0).unwrap();
        assert_eq!(o.branch, LiBranch::Umbilical);
        assert!((o.upper - 28.0 / 3.0).abs() < 1e-12);
        let o = li_gate_from_mean(4, 0.5).unwrap();
        assert_eq!(o.branch, LiBranch::Clifford { c_squared: 0.5 });
        let o = li_gate_from_mean(4, 0.8).unwrap();
        assert_eq!(o.branch, LiBranch::InteriorContradiction);
        assert!((o.lower - 2.08).abs() < 1e-12);
        assert!((o.upper - (6.12 + 2.0 / 4.08)).abs() < 1e-12);
        assert_eq!(li_gate(2, 1.0, 1.0), Err(GateError::DimensionTooSmall(2)));
    }

    #[test]
    fn gap_bounds() {
        assert_eq!(spectral_gap_bounds(2, 0.5).unwrap().lambda1, 1.0);
        assert!((spectral_gap_bounds(3, 1.0 / 3.0).unwrap().lambda1 - 2.0).abs() < 1e-15);
        assert_eq!(spectral_gap_bounds(3, 1.0), None);
    }

    proptest! {
        #[test]
        fn pinching_excludes_the_open_gap(m in 4usize..12, s in 0.001f64..0.999) {
            let lo = (m as f64 - 2.0) / m as f64;
            let h = lo + s * (1.0 - lo);
            let o = li_gate_from_mean(m, h).unwrap();
            prop_assert_eq!(o.branch, LiBranch::InteriorContradiction);
            prop_assert!(!mean_range_gate(m, h, 1, true).is_admissible());
        }
    }
}
