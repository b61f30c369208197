//! Truncated multivariate Taylor expansions ("jets").
//!
//! A [`Jet`] stores the Taylor coefficients `∂^α f / α!` of a scalar function
//! at a point, for every multi-index `|α| ≤ order`, in up to [`MAX_VARS`]
//! variables and up to [`MAX_ORDER`]. Coefficients use a dense graded
//! lexicographic layout, so the coefficients of a lower-order jet are a prefix
//! of the coefficients of a higher-order one. Multiplication is a truncated
//! Cauchy product; mixed-order arithmetic truncates to the lower order.
//!
//! ```
//! use bitension_core::jet::Jet;
//!
//! let u = Jet::variable(0, 2.0, 1, 2).unwrap();
//! let sq = &u * &u;
//! assert_eq!(sq.coeffs(), &[4.0, 4.0, 1.0]);
//! assert_eq!(sq.extract(&[2]).unwrap(), 2.0);
//! ```

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::OnceLock;

use thiserror::Error;

/// Largest supported number of variables.
pub const MAX_VARS: usize = 4;
/// Largest supported truncation order.
pub const MAX_ORDER: usize = 4;
/// Number of multi-indices with `|α| ≤ 4` in 4 variables.
pub const MAX_COEFFS: usize = 70;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("variable index {index} out of range for {num_vars} variable(s)")]
    VariableOutOfRange { index: usize, num_vars: usize },
    #[error("unsupported jet shape: {num_vars} variable(s), order {order}")]
    UnsupportedShape { num_vars: usize, order: usize },
    #[error("mismatched number of variables: {left} vs {right}")]
    MismatchedVars { left: usize, right: usize },
    #[error("{function} is undefined at {value}")]
    Domain { function: &'static str, value: f64 },
    #[error("cannot differentiate an order-0 jet")]
    OrderZero,
    #[error("multi-index of total degree {degree} exceeds jet order {order}")]
    OrderExceeded { degree: usize, order: usize },
    #[error("multi-index has {len} entries, expected {num_vars}")]
    BadMultiIndex { len: usize, num_vars: usize },
}

/// Elementary functions that can be composed with a jet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elementary {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Log,
    Neg,
    Recip,
    PowInt(i32),
}

impl Elementary {
    pub fn name(self) -> &'static str {
        match self {
            Elementary::Sin => "sin",
            Elementary::Cos => "cos",
            Elementary::Exp => "exp",
            Elementary::Sqrt => "sqrt",
            Elementary::Log => "log",
            Elementary::Neg => "neg",
            Elementary::Recip => "recip",
            Elementary::PowInt(_) => "pow",
        }
    }

    /// `f^(k)(x)` for `k = 0..=order`.
    fn derivatives(self, x: f64, order: usize) -> Result<[f64; MAX_ORDER + 1], JetError> {
        let mut d = [0.0; MAX_ORDER + 1];
        let domain = |function| JetError::Domain { function, value: x };
        match self {
            Elementary::Sin | Elementary::Cos => {
                let (s, c) = x.sin_cos();
                let cycle = if self == Elementary::Sin {
                    [s, c, -s, -c]
                } else {
                    [c, -s, -c, s]
                };
                for (k, dk) in d.iter_mut().enumerate().take(order + 1) {
                    *dk = cycle[k % 4];
                }
            }
            Elementary::Exp => {
                let e = x.exp();
                d.iter_mut().take(order + 1).for_each(|dk| *dk = e);
            }
            Elementary::Sqrt => {
                if !(x > 0.0) {
                    return Err(domain("sqrt"));
                }
                // d^k/dx^k x^(1/2) = (1/2)(1/2 - 1)...(1/2 - k + 1) x^(1/2 - k)
                let mut falling = 1.0;
                for (k, dk) in d.iter_mut().enumerate().take(order + 1) {
                    *dk = falling * x.powf(0.5 - k as f64);
                    falling *= 0.5 - k as f64;
                }
            }
            Elementary::Log => {
                if !(x > 0.0) {
                    return Err(domain("log"));
                }
                d[0] = x.ln();
                let mut fact = 1.0;
                for k in 1..=order {
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    d[k] = sign * fact / x.powi(k as i32);
                    fact *= k as f64;
                }
            }
            Elementary::Neg => {
                d[0] = -x;
                if order >= 1 {
                    d[1] = -1.0;
                }
            }
            Elementary::Recip => {
                if x == 0.0 {
                    return Err(domain("recip"));
                }
                let mut fact = 1.0;
                for (k, dk) in d.iter_mut().enumerate().take(order + 1) {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    *dk = sign * fact / x.powi(k as i32 + 1);
                    fact *= (k + 1) as f64;
                }
            }
            Elementary::PowInt(n) => {
                if n < 0 && x == 0.0 {
                    return Err(domain("pow"));
                }
                let mut falling = 1.0;
                for (k, dk) in d.iter_mut().enumerate().take(order + 1) {
                    let e = n - k as i32;
                    *dk = if falling == 0.0 { 0.0 } else { falling * x.powi(e) };
                    falling *= (n - k as i32) as f64;
                }
            }
        }
        Ok(d)
    }
}

struct Layout {
    /// Multi-indices in graded lexicographic order.
    indices: Vec<[u8; MAX_VARS]>,
    /// `counts[o]` = number of multi-indices with `|α| ≤ o`.
    counts: [usize; MAX_ORDER + 1],
    /// Base-5 code of α to its position.
    lookup: [u16; 625],
    /// `(a, b, out)` triples of the Cauchy product, sorted by the degree of `out`.
    products: Vec<(u16, u16, u16)>,
    /// `product_counts[o]` = number of triples whose output degree is `≤ o`.
    product_counts: [usize; MAX_ORDER + 1],
}

const NO_INDEX: u16 = u16::MAX;

fn code(alpha: &[u8; MAX_VARS]) -> usize {
    alpha.iter().fold(0, |acc, &a| acc * 5 + a as usize)
}

fn degree(alpha: &[u8; MAX_VARS]) -> usize {
    alpha.iter().map(|&a| a as usize).sum()
}

impl Layout {
    fn build(num_vars: usize) -> Self {
        let mut indices = Vec::new();
        let mut counts = [0; MAX_ORDER + 1];
        for d in 0..=MAX_ORDER {
            let mut alpha = [0u8; MAX_VARS];
            push_degree(num_vars, 0, d, &mut alpha, &mut indices);
            counts[d] = indices.len();
        }
        let mut lookup = [NO_INDEX; 625];
        for (k, alpha) in indices.iter().enumerate() {
            lookup[code(alpha)] = k as u16;
        }
        let mut products = Vec::new();
        for (ia, a) in indices.iter().enumerate() {
            for (ib, b) in indices.iter().enumerate() {
                let mut s = [0u8; MAX_VARS];
                for v in 0..MAX_VARS {
                    s[v] = a[v] + b[v];
                }
                if degree(&s) <= MAX_ORDER {
                    products.push((ia as u16, ib as u16, lookup[code(&s)]));
                }
            }
        }
        products.sort_by_key(|&(_, _, out)| (degree(&indices[out as usize]), out));
        let mut product_counts = [0; MAX_ORDER + 1];
        for (o, slot) in product_counts.iter_mut().enumerate() {
            *slot = products
                .iter()
                .filter(|&&(_, _, out)| degree(&indices[out as usize]) <= o)
                .count();
        }
        Layout {
            indices,
            counts,
            lookup,
            products,
            product_counts,
        }
    }

    fn position(&self, alpha: &[u8; MAX_VARS]) -> Option<usize> {
        if alpha.iter().any(|&a| a as usize > MAX_ORDER) {
            return None;
        }
        match self.lookup[code(alpha)] {
            NO_INDEX => None,
            k => Some(k as usize),
        }
    }
}

/// Enumerate all α with `|α| = remaining + (already placed)` over variables
/// `var..num_vars`, in lexicographic order with the first variable varying slowest
/// from high to low.
fn push_degree(
    num_vars: usize,
    var: usize,
    remaining: usize,
    alpha: &mut [u8; MAX_VARS],
    out: &mut Vec<[u8; MAX_VARS]>,
) {
    if var + 1 == num_vars {
        alpha[var] = remaining as u8;
        out.push(*alpha);
        alpha[var] = 0;
        return;
    }
    for a in (0..=remaining).rev() {
        alpha[var] = a as u8;
        push_degree(num_vars, var + 1, remaining - a, alpha, out);
    }
    alpha[var] = 0;
}

fn layout(num_vars: usize) -> &'static Layout {
    static LAYOUTS: OnceLock<Vec<Layout>> = OnceLock::new();
    &LAYOUTS.get_or_init(|| (1..=MAX_VARS).map(Layout::build).collect())[num_vars - 1]
}

/// Number of Taylor coefficients of a jet with the given shape.
pub fn coefficient_count(num_vars: usize, order: usize) -> usize {
    layout(num_vars).counts[order]
}

/// Truncated Taylor expansion of a scalar function at a point.
#[derive(Clone, Copy)]
pub struct Jet {
    num_vars: u8,
    order: u8,
    coeffs: [f64; MAX_COEFFS],
}

impl Jet {
    fn check_shape(num_vars: usize, order: usize) -> Result<(), JetError> {
        if num_vars == 0 || num_vars > MAX_VARS || order > MAX_ORDER {
            return Err(JetError::UnsupportedShape { num_vars, order });
        }
        Ok(())
    }

    fn zeros(num_vars: usize, order: usize) -> Self {
        Jet {
            num_vars: num_vars as u8,
            order: order as u8,
            coeffs: [0.0; MAX_COEFFS],
        }
    }

    /// Jet of a constant function.
    ///
    /// Panics if the shape exceeds [`MAX_VARS`] / [`MAX_ORDER`].
    pub fn constant(value: f64, num_vars: usize, order: usize) -> Self {
        Self::check_shape(num_vars, order).expect("jet shape");
        let mut j = Self::zeros(num_vars, order);
        j.coeffs[0] = value;
        j
    }

    /// Jet of the coordinate function `x_index` at `x_index = value`.
    pub fn variable(index: usize, value: f64, num_vars: usize, order: usize) -> Result<Self, JetError> {
        Self::check_shape(num_vars, order)?;
        if index >= num_vars {
            return Err(JetError::VariableOutOfRange { index, num_vars });
        }
        let mut j = Self::zeros(num_vars, order);
        j.coeffs[0] = value;
        if order >= 1 {
            let mut alpha = [0u8; MAX_VARS];
            alpha[index] = 1;
            let k = layout(num_vars).position(&alpha).expect("unit index");
            j.coeffs[k] = 1.0;
        }
        Ok(j)
    }

    /// Build a jet from coefficients in the crate's graded layout.
    pub fn from_coeffs(num_vars: usize, order: usize, coeffs: &[f64]) -> Result<Self, JetError> {
        Self::check_shape(num_vars, order)?;
        let n = coefficient_count(num_vars, order);
        if coeffs.len() != n {
            return Err(JetError::BadMultiIndex { len: coeffs.len(), num_vars: n });
        }
        let mut j = Self::zeros(num_vars, order);
        j.coeffs[..n].copy_from_slice(coeffs);
        Ok(j)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars as usize
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    /// The function value (zero multi-index coefficient).
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Active Taylor coefficients in graded lexicographic order.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs[..coefficient_count(self.num_vars(), self.order())]
    }

    /// Multi-indices matching [`Jet::coeffs`] position by position.
    pub fn multi_indices(num_vars: usize, order: usize) -> Vec<Vec<usize>> {
        let l = layout(num_vars);
        l.indices[..l.counts[order]]
            .iter()
            .map(|a| a[..num_vars].iter().map(|&x| x as usize).collect())
            .collect()
    }

    fn alpha(&self, alpha: &[usize]) -> Result<[u8; MAX_VARS], JetError> {
        if alpha.len() != self.num_vars() {
            return Err(JetError::BadMultiIndex { len: alpha.len(), num_vars: self.num_vars() });
        }
        let deg: usize = alpha.iter().sum();
        if deg > self.order() {
            return Err(JetError::OrderExceeded { degree: deg, order: self.order() });
        }
        let mut a = [0u8; MAX_VARS];
        for (slot, &x) in a.iter_mut().zip(alpha) {
            *slot = x as u8;
        }
        Ok(a)
    }

    /// Taylor coefficient `∂^α f / α!`.
    pub fn coeff(&self, alpha: &[usize]) -> Result<f64, JetError> {
        let a = self.alpha(alpha)?;
        Ok(self.coeffs[layout(self.num_vars()).position(&a).expect("valid index")])
    }

    /// Partial derivative `∂^α f = α! · coeff(α)`.
    pub fn extract(&self, alpha: &[usize]) -> Result<f64, JetError> {
        let c = self.coeff(alpha)?;
        let fact: f64 = alpha.iter().map(|&a| factorial(a)).product();
        Ok(fact * c)
    }

    /// Jet of `∂f/∂x_index`, one order lower.
    pub fn derive(&self, index: usize) -> Result<Jet, JetError> {
        if self.order == 0 {
            return Err(JetError::OrderZero);
        }
        if index >= self.num_vars() {
            return Err(JetError::VariableOutOfRange { index, num_vars: self.num_vars() });
        }
        let l = layout(self.num_vars());
        let order = self.order() - 1;
        let mut out = Self::zeros(self.num_vars(), order);
        for k in 0..l.counts[order] {
            let mut shifted = l.indices[k];
            shifted[index] += 1;
            let src = l.position(&shifted).expect("shifted index within order");
            out.coeffs[k] = shifted[index] as f64 * self.coeffs[src];
        }
        Ok(out)
    }

    /// Drop every coefficient above `order`.
    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.order() {
            return *self;
        }
        let mut out = Self::zeros(self.num_vars(), order);
        let n = coefficient_count(self.num_vars(), order);
        out.coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        out
    }

    fn same_vars(&self, other: &Jet) -> Result<(), JetError> {
        if self.num_vars != other.num_vars {
            return Err(JetError::MismatchedVars { left: self.num_vars(), right: other.num_vars() });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Jet) -> Result<Jet, JetError> {
        self.same_vars(other)?;
        let order = self.order().min(other.order());
        let mut out = Self::zeros(self.num_vars(), order);
        for k in 0..coefficient_count(self.num_vars(), order) {
            out.coeffs[k] = self.coeffs[k] + other.coeffs[k];
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Jet) -> Result<Jet, JetError> {
        self.try_add(&other.scale(-1.0))
    }

    /// Truncated Cauchy product.
    pub fn try_mul(&self, other: &Jet) -> Result<Jet, JetError> {
        self.same_vars(other)?;
        let l = layout(self.num_vars());
        let order = self.order().min(other.order());
        let mut out = Self::zeros(self.num_vars(), order);
        for &(a, b, c) in &l.products[..l.product_counts[order]] {
            out.coeffs[c as usize] += self.coeffs[a as usize] * other.coeffs[b as usize];
        }
        Ok(out)
    }

    pub fn scale(&self, factor: f64) -> Jet {
        let mut out = *self;
        out.coeffs.iter_mut().for_each(|c| *c *= factor);
        out
    }

    pub fn add_scalar(&self, value: f64) -> Jet {
        let mut out = *self;
        out.coeffs[0] += value;
        out
    }

    /// Taylor composition `f ∘ self`, truncated at `self.order()`.
    pub fn apply(&self, f: Elementary) -> Result<Jet, JetError> {
        if let Elementary::PowInt(n) = f {
            if n >= 0 {
                return Ok(self.powi_nonneg(n as u32));
            }
        }
        let order = self.order();
        let d = f.derivatives(self.value(), order)?;
        // f(x0 + h) = Σ f^(k)(x0)/k! h^k with h = self - x0
        let mut h = *self;
        h.coeffs[0] = 0.0;
        let mut out = Jet::constant(d[0], self.num_vars(), order);
        let mut power = Jet::constant(1.0, self.num_vars(), order);
        let mut fact = 1.0;
        for (k, dk) in d.iter().enumerate().take(order + 1).skip(1) {
            power = power * h;
            fact *= k as f64;
            let c = dk / fact;
            for i in 1..coefficient_count(self.num_vars(), order) {
                out.coeffs[i] += c * power.coeffs[i];
            }
        }
        Ok(out)
    }

    fn powi_nonneg(&self, mut n: u32) -> Jet {
        let mut base = *self;
        let mut acc = Jet::constant(1.0, self.num_vars(), self.order());
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    pub fn sin(&self) -> Jet {
        self.apply(Elementary::Sin).expect("sin is total")
    }

    pub fn cos(&self) -> Jet {
        self.apply(Elementary::Cos).expect("cos is total")
    }

    pub fn exp(&self) -> Jet {
        self.apply(Elementary::Exp).expect("exp is total")
    }

    pub fn sqrt(&self) -> Result<Jet, JetError> {
        self.apply(Elementary::Sqrt)
    }

    pub fn ln(&self) -> Result<Jet, JetError> {
        self.apply(Elementary::Log)
    }

    pub fn recip(&self) -> Result<Jet, JetError> {
        self.apply(Elementary::Recip)
    }

    pub fn powi(&self, n: i32) -> Result<Jet, JetError> {
        self.apply(Elementary::PowInt(n))
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        self.num_vars == other.num_vars && self.order == other.order && self.coeffs() == other.coeffs()
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("num_vars", &self.num_vars)
            .field("order", &self.order)
            .field("coeffs", &self.coeffs())
            .finish()
    }
}

// Operator forms panic on mismatched variable counts; use the `try_*`
// methods where that can happen.
impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.try_add(rhs).expect("jet addition")
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        self.try_add(&rhs).expect("jet addition")
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        *self = &*self + rhs;
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.try_sub(rhs).expect("jet subtraction")
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self.try_sub(&rhs).expect("jet subtraction")
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.try_mul(rhs).expect("jet multiplication")
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        self.try_mul(&rhs).expect("jet multiplication")
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn coefficient_counts() {
        assert_eq!(coefficient_count(1, 4), 5);
        assert_eq!(coefficient_count(2, 2), 6);
        assert_eq!(coefficient_count(3, 4), 35);
        assert_eq!(coefficient_count(4, 4), MAX_COEFFS);
    }

    #[test]
    fn variable_jets() {
        let j = Jet::variable(0, 2.0, 1, 2).unwrap();
        assert_eq!(j.coeffs(), &[2.0, 1.0, 0.0]);
        let j = Jet::variable(1, 0.0, 2, 1).unwrap();
        assert_eq!(j.value(), 0.0);
        assert_eq!(j.coeff(&[0, 1]).unwrap(), 1.0);
        assert_eq!(j.coeff(&[1, 0]).unwrap(), 0.0);
        let j = Jet::variable(0, PI, 1, 0).unwrap();
        assert_eq!(j.coeffs(), &[PI]);
        assert_eq!(
            Jet::variable(2, 0.0, 2, 1),
            Err(JetError::VariableOutOfRange { index: 2, num_vars: 2 })
        );
    }

    #[test]
    fn multiplication() {
        let u = Jet::variable(0, 2.0, 1, 2).unwrap();
        assert_eq!((u * u).coeffs(), &[4.0, 4.0, 1.0]);
        let one = Jet::constant(1.0, 1, 2);
        assert_eq!(u * one, u);
        let x = Jet::variable(0, 0.0, 1, 2).unwrap();
        let p = x.add_scalar(1.0) * (-x).add_scalar(1.0);
        assert_eq!(p.coeffs(), &[1.0, 0.0, -1.0]);
        let a = Jet::constant(1.0, 1, 2);
        let b = Jet::constant(1.0, 2, 2);
        assert_eq!(a.try_mul(&b), Err(JetError::MismatchedVars { left: 1, right: 2 }));
    }

    #[test]
    fn mixed_order_truncates() {
        let a = Jet::variable(0, 1.0, 2, 4).unwrap();
        let b = Jet::variable(1, 1.0, 2, 2).unwrap();
        let p = a * b;
        assert_eq!(p.order(), 2);
        assert_eq!((a + b).order(), 2);
    }

    #[test]
    fn elementary_functions() {
        let x = Jet::variable(0, 0.0, 1, 4).unwrap();
        let s = x.sin();
        let expected = [0.0, 1.0, 0.0, -1.0 / 6.0, 0.0];
        for (a, b) in s.coeffs().iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-16);
        }
        let c = Jet::constant(0.7, 2, 3).exp();
        assert_abs_diff_eq!(c.value(), 0.7f64.exp(), epsilon = 1e-15);
        assert!(c.coeffs()[1..].iter().all(|&v| v == 0.0));

        let sq = Jet::from_coeffs(1, 2, &[4.0, 4.0, 1.0]).unwrap();
        let r = sq.sqrt().unwrap();
        for (a, b) in r.coeffs().iter().zip([2.0, 1.0, 0.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        let back = r * r;
        for (a, b) in back.coeffs().iter().zip(sq.coeffs()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-14);
        }
    }

    #[test]
    fn domain_errors() {
        let n = Jet::constant(-1.0, 1, 2);
        assert_eq!(n.sqrt(), Err(JetError::Domain { function: "sqrt", value: -1.0 }));
        assert!(Jet::constant(0.0, 1, 2).ln().is_err());
        assert!(Jet::constant(0.0, 1, 2).recip().is_err());
        assert!(Jet::constant(0.0, 1, 2).powi(-2).is_err());
        assert!(Jet::constant(0.0, 1, 2).powi(3).is_ok());
    }

    #[test]
    fn log_recip_pow_match_closed_forms() {
        let x = Jet::variable(0, 1.5, 1, 4).unwrap();
        let l = x.ln().unwrap();
        // log derivatives: 1/x, -1/x^2, 2/x^3, -6/x^4
        let ex = [1.5f64.ln(), 1.0 / 1.5, -1.0 / 1.5f64.powi(2), 2.0 / 1.5f64.powi(3), -6.0 / 1.5f64.powi(4)];
        for (k, e) in ex.iter().enumerate() {
            assert_abs_diff_eq!(l.extract(&[k]).unwrap(), *e, epsilon = 1e-13);
        }
        let p = x.powi(-2).unwrap();
        let ex = [1.5f64.powi(-2), -2.0 * 1.5f64.powi(-3), 6.0 * 1.5f64.powi(-4), -24.0 * 1.5f64.powi(-5), 120.0 * 1.5f64.powi(-6)];
        for (k, e) in ex.iter().enumerate() {
            assert_abs_diff_eq!(p.extract(&[k]).unwrap(), *e, epsilon = 1e-12);
        }
        let r = x.recip().unwrap();
        let prod = r * x;
        assert_abs_diff_eq!(prod.value(), 1.0, epsilon = 1e-15);
        assert!(prod.coeffs()[1..].iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn derive_and_extract() {
        let j = Jet::from_coeffs(1, 2, &[2.0, 1.0, 0.0]).unwrap();
        assert_eq!(j.derive(0).unwrap().coeffs(), &[1.0, 0.0]);
        let s = Jet::variable(0, 0.0, 1, 4).unwrap().sin();
        let c = s.derive(0).unwrap();
        for (a, b) in c.coeffs().iter().zip([1.0, 0.0, -0.5, 0.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-16);
        }
        let sq = Jet::from_coeffs(1, 2, &[4.0, 4.0, 1.0]).unwrap();
        assert_eq!(sq.extract(&[2]).unwrap(), 2.0);
        assert_eq!(sq.derive(0).unwrap().derive(0).unwrap().value(), 2.0 * sq.coeff(&[2]).unwrap());
        assert_eq!(sq.extract(&[0]).unwrap(), 4.0);
        let s3 = Jet::variable(0, 0.0, 1, 3).unwrap().sin();
        assert_abs_diff_eq!(s3.extract(&[3]).unwrap(), -1.0, epsilon = 1e-15);
        assert_eq!(Jet::constant(1.0, 1, 0).derive(0), Err(JetError::OrderZero));
        assert_eq!(sq.extract(&[3]), Err(JetError::OrderExceeded { degree: 3, order: 2 }));
    }

    fn random_jet(num_vars: usize, order: usize) -> impl Strategy<Value = Jet> {
        let n = coefficient_count(num_vars, order);
        proptest::collection::vec(-2.0f64..2.0, n)
            .prop_map(move |c| Jet::from_coeffs(num_vars, order, &c).unwrap())
    }

    fn jet_pair() -> impl Strategy<Value = (Jet, Jet, usize)> {
        (1usize..=4, 1usize..=4).prop_flat_map(|(nv, ord)| {
            (random_jet(nv, ord), random_jet(nv, ord), 0..nv)
        })
    }

    proptest! {
        #[test]
        fn product_rule((a, b, i) in jet_pair()) {
            let lhs = (a * b).derive(i).unwrap();
            let rhs = (a.derive(i).unwrap() * b) + (a * b.derive(i).unwrap());
            for (x, y) in lhs.coeffs().iter().zip(rhs.coeffs()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }

        #[test]
        fn pythagorean_chain_rule((a, _b, _i) in jet_pair()) {
            let s = a.sin();
            let c = a.cos();
            let one = (s * s) + (c * c);
            prop_assert!((one.value() - 1.0).abs() < 1e-13);
            for x in &one.coeffs()[1..] {
                prop_assert!(x.abs() < 1e-12);
            }
        }
    }
}
