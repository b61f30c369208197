use std::fmt::Write as _;

use thiserror::Error;

use crate::jet::{Elementary, Jet, JetError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Log,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "log" => Func::Log,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Log => "log",
        }
    }

    fn elementary(self) -> Elementary {
        match self {
            Func::Sin => Elementary::Sin,
            Func::Cos => Elementary::Cos,
            Func::Exp => Elementary::Exp,
            Func::Sqrt => Elementary::Sqrt,
            Func::Log => Elementary::Log,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

/// Expression tree over numeric literals, parameters, `pi`, and elementary functions.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Index into the declared parameter list.
    Param(usize),
    Pi,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Integer power.
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("evaluating `{expr}`: {source}")]
pub struct EvalError {
    pub expr: String,
    #[source]
    pub source: JetError,
}

impl Expr {
    /// Fully parenthesized source text; re-parses to an identical tree.
    pub fn to_source(&self, params: &[String]) -> String {
        let mut s = String::new();
        self.write_source(params, &mut s);
        s
    }

    fn write_source(&self, params: &[String], out: &mut String) {
        match self {
            Expr::Num(x) => {
                let _ = write!(out, "{x:?}");
            }
            Expr::Param(i) => out.push_str(params.get(*i).map(String::as_str).unwrap_or("?")),
            Expr::Pi => out.push_str("pi"),
            Expr::Neg(e) => {
                out.push_str("(-");
                e.write_source(params, out);
                out.push(')');
            }
            Expr::Binary(op, a, b) => {
                out.push('(');
                a.write_source(params, out);
                out.push(' ');
                out.push(op.symbol());
                out.push(' ');
                b.write_source(params, out);
                out.push(')');
            }
            Expr::Pow(e, n) => {
                out.push('(');
                e.write_source(params, out);
                let _ = write!(out, ")^{n}");
            }
            Expr::Call(f, e) => {
                out.push_str(f.name());
                out.push('(');
                e.write_source(params, out);
                out.push(')');
            }
        }
    }

    /// Largest parameter index referenced, if any.
    pub fn max_param(&self) -> Option<usize> {
        match self {
            Expr::Num(_) | Expr::Pi => None,
            Expr::Param(i) => Some(*i),
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.max_param(),
            Expr::Binary(_, a, b) => match (a.max_param(), b.max_param()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
        }
    }

    /// Jet of the expression at `point`; parameter `i` becomes the coordinate jet `x_i`.
    pub fn eval(&self, point: &[f64], order: usize, params: &[String]) -> Result<Jet, EvalError> {
        let nv = point.len();
        let wrap = |e: &Expr, source| EvalError { expr: e.to_source(params), source };
        match self {
            Expr::Num(x) => Ok(Jet::constant(*x, nv, order)),
            Expr::Pi => Ok(Jet::constant(std::f64::consts::PI, nv, order)),
            Expr::Param(i) => {
                let value = point.get(*i).copied().unwrap_or(f64::NAN);
                Jet::variable(*i, value, nv, order).map_err(|e| wrap(self, e))
            }
            Expr::Neg(e) => Ok(-e.eval(point, order, params)?),
            Expr::Binary(op, a, b) => {
                let x = a.eval(point, order, params)?;
                let y = b.eval(point, order, params)?;
                Ok(match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => x * y.recip().map_err(|e| wrap(b, e))?,
                })
            }
            Expr::Pow(e, n) => {
                let x = e.eval(point, order, params)?;
                x.powi(*n).map_err(|err| wrap(self, err))
            }
            Expr::Call(f, e) => {
                let x = e.eval(point, order, params)?;
                x.apply(f.elementary()).map_err(|err| wrap(self, err))
            }
        }
    }
}
