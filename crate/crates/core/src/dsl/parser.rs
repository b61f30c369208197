//! Recursive descent parser for immersion component expressions.
//!
//! ```text
//! expr    := term { ("+"|"-") term } ;
//! term    := factor { ("*"|"/") factor } ;
//! factor  := "-" factor | power ;
//! power   := primary [ "^" ["-"] int ] ;
//! primary := number | ident | func "(" expr ")" | "(" expr ")" ;
//! ```
//!
//! `^` binds tighter than unary minus, so `-u^2` is `-(u^2)`.

use thiserror::Error;

use super::expr::{BinOp, Expr, Func};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("unexpected character {ch:?} at {pos}")]
    Lex { pos: usize, ch: char },
    #[error("malformed number {text:?} at {pos}")]
    Number { pos: usize, text: String },
    #[error("unexpected end of input at {pos}, expected {expected}")]
    UnexpectedEnd { pos: usize, expected: &'static str },
    #[error("unexpected {found:?} at {pos}, expected {expected}")]
    Unexpected {
        pos: usize,
        found: String,
        expected: &'static str,
    },
    #[error("unknown identifier {name:?} at {pos}")]
    UnknownIdentifier { pos: usize, name: String },
    #[error("{func} takes exactly one argument (at {pos})")]
    Arity { pos: usize, func: &'static str },
    #[error("exponent at {pos} must be an integer literal, found {text:?}")]
    NonIntegerExponent { pos: usize, text: String },
    #[error("unbalanced parentheses at {pos}")]
    Unbalanced { pos: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let pos = i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let mut text = String::new();
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == '.') {
                text.push(bytes[i]);
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == 'e' || bytes[i] == 'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == '+' || bytes[j] == '-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    text.extend(&bytes[i..j]);
                    i = j;
                }
            }
            if text.parse::<f64>().is_err() {
                return Err(ParseError::Number { pos, text });
            }
            out.push(Token { tok: Tok::Num(text), pos });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut name = String::new();
            while i < bytes.len() && (bytes[i].is_alphanumeric() || bytes[i] == '_') {
                name.push(bytes[i]);
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(name), pos });
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            _ => return Err(ParseError::Lex { pos, ch: c }),
        };
        out.push(Token { tok, pos });
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    at: usize,
    end: usize,
    params: &'a [String],
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(s) | Tok::Ident(s) => s.clone(),
        Tok::Op(c) => c.to_string(),
        Tok::LParen => "(".into(),
        Tok::RParen => ")".into(),
        Tok::Comma => ",".into(),
    }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.at)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(Token { tok: Tok::Op(c), .. }) if ops.contains(c) => {
                let c = *c;
                self.at += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(c) = self.eat_op(&['+', '-']) {
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while let Some(c) = self.eat_op(&['*', '/']) {
            let rhs = self.factor()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.eat_op(&['^']).is_none() {
            return Ok(base);
        }
        let negative = self.eat_op(&['-']).is_some();
        match self.next() {
            Some(Token { tok: Tok::Num(text), pos }) => {
                if !text.chars().all(|c| c.is_ascii_digit()) {
                    return Err(ParseError::NonIntegerExponent { pos, text });
                }
                let n: i32 = text
                    .parse()
                    .map_err(|_| ParseError::NonIntegerExponent { pos, text: text.clone() })?;
                Ok(Expr::Pow(Box::new(base), if negative { -n } else { n }))
            }
            Some(Token { tok, pos }) => Err(ParseError::NonIntegerExponent { pos, text: describe(&tok) }),
            None => Err(ParseError::UnexpectedEnd { pos: self.end, expected: "integer exponent" }),
        }
    }

    fn close_paren(&mut self, func: Option<Func>) -> Result<(), ParseError> {
        match self.next() {
            Some(Token { tok: Tok::RParen, .. }) => Ok(()),
            Some(Token { tok: Tok::Comma, pos }) if func.is_some() => {
                Err(ParseError::Arity { pos, func: func.map(Func::name).unwrap_or("") })
            }
            Some(Token { tok, pos }) => Err(ParseError::Unexpected { pos, found: describe(&tok), expected: "\")\"" }),
            None => Err(ParseError::Unbalanced { pos: self.end }),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let Some(Token { tok, pos }) = self.next() else {
            return Err(ParseError::UnexpectedEnd { pos: self.end, expected: "expression" });
        };
        match tok {
            Tok::Num(text) => Ok(Expr::Num(text.parse().map_err(|_| ParseError::Number { pos, text })?)),
            Tok::LParen => {
                let e = self.expr()?;
                self.close_paren(None)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(f) = Func::from_name(&name) {
                    match self.next() {
                        Some(Token { tok: Tok::LParen, .. }) => {}
                        Some(Token { tok, pos }) => {
                            return Err(ParseError::Unexpected { pos, found: describe(&tok), expected: "\"(\"" })
                        }
                        None => return Err(ParseError::UnexpectedEnd { pos: self.end, expected: "\"(\"" }),
                    }
                    if let Some(Token { tok: Tok::RParen, pos }) = self.peek() {
                        return Err(ParseError::Arity { pos: *pos, func: f.name() });
                    }
                    let arg = self.expr()?;
                    self.close_paren(Some(f))?;
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                if name == "pi" {
                    return Ok(Expr::Pi);
                }
                match self.params.iter().position(|p| *p == name) {
                    Some(i) => Ok(Expr::Param(i)),
                    None => Err(ParseError::UnknownIdentifier { pos, name }),
                }
            }
            Tok::RParen => Err(ParseError::Unbalanced { pos }),
            other => Err(ParseError::Unexpected { pos, found: describe(&other), expected: "expression" }),
        }
    }
}

/// Parse `src` with the given parameter names.
pub fn parse_expression(src: &str, params: &[String]) -> Result<Expr, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: src.chars().count(),
        params,
    };
    let e = p.expr()?;
    if let Some(Token { tok, pos }) = p.next() {
        return Err(match tok {
            Tok::RParen => ParseError::Unbalanced { pos },
            other => ParseError::Unexpected { pos, found: describe(&other), expected: "operator or end of input" },
        });
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet;
    use proptest::prelude::*;

    fn names(n: &[&str]) -> Vec<String> {
        n.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_catalog_style_component() {
        let p = names(&["u", "v"]);
        let e = parse_expression("(1/sqrt(2))*cos(u)", &p).unwrap();
        assert_eq!(
            e,
            Expr::Binary(
                BinOp::Mul,
                Box::new(Expr::Binary(
                    BinOp::Div,
                    Box::new(Expr::Num(1.0)),
                    Box::new(Expr::Call(Func::Sqrt, Box::new(Expr::Num(2.0))))
                )),
                Box::new(Expr::Call(Func::Cos, Box::new(Expr::Param(0))))
            )
        );
    }

    #[test]
    fn error_cases() {
        let p = names(&["u", "v"]);
        assert_eq!(parse_expression("sin(u", &p), Err(ParseError::Unbalanced { pos: 5 }));
        assert_eq!(
            parse_expression("cos(w)", &p),
            Err(ParseError::UnknownIdentifier { pos: 4, name: "w".into() })
        );
        assert!(matches!(parse_expression("u^0.5", &p), Err(ParseError::NonIntegerExponent { .. })));
        assert!(matches!(parse_expression("u^v", &p), Err(ParseError::NonIntegerExponent { .. })));
        assert!(matches!(parse_expression("sin(u, v)", &p), Err(ParseError::Arity { func: "sin", .. })));
        assert!(matches!(parse_expression("sin()", &p), Err(ParseError::Arity { .. })));
        assert_eq!(parse_expression("u)", &p), Err(ParseError::Unbalanced { pos: 1 }));
        assert_eq!(parse_expression("u $ v", &p), Err(ParseError::Lex { pos: 2, ch: '$' }));
        assert!(matches!(parse_expression("u +", &p), Err(ParseError::UnexpectedEnd { .. })));
    }

    #[test]
    fn precedence() {
        let p = names(&["u"]);
        assert_eq!(
            parse_expression("-u^2", &p).unwrap(),
            Expr::Neg(Box::new(Expr::Pow(Box::new(Expr::Param(0)), 2)))
        );
        assert_eq!(
            parse_expression("u^-2", &p).unwrap(),
            Expr::Pow(Box::new(Expr::Param(0)), -2)
        );
        let e = parse_expression("1 - 2 * u + 3", &p).unwrap();
        let j = e.eval(&[1.0], 0, &p).unwrap();
        assert_eq!(j.value(), 2.0);
        let e = parse_expression("2e-1 * 10 / 4 / 2", &p).unwrap();
        assert!((e.eval(&[0.0], 0, &p).unwrap().value() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn evaluation() {
        let p = names(&["u"]);
        let j = parse_expression("u*u", &p).unwrap().eval(&[2.0], 2, &p).unwrap();
        assert_eq!(j.coeffs(), &[4.0, 4.0, 1.0]);
        let j = parse_expression("sin(u)^2 + cos(u)^2", &p).unwrap().eval(&[0.37], 4, &p).unwrap();
        assert!((j.value() - 1.0).abs() < 1e-15);
        assert!(j.coeffs()[1..].iter().all(|c| c.abs() < 1e-14));
        let err = parse_expression("sqrt(u - 3)", &p).unwrap().eval(&[1.0], 2, &p).unwrap_err();
        assert!(err.expr.contains("sqrt"));
        let err = parse_expression("1/(u - 1)", &p).unwrap().eval(&[1.0], 2, &p).unwrap_err();
        assert!(err.expr.contains("u - 1"));
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0u32..1000).prop_map(|n| Expr::Num(n as f64 / 8.0)),
            (0usize..3).prop_map(Expr::Param),
            Just(Expr::Pi),
            (1e-6f64..1e6).prop_map(Expr::Num),
        ];
        leaf.prop_recursive(5, 48, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (inner.clone(), inner.clone(), 0..4usize).prop_map(|(a, b, k)| {
                    let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div][k];
                    Expr::Binary(op, Box::new(a), Box::new(b))
                }),
                (inner.clone(), -3i32..4).prop_map(|(e, n)| Expr::Pow(Box::new(e), n)),
                (inner, 0..5usize).prop_map(|(e, k)| {
                    let f = [Func::Sin, Func::Cos, Func::Exp, Func::Sqrt, Func::Log][k];
                    Expr::Call(f, Box::new(e))
                }),
            ]
        })
    }

    proptest! {
        #[test]
        fn pretty_print_round_trip(e in arb_expr()) {
            let p = names(&["u", "v", "w"]);
            let src = e.to_source(&p);
            let back = parse_expression(&src, &p).unwrap();
            prop_assert_eq!(back, e);
        }

        #[test]
        fn order_zero_matches_constant_term(e in arb_expr(), x in proptest::collection::vec(0.1f64..2.0, 3)) {
            let p = names(&["u", "v", "w"]);
            let lo = e.eval(&x, 0, &p);
            let hi = e.eval(&x, 4, &p);
            match (lo, hi) {
                (Ok(a), Ok(b)) => {
                    let (a, b): (Jet, Jet) = (a, b);
                    prop_assert!(a.value() == b.value() || !a.value().is_finite());
                }
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "order 0 {:?} vs order 4 {:?}", a.is_ok(), b.is_ok()),
            }
        }
    }
}
