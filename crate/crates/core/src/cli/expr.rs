//! Arithmetic expressions over coordinates `x0, x1, …`, evaluated over any [`Real`] scalar.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'pi' | 'e' | var | func '(' expr ')' | '(' expr ')'
//! var    := 'x' digits
//! func   := sin | cos | tan | exp | ln | log | sqrt | sinh | cosh | tanh | abs
//! ```

use crate::error::{Error, Result};
use crate::geometry::CoordinateMap;
use crate::jet::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
    Abs,
}

impl Func {
    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn apply<R: Real>(self, x: R) -> R {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
            Func::Sqrt => x.sqrt(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
            Func::Abs => x.abs(),
        }
    }
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    PowI(Box<Expr>, i32),
    PowF(Box<Expr>, f64),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn eval<R: Real>(&self, x: &[R]) -> R {
        match self {
            Expr::Num(c) => R::cst(*c),
            Expr::Var(i) => x[*i],
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::PowI(a, k) => a.eval(x).powi(*k),
            Expr::PowF(a, p) => a.eval(x).powf(*p),
            Expr::Pow(a, b) => a.eval(x).powr(b.eval(x)),
            Expr::Call(f, a) => f.apply(a.eval(x)),
        }
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a) | Expr::PowI(a, _) | Expr::PowF(a, _) | Expr::Call(_, a) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.max_var().max(b.max_var())
            }
        }
    }

    fn constant(&self) -> Option<f64> {
        match self.max_var() {
            None => Some(self.eval::<f64>(&[])),
            Some(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    len: usize,
}

fn err(col: usize, msg: impl std::fmt::Display) -> Error {
    Error::Expression(format!("column {}: {msg}", col + 1))
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text.parse::<f64>().map_err(|_| err(start, format!("bad number `{text}`")))?;
            out.push((Tok::Num(v), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), start));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), i));
            i += 1;
        } else {
            return Err(err(i, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.len)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let exp = self.unary()?;
        Ok(match exp.constant() {
            Some(p) if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 => Expr::PowI(Box::new(base), p as i32),
            Some(p) => Expr::PowF(Box::new(base), p),
            None => Expr::Pow(Box::new(base), Box::new(exp)),
        })
    }

    fn atom(&mut self) -> Result<Expr> {
        let col = self.col();
        let tok = self.peek().cloned().ok_or_else(|| err(col, "unexpected end of expression"))?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Op('(') => {
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(err(self.col(), "expected `)`"));
                }
                Ok(e)
            }
            Tok::Op(c) => Err(err(col, format!("unexpected `{c}`"))),
            Tok::Ident(name) => {
                if name == "pi" {
                    return Ok(Expr::Num(std::f64::consts::PI));
                }
                if name == "e" {
                    return Ok(Expr::Num(std::f64::consts::E));
                }
                if let Some(idx) = name.strip_prefix('x').filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit())) {
                    let i = idx.parse::<usize>().map_err(|_| err(col, "variable index out of range"))?;
                    return Ok(Expr::Var(i));
                }
                let f = Func::from_name(&name).ok_or_else(|| err(col, format!("unknown name `{name}`")))?;
                if !self.eat('(') {
                    return Err(err(self.col(), format!("expected `(` after `{name}`")));
                }
                let arg = self.expr()?;
                if !self.eat(')') {
                    return Err(err(self.col(), "expected `)`"));
                }
                Ok(Expr::Call(f, Box::new(arg)))
            }
        }
    }
}

/// Parses `src`; variables must be among `x0 … x{nvars−1}`.
pub fn parse_expr(src: &str, nvars: usize) -> Result<Expr> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        len: src.chars().count(),
    };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(err(p.col(), "trailing input"));
    }
    if let Some(i) = e.max_var() {
        if i >= nvars {
            return Err(Error::Expression(format!("variable x{i} used but only {nvars} coordinates exist")));
        }
    }
    Ok(e)
}

/// A coordinate map given by one expression per output component.
#[derive(Debug, Clone)]
pub struct ExprMap {
    dim: usize,
    exprs: Vec<Expr>,
}

impl ExprMap {
    pub fn parse<S: AsRef<str>>(dim: usize, sources: &[S]) -> Result<Self> {
        let exprs = sources
            .iter()
            .enumerate()
            .map(|(k, s)| parse_expr(s.as_ref(), dim).map_err(|e| Error::Expression(format!("component {k}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExprMap { dim, exprs })
    }
}

impl CoordinateMap for ExprMap {
    fn input_dim(&self) -> usize {
        self.dim
    }
    fn output_len(&self) -> usize {
        self.exprs.len()
    }
    fn eval<R: Real>(&self, x: &[R]) -> Vec<R> {
        self.exprs.iter().map(|e| e.eval(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet;

    fn ev(src: &str, x: &[f64]) -> f64 {
        parse_expr(src, x.len()).unwrap().eval(x)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 + 2 * 3", &[]), 7.0);
        assert_eq!(ev("(1 + 2) * 3", &[]), 9.0);
        assert_eq!(ev("8 / 4 / 2", &[]), 1.0);
        assert_eq!(ev("2 ^ 3 ^ 2", &[]), 512.0);
        assert_eq!(ev("-2 ^ 2", &[]), -4.0);
        assert_eq!(ev("2 * -x0", &[3.0]), -6.0);
        assert_eq!(ev("1.5e1 - 5E-1", &[]), 14.5);
    }

    #[test]
    fn matches_hand_evaluation_at_samples() {
        let e = parse_expr("1 + 0.1*sin(x0)", 1).unwrap();
        let f = parse_expr("exp(-x0^2) * cos(x1) / (2 + x0*x1) + sqrt(abs(x1)) - x1^0.5", 2).unwrap();
        for k in 0..10 {
            let x0 = -2.0 + 0.41 * k as f64;
            let x1 = 0.1 + 0.37 * k as f64;
            assert_eq!(e.eval(&[x0]), 1.0 + 0.1 * x0.sin());
            let hand = (-x0 * x0).exp() * x1.cos() / (2.0 + x0 * x1) + x1.abs().sqrt() - x1.powf(0.5);
            assert!((f.eval(&[x0, x1]) - hand).abs() < 1e-15);
        }
    }

    #[test]
    fn jets_carry_exact_derivatives() {
        let e = parse_expr("sin(x0)^2 * x1", 2).unwrap();
        let y = e.eval(&Jet::seed(&[0.7, 2.0]));
        let (s, c) = 0.7f64.sin_cos();
        assert!((y.v - s * s * 2.0).abs() < 1e-15);
        assert!((y.d[0] - 2.0 * s * c * 2.0).abs() < 1e-14);
        assert!((y.d[1] - s * s).abs() < 1e-15);
        assert!((y.h[0][1] - 2.0 * s * c).abs() < 1e-14);
        assert!((y.h[0][0] - 2.0 * (c * c - s * s) * 2.0).abs() < 1e-14);
    }

    #[test]
    fn errors_report_columns() {
        let e = parse_expr("1 + * 2", 1).unwrap_err().to_string();
        assert!(e.contains("column 5"), "{e}");
        assert!(parse_expr("sin x0", 1).is_err());
        assert!(parse_expr("foo(1)", 1).is_err());
        assert!(parse_expr("x3", 2).unwrap_err().to_string().contains("x3"));
        assert!(parse_expr("(1 + 2", 1).is_err());
        assert!(parse_expr("1 $ 2", 1).unwrap_err().to_string().contains("column 3"));
    }
}
