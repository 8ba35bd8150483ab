//! Small arithmetic expression language in one variable `x`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?            right associative
//! atom   := number | name | name '(' expr ')' | '(' expr ')'
//! ```
//!
//! Names resolve to the variable `x`, the constants `pi` and `e`, caller
//! supplied named constants, or one of the functions `exp log abs sqrt sin
//! cos tanh sign`. Note `-x^2` parses as `-(x^2)`.
//!
//! Expressions can be differentiated symbolically, which is how test and
//! variance functions obtain their derivatives.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Abs,
    Sqrt,
    Sin,
    Cos,
    Tanh,
    Sign,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" | "ln" => Func::Log,
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tanh" => Func::Tanh,
            "sign" => Func::Sign,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tanh => "tanh",
            Func::Sign => "sign",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Exp => v.exp(),
            Func::Log => v.ln(),
            Func::Abs => v.abs(),
            Func::Sqrt => v.sqrt(),
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Tanh => v.tanh(),
            Func::Sign => {
                if v > 0.0 {
                    1.0
                } else if v < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        Expr::parse_with(src, &BTreeMap::new())
    }

    /// Parses with extra named constants; names shadow `pi` and `e`.
    pub fn parse_with(src: &str, constants: &BTreeMap<String, f64>) -> Result<Expr> {
        let mut p = Parser {
            src,
            pos: 0,
            constants,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var => x,
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, b) => pow(a.eval(x), b.eval(x)),
            Expr::Call(f, a) => f.apply(a.eval(x)),
        }
    }

    /// True if the expression mentions `x`.
    pub fn depends_on_x(&self) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var => true,
            Expr::Neg(a) | Expr::Call(_, a) => a.depends_on_x(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.depends_on_x() || b.depends_on_x()
            }
        }
    }

    /// Symbolic derivative with respect to `x`. `abs` and `sign` are
    /// differentiated almost everywhere (`sign' = 0`).
    pub fn derivative(&self) -> Expr {
        use Expr::*;
        match self {
            Num(_) => Num(0.0),
            Var => Num(1.0),
            Neg(a) => neg(a.derivative()),
            Add(a, b) => add(a.derivative(), b.derivative()),
            Sub(a, b) => sub(a.derivative(), b.derivative()),
            Mul(a, b) => add(
                mul(a.derivative(), (**b).clone()),
                mul((**a).clone(), b.derivative()),
            ),
            Div(a, b) => div(
                sub(
                    mul(a.derivative(), (**b).clone()),
                    mul((**a).clone(), b.derivative()),
                ),
                mul((**b).clone(), (**b).clone()),
            ),
            Pow(a, b) => {
                if !b.depends_on_x() {
                    // c·u^(c-1)·u'
                    let c = (**b).clone();
                    let c_minus_one = sub(c.clone(), Num(1.0));
                    mul(mul(c, powe((**a).clone(), c_minus_one)), a.derivative())
                } else {
                    // u^v·(v'·ln u + v·u'/u)
                    let u = (**a).clone();
                    let v = (**b).clone();
                    mul(
                        self.clone(),
                        add(
                            mul(b.derivative(), call(Func::Log, u.clone())),
                            div(mul(v, a.derivative()), u),
                        ),
                    )
                }
            }
            Call(f, a) => {
                let u = (**a).clone();
                let outer = match f {
                    Func::Exp => call(Func::Exp, u),
                    Func::Log => div(Num(1.0), u),
                    Func::Abs => call(Func::Sign, u),
                    Func::Sqrt => div(Num(0.5), call(Func::Sqrt, u)),
                    Func::Sin => call(Func::Cos, u),
                    Func::Cos => neg(call(Func::Sin, u)),
                    Func::Tanh => sub(Num(1.0), powe(call(Func::Tanh, u), Num(2.0))),
                    Func::Sign => Num(0.0),
                };
                mul(outer, a.derivative())
            }
        }
    }
}

fn pow(a: f64, b: f64) -> f64 {
    if b == 2.0 {
        a * a
    } else if b == b.trunc() && b.abs() <= 64.0 {
        a.powi(b as i32)
    } else {
        a.powf(b)
    }
}

// constant-folding constructors keep derivatives readable and cheap

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(v) => Expr::Num(-v),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x + y),
        (Expr::Num(z), other) | (other, Expr::Num(z)) if z == 0.0 => other,
        (a, b) => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x - y),
        (other, Expr::Num(z)) if z == 0.0 => other,
        (Expr::Num(z), other) if z == 0.0 => neg(other),
        (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x * y),
        (Expr::Num(z), _) | (_, Expr::Num(z)) if z == 0.0 => Expr::Num(0.0),
        (Expr::Num(o), other) | (other, Expr::Num(o)) if o == 1.0 => other,
        (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(z), _) if z == 0.0 => Expr::Num(0.0),
        (other, Expr::Num(o)) if o == 1.0 => other,
        (a, b) => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn powe(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (_, Expr::Num(z)) if z == 0.0 => Expr::Num(1.0),
        (other, Expr::Num(o)) if o == 1.0 => other,
        (a, b) => Expr::Pow(Box::new(a), Box::new(b)),
    }
}

fn call(f: Func, a: Expr) -> Expr {
    match a {
        Expr::Num(v) => Expr::Num(f.apply(v)),
        other => Expr::Call(f, Box::new(other)),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var => write!(f, "x"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    constants: &'a BTreeMap<String, f64>,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
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
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let bytes = self.src.as_bytes();
                let mut end = self.pos;
                while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
                    end += 1;
                }
                if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
                    let mut k = end + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                        end = k;
                    }
                }
                let text = &self.src[start..end];
                let v: f64 = text
                    .parse()
                    .map_err(|_| self.error(&format!("bad number `{text}`")))?;
                self.pos = end;
                Ok(Expr::Num(v))
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let bytes = self.src.as_bytes();
                let mut end = self.pos;
                while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                    end += 1;
                }
                let name = &self.src[start..end];
                self.pos = end;
                if let Some(func) = Func::from_name(name) {
                    if !self.eat('(') {
                        return Err(self.error(&format!("expected `(` after `{name}`")));
                    }
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return Err(self.error("expected `)`"));
                    }
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                if name == "x" {
                    return Ok(Expr::Var);
                }
                if let Some(&v) = self.constants.get(name) {
                    return Ok(Expr::Num(v));
                }
                match name {
                    "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                    "e" => Ok(Expr::Num(std::f64::consts::E)),
                    _ => {
                        self.pos = start;
                        Err(self.error(&format!("unknown name `{name}`")))
                    }
                }
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{central_diff, DiffOrder};

    fn ev(src: &str, x: f64) -> f64 {
        Expr::parse(src).unwrap().eval(x)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(ev("-x^2", 3.0), -9.0);
        assert_eq!(ev("2^3^2", 0.0), 512.0);
        assert_eq!(ev("(1 + x) / 2", 3.0), 2.0);
        assert_eq!(ev("x - 1 - 1", 0.0), -2.0);
        assert!((ev("1.5e-1 * 2", 0.0) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn functions_and_constants() {
        assert!((ev("exp(log(x))", 2.5) - 2.5).abs() < 1e-15);
        assert_eq!(ev("abs(x) + sqrt(4)", -3.0), 5.0);
        assert!((ev("pi", 0.0) - std::f64::consts::PI).abs() < 1e-15);
        let mut c = BTreeMap::new();
        c.insert("k".to_string(), 4.0);
        assert_eq!(Expr::parse_with("k * x", &c).unwrap().eval(2.0), 8.0);
    }

    #[test]
    fn parse_errors() {
        for bad in ["", "1 +", "foo(x)", "y", "(x", "x )", "exp x", "3 $ 4"] {
            assert!(matches!(Expr::parse(bad), Err(Error::Parse { .. })), "{bad}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let cases = [
            "x^3 - 2*x",
            "exp(-x^2/2)",
            "sin(x) * x",
            "tanh(x)",
            "log(1 + x^2)",
            "sqrt(1 + x^2)",
            "x / (1 + x^2)",
            "cos(x)^2",
            "(1 + x^2)^x",
            "abs(x)^3",
        ];
        for src in cases {
            let e = Expr::parse(src).unwrap();
            let d = e.derivative();
            for &x in &[-1.7, -0.3, 0.4, 1.1, 2.5] {
                let fd = central_diff(|t| e.eval(t), x, DiffOrder::First).unwrap();
                let an = d.eval(x);
                assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0), "{src} at {x}: {an} vs {fd}");
            }
        }
    }

    #[test]
    fn constant_derivative_folds() {
        assert_eq!(Expr::parse("3*x").unwrap().derivative(), Expr::Num(3.0));
        assert!(!Expr::parse("2^3").unwrap().depends_on_x());
    }
}
