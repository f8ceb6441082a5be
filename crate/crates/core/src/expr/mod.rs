//! Expression language for chart components.
//!
//! Expressions are immutable trees over the chart coordinates `x1..xn`.
//! Integer literals are exact rationals, literals with a decimal point or
//! exponent are floats. Differentiation is exact and only folds constants
//! and 0/1 identities; equality of derived expressions is meant to be
//! checked by evaluation.

mod diff;
mod parse;

use std::fmt;
use std::sync::Arc;

use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use parse::parse;

/// Byte range into the source string an expression was parsed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        SourceSpan { start, end }
    }

    fn join(self, other: SourceSpan) -> SourceSpan {
        SourceSpan::new(self.start.min(other.start), self.end.max(other.end))
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at {span}: {message}")]
    Syntax { message: String, span: SourceSpan },
    #[error("unknown identifier `{name}` at {span}")]
    UnknownIdentifier { name: String, span: SourceSpan },
    #[error("variable x{index} out of range for dimension {dim} at {span}")]
    VariableOutOfRange {
        index: usize,
        dim: usize,
        span: SourceSpan,
    },
    #[error("domain error{}: {message}", fmt_span(.span))]
    Domain {
        message: String,
        span: Option<SourceSpan>,
    },
    #[error("expression uses x{needed} but the point has {got} coordinates")]
    Arity { needed: usize, got: usize },
}

fn fmt_span(span: &Option<SourceSpan>) -> String {
    match span {
        Some(s) => format!(" at {s}"),
        None => String::new(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Number {
    Rational(Rational64),
    Float(f64),
}

impl Number {
    pub fn to_f64(self) -> f64 {
        match self {
            Number::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Number::Float(x) => x,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Number::Rational(r) => r.is_zero(),
            Number::Float(x) => x == 0.0,
        }
    }

    pub fn is_one(self) -> bool {
        match self {
            Number::Rational(r) => r.is_one(),
            Number::Float(x) => x == 1.0,
        }
    }

    fn combine(
        self,
        other: Number,
        exact: impl Fn(&Rational64, &Rational64) -> Option<Rational64>,
        float: impl Fn(f64, f64) -> f64,
    ) -> Number {
        if let (Number::Rational(a), Number::Rational(b)) = (self, other) {
            if let Some(r) = exact(&a, &b) {
                return Number::Rational(r);
            }
        }
        Number::Float(float(self.to_f64(), other.to_f64()))
    }
}

impl PartialEq for Number {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Number::Rational(a), Number::Rational(b)) => a == b,
            (Number::Float(a), Number::Float(b)) => a.to_bits() == b.to_bits(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Node {
    Const(Number),
    /// Zero-based coordinate index; printed as `x{index+1}`.
    Var(usize),
    Neg(Expr),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Pow(Expr, i32),
    Call(Func, Expr),
}

#[derive(Debug)]
struct Inner {
    node: Node,
    span: Option<SourceSpan>,
    arity: usize,
}

/// Shared, immutable expression tree.
#[derive(Debug, Clone)]
pub struct Expr(Arc<Inner>);

impl PartialEq for Expr {
    /// Structural equality; source spans are ignored.
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (self.node(), other.node()) {
            (Node::Const(a), Node::Const(b)) => a == b,
            (Node::Var(a), Node::Var(b)) => a == b,
            (Node::Neg(a), Node::Neg(b)) => a == b,
            (Node::Add(a1, a2), Node::Add(b1, b2))
            | (Node::Sub(a1, a2), Node::Sub(b1, b2))
            | (Node::Mul(a1, a2), Node::Mul(b1, b2))
            | (Node::Div(a1, a2), Node::Div(b1, b2)) => a1 == b1 && a2 == b2,
            (Node::Pow(a, m), Node::Pow(b, k)) => m == k && a == b,
            (Node::Call(f, a), Node::Call(g, b)) => f == g && a == b,
            _ => false,
        }
    }
}

impl Expr {
    fn make(node: Node, span: Option<SourceSpan>) -> Expr {
        let arity = match &node {
            Node::Const(_) => 0,
            Node::Var(i) => i + 1,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.arity(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.arity().max(b.arity())
            }
        };
        Expr(Arc::new(Inner { node, span, arity }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn span(&self) -> Option<SourceSpan> {
        self.0.span
    }

    /// One more than the largest coordinate index used (0 for constants).
    pub fn arity(&self) -> usize {
        self.0.arity
    }

    pub fn rational(r: Rational64) -> Expr {
        Expr::make(Node::Const(Number::Rational(r)), None)
    }

    pub fn int(v: i64) -> Expr {
        Expr::rational(Rational64::from_integer(v))
    }

    pub fn float(v: f64) -> Expr {
        Expr::make(Node::Const(Number::Float(v)), None)
    }

    pub fn var(index: usize) -> Expr {
        Expr::make(Node::Var(index), None)
    }

    pub fn constant(&self) -> Option<Number> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    fn is_zero(&self) -> bool {
        self.constant().is_some_and(Number::is_zero)
    }

    fn is_one(&self) -> bool {
        self.constant().is_some_and(Number::is_one)
    }

    /// Node constructor that keeps the tree exactly as given (parser use).
    pub(crate) fn raw(node: Node, span: SourceSpan) -> Expr {
        Expr::make(node, Some(span))
    }

    pub fn neg(a: Expr, span: Option<SourceSpan>) -> Expr {
        match a.node() {
            Node::Const(Number::Rational(r)) => Expr::rational(-r),
            Node::Const(Number::Float(x)) => Expr::float(-x),
            Node::Neg(inner) => inner.clone(),
            _ => Expr::make(Node::Neg(a), span),
        }
    }

    pub fn add(a: Expr, b: Expr, span: Option<SourceSpan>) -> Expr {
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if let (Some(x), Some(y)) = (a.constant(), b.constant()) {
            return Expr::from_number(x.combine(y, |p, q| p.checked_add(q), |p, q| p + q));
        }
        Expr::make(Node::Add(a, b), span)
    }

    pub fn sub(a: Expr, b: Expr, span: Option<SourceSpan>) -> Expr {
        if b.is_zero() {
            return a;
        }
        if a.is_zero() {
            return Expr::neg(b, span);
        }
        if let (Some(x), Some(y)) = (a.constant(), b.constant()) {
            return Expr::from_number(x.combine(y, |p, q| p.checked_sub(q), |p, q| p - q));
        }
        Expr::make(Node::Sub(a, b), span)
    }

    pub fn mul(a: Expr, b: Expr, span: Option<SourceSpan>) -> Expr {
        if a.is_zero() || b.is_zero() {
            return Expr::int(0);
        }
        if a.is_one() {
            return b;
        }
        if b.is_one() {
            return a;
        }
        if let (Some(x), Some(y)) = (a.constant(), b.constant()) {
            return Expr::from_number(x.combine(y, |p, q| p.checked_mul(q), |p, q| p * q));
        }
        Expr::make(Node::Mul(a, b), span)
    }

    pub fn div(a: Expr, b: Expr, span: Option<SourceSpan>) -> Expr {
        if b.is_one() {
            return a;
        }
        if a.is_zero() && !b.is_zero() {
            return Expr::int(0);
        }
        if let (Some(x), Some(y)) = (a.constant(), b.constant()) {
            if !y.is_zero() {
                return Expr::from_number(x.combine(y, |p, q| p.checked_div(q), |p, q| p / q));
            }
        }
        Expr::make(Node::Div(a, b), span)
    }

    pub fn pow(a: Expr, exp: i32, span: Option<SourceSpan>) -> Expr {
        if exp == 0 {
            return Expr::int(1);
        }
        if exp == 1 {
            return a;
        }
        if let Some(Number::Rational(r)) = a.constant() {
            if !r.is_zero() || exp > 0 {
                if let Some(v) = checked_rational_pow(r, exp) {
                    return Expr::rational(v);
                }
            }
        }
        Expr::make(Node::Pow(a, exp), span)
    }

    pub fn call(f: Func, a: Expr, span: Option<SourceSpan>) -> Expr {
        Expr::make(Node::Call(f, a), span)
    }

    fn from_number(n: Number) -> Expr {
        Expr::make(Node::Const(n), None)
    }

    /// Exact partial derivative with respect to coordinate `var` (zero-based).
    pub fn differentiate(&self, var: usize) -> Expr {
        diff::differentiate(self, var)
    }

    /// Evaluates at `point`; the point must cover every coordinate used.
    pub fn evaluate(&self, point: &[f64]) -> Result<f64, ExprError> {
        if self.arity() > point.len() {
            return Err(ExprError::Arity {
                needed: self.arity(),
                got: point.len(),
            });
        }
        self.eval_unchecked(point)
    }

    fn eval_unchecked(&self, p: &[f64]) -> Result<f64, ExprError> {
        let domain = |message: &str| ExprError::Domain {
            message: message.to_string(),
            span: self.span(),
        };
        let v = match self.node() {
            Node::Const(c) => c.to_f64(),
            Node::Var(i) => p[*i],
            Node::Neg(a) => -a.eval_unchecked(p)?,
            Node::Add(a, b) => a.eval_unchecked(p)? + b.eval_unchecked(p)?,
            Node::Sub(a, b) => a.eval_unchecked(p)? - b.eval_unchecked(p)?,
            Node::Mul(a, b) => a.eval_unchecked(p)? * b.eval_unchecked(p)?,
            Node::Div(a, b) => {
                let den = b.eval_unchecked(p)?;
                if den == 0.0 {
                    return Err(domain("division by zero"));
                }
                a.eval_unchecked(p)? / den
            }
            Node::Pow(a, m) => {
                let base = a.eval_unchecked(p)?;
                if base == 0.0 && *m < 0 {
                    return Err(domain("zero raised to a negative power"));
                }
                base.powi(*m)
            }
            Node::Call(f, a) => {
                let x = a.eval_unchecked(p)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if x <= 0.0 {
                            return Err(domain("log of a non-positive value"));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(domain("sqrt of a negative value"));
                        }
                        x.sqrt()
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(domain("non-finite value"))
        }
    }

    /// Number of nodes, shared subtrees counted once per reference.
    pub fn size(&self) -> usize {
        1 + match self.node() {
            Node::Const(_) | Node::Var(_) => 0,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.size(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.size() + b.size()
            }
        }
    }
}

fn checked_rational_pow(r: Rational64, exp: i32) -> Option<Rational64> {
    let base = if exp < 0 { r.recip() } else { r };
    let mut acc = Rational64::one();
    for _ in 0..exp.unsigned_abs() {
        acc = acc.checked_mul(&base)?;
    }
    Some(acc)
}

fn is_atomic(e: &Expr) -> bool {
    match e.node() {
        Node::Var(_) | Node::Call(..) => true,
        Node::Const(Number::Rational(r)) => r.is_integer() && !r.is_negative(),
        Node::Const(Number::Float(x)) => *x >= 0.0 && x.is_finite() && x.to_bits() != (-0.0f64).to_bits(),
        _ => false,
    }
}

struct Operand<'a>(&'a Expr);

impl fmt::Display for Operand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if is_atomic(self.0) {
            write!(f, "{}", self.0)
        } else {
            write!(f, "({})", self.0)
        }
    }
}

fn fmt_float(x: f64) -> String {
    let s = format!("{x:?}");
    if s.contains(['.', 'e', 'E', 'n', 'i']) {
        s
    } else {
        format!("{s}.0")
    }
}

/// Canonical serializer: every non-atomic operand is parenthesized, so the
/// output re-parses to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(Number::Rational(r)) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Node::Const(Number::Float(x)) => write!(f, "{}", fmt_float(*x)),
            Node::Var(i) => write!(f, "x{}", i + 1),
            Node::Neg(a) => write!(f, "-{}", Operand(a)),
            Node::Add(a, b) => write!(f, "{} + {}", Operand(a), Operand(b)),
            Node::Sub(a, b) => write!(f, "{} - {}", Operand(a), Operand(b)),
            Node::Mul(a, b) => write!(f, "{} * {}", Operand(a), Operand(b)),
            Node::Div(a, b) => write!(f, "{} / {}", Operand(a), Operand(b)),
            Node::Pow(a, m) => {
                if *m < 0 {
                    write!(f, "{}^({m})", Operand(a))
                } else {
                    write!(f, "{}^{m}", Operand(a))
                }
            }
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(src: &str, dim: usize) -> Expr {
        parse(src, dim).unwrap()
    }

    #[test]
    fn parses_sum_of_product_and_call() {
        let e = p("x1*x2 + sin(x3)", 3);
        let expected = Expr::raw(
            Node::Add(
                Expr::raw(Node::Mul(Expr::var(0), Expr::var(1)), SourceSpan::new(0, 5)),
                Expr::raw(Node::Call(Func::Sin, Expr::var(2)), SourceSpan::new(8, 15)),
            ),
            SourceSpan::new(0, 15),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn literal_one_is_exact() {
        assert_eq!(p("1", 1).constant(), Some(Number::Rational(Rational64::from_integer(1))));
        assert_eq!(p("1.5", 1).constant(), Some(Number::Float(1.5)));
    }

    #[test]
    fn variable_out_of_range() {
        let err = parse("x4", 3).unwrap_err();
        assert!(matches!(err, ExprError::VariableOutOfRange { index: 4, dim: 3, .. }));
    }

    #[test]
    fn product_rule() {
        let d = p("x1*x2", 2).differentiate(0);
        for pt in [[0.3, -1.2], [2.0, 5.0]] {
            assert_eq!(d.evaluate(&pt).unwrap(), pt[1]);
        }
    }

    #[test]
    fn sine_rule() {
        let d = p("sin(x2)", 2).differentiate(1);
        assert_eq!(d, Expr::call(Func::Cos, Expr::var(1), None));
    }

    #[test]
    fn exponential_derivative_matches_central_difference() {
        let e = p("exp(2*x1)", 1);
        let d = e.differentiate(0).evaluate(&[0.0]).unwrap();
        let h = 1e-5;
        let fd = (e.evaluate(&[h]).unwrap() - e.evaluate(&[-h]).unwrap()) / (2.0 * h);
        assert!((d - 2.0).abs() < 1e-12);
        assert!((d - fd).abs() < 1e-8);
    }

    #[test]
    fn evaluation_basics() {
        assert_eq!(p("x1+x2", 2).evaluate(&[1.0, 2.0]).unwrap(), 3.0);
        assert_eq!(p("x1^3", 1).differentiate(0).evaluate(&[2.0]).unwrap(), 12.0);
    }

    #[test]
    fn division_by_zero_reports_span() {
        let err = p("1/x1", 1).evaluate(&[0.0]).unwrap_err();
        match err {
            ExprError::Domain { span, .. } => assert_eq!(span, Some(SourceSpan::new(0, 4))),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn log_domain() {
        assert!(p("log(x1)", 1).evaluate(&[-1.0]).is_err());
        assert!(p("sqrt(x1 - 2)", 1).evaluate(&[1.0]).is_err());
    }

    #[test]
    fn arity_checked() {
        assert!(matches!(
            p("x3", 3).evaluate(&[1.0, 2.0]),
            Err(ExprError::Arity { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn constant_folding_stays_exact() {
        let d = p("x1^3/6", 1).differentiate(0).differentiate(0).differentiate(0);
        assert_eq!(d.constant(), Some(Number::Rational(Rational64::from_integer(1))));
    }

    #[test]
    fn printer_round_trips() {
        for src in [
            "-x1^2",
            "x1 - x2 - x3",
            "x1 - (x2 - x3)",
            "4/(1 + x1^2 + x2^2)^2",
            "exp(2*x1) * cos(-x2)",
            "x1^(-2) + 0.25e-3",
            "--x1",
            "sqrt(x1*x1 + 1.5)",
        ] {
            let e = p(src, 3);
            let printed = e.to_string();
            assert_eq!(p(&printed, 3), e, "{src} printed as {printed}");
        }
    }

    #[test]
    fn float_printing_keeps_float_kind() {
        assert_eq!(fmt_float(2.0), "2.0");
        assert_eq!(Expr::float(1e-7).to_string(), "1e-7");
        assert_eq!(p(&Expr::float(1e-7).to_string(), 1).constant(), Some(Number::Float(1e-7)));
    }
}
