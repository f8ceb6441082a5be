//! Recursive-descent parser.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' exponent)?
//! exponent:= ['-'] INT | '(' ['-'] INT ')'
//! atom    := NUMBER | 'x' INT | FUNC '(' sum ')' | '(' sum ')'
//! ```
//!
//! Unary minus binds looser than `^`, so `-x1^2` is `-(x1^2)`. Exponents are
//! integer literals; `x1^2^3` is rejected rather than guessing associativity.

use num_rational::Rational64;

use super::{Expr, ExprError, Func, Node, Number, SourceSpan};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(i64),
    Float(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: SourceSpan,
}

fn syntax(message: impl Into<String>, span: SourceSpan) -> ExprError {
    ExprError::Syntax {
        message: message.into(),
        span,
    }
}

fn lex(src: &str) -> Result<Vec<Token>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            i += 1;
            out.push(Token {
                tok,
                span: SourceSpan::new(start, i),
            });
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            let mut is_float = false;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                is_float = true;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    is_float = true;
                    i = j;
                }
            }
            let text = &src[start..i];
            let span = SourceSpan::new(start, i);
            let tok = if is_float {
                let v: f64 = text
                    .parse()
                    .map_err(|_| syntax(format!("malformed number `{text}`"), span))?;
                Tok::Float(v)
            } else {
                let v: i64 = text
                    .parse()
                    .map_err(|_| syntax(format!("integer literal `{text}` too large"), span))?;
                Tok::Int(v)
            };
            out.push(Token { tok, span });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(src[start..i].to_string()),
                span: SourceSpan::new(start, i),
            });
            continue;
        }
        let ch = src[start..].chars().next().unwrap_or('?');
        return Err(syntax(
            format!("unexpected character `{ch}`"),
            SourceSpan::new(start, start + ch.len_utf8()),
        ));
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    dim: usize,
    src: &'a str,
}

/// Parses `src` as an expression over `x1..x{dim}`.
pub fn parse(src: &str, dim: usize) -> Result<Expr, ExprError> {
    let mut p = Parser {
        tokens: lex(src)?,
        pos: 0,
        dim,
        src,
    };
    if p.tokens.is_empty() {
        return Err(syntax("empty expression", SourceSpan::new(0, src.len())));
    }
    let e = p.sum()?;
    if let Some(t) = p.peek() {
        return Err(syntax("unexpected trailing input", t.span));
    }
    Ok(e)
}

fn literal_zero(e: &Expr) -> bool {
    matches!(e.node(), Node::Const(n) if n.is_zero())
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eof_span(&self) -> SourceSpan {
        SourceSpan::new(self.src.len(), self.src.len())
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Token, ExprError> {
        match self.next() {
            Some(t) if t.tok == want => Ok(t),
            Some(t) => Err(syntax(format!("expected {what}"), t.span)),
            None => Err(syntax(format!("expected {what}, found end of input"), self.eof_span())),
        }
    }

    fn span_of(e: &Expr, fallback: SourceSpan) -> SourceSpan {
        e.span().unwrap_or(fallback)
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.product()?;
        while let Some(t) = self.peek() {
            let is_add = match t.tok {
                Tok::Plus => true,
                Tok::Minus => false,
                _ => break,
            };
            let op_span = t.span;
            self.pos += 1;
            let rhs = self.product()?;
            let span = Self::span_of(&lhs, op_span).join(Self::span_of(&rhs, op_span));
            let node = if is_add {
                Node::Add(lhs, rhs)
            } else {
                Node::Sub(lhs, rhs)
            };
            lhs = Expr::raw(node, span);
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(t) = self.peek() {
            let is_mul = match t.tok {
                Tok::Star => true,
                Tok::Slash => false,
                _ => break,
            };
            let op_span = t.span;
            self.pos += 1;
            let rhs = self.unary()?;
            let span = Self::span_of(&lhs, op_span).join(Self::span_of(&rhs, op_span));
            let node = if is_mul {
                Node::Mul(lhs, rhs)
            } else {
                if literal_zero(&rhs) {
                    return Err(ExprError::Domain {
                        message: "literal zero denominator".into(),
                        span: Some(span),
                    });
                }
                Node::Div(lhs, rhs)
            };
            lhs = Expr::raw(node, span);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if let Some(Token {
            tok: Tok::Minus,
            span,
        }) = self.peek().cloned()
        {
            self.pos += 1;
            let inner = self.unary()?;
            let full = span.join(Self::span_of(&inner, span));
            return Ok(Expr::raw(Node::Neg(inner), full));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        let Some(Token {
            tok: Tok::Caret,
            span: caret,
        }) = self.peek().cloned()
        else {
            return Ok(base);
        };
        self.pos += 1;
        let (exp, end) = self.exponent(caret)?;
        if let Some(t) = self.peek() {
            if t.tok == Tok::Caret {
                return Err(syntax(
                    "chained `^` is ambiguous; parenthesize the base",
                    t.span,
                ));
            }
        }
        let span = Self::span_of(&base, caret).join(end);
        Ok(Expr::raw(Node::Pow(base, exp), span))
    }

    fn exponent(&mut self, caret: SourceSpan) -> Result<(i32, SourceSpan), ExprError> {
        let paren = matches!(self.peek(), Some(t) if t.tok == Tok::LParen);
        if paren {
            self.pos += 1;
        }
        let negative = matches!(self.peek(), Some(t) if t.tok == Tok::Minus);
        if negative {
            self.pos += 1;
        }
        let tok = self.next();
        let (value, mut end) = match tok {
            Some(Token {
                tok: Tok::Int(v),
                span,
            }) => (v, span),
            Some(t) => return Err(syntax("exponent must be an integer literal", t.span)),
            None => {
                return Err(syntax(
                    "exponent must be an integer literal, found end of input",
                    caret,
                ))
            }
        };
        if paren {
            end = self.expect(Tok::RParen, "`)` after exponent")?.span;
        }
        let signed = if negative { -value } else { value };
        let exp = i32::try_from(signed)
            .map_err(|_| syntax("exponent out of range", SourceSpan::new(caret.start, end.end)))?;
        Ok((exp, end))
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let Some(t) = self.next() else {
            return Err(syntax("unexpected end of input", self.eof_span()));
        };
        match t.tok {
            Tok::Int(v) => Ok(Expr::raw(
                Node::Const(Number::Rational(Rational64::from_integer(v))),
                t.span,
            )),
            Tok::Float(v) => Ok(Expr::raw(Node::Const(Number::Float(v)), t.span)),
            Tok::LParen => {
                let inner = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => self.identifier(name, t.span),
            _ => Err(syntax("expected an operand", t.span)),
        }
    }

    fn identifier(&mut self, name: String, span: SourceSpan) -> Result<Expr, ExprError> {
        if let Some(func) = Func::from_name(&name) {
            self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
            let arg = self.sum()?;
            let close = self.expect(Tok::RParen, "`)`")?;
            let full = span.join(close.span);
            if matches!(func, Func::Log | Func::Sqrt) && literal_zero(&arg) {
                return Err(ExprError::Domain {
                    message: format!("{name} of literal zero"),
                    span: Some(full),
                });
            }
            return Ok(Expr::raw(Node::Call(func, arg), full));
        }
        if let Some(digits) = name.strip_prefix('x') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) && !digits.starts_with('0') {
                let index: usize = digits.parse().unwrap_or(usize::MAX);
                if index > self.dim {
                    return Err(ExprError::VariableOutOfRange {
                        index,
                        dim: self.dim,
                        span,
                    });
                }
                return Ok(Expr::raw(Node::Var(index - 1), span));
            }
        }
        Err(ExprError::UnknownIdentifier { name, span })
    }
}
