//! Potential expressions in one variable `r`.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    = term (('+' | '-') term)*
//! term    = unary (('*' | '/') unary)*
//! unary   = '-' unary | power
//! power   = primary ('^' unary)?
//! primary = number | 'r' | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-r^2` is
//! `-(r^2)` and `2^-1` is `0.5`. The functions are `exp` and `sqrt`.

use std::fmt;

use num_complex::Complex64;

/// Bound on the syntax tree depth, so evaluation and drop cannot exhaust the stack.
const MAX_DEPTH: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sqrt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    UnexpectedToken(String),
    UnknownIdentifier(String),
    BadNumber(String),
    TooDeep,
    Empty,
}

/// A syntax error at byte `offset` of the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => {
                write!(f, "unexpected character {c:?} at byte {}", self.offset)
            }
            ParseErrorKind::UnexpectedEnd => {
                write!(f, "unexpected end of expression at byte {}", self.offset)
            }
            ParseErrorKind::UnexpectedToken(t) => {
                write!(f, "unexpected {t} at byte {}", self.offset)
            }
            ParseErrorKind::UnknownIdentifier(id) => {
                write!(
                    f,
                    "unknown identifier `{id}` at byte {} (expected r, exp or sqrt)",
                    self.offset
                )
            }
            ParseErrorKind::BadNumber(s) => {
                write!(f, "malformed number `{s}` at byte {}", self.offset)
            }
            ParseErrorKind::TooDeep => write!(
                f,
                "expression nested deeper than {MAX_DEPTH} at byte {}",
                self.offset
            ),
            ParseErrorKind::Empty => write!(f, "empty expression"),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(c) => format!("operator `{c}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push((i, Tok::Op(c as char)));
                i += 1;
            }
            b'(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
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
                        i = j;
                    }
                }
                let lexeme = &text[start..i];
                let v: f64 = lexeme.parse().map_err(|_| ParseError {
                    offset: start,
                    kind: ParseErrorKind::BadNumber(lexeme.to_string()),
                })?;
                out.push((start, Tok::Num(v)));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('\u{fffd}');
                return Err(ParseError {
                    offset: i,
                    kind: ParseErrorKind::UnexpectedChar(ch),
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn error(&self) -> ParseError {
        match self.peek() {
            Some(t) => ParseError {
                offset: self.offset(),
                kind: ParseErrorKind::UnexpectedToken(t.describe()),
            },
            None => ParseError {
                offset: self.end,
                kind: ParseErrorKind::UnexpectedEnd,
            },
        }
    }

    fn descend(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError {
                offset: self.offset(),
                kind: ParseErrorKind::TooDeep,
            });
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.descend()?;
        let entry = self.depth - 1;
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.pos += 1;
            self.descend()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
        self.depth = entry;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let entry = self.depth;
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.pos += 1;
            self.descend()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
        self.depth = entry;
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.pos += 1;
            self.descend()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            self.descend()?;
            let exponent = self.unary()?;
            self.depth -= 1;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let func = match name.as_str() {
                    "r" => return Ok(Expr::Var),
                    "exp" => Func::Exp,
                    "sqrt" => Func::Sqrt,
                    _ => {
                        return Err(ParseError {
                            offset,
                            kind: ParseErrorKind::UnknownIdentifier(name),
                        })
                    }
                };
                if self.peek() != Some(&Tok::LParen) {
                    return Err(self.error());
                }
                self.pos += 1;
                let arg = self.expr()?;
                self.close()?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.close()?;
                Ok(inner)
            }
            _ => Err(self.error()),
        }
    }

    fn close(&mut self) -> Result<(), ParseError> {
        if self.peek() == Some(&Tok::RParen) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error())
        }
    }
}

pub fn parse_potential_expr(text: &str) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(ParseError {
            offset: 0,
            kind: ParseErrorKind::Empty,
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        depth: 0,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.error());
    }
    Ok(e)
}

impl Expr {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var => r,
            Expr::Neg(e) => -e.eval(r),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(r), b.eval(r));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call(f, e) => {
                let x = e.eval(r);
                match f {
                    Func::Exp => x.exp(),
                    Func::Sqrt => x.sqrt(),
                }
            }
        }
    }

    /// Analytic continuation off the real axis. Subexpressions that do not depend
    /// on a complex `r` use real arithmetic, so a real `z` reproduces
    /// [`Expr::eval`] bit for bit.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        match self.eval_split(z) {
            Value::Real(v) => Complex64::new(v, 0.0),
            Value::Complex(c) => c,
        }
    }

    fn eval_split(&self, z: Complex64) -> Value {
        match self {
            Expr::Num(v) => Value::Real(*v),
            Expr::Var => {
                if z.im == 0.0 {
                    Value::Real(z.re)
                } else {
                    Value::Complex(z)
                }
            }
            Expr::Neg(e) => match e.eval_split(z) {
                Value::Real(v) => Value::Real(-v),
                Value::Complex(c) => Value::Complex(-c),
            },
            Expr::Bin(op, a, b) => match (a.eval_split(z), b.eval_split(z)) {
                (Value::Real(x), Value::Real(y)) => match op {
                    BinOp::Add => Value::Real(x + y),
                    BinOp::Sub => Value::Real(x - y),
                    BinOp::Mul => Value::Real(x * y),
                    BinOp::Div => Value::Real(x / y),
                    BinOp::Pow => Value::Real(x.powf(y)),
                },
                (x, y) => {
                    let (x, y) = (x.complex(), y.complex());
                    Value::Complex(match op {
                        BinOp::Add => x + y,
                        BinOp::Sub => x - y,
                        BinOp::Mul => x * y,
                        BinOp::Div => x / y,
                        BinOp::Pow if y.im == 0.0 && y.re.fract() == 0.0 && y.re.abs() < 1024.0 => {
                            x.powi(y.re as i32)
                        }
                        BinOp::Pow => x.powc(y),
                    })
                }
            },
            Expr::Call(f, e) => match (f, e.eval_split(z)) {
                (Func::Exp, Value::Real(x)) => Value::Real(x.exp()),
                (Func::Sqrt, Value::Real(x)) => Value::Real(x.sqrt()),
                (Func::Exp, v) => Value::Complex(v.complex().exp()),
                (Func::Sqrt, v) => Value::Complex(v.complex().sqrt()),
            },
        }
    }
}

#[derive(Clone, Copy)]
enum Value {
    Real(f64),
    Complex(Complex64),
}

impl Value {
    fn complex(self) -> Complex64 {
        match self {
            Value::Real(v) => Complex64::new(v, 0.0),
            Value::Complex(c) => c,
        }
    }
}
