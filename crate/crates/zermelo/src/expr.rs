//! Expression language for scalar fields on charts.
//!
//! Grammar (recursive descent, usual precedence):
//!
//! ```text
//! expr  := term (('+'|'-') term)*
//! term  := unary (('*'|'/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' integer)?
//! atom  := number | x<k> | sqrt(e) | exp(e) | dot(block(i,j), block(i,j)) | '(' expr ')'
//! ```
//!
//! `block(i,j)` is the coordinate slice x_i..x_j (1-based, inclusive); it
//! only appears inside `dot`, which is how block quadrics like
//! `dot(block(1,2),block(1,2)) - dot(block(3,4),block(3,4))` are written.

use crate::dual::Real;
use crate::error::{GeomError, Result};
use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum ExprAst {
    Const(f64),
    /// 0-based coordinate index.
    Coord(usize),
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Div(Box<ExprAst>, Box<ExprAst>),
    Neg(Box<ExprAst>),
    PowI(Box<ExprAst>, i32),
    Sqrt(Box<ExprAst>),
    Exp(Box<ExprAst>),
    /// dot(block(a..), block(b..)) with `len` coordinates each, 0-based starts.
    BlockDot { a: usize, b: usize, len: usize },
}

impl ExprAst {
    pub fn eval<S: Real>(&self, x: &[S]) -> S {
        match self {
            ExprAst::Const(c) => S::constant(*c),
            ExprAst::Coord(i) => x[*i].clone(),
            ExprAst::Add(a, b) => a.eval(x) + b.eval(x),
            ExprAst::Sub(a, b) => a.eval(x) - b.eval(x),
            ExprAst::Mul(a, b) => a.eval(x) * b.eval(x),
            ExprAst::Div(a, b) => a.eval(x) / b.eval(x),
            ExprAst::Neg(a) => -a.eval(x),
            ExprAst::PowI(a, k) => a.eval(x).powi(*k),
            ExprAst::Sqrt(a) => a.eval(x).sqrt(),
            ExprAst::Exp(a) => a.eval(x).exp(),
            ExprAst::BlockDot { a, b, len } => {
                let mut acc = S::zero();
                for i in 0..*len {
                    acc = acc + x[a + i].clone() * x[b + i].clone();
                }
                acc
            }
        }
    }

    /// Highest coordinate index used, plus one (minimum chart dimension).
    pub fn min_dim(&self) -> usize {
        match self {
            ExprAst::Const(_) => 0,
            ExprAst::Coord(i) => i + 1,
            ExprAst::Add(a, b)
            | ExprAst::Sub(a, b)
            | ExprAst::Mul(a, b)
            | ExprAst::Div(a, b) => a.min_dim().max(b.min_dim()),
            ExprAst::Neg(a) | ExprAst::PowI(a, _) | ExprAst::Sqrt(a) | ExprAst::Exp(a) => {
                a.min_dim()
            }
            ExprAst::BlockDot { a, b, len } => (a + len).max(b + len),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            ExprAst::Add(..) | ExprAst::Sub(..) => 1,
            ExprAst::Mul(..) | ExprAst::Div(..) => 2,
            ExprAst::Neg(..) => 3,
            ExprAst::PowI(..) => 4,
            _ => 5,
        }
    }

    fn fmt_child(&self, child: &ExprAst, f: &mut fmt::Formatter<'_>, strict: bool) -> fmt::Result {
        let need = if strict {
            child.precedence() <= self.precedence()
        } else {
            child.precedence() < self.precedence()
        };
        if need {
            write!(f, "({})", child)
        } else {
            write!(f, "{}", child)
        }
    }
}

impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprAst::Const(c) => {
                if *c < 0.0 {
                    write!(f, "({})", c)
                } else {
                    write!(f, "{}", c)
                }
            }
            ExprAst::Coord(i) => write!(f, "x{}", i + 1),
            // The parser associates to the left, so right children at the
            // same precedence keep their parentheses.
            ExprAst::Add(a, b) => {
                self.fmt_child(a, f, false)?;
                write!(f, " + ")?;
                self.fmt_child(b, f, true)
            }
            ExprAst::Sub(a, b) => {
                self.fmt_child(a, f, false)?;
                write!(f, " - ")?;
                self.fmt_child(b, f, true)
            }
            ExprAst::Mul(a, b) => {
                self.fmt_child(a, f, false)?;
                write!(f, "*")?;
                self.fmt_child(b, f, true)
            }
            ExprAst::Div(a, b) => {
                self.fmt_child(a, f, false)?;
                write!(f, "/")?;
                self.fmt_child(b, f, true)
            }
            ExprAst::Neg(a) => {
                write!(f, "-")?;
                self.fmt_child(a, f, true)
            }
            ExprAst::PowI(a, k) => {
                self.fmt_child(a, f, true)?;
                if *k < 0 {
                    write!(f, "^({})", k)
                } else {
                    write!(f, "^{}", k)
                }
            }
            ExprAst::Sqrt(a) => write!(f, "sqrt({})", a),
            ExprAst::Exp(a) => write!(f, "exp({})", a),
            ExprAst::BlockDot { a, b, len } => write!(
                f,
                "dot(block({},{}),block({},{}))",
                a + 1,
                a + len,
                b + 1,
                b + len
            ),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<ExprAst> {
    let mut p = Parser::new(text)?;
    let ast = p.expr()?;
    p.expect_end()?;
    Ok(ast)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            return Err(GeomError::expr(1, "empty expression"));
        }
        let mut toks = Vec::new();
        let bytes: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            let col = i + 1;
            match c {
                ' ' | '\t' | '\n' | '\r' => {
                    i += 1;
                }
                '+' => {
                    toks.push((Tok::Plus, col));
                    i += 1;
                }
                '-' => {
                    toks.push((Tok::Minus, col));
                    i += 1;
                }
                '*' => {
                    toks.push((Tok::Star, col));
                    i += 1;
                }
                '/' => {
                    toks.push((Tok::Slash, col));
                    i += 1;
                }
                '^' => {
                    toks.push((Tok::Caret, col));
                    i += 1;
                }
                '(' => {
                    toks.push((Tok::LParen, col));
                    i += 1;
                }
                ')' => {
                    toks.push((Tok::RParen, col));
                    i += 1;
                }
                ',' => {
                    toks.push((Tok::Comma, col));
                    i += 1;
                }
                '0'..='9' | '.' => {
                    let start = i;
                    while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == '.') {
                        i += 1;
                    }
                    if i < bytes.len() && (bytes[i] == 'e' || bytes[i] == 'E') {
                        let mut j = i + 1;
                        if j < bytes.len() && (bytes[j] == '+' || bytes[j] == '-') {
                            j += 1;
                        }
                        if j < bytes.len() && bytes[j].is_ascii_digit() {
                            i = j;
                            while i < bytes.len() && bytes[i].is_ascii_digit() {
                                i += 1;
                            }
                        }
                    }
                    let s: String = bytes[start..i].iter().collect();
                    let v: f64 = s
                        .parse()
                        .map_err(|_| GeomError::expr(start + 1, format!("bad number '{}'", s)))?;
                    toks.push((Tok::Num(v), start + 1));
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < bytes.len()
                        && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_')
                    {
                        i += 1;
                    }
                    let s: String = bytes[start..i].iter().collect();
                    toks.push((Tok::Ident(s), start + 1));
                }
                other => {
                    return Err(GeomError::expr(col, format!("unexpected character '{}'", other)))
                }
            }
        }
        Ok(Parser {
            toks,
            pos: 0,
            end_col: bytes.len() + 1,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(_, c)| *c)
            .unwrap_or(self.end_col)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(GeomError::expr(self.col(), format!("expected {}", what)))
        }
    }

    fn expect_end(&mut self) -> Result<()> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            Err(GeomError::expr(self.col(), "unexpected trailing input"))
        }
    }

    fn expr(&mut self) -> Result<ExprAst> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = ExprAst::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = ExprAst::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = ExprAst::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = ExprAst::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<ExprAst> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(ExprAst::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprAst> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let col = self.col();
            let negative = if self.peek() == Some(&Tok::Minus) {
                self.pos += 1;
                true
            } else {
                false
            };
            let (paren, mut sign) = if self.peek() == Some(&Tok::LParen) && !negative {
                self.pos += 1;
                let s = if self.peek() == Some(&Tok::Minus) {
                    self.pos += 1;
                    true
                } else {
                    false
                };
                (true, s)
            } else {
                (false, false)
            };
            sign |= negative;
            let k = match self.bump() {
                Some(Tok::Num(v)) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => v as i32,
                _ => return Err(GeomError::expr(col, "expected integer exponent")),
            };
            if paren {
                self.expect(Tok::RParen, "')'")?;
            }
            let k = if sign { -k } else { k };
            return Ok(ExprAst::PowI(Box::new(base), k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprAst> {
        let col = self.col();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(ExprAst::Const(v)),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => self.ident(name, col),
            _ => Err(GeomError::expr(col, "expected a value")),
        }
    }

    fn ident(&mut self, name: String, col: usize) -> Result<ExprAst> {
        if let Some(rest) = name.strip_prefix('x') {
            if let Ok(k) = rest.parse::<usize>() {
                if k == 0 {
                    return Err(GeomError::expr(col, "coordinates are 1-based"));
                }
                return Ok(ExprAst::Coord(k - 1));
            }
        }
        match name.as_str() {
            "sqrt" => {
                self.expect(Tok::LParen, "'('")?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(ExprAst::Sqrt(Box::new(inner)))
            }
            "exp" => {
                self.expect(Tok::LParen, "'('")?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(ExprAst::Exp(Box::new(inner)))
            }
            "dot" => {
                self.expect(Tok::LParen, "'('")?;
                let (a, alen) = self.block()?;
                self.expect(Tok::Comma, "','")?;
                let (b, blen) = self.block()?;
                self.expect(Tok::RParen, "')'")?;
                if alen != blen {
                    return Err(GeomError::expr(
                        col,
                        format!("dot blocks have different lengths {} and {}", alen, blen),
                    ));
                }
                Ok(ExprAst::BlockDot { a, b, len: alen })
            }
            other => Err(GeomError::expr(col, format!("unknown identifier '{}'", other))),
        }
    }

    fn block(&mut self) -> Result<(usize, usize)> {
        let col = self.col();
        match self.bump() {
            Some(Tok::Ident(name)) if name == "block" => {}
            _ => return Err(GeomError::expr(col, "expected block(i,j)")),
        }
        self.expect(Tok::LParen, "'('")?;
        let i = self.small_index()?;
        self.expect(Tok::Comma, "','")?;
        let j = self.small_index()?;
        self.expect(Tok::RParen, "')'")?;
        if j < i {
            return Err(GeomError::expr(col, "block range is reversed"));
        }
        Ok((i - 1, j - i + 1))
    }

    fn small_index(&mut self) -> Result<usize> {
        let col = self.col();
        match self.bump() {
            Some(Tok::Num(v)) if v.fract() == 0.0 && v >= 1.0 && v <= 64.0 => Ok(v as usize),
            _ => Err(GeomError::expr(col, "expected coordinate index")),
        }
    }
}
