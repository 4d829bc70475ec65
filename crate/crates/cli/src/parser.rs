//! Text syntax for differential forms.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := power (('*' | '/\' | '/') power)*
//! power  := factor ('^' INT)?
//! factor := rational | symbol | atom | '(' expr ')' | 'd' '(' expr ')'
//!         | 'i' '(' 'xi'INT ';' expr ')' | '-' factor
//! atom   := 'dx'INT | 'dy'INT | 'du'INT | 'dth'INT
//! symbol := 'x'INT | 'y'INT | 'u'INT | 'cth'INT | 'sth'INT
//! ```
//!
//! `*` and `/\` both denote the wedge product (which is ordinary multiplication
//! on functions). Division is only by nonzero constants.

use std::fmt;

use sympq_core::actions::{parse_rational, LinearAction};
use sympq_core::form::{Form, VectorField};
use sympq_core::poly::{coord_names, var_names, Layout, Poly, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownCoordinate(String),
    Degree(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (what, msg) = match &self.kind {
            ParseErrorKind::Syntax(m) => ("syntax error", m),
            ParseErrorKind::UnknownCoordinate(m) => ("unknown coordinate", m),
            ParseErrorKind::Degree(m) => ("degree inconsistency", m),
        };
        write!(f, "line {}, column {}: {what}: {msg}", self.line, self.column)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl Pos {
    fn err(self, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.line, column: self.column, kind }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Wedge,
    Caret,
    LParen,
    RParen,
    Semi,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        let mut adv = 1;
        let tok = match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => None,
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ';' => Some(Tok::Semi),
            '/' if chars.get(i + 1) == Some(&'\\') => {
                adv = 2;
                Some(Tok::Wedge)
            }
            '/' => Some(Tok::Slash),
            c if c.is_ascii_digit() => {
                let s: String = chars[i..].iter().take_while(|c| c.is_ascii_digit()).collect();
                adv = s.len();
                Some(Tok::Int(s))
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let letters: String = chars[i..].iter().take_while(|c| c.is_ascii_alphabetic() || **c == '_').collect();
                let digits: String = chars[i + letters.len()..].iter().take_while(|c| c.is_ascii_digit()).collect();
                adv = letters.len() + digits.len();
                Some(Tok::Ident(letters + &digits))
            }
            other => return Err(pos.err(ParseErrorKind::Syntax(format!("unexpected character `{other}`")))),
        };
        if let Some(t) = tok {
            out.push((t, pos));
        }
        i += adv;
        col += adv;
    }
    out.push((Tok::End, Pos { line, column: col }));
    Ok(out)
}

/// Syntax tree; every node keeps the position of its first token.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Rational(Q, Pos),
    Symbol(String, Pos),
    Atom(String, Pos),
    Neg(Box<Expr>, Pos),
    Add(Box<Expr>, Box<Expr>, Pos),
    Sub(Box<Expr>, Box<Expr>, Pos),
    Wedge(Box<Expr>, Box<Expr>, Pos),
    Div(Box<Expr>, Box<Expr>, Pos),
    Pow(Box<Expr>, u32, Pos),
    D(Box<Expr>, Pos),
    Interior(String, Box<Expr>, Pos),
}

impl Expr {
    pub fn pos(&self) -> Pos {
        match self {
            Expr::Rational(_, p)
            | Expr::Symbol(_, p)
            | Expr::Atom(_, p)
            | Expr::Neg(_, p)
            | Expr::Add(_, _, p)
            | Expr::Sub(_, _, p)
            | Expr::Wedge(_, _, p)
            | Expr::Div(_, _, p)
            | Expr::Pow(_, _, p)
            | Expr::D(_, p)
            | Expr::Interior(_, _, p) => *p,
        }
    }

    fn visit_names(&self, f: &mut impl FnMut(&str, Pos)) {
        match self {
            Expr::Rational(..) => {}
            Expr::Symbol(s, p) | Expr::Atom(s, p) => f(s, *p),
            Expr::Neg(a, _) | Expr::Pow(a, _, _) | Expr::D(a, _) | Expr::Interior(_, a, _) => a.visit_names(f),
            Expr::Add(a, b, _) | Expr::Sub(a, b, _) | Expr::Wedge(a, b, _) | Expr::Div(a, b, _) => {
                a.visit_names(f);
                b.visit_names(f);
            }
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, what: &str) -> ParseError {
        let found = match self.peek() {
            Tok::End => "end of input".to_string(),
            t => format!("{t:?}"),
        };
        self.pos().err(ParseErrorKind::Syntax(format!("expected {what}, found {found}")))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos();
        let mut lhs = match self.peek() {
            Tok::Minus => {
                self.bump();
                Expr::Neg(Box::new(self.term()?), start)
            }
            Tok::Plus => {
                self.bump();
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            let p = self.pos();
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?), p);
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?), p);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.power()?;
        loop {
            let p = self.pos();
            match self.peek() {
                Tok::Star | Tok::Wedge => {
                    self.bump();
                    lhs = Expr::Wedge(Box::new(lhs), Box::new(self.power()?), p);
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.power()?), p);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.factor()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let p = self.pos();
        self.bump();
        match self.bump() {
            (Tok::Int(s), ip) => {
                let e = s.parse().map_err(|_| ip.err(ParseErrorKind::Syntax("exponent too large".into())))?;
                Ok(Expr::Pow(Box::new(base), e, p))
            }
            (_, ip) => Err(ip.err(ParseErrorKind::Syntax("expected an integer exponent".into()))),
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let p = self.pos();
        match self.peek().clone() {
            Tok::Int(s) => {
                self.bump();
                let v = parse_rational(&s).map_err(|e| p.err(ParseErrorKind::Syntax(e.to_string())))?;
                Ok(Expr::Rational(v, p))
            }
            Tok::Minus => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.power()?), p))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) if name == "d" => {
                self.bump();
                self.expect(Tok::LParen, "`(` after d")?;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::D(Box::new(e), p))
            }
            Tok::Ident(name) if name == "i" => {
                self.bump();
                self.expect(Tok::LParen, "`(` after i")?;
                let field = match self.bump() {
                    (Tok::Ident(f), _) if f.starts_with("xi") => f,
                    (_, fp) => return Err(fp.err(ParseErrorKind::Syntax("expected a field name xiN".into()))),
                };
                self.expect(Tok::Semi, "`;`")?;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::Interior(field, Box::new(e), p))
            }
            Tok::Ident(name) => {
                self.bump();
                let atom = ["dx", "dy", "du", "dth"].iter().any(|pre| split_name(&name).0 == *pre);
                Ok(if atom { Expr::Atom(name, p) } else { Expr::Symbol(name, p) })
            }
            _ => Err(self.unexpected("a number, coordinate, covector or `(`")),
        }
    }
}

fn split_name(name: &str) -> (&str, Option<usize>) {
    let cut = name.find(|c: char| c.is_ascii_digit()).unwrap_or(name.len());
    (&name[..cut], name[cut..].parse().ok())
}

/// Parses text into a syntax tree.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}

/// Smallest layout containing every coordinate named in the tree.
pub fn infer_layout(e: &Expr) -> Result<Layout, ParseError> {
    let (mut pairs, mut reals, mut angles) = (0usize, 0usize, 0usize);
    let mut first_real: Option<Pos> = None;
    let mut err = None;
    e.visit_names(&mut |name, pos| {
        let (stem, idx) = split_name(name);
        let slot = match (stem, idx) {
            ("x" | "y" | "dx" | "dy", Some(i)) if i >= 1 => &mut pairs,
            ("u" | "du", Some(i)) if i >= 1 => {
                first_real.get_or_insert(pos);
                &mut reals
            }
            ("cth" | "sth" | "dth", Some(i)) if i >= 1 => &mut angles,
            _ => {
                err.get_or_insert(pos.err(ParseErrorKind::UnknownCoordinate(name.to_string())));
                return;
            }
        };
        *slot = (*slot).max(idx.unwrap_or(0));
    });
    if let Some(e) = err {
        return Err(e);
    }
    if pairs > 0 && reals > 0 {
        return Err(first_real.unwrap().err(ParseErrorKind::UnknownCoordinate("u-coordinates cannot be mixed with x/y pairs".into())));
    }
    // an odd linear dimension is what makes coordinates print as u
    let linear = if reals > 0 { if reals % 2 == 0 { reals + 1 } else { reals } } else { 2 * pairs };
    Ok(Layout::with_angles(linear.max(if angles == 0 { 2 } else { 0 }), angles))
}

/// Lowers a tree to a form on `layout`; `action` supplies the fields `xiN`.
pub fn lower(e: &Expr, layout: Layout, action: Option<&LinearAction>) -> Result<Form, ParseError> {
    let vars = var_names(layout);
    let coords = coord_names(layout);
    let fields: Vec<VectorField> = action.map(|a| a.basis_fields()).unwrap_or_default();
    let ctx = Ctx { layout, vars, coords, fields };
    ctx.lower(e)
}

struct Ctx {
    layout: Layout,
    vars: Vec<String>,
    coords: Vec<String>,
    fields: Vec<VectorField>,
}

impl Ctx {
    fn same_degree(&self, a: &Form, b: &Form, pos: Pos) -> Result<(), ParseError> {
        if a.degree() != b.degree() && !a.is_zero() && !b.is_zero() {
            return Err(pos.err(ParseErrorKind::Degree(format!("cannot add a {}-form and a {}-form", a.degree(), b.degree()))));
        }
        Ok(())
    }

    fn sum(&self, a: Form, b: Form, pos: Pos) -> Result<Form, ParseError> {
        self.same_degree(&a, &b, pos)?;
        Ok(if a.is_zero() && a.degree() != b.degree() {
            b
        } else if b.is_zero() && a.degree() != b.degree() {
            a
        } else {
            a.add(&b)
        })
    }

    fn lower(&self, e: &Expr) -> Result<Form, ParseError> {
        let l = self.layout;
        Ok(match e {
            Expr::Rational(v, _) => Form::constant(l, v.clone()),
            Expr::Symbol(s, p) => {
                let i = self.vars.iter().position(|v| v == s).ok_or_else(|| p.err(ParseErrorKind::UnknownCoordinate(s.clone())))?;
                Form::function(Poly::var(l, i))
            }
            Expr::Atom(s, p) => {
                let i = self
                    .coords
                    .iter()
                    .position(|c| format!("d{c}") == *s)
                    .ok_or_else(|| p.err(ParseErrorKind::UnknownCoordinate(s.clone())))?;
                Form::dx(l, i)
            }
            Expr::Neg(a, _) => self.lower(a)?.neg(),
            Expr::Add(a, b, p) => self.sum(self.lower(a)?, self.lower(b)?, *p)?,
            Expr::Sub(a, b, p) => self.sum(self.lower(a)?, self.lower(b)?.neg(), *p)?,
            Expr::Wedge(a, b, p) => {
                let (a, b) = (self.lower(a)?, self.lower(b)?);
                if a.degree() + b.degree() > l.dim() {
                    return Err(p.err(ParseErrorKind::Degree(format!("wedge degree {} exceeds dimension {}", a.degree() + b.degree(), l.dim()))));
                }
                a.wedge(&b)
            }
            Expr::Div(a, b, p) => {
                let (a, b) = (self.lower(a)?, self.lower(b)?);
                let c = constant_of(&b).ok_or_else(|| p.err(ParseErrorKind::Syntax("division only by a nonzero constant".into())))?;
                a.scale(&(Q::from_integer(1.into()) / c))
            }
            Expr::Pow(a, n, p) => {
                let a = self.lower(a)?;
                if a.degree() != 0 {
                    return Err(p.err(ParseErrorKind::Degree("`^` raises functions to a power; use /\\ for forms".into())));
                }
                let f = a.component(&[]).cloned().unwrap_or_else(|| Poly::zero(l));
                Form::function(f.pow(*n))
            }
            Expr::D(a, _) => self.lower(a)?.d(),
            Expr::Interior(name, a, p) => {
                let v = split_name(name)
                    .1
                    .filter(|&j| j >= 1)
                    .and_then(|j| self.fields.get(j - 1))
                    .ok_or_else(|| p.err(ParseErrorKind::UnknownCoordinate(format!("{name} (fields come from the example's torus action)"))))?;
                let a = self.lower(a)?;
                if a.degree() == 0 {
                    return Err(p.err(ParseErrorKind::Degree("interior product of a function".into())));
                }
                a.interior(v)
            }
        })
    }
}

fn constant_of(f: &Form) -> Option<Q> {
    if f.degree() != 0 || f.is_zero() {
        return None;
    }
    let c = f.component(&[])?;
    c.is_constant().then(|| c.constant_term())
}

/// Parses a form; the layout is `layout` when given, else inferred.
pub fn parse_form(text: &str, layout: Option<Layout>, action: Option<&LinearAction>) -> Result<Form, ParseError> {
    let e = parse_expr(text)?;
    let layout = match layout {
        Some(l) => l,
        None => infer_layout(&e)?,
    };
    lower(&e, layout, action)
}

/// Canonical text, which parses back to the same form on the same layout.
pub fn print_form(f: &Form) -> String {
    f.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use sympq_core::actions::builtin;
    use sympq_core::poly::{q, qr};

    fn l2() -> Layout {
        Layout::linear(2)
    }

    #[test]
    fn area_form() {
        let f = parse_form("dx1 /\\ dy1", None, None).unwrap();
        assert_eq!(f, Form::dx(l2(), 0).wedge(&Form::dx(l2(), 1)));
    }

    #[test]
    fn radial_primitive() {
        let f = parse_form("(1/2)*(x1*dy1 - y1*dx1)", None, None).unwrap();
        let x = Poly::var(l2(), 0);
        let y = Poly::var(l2(), 1);
        let expected = Form::dx(l2(), 1).mul_function(&x).sub(&Form::dx(l2(), 0).mul_function(&y)).scale(&qr(1, 2));
        assert_eq!(f, expected);
        // its differential is the area form
        assert_eq!(f.d(), parse_form("dx1/\\dy1", None, None).unwrap());
    }

    #[test]
    fn repeated_covector_is_zero() {
        let f = parse_form("dx1 /\\ dx1", None, None).unwrap();
        assert!(f.is_zero());
        assert_eq!(f.degree(), 2);
    }

    #[test]
    fn precedence_and_powers() {
        let f = parse_form("-x1^2 + 3/4*y1*x1", None, None).unwrap();
        let x = Poly::var(l2(), 0);
        let y = Poly::var(l2(), 1);
        let expected = &(&x * &y).scale(&qr(3, 4)) - &x.pow(2);
        assert_eq!(f, Form::function(expected));
        assert_eq!(parse_form("2^3", None, None).unwrap(), Form::constant(l2(), q(8)));
    }

    #[test]
    fn angles_and_derivatives() {
        let f = parse_form("d(cth1*x1)", None, None).unwrap();
        assert_eq!(f.layout(), Layout::with_angles(2, 1));
        assert_eq!(f.degree(), 1);
        let g = parse_form("dth1", Some(Layout::with_angles(4, 2)), None).unwrap();
        assert_eq!(g, Form::dx(Layout::with_angles(4, 2), 4));
    }

    #[test]
    fn interior_needs_a_torus() {
        let a = builtin("cone11", 0).unwrap();
        let f = parse_form("i(xi1; dx1/\\dy1 + dx2/\\dy2)", Some(a.layout()), Some(&a)).unwrap();
        assert_eq!(f, a.omega().interior(&a.basis_fields()[0]));
        let e = parse_form("i(xi1; dx1)", None, None).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::UnknownCoordinate(_)));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_form("dx1 +\n  (x1", None, None).unwrap_err();
        assert_eq!((e.line, e.column), (2, 6));
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        let e = parse_form("dx1 + x1", None, None).unwrap_err();
        assert_eq!((e.line, e.column, matches!(e.kind, ParseErrorKind::Degree(_))), (1, 5, true));
        let e = parse_form("z1", None, None).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::UnknownCoordinate(_)));
        let e = parse_form("dx3", Some(Layout::linear(4)), None).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::UnknownCoordinate(_)));
        let e = parse_form("x1 $ 2", None, None).unwrap_err();
        assert_eq!(e.column, 4);
        assert!(parse_form("x1 / x1", None, None).is_err());
        assert!(parse_form("dx1^2", None, None).is_err());
    }

    #[test]
    fn print_then_parse() {
        for text in ["(1/2)*(x1*dy1 - y1*dx1)", "x1^2*dx1/\\dy2 - 3*dth1/\\dx2 + sth1*dy1/\\dth1", "-7/3", "0"] {
            let l = Layout::with_angles(4, 1);
            let f = parse_form(text, Some(l), None).unwrap();
            assert_eq!(parse_form(&print_form(&f), Some(l), None).unwrap(), f, "{text}");
        }
    }
}
