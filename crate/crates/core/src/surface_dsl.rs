//! Expression language for parametric surfaces `f(u, v)` and for
//! one-parameter matrix families.
//!
//! Grammar (precedence climbing, lowest first):
//!
//! ```text
//! expr    := expr ('+' | '-') expr
//!          | expr ('*' | '/') expr
//!          | '-' expr                 (binds looser than '^')
//!          | expr '^' expr            (right associative, rhs may be signed)
//!          | primary
//! primary := number | name | name '(' expr ')' | '(' expr ')'
//! ```
//!
//! Functions: `sqrt`, `sin`, `cos`, `exp`. Built-in constant: `pi`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result, SourcePos};
use crate::jets::Jet2;

pub const FUNCTIONS: [&str; 4] = ["sqrt", "sin", "cos", "exp"];

const NON_SMOOTH: [&str; 14] = [
    "abs",
    "floor",
    "ceil",
    "round",
    "trunc",
    "fract",
    "sign",
    "sgn",
    "min",
    "max",
    "mod",
    "step",
    "heaviside",
    "clamp",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Sin,
    Cos,
    Exp,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        match name {
            "sqrt" => Some(Func::Sqrt),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(String),
    Const { name: String, value: f64 },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// True when no free variable occurs.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Const { .. } => true,
            Expr::Var(_) => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.is_constant() && b.is_constant()
            }
        }
    }

    pub fn eval<S: Scalar>(&self, env: &Env<'_, S>) -> Result<S> {
        let domain = |e: Error| Error::EvaluationDomainError(e.to_string());
        Ok(match self {
            Expr::Num(x) => env.proto.lift(*x),
            Expr::Const { value, .. } => env.proto.lift(*value),
            Expr::Var(name) => env
                .vars
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, s)| s.clone())
                .ok_or_else(|| Error::EvaluationDomainError(format!("unbound variable `{name}`")))?,
            Expr::Neg(a) => a.eval(env)?.neg(),
            Expr::Add(a, b) => a.eval(env)?.add(&b.eval(env)?),
            Expr::Sub(a, b) => a.eval(env)?.sub(&b.eval(env)?),
            Expr::Mul(a, b) => a.eval(env)?.mul(&b.eval(env)?),
            Expr::Div(a, b) => a.eval(env)?.div(&b.eval(env)?).map_err(domain)?,
            Expr::Pow(a, b) => {
                let base = a.eval(env)?;
                if b.is_constant() {
                    let r = b.eval(&Env::<f64>::new(&[], 0.0))?;
                    if r.fract() == 0.0 && r.abs() <= i32::MAX as f64 {
                        base.powi(r as i32).map_err(domain)?
                    } else {
                        base.powf(r).map_err(domain)?
                    }
                } else {
                    let e = b.eval(env)?;
                    e.mul(&base.ln().map_err(domain)?).exp()
                }
            }
            Expr::Call(f, a) => {
                let x = a.eval(env)?;
                match f {
                    Func::Sqrt => x.sqrt().map_err(domain)?,
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                }
            }
        })
    }
}

/// Fully parenthesized rendering; parsing it reproduces the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) => write!(f, "{x:?}"),
            Expr::Var(n) => write!(f, "{n}"),
            Expr::Const { name, .. } => write!(f, "{name}"),
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

/// Number-like values the evaluator can run over.
pub trait Scalar: Clone {
    /// A constant of the same kind (and jet order) as `self`.
    fn lift(&self, c: f64) -> Self;
    fn value(&self) -> f64;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div(&self, o: &Self) -> Result<Self>;
    fn powi(&self, n: i32) -> Result<Self>;
    fn powf(&self, r: f64) -> Result<Self>;
    fn ln(&self) -> Result<Self>;
    fn sqrt(&self) -> Result<Self>;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn exp(&self) -> Self;
}

impl Scalar for f64 {
    fn lift(&self, c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, o: &Self) -> Result<Self> {
        if *o == 0.0 {
            Err(Error::DivisionByZeroConstantTerm)
        } else {
            Ok(self / o)
        }
    }
    fn powi(&self, n: i32) -> Result<Self> {
        if n < 0 && *self == 0.0 {
            Err(Error::DivisionByZeroConstantTerm)
        } else {
            Ok(f64::powi(*self, n))
        }
    }
    fn powf(&self, r: f64) -> Result<Self> {
        if *self <= 0.0 {
            Err(Error::NonPositiveBase(*self))
        } else {
            Ok(f64::powf(*self, r))
        }
    }
    fn ln(&self) -> Result<Self> {
        if *self <= 0.0 {
            Err(Error::NonPositiveBase(*self))
        } else {
            Ok(f64::ln(*self))
        }
    }
    fn sqrt(&self) -> Result<Self> {
        if *self < 0.0 {
            Err(Error::NegativeSqrtConstantTerm(*self))
        } else {
            Ok(f64::sqrt(*self))
        }
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
}

impl Scalar for Jet2 {
    fn lift(&self, c: f64) -> Self {
        Jet2::constant(c, self.order())
    }
    fn value(&self) -> f64 {
        Jet2::value(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, o: &Self) -> Result<Self> {
        self.try_div(o)
    }
    fn powi(&self, n: i32) -> Result<Self> {
        Jet2::powi(self, n)
    }
    fn powf(&self, r: f64) -> Result<Self> {
        Jet2::powf(self, r)
    }
    fn ln(&self) -> Result<Self> {
        Jet2::ln(self)
    }
    fn sqrt(&self) -> Result<Self> {
        Jet2::sqrt(self)
    }
    fn sin(&self) -> Self {
        Jet2::sin(self)
    }
    fn cos(&self) -> Self {
        Jet2::cos(self)
    }
    fn exp(&self) -> Self {
        Jet2::exp(self)
    }
}

/// Variable bindings plus a prototype used to build constants.
pub struct Env<'a, S> {
    pub vars: &'a [(&'a str, S)],
    pub proto: S,
}

impl<'a, S: Scalar> Env<'a, S> {
    pub fn new(vars: &'a [(&'a str, S)], proto: S) -> Self {
        Self { vars, proto }
    }
}

/// Names visible to the parser.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    pub variables: Vec<String>,
    pub constants: BTreeMap<String, f64>,
}

impl Scope {
    pub fn with_variables(vars: &[&str]) -> Self {
        Self { variables: vars.iter().map(|s| s.to_string()).collect(), constants: BTreeMap::new() }
    }

    pub fn surface() -> Self {
        Self::with_variables(&["u", "v"])
    }

    fn lookup_const(&self, name: &str) -> Option<f64> {
        self.constants.get(name).copied().or(if name == "pi" { Some(std::f64::consts::PI) } else { None })
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    pos: SourcePos,
}

fn lex(text: &str, line: usize, col0: usize) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let pos = |i: usize| SourcePos { line, column: col0 + i + 1 };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
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
            let s: String = chars[start..i].iter().collect();
            let v = s
                .parse::<f64>()
                .map_err(|_| Error::SyntaxError { pos: pos(start), expected: vec!["number".into()] })?;
            out.push(Token { tok: Tok::Num(v), pos: pos(start) });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), pos: pos(start) });
        } else if "+-*/^(),".contains(c) {
            out.push(Token { tok: Tok::Sym(c), pos: pos(i) });
            i += 1;
        } else {
            return Err(Error::SyntaxError { pos: pos(i), expected: vec!["expression".into()] });
        }
    }
    // end of input is reported at the last character
    let end = if chars.is_empty() { pos(0) } else { pos(chars.len() - 1) };
    out.push(Token { tok: Tok::End, pos: end });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    at: usize,
    scope: &'a Scope,
}

const PREFIX_BP: u8 = 30;

fn infix_bp(c: char) -> Option<(u8, u8)> {
    match c {
        '+' | '-' => Some((10, 11)),
        '*' | '/' => Some((20, 21)),
        '^' => Some((41, 40)),
        _ => None,
    }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.at]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T> {
        Err(Error::SyntaxError { pos: self.peek().pos, expected: expected.iter().map(|s| s.to_string()).collect() })
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek().tok == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.fail(&[&c.to_string()])
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr> {
        let mut lhs = self.prefix()?;
        while let Tok::Sym(op) = self.peek().tok {
            let Some((lbp, rbp)) = infix_bp(op) else { break };
            if lbp < min_bp {
                break;
            }
            self.bump();
            let rhs = self.expr(rbp)?;
            let (a, b) = (Box::new(lhs), Box::new(rhs));
            lhs = match op {
                '+' => Expr::Add(a, b),
                '-' => Expr::Sub(a, b),
                '*' => Expr::Mul(a, b),
                '/' => Expr::Div(a, b),
                _ => Expr::Pow(a, b),
            };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Num(x) => {
                self.bump();
                Ok(Expr::Num(x))
            }
            Tok::Sym('-') => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.expr(PREFIX_BP)?)))
            }
            Tok::Sym('+') => {
                self.bump();
                self.expr(PREFIX_BP)
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr(0)?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                let is_call = self.peek().tok == Tok::Sym('(');
                if let Some(f) = Func::from_name(&name) {
                    if !is_call {
                        return self.fail(&["("]);
                    }
                    self.bump();
                    let arg = self.expr(0)?;
                    self.expect(')')?;
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                if NON_SMOOTH.contains(&name.as_str()) {
                    return Err(Error::NonSmoothFunction { name, pos: t.pos });
                }
                if is_call {
                    return Err(Error::UnknownIdentifier { name, pos: t.pos });
                }
                if self.scope.variables.contains(&name) {
                    return Ok(Expr::Var(name));
                }
                match self.scope.lookup_const(&name) {
                    Some(value) => Ok(Expr::Const { name, value }),
                    None => Err(Error::UnknownIdentifier { name, pos: t.pos }),
                }
            }
            _ => self.fail(&["expression"]),
        }
    }
}

fn parse_at(text: &str, scope: &Scope, line: usize, col0: usize) -> Result<Expr> {
    let toks = lex(text, line, col0)?;
    let mut p = Parser { toks, at: 0, scope };
    let e = p.expr(0)?;
    if p.peek().tok != Tok::End {
        return p.fail(&["operator", "end of input"]);
    }
    Ok(e)
}

/// Parses one expression over the given scope.
pub fn parse_expr(text: &str, scope: &Scope) -> Result<Expr> {
    parse_at(text, scope, 1, 0)
}

/// Parses an expression in the surface variables `u`, `v`.
pub fn parse(text: &str) -> Result<Expr> {
    parse_expr(text, &Scope::surface())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl Default for Domain {
    fn default() -> Self {
        Self { u_min: -1.0, u_max: 1.0, v_min: -1.0, v_max: 1.0 }
    }
}

/// A parametric surface with optional explicit unit normal.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceExpr {
    pub components: [Expr; 3],
    pub normal: Option<[Expr; 3]>,
    pub constants: BTreeMap<String, f64>,
    pub domain: Domain,
}

/// Component jets of a surface (and of its supplied normal) at one point.
#[derive(Clone, Debug)]
pub struct SurfaceJets {
    pub f: [Jet2; 3],
    pub normal: Option<[Jet2; 3]>,
}

/// Tolerance for validating a supplied normal field.
pub const NORMAL_TOL: f64 = 1e-8;

impl SurfaceExpr {
    /// Builds a surface from component strings, for programmatic use.
    pub fn from_strs(xyz: [&str; 3], normal: Option<[&str; 3]>) -> Result<Self> {
        let scope = Scope::surface();
        let p = |s: &str| parse_expr(s, &scope);
        let components = [p(xyz[0])?, p(xyz[1])?, p(xyz[2])?];
        let normal = match normal {
            Some(n) => Some([p(n[0])?, p(n[1])?, p(n[2])?]),
            None => None,
        };
        Ok(Self { components, normal, constants: BTreeMap::new(), domain: Domain::default() })
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn eval_point(&self, u: f64, v: f64) -> Result<[f64; 3]> {
        eval3(&self.components, &[("u", u), ("v", v)], 0.0)
    }

    pub fn eval_normal_point(&self, u: f64, v: f64) -> Result<Option<[f64; 3]>> {
        self.normal.as_ref().map(|n| eval3(n, &[("u", u), ("v", v)], 0.0)).transpose()
    }

    pub fn eval_jet(&self, u0: f64, v0: f64, order: usize) -> Result<SurfaceJets> {
        let vars = [("u", Jet2::var_u(u0, order)), ("v", Jet2::var_v(v0, order))];
        let proto = Jet2::constant(0.0, order);
        Ok(SurfaceJets {
            f: eval3(&self.components, &vars, proto.clone())?,
            normal: self.normal.as_ref().map(|n| eval3(n, &vars, proto)).transpose()?,
        })
    }

    /// Checks `|n| = 1` and `<df, n> = 0` on an `m x m` sample grid.
    pub fn validate_normal(&self, m: usize) -> Result<()> {
        if self.normal.is_none() {
            return Ok(());
        }
        let d = self.domain;
        for i in 0..m {
            for j in 0..m {
                let s = |k: usize, lo: f64, hi: f64| lo + (hi - lo) * (k as f64 + 0.5) / m as f64;
                let (u, v) = (s(i, d.u_min, d.u_max), s(j, d.v_min, d.v_max));
                let jets = self.eval_jet(u, v, 1)?;
                let n = jets.normal.as_ref().expect("normal present");
                let nv: Vec<f64> = n.iter().map(|c| c.value()).collect();
                let len = nv.iter().map(|c| c * c).sum::<f64>().sqrt();
                let invalid = |message: String| Error::InvalidNormal { u, v, message };
                if (len - 1.0).abs() > NORMAL_TOL {
                    return Err(invalid(format!("|n| = {len}")));
                }
                for (a, b, name) in [(1, 0, "f_u"), (0, 1, "f_v")] {
                    let df: Vec<f64> = jets.f.iter().map(|c| c.partial(a, b)).collect();
                    let scale = 1.0 + df.iter().map(|c| c.abs()).fold(0.0, f64::max);
                    let dot: f64 = df.iter().zip(&nv).map(|(x, y)| x * y).sum();
                    if dot.abs() > NORMAL_TOL * scale {
                        return Err(invalid(format!("<{name}, n> = {dot}")));
                    }
                }
            }
        }
        Ok(())
    }
}

fn eval3<S: Scalar>(exprs: &[Expr; 3], vars: &[(&str, S)], proto: S) -> Result<[S; 3]> {
    let env = Env::new(vars, proto);
    Ok([exprs[0].eval(&env)?, exprs[1].eval(&env)?, exprs[2].eval(&env)?])
}

fn file_err(line: usize, message: impl Into<String>) -> Error {
    Error::SurfaceFile { line, message: message.into() }
}

/// Splits `key = rhs`, returning the key and the rhs with its 0-based column.
fn split_assignment(line: &str) -> Option<(&str, &str, usize)> {
    let eq = line.find('=')?;
    let key = line[..eq].trim();
    let rest = &line[eq + 1..];
    let lead = rest.len() - rest.trim_start().len();
    let col = line[..eq + 1 + lead].chars().count();
    Some((key, rest.trim_start(), col))
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

/// Handles a `const NAME = expr` line; returns `true` if it was one.
fn parse_const_line(raw: &str, lineno: usize, scope: &mut Scope) -> Result<bool> {
    let trimmed = raw.trim_start();
    let Some(rest) = trimmed.strip_prefix("const") else {
        return Ok(false);
    };
    if !rest.starts_with(char::is_whitespace) {
        return Ok(false);
    }
    let (name, rhs, col) = split_assignment(raw).ok_or_else(|| file_err(lineno, "expected `const NAME = value`"))?;
    let name = name.trim_start().strip_prefix("const").unwrap_or(name).trim();
    let valid = name.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_alphanumeric() || c == '_');
    if !valid {
        return Err(file_err(lineno, format!("invalid constant name `{name}`")));
    }
    if scope.variables.iter().any(|v| v == name) || Func::from_name(name).is_some() || name == "pi" {
        return Err(file_err(lineno, format!("`{name}` is reserved")));
    }
    if scope.constants.contains_key(name) {
        return Err(file_err(lineno, format!("constant `{name}` defined twice")));
    }
    let e = parse_at(rhs.trim_end(), scope, lineno, col)?;
    if !e.is_constant() {
        return Err(file_err(lineno, "constant value may not depend on variables"));
    }
    let value = e.eval(&Env::<f64>::new(&[], 0.0))?;
    scope.constants.insert(name.to_string(), value);
    Ok(true)
}

/// Parses a surface file.
///
/// ```text
/// # comment
/// const R = 3
/// x = (R + cos(u)) * cos(v)
/// y = (R + cos(u)) * sin(v)
/// z = sin(u)
/// nx = ...            (optional; all three or none)
/// domain = 0 1 -1 1   (u_min u_max v_min v_max)
/// ```
pub fn parse_surface_file(text: &str) -> Result<SurfaceExpr> {
    let mut scope = Scope::surface();
    let mut slots: BTreeMap<&'static str, (usize, Expr)> = BTreeMap::new();
    let mut domain: Option<Domain> = None;
    const KEYS: [&str; 6] = ["x", "y", "z", "nx", "ny", "nz"];
    for (idx, full) in text.lines().enumerate() {
        let lineno = idx + 1;
        let raw = strip_comment(full);
        if raw.trim().is_empty() {
            continue;
        }
        if parse_const_line(raw, lineno, &mut scope)? {
            continue;
        }
        let (key, rhs, col) = split_assignment(raw).ok_or_else(|| file_err(lineno, "expected `key = value`"))?;
        if key == "domain" {
            if domain.is_some() {
                return Err(file_err(lineno, "domain given twice"));
            }
            let vals: Vec<f64> = rhs
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| file_err(lineno, "domain needs four numbers"))?;
            if vals.len() != 4 || vals.iter().any(|x| !x.is_finite()) || vals[0] >= vals[1] || vals[2] >= vals[3] {
                return Err(file_err(lineno, "domain needs four finite numbers u_min < u_max, v_min < v_max"));
            }
            domain = Some(Domain { u_min: vals[0], u_max: vals[1], v_min: vals[2], v_max: vals[3] });
            continue;
        }
        let Some(&slot) = KEYS.iter().find(|k| **k == key) else {
            return Err(file_err(lineno, format!("unknown key `{key}`")));
        };
        if slots.contains_key(slot) {
            return Err(file_err(lineno, format!("`{key}` given twice")));
        }
        let e = parse_at(rhs.trim_end(), &scope, lineno, col)?;
        slots.insert(slot, (lineno, e));
    }
    let mut take = |k: &str| slots.remove(k).map(|(_, e)| e);
    let (x, y, z) = (take("x"), take("y"), take("z"));
    let (nx, ny, nz) = (take("nx"), take("ny"), take("nz"));
    let components = match (x, y, z) {
        (Some(x), Some(y), Some(z)) => [x, y, z],
        _ => return Err(file_err(0, "surface needs all of x, y, z")),
    };
    let normal = match (nx, ny, nz) {
        (Some(a), Some(b), Some(c)) => Some([a, b, c]),
        (None, None, None) => None,
        _ => return Err(file_err(0, "normal needs all of nx, ny, nz or none")),
    };
    let s = SurfaceExpr { components, normal, constants: scope.constants, domain: domain.unwrap_or_default() };
    s.validate_normal(7)?;
    Ok(s)
}

/// A 6x6 matrix whose entries are expressions in one parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixFamily {
    pub parameter: String,
    pub entries: Vec<Vec<Expr>>,
}

impl MatrixFamily {
    pub fn eval(&self, t: f64) -> Result<[[f64; 6]; 6]> {
        let vars = [(self.parameter.as_str(), t)];
        let env = Env::new(&vars, 0.0);
        let mut m = [[0.0; 6]; 6];
        for (i, row) in self.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                m[i][j] = e.eval(&env)?;
            }
        }
        Ok(m)
    }
}

/// Parses a matrix family file:
///
/// ```text
/// family xi
/// const s = sqrt(2)
/// e11, e12, e13, e14, e15, e16
/// ... six rows in total
/// ```
pub fn parse_family_file(text: &str) -> Result<MatrixFamily> {
    let mut scope = Scope::default();
    let mut parameter: Option<String> = None;
    let mut rows: Vec<Vec<Expr>> = Vec::new();
    for (idx, full) in text.lines().enumerate() {
        let lineno = idx + 1;
        let raw = strip_comment(full);
        if raw.trim().is_empty() {
            continue;
        }
        if parameter.is_none() {
            let mut words = raw.split_whitespace();
            match (words.next(), words.next(), words.next()) {
                (Some("family"), Some(name), None) => {
                    scope.variables.push(name.to_string());
                    parameter = Some(name.to_string());
                    continue;
                }
                _ => return Err(file_err(lineno, "expected `family NAME` header")),
            }
        }
        if parse_const_line(raw, lineno, &mut scope)? {
            continue;
        }
        if rows.len() == 6 {
            return Err(file_err(lineno, "more than six rows"));
        }
        let mut row = Vec::with_capacity(6);
        let mut col0 = 0;
        for cell in raw.split(',') {
            let lead = cell.len() - cell.trim_start().len();
            let col = raw[..col0 + lead].chars().count();
            row.push(parse_at(cell.trim(), &scope, lineno, col)?);
            col0 += cell.len() + 1;
        }
        if row.len() != 6 {
            return Err(file_err(lineno, format!("expected 6 entries, found {}", row.len())));
        }
        rows.push(row);
    }
    let parameter = parameter.ok_or_else(|| file_err(0, "missing `family NAME` header"))?;
    if rows.len() != 6 {
        return Err(file_err(0, format!("expected 6 rows, found {}", rows.len())));
    }
    Ok(MatrixFamily { parameter, entries: rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    fn var(n: &str) -> Expr {
        Expr::Var(n.into())
    }

    #[test]
    fn parses_example_tree() {
        let e = parse("u^2 + sin(v)").unwrap();
        let want = Expr::Add(b(Expr::Pow(b(var("u")), b(Expr::Num(2.0)))), b(Expr::Call(Func::Sin, b(var("v")))));
        assert_eq!(e, want);
    }

    #[test]
    fn unclosed_paren_reports_column_two() {
        match parse("(u") {
            Err(Error::SyntaxError { pos, expected }) => {
                assert_eq!(pos, SourcePos { line: 1, column: 2 });
                assert_eq!(expected, vec![")".to_string()]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn evaluates_numbers() {
        let e = parse("u*v - 3").unwrap();
        let vars = [("u", 2.0), ("v", 1.0)];
        assert_eq!(e.eval(&Env::new(&vars, 0.0)).unwrap(), -1.0);
    }

    #[test]
    fn power_binds_tighter_than_minus() {
        let e = parse("-u^2").unwrap();
        assert_eq!(e, Expr::Neg(b(Expr::Pow(b(var("u")), b(Expr::Num(2.0))))));
        let e = parse("2^-1^2").unwrap();
        let vars: [(&str, f64); 0] = [];
        assert_eq!(e.eval(&Env::new(&vars, 0.0)).unwrap(), 0.5);
        let e = parse("u^-2*3").unwrap();
        let vars = [("u", 2.0), ("v", 0.0)];
        assert_eq!(e.eval(&Env::new(&vars, 0.0)).unwrap(), 0.75);
    }

    #[test]
    fn identifier_errors() {
        assert!(matches!(parse("abs(u)"), Err(Error::NonSmoothFunction { .. })));
        assert!(matches!(parse("w + 1"), Err(Error::UnknownIdentifier { .. })));
        assert!(matches!(parse("foo(u)"), Err(Error::UnknownIdentifier { .. })));
        assert!(matches!(parse("sin u"), Err(Error::SyntaxError { .. })));
        assert!(matches!(parse("u v"), Err(Error::SyntaxError { .. })));
        assert!(matches!(parse(""), Err(Error::SyntaxError { .. })));
        assert!(matches!(parse("u $ v"), Err(Error::SyntaxError { .. })));
    }

    #[test]
    fn jets_of_simple_surface() {
        let s = SurfaceExpr::from_strs(["u", "u^2", "v"], None).unwrap();
        let j = s.eval_jet(0.0, 0.0, 3).unwrap();
        assert_eq!(j.f[0], Jet2::var_u(0.0, 3));
        assert_eq!(j.f[1], &Jet2::var_u(0.0, 3) * &Jet2::var_u(0.0, 3));
        assert_eq!(j.f[2], Jet2::var_v(0.0, 3));
    }

    #[test]
    fn paraboloid_second_derivative() {
        let s = SurfaceExpr::from_strs(["u", "v", "(u^2+v^2)/2"], None).unwrap();
        let j = s.eval_jet(0.0, 0.0, 4).unwrap();
        assert_eq!(j.f[2].partial(2, 0), 1.0);
    }

    #[test]
    fn cuspidal_edge_derivatives() {
        let s = SurfaceExpr::from_strs(["u", "v^2", "v^3"], None).unwrap();
        let j = s.eval_jet(0.0, 0.0, 4).unwrap();
        let fv: Vec<Jet2> = j.f.iter().map(|c| c.dv().unwrap()).collect();
        assert!(fv.iter().all(|c| c.value() == 0.0));
        assert_eq!(fv[1].partial(0, 1), 2.0);
    }

    #[test]
    fn domain_error_on_bad_sqrt() {
        let s = SurfaceExpr::from_strs(["u", "v", "sqrt(u - 1)"], None).unwrap();
        assert!(matches!(s.eval_jet(0.0, 0.0, 3), Err(Error::EvaluationDomainError(_))));
    }

    #[test]
    fn surface_file_round() {
        let text = "# torus\nconst R = 3\nconst r = R - 2\nx = (R + r*cos(u)) * cos(v)\ny = (R + r*cos(u)) * sin(v)\nz = r*sin(u)\ndomain = 0 1 -0.5 0.5\n";
        let s = parse_surface_file(text).unwrap();
        assert_eq!(s.constants["r"], 1.0);
        assert_eq!(s.domain.u_max, 1.0);
        let p = s.eval_point(0.0, 0.0).unwrap();
        assert_eq!(p, [4.0, 0.0, 0.0]);
    }

    #[test]
    fn surface_file_errors() {
        let e = parse_surface_file("x = u\ny = v\nz = 0\nw = 1\n").unwrap_err();
        assert_eq!(e, Error::SurfaceFile { line: 4, message: "unknown key `w`".into() });
        let e = parse_surface_file("x = u\ny = (v\nz = 0\n").unwrap_err();
        assert_eq!(e, Error::SyntaxError { pos: SourcePos { line: 2, column: 6 }, expected: vec![")".into()] });
        assert!(parse_surface_file("x = u\ny = v\n").is_err());
        assert!(parse_surface_file("x = u\ny = v\nz = 0\nnx = 0\n").is_err());
        assert!(parse_surface_file("x = u\ny = v\nz = 0\ndomain = 1 0 0 1\n").is_err());
    }

    #[test]
    fn supplied_normal_is_validated() {
        let ok = "x = u\ny = v^2\nz = v^3\nnx = 0\nny = -3*v/sqrt(9*v^2+4)\nnz = 2/sqrt(9*v^2+4)\n";
        assert!(parse_surface_file(ok).is_ok());
        let bad = "x = u\ny = v^2\nz = v^3\nnx = 0\nny = 0\nnz = 1\n";
        assert!(matches!(parse_surface_file(bad), Err(Error::InvalidNormal { .. })));
    }

    #[test]
    fn family_file() {
        let mut text = String::from("family xi\nconst s = sqrt(2)\n");
        for i in 0..6 {
            let row: Vec<String> = (0..6).map(|j| if i == j { "1 + xi*s".to_string() } else { "0".into() }).collect();
            text.push_str(&row.join(", "));
            text.push('\n');
        }
        let fam = parse_family_file(&text).unwrap();
        let m = fam.eval(2f64.sqrt()).unwrap();
        assert!((m[3][3] - 3.0).abs() < 1e-15);
        assert!(parse_family_file("xi\n").is_err());
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![(0.0f64..3.0).prop_map(Expr::Num), Just(var("u")), Just(var("v")),];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, c)| Expr::Add(b(a), b(c))),
                (inner.clone(), inner.clone()).prop_map(|(a, c)| Expr::Sub(b(a), b(c))),
                (inner.clone(), inner.clone()).prop_map(|(a, c)| Expr::Mul(b(a), b(c))),
                inner.clone().prop_map(|a| Expr::Neg(b(a))),
                (inner.clone(), 0u8..4).prop_map(|(a, n)| Expr::Pow(b(a), b(Expr::Num(n as f64)))),
                inner.clone().prop_map(|a| Expr::Call(Func::Sin, b(a))),
                inner.clone().prop_map(|a| Expr::Call(Func::Cos, b(a))),
                // denominators and radicands bounded away from zero
                (inner.clone(), inner.clone()).prop_map(|(a, c)| Expr::Div(
                    b(a),
                    b(Expr::Add(b(Expr::Num(2.0)), b(Expr::Call(Func::Sin, b(c)))))
                )),
                inner.clone().prop_map(|a| Expr::Call(
                    Func::Sqrt,
                    b(Expr::Add(b(Expr::Num(1.0)), b(Expr::Pow(b(a), b(Expr::Num(2.0))))))
                )),
                inner.prop_map(|a| Expr::Call(Func::Exp, b(Expr::Call(Func::Sin, b(a))))),
            ]
        })
    }

    proptest! {
        #[test]
        fn pretty_print_round_trips(e in arb_expr()) {
            let text = e.to_string();
            let back = parse(&text).unwrap();
            prop_assert_eq!(&back, &e);
            prop_assert_eq!(parse(&back.to_string()).unwrap(), back);
        }

        #[test]
        fn truncation_commutes_with_evaluation(e in arb_expr(), u in -1.0f64..1.0, v in -1.0f64..1.0) {
            let vars6 = [("u", Jet2::var_u(u, 6)), ("v", Jet2::var_v(v, 6))];
            let vars5 = [("u", Jet2::var_u(u, 5)), ("v", Jet2::var_v(v, 5))];
            let a = e.eval(&Env::new(&vars6, Jet2::zero(6))).unwrap().truncate(5);
            let c = e.eval(&Env::new(&vars5, Jet2::zero(5))).unwrap();
            let scale = 1.0 + c.coeffs().iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for (x, y) in a.coeffs().iter().zip(c.coeffs()) {
                prop_assert!((x - y).abs() <= 1e-12 * scale);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn numeric_value_matches_jet_constant(e in arb_expr(), u in -2.0f64..2.0, v in -2.0f64..2.0) {
            let x = e.eval(&Env::new(&[("u", u), ("v", v)], 0.0)).unwrap();
            let vars = [("u", Jet2::var_u(u, 4)), ("v", Jet2::var_v(v, 4))];
            let j = e.eval(&Env::new(&vars, Jet2::zero(4))).unwrap();
            prop_assert!((x - j.value()).abs() <= 1e-12 * (1.0 + x.abs()));
        }
    }
}
