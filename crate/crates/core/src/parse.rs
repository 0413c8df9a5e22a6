//! Recursive-descent parsers for the text grammars: support sets, series,
//! differential polynomials, tropical differential polynomials, and
//! parametric solution families.
//!
//! Grammars (whitespace-insensitive):
//!
//! * support set: `{0,1,3}`, `{2,3,...6}` (tail `[6,∞)`), `{}`, `{...0}`
//! * series: `2 + 1/6*t^3`, optionally truncated: `1 - t^2 ; O(t^4)`
//! * differential polynomial: variables `x1`…`x9`, derivatives by primes
//!   (`x1''`) or caret (`x1^(4)`); `+ - *`, rationals, `t^k`, parentheses
//! * tropical polynomial: terms joined by `(+)`, factors by `(*)`:
//!   `1 (*) x1' (+) 2 (*) x1^(3) (+) 3`; `inf` is the empty polynomial
//! * family: like a series but coefficients may be free parameters
//!   (`c1 + c2*t + 1/6*t^3`); tuples are parenthesized and comma-separated

use std::fmt;

use num::{BigInt, BigRational, One, Zero};

use crate::diffpoly::{DiffPolynomial, ExponentMatrix};
use crate::semiring::TropValue;
use crate::series::{Precision, Rational, TruncatedSeries};
use crate::solver::family::{ParamPoly, SolutionFamily};
use crate::support::SupportSet;
use crate::tropical::{tropicalize, TropDiffPolynomial};

/// A syntax or validation error with source position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

/// What a piece of input text should parse as.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputKind {
    SupportSet,
    Series,
    DiffPoly,
    TropPoly,
    Family,
}

/// A parsed value of any supported kind.
#[derive(Clone, Debug)]
pub enum ParsedInput {
    Support(SupportSet),
    Series(TruncatedSeries),
    DiffPoly(DiffPolynomial),
    TropPoly(TropDiffPolynomial),
    Family(SolutionFamily),
}

/// Dispatching front end over the typed entry points.
pub fn parse(text: &str, kind: InputKind) -> Result<ParsedInput, ParseError> {
    Ok(match kind {
        InputKind::SupportSet => ParsedInput::Support(parse_support_set(text)?),
        InputKind::Series => ParsedInput::Series(parse_series(text)?),
        InputKind::DiffPoly => ParsedInput::DiffPoly(parse_diff_poly(text)?),
        InputKind::TropPoly => ParsedInput::TropPoly(parse_trop_poly(text)?),
        InputKind::Family => ParsedInput::Family(parse_family(text)?),
    })
}

// ---------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(String),
    Ident(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Prime,
    Ellipsis,
    TropPlus,
    TropStar,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(s) => format!("integer `{s}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Prime => "`'`".into(),
            Tok::Ellipsis => "`...`".into(),
            Tok::TropPlus => "`(+)`".into(),
            Tok::TropStar => "`(*)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: u32,
    col: u32,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let (mut line, mut col) = (1u32, 1u32);
    while i < chars.len() {
        let (l, c) = (line, col);
        let ch = chars[i];
        let peek2 = |a: char, b: char| i + 2 < chars.len() && chars[i + 1] == a && chars[i + 2] == b;
        let (tok, len) = match ch {
            _ if ch.is_whitespace() => (None, 1),
            '(' if peek2('+', ')') => (Some(Tok::TropPlus), 3),
            '(' if peek2('*', ')') => (Some(Tok::TropStar), 3),
            '(' => (Some(Tok::LParen), 1),
            ')' => (Some(Tok::RParen), 1),
            '{' => (Some(Tok::LBrace), 1),
            '}' => (Some(Tok::RBrace), 1),
            ',' => (Some(Tok::Comma), 1),
            ';' => (Some(Tok::Semi), 1),
            '+' => (Some(Tok::Plus), 1),
            '-' => (Some(Tok::Minus), 1),
            '*' => (Some(Tok::Star), 1),
            '/' => (Some(Tok::Slash), 1),
            '^' => (Some(Tok::Caret), 1),
            '\'' => (Some(Tok::Prime), 1),
            '.' if peek2('.', '.') => (Some(Tok::Ellipsis), 3),
            '∞' => (Some(Tok::Ident("inf".into())), 1),
            _ if ch.is_ascii_digit() => {
                let end = (i..chars.len())
                    .take_while(|&k| chars[k].is_ascii_digit())
                    .last()
                    .unwrap()
                    + 1;
                (Some(Tok::Int(chars[i..end].iter().collect())), end - i)
            }
            _ if ch.is_alphabetic() || ch == '_' => {
                let end = (i..chars.len())
                    .take_while(|&k| chars[k].is_alphanumeric() || chars[k] == '_')
                    .last()
                    .unwrap()
                    + 1;
                (Some(Tok::Ident(chars[i..end].iter().collect())), end - i)
            }
            _ => {
                return Err(ParseError {
                    line: l,
                    col: c,
                    message: format!("unexpected character `{ch}`"),
                })
            }
        };
        if let Some(tok) = tok {
            tokens.push(Token { tok, line: l, col: c });
        }
        for k in 0..len {
            if chars[i + k] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        i += len;
    }
    tokens.push(Token { tok: Tok::Eof, line, col });
    Ok(tokens)
}

// ---------------------------------------------------------------------
// Parser core
// ---------------------------------------------------------------------

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser { tokens: lex(text)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn here(&self) -> (u32, u32) {
        let t = &self.tokens[self.pos];
        (t.line, t.col)
    }

    fn bump(&mut self) -> Tok {
        let tok = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError { line, col, message: message.into() }
    }

    fn expected(&self, what: &str) -> ParseError {
        self.error(format!("expected {what}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.expected(what))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            Err(self.expected("end of input"))
        }
    }

    fn int_u64(&mut self, what: &str) -> Result<u64, ParseError> {
        match self.peek().clone() {
            Tok::Int(s) => {
                let v = s
                    .parse::<u64>()
                    .map_err(|_| self.error(format!("integer `{s}` is too large")))?;
                self.bump();
                Ok(v)
            }
            _ => Err(self.expected(what)),
        }
    }

    /// `p` or `p/q` (unsigned; signs are handled at the term level).
    fn rational(&mut self) -> Result<Rational, ParseError> {
        let numer = match self.peek().clone() {
            Tok::Int(s) => {
                self.bump();
                s.parse::<BigInt>().expect("digits parse as BigInt")
            }
            _ => return Err(self.expected("a number")),
        };
        if self.eat(&Tok::Slash) {
            let (line, col) = self.here();
            match self.peek().clone() {
                Tok::Int(s) => {
                    self.bump();
                    let denom = s.parse::<BigInt>().expect("digits parse as BigInt");
                    if denom.is_zero() {
                        return Err(ParseError { line, col, message: "denominator is zero".into() });
                    }
                    Ok(BigRational::new(numer, denom))
                }
                _ => Err(self.expected("a denominator")),
            }
        } else {
            Ok(Rational::from_integer(numer))
        }
    }

    /// `t` or `t^k`; the caller has seen the `t`.
    fn t_power(&mut self) -> Result<u64, ParseError> {
        if self.eat(&Tok::Caret) {
            self.int_u64("an exponent after `^`")
        } else {
            Ok(1)
        }
    }

    /// A variable `xI` with derivative suffix. The caller has matched the
    /// identifier.
    fn var_suffix(&mut self, name: &str) -> Result<(usize, u64), ParseError> {
        let idx: usize = name[1..]
            .parse()
            .ok()
            .filter(|&i| (1..=9).contains(&i))
            .ok_or_else(|| self.error(format!("`{name}` is not a variable; use x1…x9")))?;
        let mut deriv = 0u64;
        if self.peek() == &Tok::Prime {
            while self.eat(&Tok::Prime) {
                deriv += 1;
            }
        } else if self.eat(&Tok::Caret) {
            self.expect(Tok::LParen, "`(` after `^`")?;
            deriv = self.int_u64("a derivative order")?;
            self.expect(Tok::RParen, "`)`")?;
        }
        Ok((idx, deriv))
    }
}

fn is_var_name(name: &str) -> bool {
    name.len() >= 2
        && name.starts_with('x')
        && name[1..].chars().all(|c| c.is_ascii_digit())
}

// ---------------------------------------------------------------------
// Support sets
// ---------------------------------------------------------------------

pub fn parse_support_set(text: &str) -> Result<SupportSet, ParseError> {
    let mut p = Parser::new(text)?;
    let set = support_set(&mut p)?;
    p.expect_eof()?;
    Ok(set)
}

fn support_set(p: &mut Parser) -> Result<SupportSet, ParseError> {
    p.expect(Tok::LBrace, "`{`")?;
    let mut finite = Vec::new();
    let mut tail = None;
    if !p.eat(&Tok::RBrace) {
        loop {
            if p.eat(&Tok::Ellipsis) {
                tail = Some(p.int_u64("a tail start after `...`")?);
                break;
            }
            finite.push(p.int_u64("an element or `...`")?);
            if !p.eat(&Tok::Comma) {
                break;
            }
        }
        p.expect(Tok::RBrace, "`}`")?;
    }
    Ok(SupportSet::new(finite, tail))
}

/// A tuple of support sets: `({3},{0,2})`, or a bare set for one variable.
pub fn parse_support_tuple(text: &str) -> Result<Vec<SupportSet>, ParseError> {
    let mut p = Parser::new(text)?;
    let mut out = Vec::new();
    if p.eat(&Tok::LParen) {
        loop {
            out.push(support_set(&mut p)?);
            if !p.eat(&Tok::Comma) {
                break;
            }
        }
        p.expect(Tok::RParen, "`)`")?;
    } else {
        out.push(support_set(&mut p)?);
    }
    p.expect_eof()?;
    Ok(out)
}

// ---------------------------------------------------------------------
// Series
// ---------------------------------------------------------------------

pub fn parse_series(text: &str) -> Result<TruncatedSeries, ParseError> {
    let mut p = Parser::new(text)?;
    let terms = series_terms(&mut p)?;
    let precision = if p.eat(&Tok::Semi) {
        match p.bump() {
            Tok::Ident(s) if s == "O" => {}
            _ => return Err(p.error("expected `O(t^N)` after `;`")),
        }
        p.expect(Tok::LParen, "`(`")?;
        match p.bump() {
            Tok::Ident(s) if s == "t" => {}
            _ => return Err(p.error("expected `t` in `O(t^N)`")),
        }
        let n = p.t_power_suffix()?;
        p.expect(Tok::RParen, "`)`")?;
        Precision::Order(n)
    } else {
        Precision::Exact
    };
    p.expect_eof()?;
    Ok(TruncatedSeries::from_coeffs(terms, precision))
}

impl Parser {
    /// Exponent after `t` has been consumed inside `O(...)`.
    fn t_power_suffix(&mut self) -> Result<u64, ParseError> {
        if self.eat(&Tok::Caret) {
            self.int_u64("an exponent")
        } else {
            Ok(1)
        }
    }
}

/// Signed sum of series terms; each term is a product of rationals and
/// powers of `t`.
fn series_terms(p: &mut Parser) -> Result<Vec<(u64, Rational)>, ParseError> {
    let mut out = Vec::new();
    let mut negative = p.eat(&Tok::Minus);
    loop {
        let (k, c) = series_term(p)?;
        out.push((k, if negative { -c } else { c }));
        if p.eat(&Tok::Plus) {
            negative = false;
        } else if p.eat(&Tok::Minus) {
            negative = true;
        } else {
            break;
        }
    }
    Ok(out)
}

fn series_term(p: &mut Parser) -> Result<(u64, Rational), ParseError> {
    let mut coeff = Rational::one();
    let mut power = 0u64;
    loop {
        match p.peek().clone() {
            Tok::Int(_) => coeff *= p.rational()?,
            Tok::Ident(s) if s == "t" => {
                p.bump();
                power += p.t_power()?;
            }
            _ => return Err(p.expected("a number or a power of t")),
        }
        if !p.eat(&Tok::Star) {
            break;
        }
    }
    Ok((power, coeff))
}

// ---------------------------------------------------------------------
// Differential polynomials
// ---------------------------------------------------------------------

pub fn parse_diff_poly(text: &str) -> Result<DiffPolynomial, ParseError> {
    let mut p = Parser::new(text)?;
    let poly = diff_expr(&mut p)?;
    p.expect_eof()?;
    Ok(shrink_to_used_vars(poly))
}

/// Parsed with the full variable budget, then trimmed to the variables
/// actually used (a polynomial mentioning only `x2` still gets 2 slots).
const MAX_VARS: usize = 9;

fn shrink_to_used_vars(poly: DiffPolynomial) -> DiffPolynomial {
    let used = poly
        .terms()
        .flat_map(|(m, _)| m.entries().map(|(i, _, _)| i))
        .max()
        .unwrap_or(1);
    DiffPolynomial::from_terms(
        used,
        poly.terms().map(|(m, psi)| {
            (
                ExponentMatrix::from_entries(used, m.entries()),
                psi.clone(),
            )
        }),
    )
}

fn diff_expr(p: &mut Parser) -> Result<DiffPolynomial, ParseError> {
    let mut negative = p.eat(&Tok::Minus);
    let mut acc = DiffPolynomial::zero(MAX_VARS);
    loop {
        let term = diff_term(p)?;
        acc = if negative { acc.sub(&term) } else { acc.add(&term) };
        if p.eat(&Tok::Plus) {
            negative = false;
        } else if p.eat(&Tok::Minus) {
            negative = true;
        } else {
            break;
        }
    }
    Ok(acc)
}

fn diff_term(p: &mut Parser) -> Result<DiffPolynomial, ParseError> {
    let mut acc = DiffPolynomial::constant(MAX_VARS, TruncatedSeries::one());
    loop {
        let factor = diff_factor(p)?;
        acc = acc.mul(&factor);
        if !p.eat(&Tok::Star) {
            break;
        }
    }
    Ok(acc)
}

fn diff_factor(p: &mut Parser) -> Result<DiffPolynomial, ParseError> {
    match p.peek().clone() {
        Tok::Int(_) => {
            let c = p.rational()?;
            Ok(DiffPolynomial::constant(MAX_VARS, TruncatedSeries::constant(c)))
        }
        Tok::Ident(s) if s == "t" => {
            p.bump();
            let k = p.t_power()?;
            Ok(DiffPolynomial::constant(
                MAX_VARS,
                TruncatedSeries::monomial(Rational::one(), k),
            ))
        }
        Tok::Ident(s) if is_var_name(&s) => {
            p.bump();
            let (i, j) = p.var_suffix(&s)?;
            Ok(DiffPolynomial::variable(MAX_VARS, i, j))
        }
        Tok::LParen => {
            p.bump();
            let inner = diff_expr(p)?;
            p.expect(Tok::RParen, "`)`")?;
            Ok(inner)
        }
        _ => Err(p.expected("a number, `t`, a variable, or `(`")),
    }
}

// ---------------------------------------------------------------------
// Tropical polynomials
// ---------------------------------------------------------------------

pub fn parse_trop_poly(text: &str) -> Result<TropDiffPolynomial, ParseError> {
    let mut p = Parser::new(text)?;
    let mut terms: Vec<(TropValue, ExponentMatrix)> = Vec::new();
    loop {
        terms.push(trop_term(&mut p)?);
        if !p.eat(&Tok::TropPlus) {
            break;
        }
    }
    p.expect_eof()?;
    let used = terms
        .iter()
        .flat_map(|(_, m)| m.entries().map(|(i, _, _)| i))
        .max()
        .unwrap_or(1);
    Ok(TropDiffPolynomial::from_terms(
        used,
        terms
            .into_iter()
            .map(|(a, m)| (a, ExponentMatrix::from_entries(used, m.entries()))),
    ))
}

fn trop_term(p: &mut Parser) -> Result<(TropValue, ExponentMatrix), ParseError> {
    let mut coeff = TropValue::ONE;
    let mut entries: Vec<(usize, u64, u32)> = Vec::new();
    loop {
        match p.peek().clone() {
            Tok::Int(_) => {
                let v = p.int_u64("a tropical coefficient")?;
                coeff = coeff.mul(TropValue::Finite(v));
            }
            Tok::Ident(s) if s == "inf" => {
                p.bump();
                coeff = TropValue::Infinity;
            }
            Tok::Ident(s) if is_var_name(&s) => {
                p.bump();
                let (i, j) = p.var_suffix(&s)?;
                entries.push((i, j, 1));
            }
            _ => return Err(p.expected("a coefficient, `inf`, or a variable")),
        }
        if !p.eat(&Tok::TropStar) {
            break;
        }
    }
    Ok((coeff, ExponentMatrix::from_entries(MAX_VARS, entries)))
}

// ---------------------------------------------------------------------
// Solution families
// ---------------------------------------------------------------------

pub fn parse_family(text: &str) -> Result<SolutionFamily, ParseError> {
    let mut p = Parser::new(text)?;
    let mut params: Vec<String> = Vec::new();
    let mut components = Vec::new();
    if p.peek() == &Tok::LParen {
        p.bump();
        loop {
            components.push(family_component(&mut p, &mut params)?);
            if !p.eat(&Tok::Comma) {
                break;
            }
        }
        p.expect(Tok::RParen, "`)`")?;
    } else {
        components.push(family_component(&mut p, &mut params)?);
    }
    p.expect_eof()?;
    Ok(SolutionFamily::new(params, components))
}

type RawComponent = Vec<(u64, Rational, Vec<(usize, u32)>)>;

fn family_component(
    p: &mut Parser,
    params: &mut Vec<String>,
) -> Result<Vec<(u64, ParamPoly)>, ParseError> {
    let mut raw: RawComponent = Vec::new();
    let mut negative = p.eat(&Tok::Minus);
    loop {
        let (k, c, monom) = family_term(p, params)?;
        raw.push((k, if negative { -c } else { c }, monom));
        if p.eat(&Tok::Plus) {
            negative = false;
        } else if p.eat(&Tok::Minus) {
            negative = true;
        } else {
            break;
        }
    }
    // Group by exponent of t.
    let mut by_exp: std::collections::BTreeMap<u64, Vec<(Rational, Vec<(usize, u32)>)>> =
        std::collections::BTreeMap::new();
    for (k, c, monom) in raw {
        by_exp.entry(k).or_default().push((c, monom));
    }
    Ok(by_exp
        .into_iter()
        .map(|(k, terms)| (k, ParamPoly::from_terms(terms)))
        .collect())
}

fn family_term(
    p: &mut Parser,
    params: &mut Vec<String>,
) -> Result<(u64, Rational, Vec<(usize, u32)>), ParseError> {
    let mut coeff = Rational::one();
    let mut power = 0u64;
    let mut monom: Vec<(usize, u32)> = Vec::new();
    loop {
        match p.peek().clone() {
            Tok::Int(_) => coeff *= p.rational()?,
            Tok::Ident(s) if s == "t" => {
                p.bump();
                power += p.t_power()?;
            }
            Tok::Ident(s) if is_var_name(&s) => {
                return Err(p.error(format!(
                    "`{s}` looks like a differential variable; family parameters may not be named x<digits>"
                )));
            }
            Tok::Ident(s) if s == "inf" || s == "O" => {
                return Err(p.error(format!("`{s}` is reserved and cannot name a parameter")));
            }
            Tok::Ident(s) => {
                p.bump();
                let idx = match params.iter().position(|q| q == &s) {
                    Some(idx) => idx,
                    None => {
                        params.push(s);
                        params.len() - 1
                    }
                };
                match monom.iter_mut().find(|(i, _)| *i == idx) {
                    Some((_, e)) => *e += 1,
                    None => monom.push((idx, 1)),
                }
            }
            _ => return Err(p.expected("a number, a parameter, or a power of t")),
        }
        if !p.eat(&Tok::Star) {
            break;
        }
    }
    Ok((power, coeff, monom))
}

// ---------------------------------------------------------------------
// System elements for the solver CLI
// ---------------------------------------------------------------------

/// An element of a tropical system: either a tropical polynomial literal
/// or `trop(<differential polynomial>)`.
pub fn parse_system_element(text: &str) -> Result<TropDiffPolynomial, ParseError> {
    let trimmed = text.trim_start();
    if let Some(rest) = trimmed.strip_prefix("trop") {
        let rest_trimmed = rest.trim_start();
        if let Some(inner) = rest_trimmed.strip_prefix('(') {
            let inner = inner
                .trim_end()
                .strip_suffix(')')
                .ok_or_else(|| ParseError {
                    line: 1,
                    col: 1,
                    message: "unterminated `trop(...)`".into(),
                })?;
            let poly = parse_diff_poly(inner)?;
            return tropicalize(&poly).map_err(|e| ParseError {
                line: 1,
                col: 1,
                message: e.to_string(),
            });
        }
    }
    parse_trop_poly(text)
}
