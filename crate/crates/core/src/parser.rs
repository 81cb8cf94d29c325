//! Text syntax for Laurent polynomials.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := ('-' | '+') factor | base ('^' int)?
//! base     := var | literal | '(' expr ')'
//! literal  := rational | rational '*'? 'i' | 'i'
//! rational := int ('/' int)?
//! ```
//!
//! `i` is reserved for the imaginary unit and juxtaposition is not
//! multiplication (`zw` is a single, probably unknown, identifier).
//! Exponents may be negative (`z^-1` or `z^(-1)`); a negative power is only
//! accepted for monomials, which are the units of the Laurent ring.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gaussian::GaussianRational;
use crate::laurent::{Exponents, LaurentPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    /// Character offset into the source text.
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    UnexpectedChar(char),
    UnexpectedToken { expected: &'static str, found: String },
    UnknownVariable(String),
    ZeroDenominator,
    /// Literal cannot be represented as a Gaussian rational (e.g. `1.5`).
    InvalidLiteral(String),
    NegativePowerOfNonMonomial,
    ExponentTooLarge,
    InvalidVariableList(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Empty => write!(f, "empty expression"),
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            ParseErrorKind::UnexpectedToken { expected, found } => {
                write!(f, "expected {expected}, found {found}")
            }
            ParseErrorKind::UnknownVariable(v) => write!(f, "unknown variable `{v}`"),
            ParseErrorKind::ZeroDenominator => write!(f, "zero denominator"),
            ParseErrorKind::InvalidLiteral(s) => {
                write!(f, "literal `{s}` is not a Gaussian rational")
            }
            ParseErrorKind::NegativePowerOfNonMonomial => {
                write!(f, "negative powers are only defined for monomials")
            }
            ParseErrorKind::ExponentTooLarge => write!(f, "exponent out of range"),
            ParseErrorKind::InvalidVariableList(s) => write!(f, "invalid variable list: {s}"),
        }
    }
}

/// Source text plus the ordered variable names it is read against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExprSource {
    pub text: String,
    pub variables: Vec<String>,
}

impl ExprSource {
    pub fn new(text: impl Into<String>, variables: &[&str]) -> Result<Self, ParseError> {
        let variables: Vec<String> = variables.iter().map(|s| s.to_string()).collect();
        validate_variables(&variables)?;
        Ok(Self { text: text.into(), variables })
    }
}

/// A quotient `numerator / denominator` of Laurent polynomials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalExpr {
    pub numerator: LaurentPoly,
    pub denominator: LaurentPoly,
}

impl RationalExpr {
    pub fn new(numerator: LaurentPoly, denominator: LaurentPoly) -> Option<Self> {
        if denominator.is_zero() || numerator.nvars() != denominator.nvars() {
            return None;
        }
        Some(Self { numerator, denominator })
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn validate_variables(vars: &[String]) -> Result<(), ParseError> {
    let bad = |msg: String| ParseError { position: 0, kind: ParseErrorKind::InvalidVariableList(msg) };
    if vars.is_empty() {
        return Err(bad("no variables".into()));
    }
    for (k, v) in vars.iter().enumerate() {
        let mut chars = v.chars();
        let ok = chars.next().is_some_and(is_ident_start) && chars.all(is_ident_char);
        if !ok || v == "i" {
            return Err(bad(format!("`{v}` is not a valid variable name")));
        }
        if vars[..k].contains(v) {
            return Err(bad(format!("`{v}` listed twice")));
        }
    }
    Ok(())
}

/// `z`, `z, w`, otherwise `z1..zn`.
pub fn default_variable_names(n: usize) -> Vec<String> {
    match n {
        1 => vec!["z".into()],
        2 => vec!["z".into(), "w".into()],
        _ => (1..=n).map(|k| format!("z{k}")).collect(),
    }
}

/// Identifiers occurring in `texts`, excluding `i`, sorted so that `z`
/// precedes `w` and numbered names sort numerically (`z2 < z10`).
pub fn collect_identifiers<'a>(texts: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for text in texts {
        let chars: Vec<char> = text.chars().collect();
        let mut k = 0;
        while k < chars.len() {
            if is_ident_start(chars[k]) {
                let start = k;
                while k < chars.len() && is_ident_char(chars[k]) {
                    k += 1;
                }
                let id: String = chars[start..k].iter().collect();
                if id != "i" && !out.contains(&id) {
                    out.push(id);
                }
            } else if chars[k].is_ascii_digit() {
                // skip numbers so `3i` does not yield an identifier
                while k < chars.len() && is_ident_char(chars[k]) {
                    k += 1;
                }
            } else {
                k += 1;
            }
        }
    }
    out.sort_by(|a, b| natural_key(a).cmp(&natural_key(b)));
    out
}

fn natural_key(s: &str) -> (u8, String, u64) {
    let split = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
    let (stem, digits) = s.split_at(split);
    let rank = match stem {
        "z" => 0,
        "w" => 1,
        _ => 2,
    };
    (rank, stem.to_string(), digits.parse().unwrap_or(0))
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    /// An integer immediately followed by `i`, e.g. `3i`.
    ImagInt(BigInt),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(v) => format!("number `{v}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::ImagInt(v) => format!("literal `{v}i`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let start = k;
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            d if d.is_ascii_digit() => {
                while k < chars.len() && chars[k].is_ascii_digit() {
                    k += 1;
                }
                let digits: String = chars[start..k].iter().collect();
                if k < chars.len() && (chars[k] == '.' || chars[k] == 'e' || chars[k] == 'E') {
                    let mut j = k + 1;
                    while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '.') {
                        j += 1;
                    }
                    let lit: String = chars[start..j].iter().collect();
                    return Err(ParseError { position: start, kind: ParseErrorKind::InvalidLiteral(lit) });
                }
                let value: BigInt = digits.parse().expect("digits");
                if k < chars.len() && chars[k] == 'i' && !(k + 1 < chars.len() && is_ident_char(chars[k + 1])) {
                    k += 1;
                    out.push((Tok::ImagInt(value), start));
                    continue;
                }
                if k < chars.len() && is_ident_start(chars[k]) {
                    return Err(ParseError {
                        position: k,
                        kind: ParseErrorKind::UnexpectedToken {
                            expected: "`*` (implicit multiplication is not supported)",
                            found: format!("`{}`", chars[k]),
                        },
                    });
                }
                out.push((Tok::Int(value), start));
                continue;
            }
            a if is_ident_start(a) => {
                while k < chars.len() && is_ident_char(chars[k]) {
                    k += 1;
                }
                out.push((Tok::Ident(chars[start..k].iter().collect()), start));
                continue;
            }
            other => return Err(ParseError { position: start, kind: ParseErrorKind::UnexpectedChar(other) }),
        };
        out.push((tok, start));
        k += 1;
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { position: self.offset(), kind }
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        self.err(ParseErrorKind::UnexpectedToken { expected, found: self.peek().describe() })
    }

    fn n(&self) -> usize {
        self.vars.len()
    }

    fn expr(&mut self) -> Result<LaurentPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<LaurentPoly, ParseError> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<LaurentPoly, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                return Ok(-&self.factor()?);
            }
            Tok::Plus => {
                self.bump();
                return self.factor();
            }
            _ => {}
        }
        let base_pos = self.offset();
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let exp = self.exponent()?;
        if exp >= 0 {
            if exp > 10_000 {
                return Err(ParseError { position: base_pos, kind: ParseErrorKind::ExponentTooLarge });
            }
            return Ok(base.pow(exp as u32));
        }
        let inv = base.inverse_monomial().ok_or(ParseError {
            position: base_pos,
            kind: ParseErrorKind::NegativePowerOfNonMonomial,
        })?;
        if -exp > 10_000 {
            return Err(ParseError { position: base_pos, kind: ParseErrorKind::ExponentTooLarge });
        }
        Ok(inv.pow((-exp) as u32))
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        let paren = *self.peek() == Tok::LParen;
        if paren {
            self.bump();
        }
        let neg = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        let v = match self.peek().clone() {
            Tok::Int(v) => {
                let at = self.offset();
                self.bump();
                v.to_i64().ok_or(ParseError { position: at, kind: ParseErrorKind::ExponentTooLarge })?
            }
            _ => return Err(self.unexpected("integer exponent")),
        };
        if paren {
            if *self.peek() != Tok::RParen {
                return Err(self.unexpected("`)`"));
            }
            self.bump();
        }
        Ok(if neg { -v } else { v })
    }

    fn base(&mut self) -> Result<LaurentPoly, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`)` or operator"));
                }
                self.bump();
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if name == "i" {
                    return Ok(LaurentPoly::constant(self.n(), GaussianRational::i()));
                }
                match self.vars.iter().position(|v| *v == name) {
                    Some(k) => Ok(LaurentPoly::var(self.n(), k)),
                    None => Err(ParseError { position: at, kind: ParseErrorKind::UnknownVariable(name) }),
                }
            }
            Tok::ImagInt(v) => {
                self.bump();
                Ok(LaurentPoly::constant(
                    self.n(),
                    GaussianRational::new(BigRational::zero(), BigRational::from_integer(v)),
                ))
            }
            Tok::Int(num) => {
                self.bump();
                let mut value = BigRational::from_integer(num);
                if *self.peek() == Tok::Slash {
                    self.bump();
                    let dpos = self.offset();
                    let (den, imag) = match self.peek().clone() {
                        Tok::Int(d) => (d, false),
                        Tok::ImagInt(d) => (d, true),
                        _ => return Err(self.unexpected("integer denominator")),
                    };
                    self.bump();
                    if den.is_zero() {
                        return Err(ParseError { position: dpos, kind: ParseErrorKind::ZeroDenominator });
                    }
                    value /= BigRational::from_integer(den);
                    if imag {
                        // `1/2i` reads as (1/2) i, matching `rational 'i'`
                        return Ok(LaurentPoly::constant(
                            self.n(),
                            GaussianRational::new(BigRational::zero(), value),
                        ));
                    }
                }
                Ok(LaurentPoly::constant(self.n(), GaussianRational::real(value)))
            }
            Tok::End => Err(self.err(ParseErrorKind::Empty).with_found_end(self)),
            _ => Err(self.unexpected("variable, number or `(`")),
        }
    }
}

impl ParseError {
    fn with_found_end(self, p: &Parser<'_>) -> Self {
        if p.pos == 0 {
            self
        } else {
            ParseError {
                position: self.position,
                kind: ParseErrorKind::UnexpectedToken {
                    expected: "variable, number or `(`",
                    found: "end of input".into(),
                },
            }
        }
    }
}

/// Parses `src.text` into an exact Laurent polynomial in `src.variables`.
pub fn parse_poly(src: &ExprSource) -> Result<LaurentPoly, ParseError> {
    validate_variables(&src.variables)?;
    let toks = lex(&src.text)?;
    let mut p = Parser { toks, pos: 0, vars: &src.variables };
    if *p.peek() == Tok::End {
        return Err(p.err(ParseErrorKind::Empty));
    }
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("operator or end of input"));
    }
    Ok(e)
}

/// Shorthand for [`parse_poly`] with borrowed names.
pub fn parse_with(text: &str, variables: &[&str]) -> Result<LaurentPoly, ParseError> {
    parse_poly(&ExprSource::new(text, variables)?)
}

/// Prints with the default variable names (`z`, `w`, or `z1..zn`).
pub fn format_poly(p: &LaurentPoly) -> String {
    format_poly_with(p, &default_variable_names(p.nvars()))
}

/// Deterministic text in descending graded-lex order, e.g. `z^2*w - 1`.
pub fn format_poly_with(p: &LaurentPoly, names: &[String]) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (e, c)) in p.terms().rev().enumerate() {
        let negative = c.re.is_negative() || (c.re.is_zero() && c.im.is_negative());
        let shown = if negative { -c } else { c.clone() };
        match (k, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let mono = format_monomial(e, names);
        if mono.is_empty() {
            out.push_str(&shown.to_expr_string());
        } else if shown.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&shown.to_expr_string());
            out.push('*');
            out.push_str(&mono);
        }
    }
    out
}

fn format_monomial(e: &Exponents, names: &[String]) -> String {
    e.0.iter()
        .zip(names)
        .filter(|(p, _)| **p != 0)
        .map(|(&p, name)| if p == 1 { name.clone() } else { format!("{name}^{p}") })
        .collect::<Vec<_>>()
        .join("*")
}

/// `(numerator)/(denominator)` in the syntax the CLI accepts.
pub fn format_rational_with(r: &RationalExpr, names: &[String]) -> String {
    format!(
        "({})/({})",
        format_poly_with(&r.numerator, names),
        format_poly_with(&r.denominator, names)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::arb_laurent;
    use proptest::prelude::*;

    fn zw(text: &str) -> Result<LaurentPoly, ParseError> {
        parse_with(text, &["z", "w"])
    }

    #[test]
    fn parses_intro_curve() {
        let p = zw("z^2*w - 1").unwrap();
        assert_eq!(p, LaurentPoly::from_int_terms(2, &[(&[2, 1], 1, 0), (&[0, 0], -1, 0)]));
    }

    #[test]
    fn parses_gaussian_literals() {
        let p = zw("2*z^2*w^3 + 3*i*z*w^2 - (6/5 + 23/5*i)").unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(
            p.coefficient(&Exponents(vec![0, 0])),
            Some(&GaussianRational::from_fractions(-6, 5, -23, 5))
        );
        assert_eq!(p.coefficient(&Exponents(vec![1, 2])), Some(&GaussianRational::from_ints(0, 3)));
        assert_eq!(zw("3i*z").unwrap(), zw("3*i*z").unwrap());
        assert_eq!(zw("2/3i").unwrap(), zw("2/3*i").unwrap());
    }

    #[test]
    fn parses_negative_exponents() {
        let p = zw("z^-1 + w^-1 - 2").unwrap();
        assert_eq!(
            p,
            LaurentPoly::from_int_terms(2, &[(&[-1, 0], 1, 0), (&[0, -1], 1, 0), (&[0, 0], -2, 0)])
        );
        assert_eq!(zw("z^(-2)").unwrap(), zw("(z^2)^-1").unwrap());
        assert_eq!(zw("(2*z*w)^-1").unwrap().coefficient(&Exponents(vec![-1, -1])),
            Some(&GaussianRational::from_fractions(1, 2, 0, 1)));
    }

    #[test]
    fn unary_minus_and_precedence() {
        assert_eq!(zw("-z^2").unwrap(), -&zw("z^2").unwrap());
        assert_eq!(zw("2*-z").unwrap(), zw("-2*z").unwrap());
        assert_eq!(zw("(z+1)^2").unwrap(), zw("z^2 + 2*z + 1").unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(zw("").unwrap_err().kind, ParseErrorKind::Empty);
        let e = zw("z + q").unwrap_err();
        assert_eq!(e.position, 4);
        assert_eq!(e.kind, ParseErrorKind::UnknownVariable("q".into()));
        assert!(matches!(zw("zw").unwrap_err().kind, ParseErrorKind::UnknownVariable(_)));
        let e = zw("2z").unwrap_err();
        assert_eq!(e.position, 1);
        assert!(matches!(zw("1.5*z").unwrap_err().kind, ParseErrorKind::InvalidLiteral(_)));
        assert_eq!(zw("1/0").unwrap_err().kind, ParseErrorKind::ZeroDenominator);
        assert_eq!(zw("(z+1)^-1").unwrap_err().kind, ParseErrorKind::NegativePowerOfNonMonomial);
        let e = zw("z + ").unwrap_err();
        assert_eq!(e.position, 4);
        assert!(matches!(zw("(z").unwrap_err().kind, ParseErrorKind::UnexpectedToken { .. }));
        assert!(matches!(zw("z $ w").unwrap_err().kind, ParseErrorKind::UnexpectedChar('$')));
        assert!(matches!(zw("z/w").unwrap_err().kind, ParseErrorKind::UnexpectedToken { .. }));
    }

    #[test]
    fn rejects_bad_variable_lists() {
        assert!(ExprSource::new("z", &["z", "z"]).is_err());
        assert!(ExprSource::new("z", &["i"]).is_err());
        assert!(ExprSource::new("z", &["1z"]).is_err());
    }

    #[test]
    fn format_examples() {
        assert_eq!(format_poly(&LaurentPoly::zero(2)), "0");
        assert_eq!(format_poly(&zw("z^2*w - 1").unwrap()), "z^2*w - 1");
        assert_eq!(format_poly(&zw("1 - i*z").unwrap()), "-i*z + 1");
        assert_eq!(format_poly(&zw("z - i*w").unwrap()), "z - i*w");
        assert_eq!(
            format_poly(&zw("2*z^2*w^3 + 3*i*z*w^2 - (6/5 + 23/5*i)").unwrap()),
            "2*z^2*w^3 + 3*i*z*w^2 - (6/5 + 23/5*i)"
        );
        assert_eq!(format_poly(&zw("z^-1 + w^-1 - 2").unwrap()), "-2 + w^-1 + z^-1");
    }

    #[test]
    fn identifier_collection_orders_naturally() {
        assert_eq!(collect_identifiers(["w + z - 2"]), vec!["z", "w"]);
        assert_eq!(collect_identifiers(["z10*z2 + z1 + 3i"]), vec!["z1", "z2", "z10"]);
        assert_eq!(collect_identifiers(["(z-2)", "(1-2*z)"]), vec!["z"]);
    }

    proptest! {
        #[test]
        fn format_then_parse_is_identity(p in arb_laurent(3, 6, 4)) {
            let names = default_variable_names(3);
            let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            let text = format_poly_with(&p, &names);
            let back = parse_with(&text, &refs).unwrap();
            prop_assert_eq!(&back, &p);
            prop_assert_eq!(format_poly_with(&back, &names), text);
        }

        #[test]
        fn parser_never_panics(s in "[zw0-9i+*/^() -]{0,24}") {
            match zw(&s) {
                Ok(_) => {}
                Err(e) => prop_assert!(e.position <= s.chars().count()),
            }
        }
    }
}
