//! Text syntax for series and Laurent polynomials.
//!
//! ```text
//! expr     := ['+'|'-'] term (('+'|'-') term)*
//! term     := power (('*'|'/') power)*
//! power    := atom ['^' exponent]
//! atom     := integer | 't' | variable | '(' expr ')' | 'O(' t-power ')'
//! exponent := ['-'] integer | '(' ['-'] integer ['/' integer] ')'
//! ```
//!
//! `t` is the series parameter and may carry rational exponents; any other identifier is a
//! polynomial variable with integer exponents. Division is only by nonzero monomials.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::puiseux::PuiseuxSeries;
use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at position {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

fn err<T>(pos: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { pos, message: message.into() })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, ch) = chars[i];
        match ch {
            c if c.is_whitespace() => {
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().map(|(_, c)| c).collect();
                out.push((pos, Tok::Int(text.parse().expect("digits"))));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().map(|(_, c)| c).collect();
                out.push((pos, Tok::Ident(text)));
            }
            '+' => {
                out.push((pos, Tok::Plus));
                i += 1;
            }
            '-' => {
                out.push((pos, Tok::Minus));
                i += 1;
            }
            '*' => {
                out.push((pos, Tok::Star));
                i += 1;
            }
            '/' => {
                out.push((pos, Tok::Slash));
                i += 1;
            }
            '^' => {
                out.push((pos, Tok::Caret));
                i += 1;
            }
            '(' => {
                out.push((pos, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((pos, Tok::RParen));
                i += 1;
            }
            other => return err(pos, format!("unexpected character '{other}'")),
        }
    }
    Ok(out)
}

/// Terms of a Laurent polynomial in a fixed, ordered list of variables.
pub(crate) type Terms = BTreeMap<Vec<i64>, PuiseuxSeries>;

#[derive(Debug, Clone)]
struct Value {
    terms: Terms,
}

impl Value {
    fn constant(s: PuiseuxSeries, n: usize) -> Self {
        let mut terms = Terms::new();
        if !s.is_exact_zero() {
            terms.insert(vec![0; n], s);
        }
        Value { terms }
    }

    fn var(idx: usize, n: usize) -> Self {
        let mut e = vec![0; n];
        e[idx] = 1;
        let mut terms = Terms::new();
        terms.insert(e, PuiseuxSeries::one());
        Value { terms }
    }

    fn add(&self, other: &Value) -> Value {
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let sum = match terms.get(e) {
                Some(prev) => prev + c,
                None => c.clone(),
            };
            if sum.is_exact_zero() {
                terms.remove(e);
            } else {
                terms.insert(e.clone(), sum);
            }
        }
        Value { terms }
    }

    fn neg(&self) -> Value {
        Value { terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    fn mul(&self, other: &Value) -> Value {
        let mut acc = Value { terms: Terms::new() };
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let mut single = Terms::new();
                single.insert(e, c1 * c2);
                acc = acc.add(&Value { terms: single });
            }
        }
        acc
    }

    /// `Some((exponents, coefficient, t-exponent))` when this is `c·t^r·x^e` with exact coefficient.
    fn as_monomial(&self) -> Option<(Vec<i64>, Q, Q)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, s) = self.terms.iter().next().unwrap();
        if !s.is_exact() || s.num_terms() != 1 {
            return None;
        }
        let (te, c) = s.leading_term().unwrap();
        Some((e.clone(), c.clone(), te.clone()))
    }
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    i: usize,
    end: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).map(|(_, t)| t.clone());
        self.i += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => err(pos, format!("expected {what}")),
        }
    }

    fn n(&self) -> usize {
        self.vars.len()
    }

    fn expr(&mut self) -> Result<Value, ParseError> {
        let mut negate = false;
        match self.peek() {
            Some(Tok::Plus) => {
                self.bump();
            }
            Some(Tok::Minus) => {
                self.bump();
                negate = true;
            }
            _ => {}
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = acc.add(&t.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Value, ParseError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let p = self.power()?;
                    acc = acc.mul(&p);
                }
                Some(Tok::Slash) => {
                    let pos = self.pos();
                    self.bump();
                    let p = self.power()?;
                    let inv = invert_monomial(&p, self.n())
                        .ok_or(ParseError { pos, message: "division by a non-monomial or zero".into() })?;
                    acc = acc.mul(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Value, ParseError> {
        let atom_pos = self.pos();
        let (base, is_t) = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        let caret_pos = self.pos();
        self.bump();
        let exp = self.exponent()?;
        if is_t {
            return Ok(Value::constant(PuiseuxSeries::monomial(Q::one(), exp), self.n()));
        }
        if !exp.is_integer() {
            return err(caret_pos, "rational exponents are only allowed on t");
        }
        let k = exp.to_integer().to_i64().ok_or(ParseError { pos: caret_pos, message: "exponent too large".into() })?;
        if k >= 0 {
            let mut acc = Value::constant(PuiseuxSeries::one(), self.n());
            for _ in 0..k {
                acc = acc.mul(&base);
            }
            Ok(acc)
        } else {
            let inv = invert_monomial(&base, self.n())
                .ok_or(ParseError { pos: atom_pos, message: "negative power of a non-monomial".into() })?;
            let mut acc = Value::constant(PuiseuxSeries::one(), self.n());
            for _ in 0..(-k) {
                acc = acc.mul(&inv);
            }
            Ok(acc)
        }
    }

    fn signed_int(&mut self) -> Result<BigInt, ParseError> {
        let pos = self.pos();
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            Some(Tok::Int(v)) => Ok(if neg { -v } else { v }),
            _ => err(pos, "expected an integer"),
        }
    }

    fn exponent(&mut self) -> Result<Q, ParseError> {
        if self.peek() == Some(&Tok::LParen) {
            self.bump();
            let n = self.signed_int()?;
            let mut d = BigInt::one();
            if self.peek() == Some(&Tok::Slash) {
                self.bump();
                let pos = self.pos();
                match self.bump() {
                    Some(Tok::Int(v)) if !v.is_zero() => d = v,
                    _ => return err(pos, "expected a nonzero denominator"),
                }
            }
            self.expect(Tok::RParen, "')'")?;
            Ok(Q::new(n, d))
        } else {
            Ok(Q::from_integer(self.signed_int()?))
        }
    }

    fn atom(&mut self) -> Result<(Value, bool), ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Int(v)) => Ok((Value::constant(PuiseuxSeries::constant(Q::from_integer(v)), self.n()), false)),
            Some(Tok::LParen) => {
                let v = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok((v, false))
            }
            Some(Tok::Ident(name)) if name == "t" => Ok((Value::constant(PuiseuxSeries::t(), self.n()), true)),
            Some(Tok::Ident(name)) if name == "O" => {
                self.expect(Tok::LParen, "'(' after O")?;
                let tpos = self.pos();
                match self.bump() {
                    Some(Tok::Ident(t)) if t == "t" => {}
                    _ => return err(tpos, "expected t inside O(...)"),
                }
                let n = if self.peek() == Some(&Tok::Caret) {
                    self.bump();
                    self.exponent()?
                } else {
                    Q::one()
                };
                self.expect(Tok::RParen, "')'")?;
                let mut terms = Terms::new();
                terms.insert(vec![0; self.n()], PuiseuxSeries::unknown(n));
                Ok((Value { terms }, false))
            }
            Some(Tok::Ident(name)) => {
                let idx = self.vars.iter().position(|v| *v == name).expect("variables collected up front");
                Ok((Value::var(idx, self.n()), false))
            }
            Some(_) => err(pos, "expected a number, t, a variable or '('"),
            None => err(pos, "unexpected end of input"),
        }
    }
}

fn invert_monomial(v: &Value, n: usize) -> Option<Value> {
    let (e, c, te) = v.as_monomial()?;
    if c.is_zero() {
        return None;
    }
    let mut terms = Terms::new();
    terms.insert(e.iter().map(|x| -x).collect(), PuiseuxSeries::monomial(c.recip(), -te));
    debug_assert_eq!(e.len(), n);
    Some(Value { terms })
}

fn collect_vars(toks: &[(usize, Tok)]) -> Vec<String> {
    let set: BTreeSet<String> = toks
        .iter()
        .filter_map(|(_, t)| match t {
            Tok::Ident(name) if name != "t" && name != "O" => Some(name.clone()),
            _ => None,
        })
        .collect();
    set.into_iter().collect()
}

/// Parses a Laurent polynomial; variables are sorted by name.
pub(crate) fn parse_polynomial(src: &str) -> Result<(Vec<String>, Terms), ParseError> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return err(0, "empty input");
    }
    let vars = collect_vars(&toks);
    let mut p = Parser { toks: &toks, i: 0, end: src.len(), vars: &vars };
    let v = p.expr()?;
    if p.i < toks.len() {
        return err(p.pos(), "unexpected trailing input");
    }
    Ok((vars, v.terms))
}

/// Parses a Puiseux series literal such as `1 - 2*t^(1/2) + t^3 + O(t^5)`.
pub fn parse_series(src: &str) -> Result<PuiseuxSeries, ParseError> {
    let toks = tokenize(src)?;
    if let Some((pos, Tok::Ident(name))) = toks.iter().find(|(_, t)| matches!(t, Tok::Ident(n) if n != "t" && n != "O"))
    {
        return err(*pos, format!("unexpected variable '{name}' in a series literal"));
    }
    let (_, terms) = parse_polynomial(src)?;
    Ok(terms.into_iter().next().map(|(_, s)| s).unwrap_or_else(PuiseuxSeries::zero))
}

/// Splits `[a, b, c]` at top-level commas, reporting byte offsets of each piece.
pub fn split_bracket_list(src: &str) -> Result<Vec<(usize, &str)>, ParseError> {
    let trimmed_start = src.len() - src.trim_start().len();
    let body = src.trim();
    if !body.starts_with('[') {
        return err(trimmed_start, "expected '['");
    }
    if !body.ends_with(']') {
        return err(trimmed_start + body.len(), "expected ']'");
    }
    let inner_start = trimmed_start + 1;
    let inner = &body[1..body.len() - 1];
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut last = 0;
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push((inner_start + last, &inner[last..i]));
                last = i + 1;
            }
            _ => {}
        }
    }
    parts.push((inner_start + last, &inner[last..]));
    Ok(parts)
}

/// Re-bases a parse error found inside a sub-slice starting at `offset`.
pub fn offset_error(e: ParseError, offset: usize) -> ParseError {
    ParseError { pos: e.pos + offset, message: e.message }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    #[test]
    fn series_literals() {
        let s = parse_series("1 - 2*t^(1/2) + t^3").unwrap();
        assert_eq!(s.coefficient(&frac(1, 2)), q(-2));
        assert_eq!(s.coefficient(&q(3)), q(1));
        let s = parse_series("t^-3 + 1/2*t + t/4").unwrap();
        assert_eq!(s.coefficient(&q(-3)), q(1));
        assert_eq!(s.coefficient(&q(1)), frac(3, 4));
        let s = parse_series("(1 + t)^2 + O(t^2)").unwrap();
        assert_eq!(s.to_string(), "1 + 2*t + O(t^2)");
    }

    #[test]
    fn series_rejects_variables() {
        let e = parse_series("1 + x").unwrap_err();
        assert_eq!(e.pos, 4);
    }

    #[test]
    fn polynomial_literals() {
        let (vars, terms) = parse_polynomial("x^2*y + x*y + x*y^2 + t^3").unwrap();
        assert_eq!(vars, vec!["x", "y"]);
        assert_eq!(terms.len(), 4);
        assert_eq!(terms[&vec![0, 0]], parse_series("t^3").unwrap());
        let (_, terms) = parse_polynomial("x^3 + (x - t)^2").unwrap();
        assert_eq!(terms[&vec![1]], parse_series("-2*t").unwrap());
        let (_, terms) = parse_polynomial("t^-3*x + t^-2*y - 1").unwrap();
        assert_eq!(terms[&vec![1, 0]], parse_series("t^-3").unwrap());
        let (_, terms) = parse_polynomial("x^-1 + y").unwrap();
        assert!(terms.contains_key(&vec![-1, 0]));
    }

    #[test]
    fn error_positions() {
        assert_eq!(parse_polynomial("x + * y").unwrap_err().pos, 4);
        assert_eq!(parse_polynomial("x^(1/2)").unwrap_err().pos, 1);
        assert_eq!(parse_polynomial("(x + 1").unwrap_err().pos, 6);
        assert_eq!(parse_polynomial("x $ y").unwrap_err().pos, 2);
        assert!(parse_polynomial("x / (1 + t)").is_err());
    }

    #[test]
    fn bracket_lists() {
        let parts = split_bracket_list("[0, 1,(a,b) ,t^2]").unwrap();
        assert_eq!(parts.len(), 4);
        assert_eq!(parts[2], (6, "(a,b) "));
    }
}
