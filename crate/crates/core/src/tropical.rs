//! The min-plus semiring, tropical Laurent polynomials and tropicalization.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde_json::json;
use thiserror::Error;

use crate::literal::{self, ParseError};
use crate::newton::UnivariatePolynomial;
use crate::puiseux::{PuiseuxSeries, SeriesError, Valuation};
use crate::rational::{fmt_q, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TropicalError {
    #[error("tropical polynomial has no terms")]
    Empty,
    #[error("variable lists differ: {0:?} vs {1:?}")]
    VariableMismatch(Vec<String>, Vec<String>),
    #[error("point has {got} coordinates, expected {want}")]
    Arity { got: usize, want: usize },
    #[error("negative power of the free variable")]
    NegativeFreePower,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// An element of `Q ∪ {+∞}` with `⊕ = min`, `⊙ = +`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TropicalValue {
    Finite(Q),
    Infinity,
}

impl TropicalValue {
    pub fn zero() -> Self {
        TropicalValue::Infinity
    }

    pub fn one() -> Self {
        TropicalValue::Finite(Q::zero())
    }

    pub fn oplus(&self, other: &Self) -> Self {
        std::cmp::min(self, other).clone()
    }

    pub fn odot(&self, other: &Self) -> Self {
        match (self, other) {
            (TropicalValue::Finite(a), TropicalValue::Finite(b)) => TropicalValue::Finite(a + b),
            _ => TropicalValue::Infinity,
        }
    }
}

impl From<Valuation> for TropicalValue {
    fn from(v: Valuation) -> Self {
        match v {
            Valuation::Finite(q) => TropicalValue::Finite(q),
            Valuation::Infinite => TropicalValue::Infinity,
        }
    }
}

impl fmt::Display for TropicalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TropicalValue::Finite(q) => write!(f, "{}", fmt_q(q)),
            TropicalValue::Infinity => write!(f, "inf"),
        }
    }
}

fn dot(e: &[i64], p: &[Q]) -> Q {
    e.iter().zip(p).map(|(a, x)| Q::from_integer((*a).into()) * x).sum()
}

/// `⊕ a_i ⊙ x^i`; the map is never empty and stores no infinite coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalPolynomial {
    vars: Vec<String>,
    terms: BTreeMap<Vec<i64>, Q>,
}

impl TropicalPolynomial {
    pub fn new(vars: Vec<String>, terms: BTreeMap<Vec<i64>, Q>) -> Result<Self, TropicalError> {
        if terms.is_empty() {
            return Err(TropicalError::Empty);
        }
        assert!(terms.keys().all(|e| e.len() == vars.len()), "exponent arity");
        Ok(TropicalPolynomial { vars, terms })
    }

    /// Convenience for bivariate polynomials in `x`, `y`.
    pub fn bivariate<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = ([i64; 2], Q)>,
    {
        let map: BTreeMap<Vec<i64>, Q> = terms.into_iter().map(|(e, c)| (e.to_vec(), c)).collect();
        Self::new(vec!["x".into(), "y".into()], map).expect("non-empty")
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, Q> {
        &self.terms
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    fn check(&self, p: &[Q]) {
        assert_eq!(p.len(), self.arity(), "point arity");
    }

    pub fn evaluate(&self, p: &[Q]) -> Q {
        self.check(p);
        self.terms.iter().map(|(e, c)| c + dot(e, p)).min().expect("non-empty")
    }

    pub fn argmin_terms(&self, p: &[Q]) -> Vec<Vec<i64>> {
        let m = self.evaluate(p);
        self.terms.iter().filter(|(e, c)| *c + dot(e, p) == m).map(|(e, _)| e.clone()).collect()
    }

    /// True when the minimum is attained at least twice.
    pub fn on_hypersurface(&self, p: &[Q]) -> bool {
        self.argmin_terms(p).len() >= 2
    }

    pub fn oplus(&self, other: &Self) -> Result<Self, TropicalError> {
        self.same_vars(other)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            terms
                .entry(e.clone())
                .and_modify(|x| {
                    if c < x {
                        *x = c.clone()
                    }
                })
                .or_insert_with(|| c.clone());
        }
        Self::new(self.vars.clone(), terms)
    }

    pub fn odot(&self, other: &Self) -> Result<Self, TropicalError> {
        self.same_vars(other)?;
        let mut terms: BTreeMap<Vec<i64>, Q> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let c = c1 + c2;
                terms
                    .entry(e)
                    .and_modify(|x| {
                        if c < *x {
                            *x = c.clone()
                        }
                    })
                    .or_insert(c);
            }
        }
        Self::new(self.vars.clone(), terms)
    }

    fn same_vars(&self, other: &Self) -> Result<(), TropicalError> {
        if self.vars != other.vars {
            return Err(TropicalError::VariableMismatch(self.vars.clone(), other.vars.clone()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self.terms.iter().map(|(e, c)| json!([e, fmt_q(c)])).collect();
        json!({ "vars": self.vars, "terms": terms })
    }
}

impl fmt::Display for TropicalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pieces = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mut s = String::new();
            if !c.is_zero() || e.iter().all(|x| *x == 0) {
                s.push_str(&fmt_q(c));
            }
            for (k, name) in e.iter().zip(&self.vars) {
                if *k == 0 {
                    continue;
                }
                let sign = if *k < 0 {
                    "-"
                } else if s.is_empty() {
                    ""
                } else {
                    "+"
                };
                let mag = k.abs();
                if mag == 1 {
                    s.push_str(&format!("{sign}{name}"));
                } else {
                    s.push_str(&format!("{sign}{mag}{name}"));
                }
            }
            pieces.push(s);
        }
        write!(f, "min{{{}}}", pieces.join(", "))
    }
}

/// `Σ a_i x^i` with Puiseux coefficients, no zero coefficients stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPolynomial {
    vars: Vec<String>,
    terms: BTreeMap<Vec<i64>, PuiseuxSeries>,
}

impl LaurentPolynomial {
    pub fn new(vars: Vec<String>, terms: BTreeMap<Vec<i64>, PuiseuxSeries>) -> Self {
        assert!(terms.keys().all(|e| e.len() == vars.len()), "exponent arity");
        let terms = terms.into_iter().filter(|(_, c)| !c.is_exact_zero()).collect();
        LaurentPolynomial { vars, terms }
    }

    pub fn parse(src: &str) -> Result<Self, ParseError> {
        let (vars, terms) = literal::parse_polynomial(src)?;
        Ok(Self::new(vars, terms))
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i64>, PuiseuxSeries> {
        &self.terms
    }

    pub fn coefficient(&self, e: &[i64]) -> PuiseuxSeries {
        self.terms.get(e).cloned().unwrap_or_else(PuiseuxSeries::zero)
    }

    pub fn tropicalize(&self) -> Result<TropicalPolynomial, TropicalError> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            terms.insert(e.clone(), c.order()?);
        }
        TropicalPolynomial::new(self.vars.clone(), terms)
    }

    pub fn add(&self, other: &Self) -> Result<Self, TropicalError> {
        if self.vars != other.vars {
            return Err(TropicalError::VariableMismatch(self.vars.clone(), other.vars.clone()));
        }
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let s = match terms.get(e) {
                Some(x) => x + c,
                None => c.clone(),
            };
            terms.insert(e.clone(), s);
        }
        Ok(Self::new(self.vars.clone(), terms))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, TropicalError> {
        if self.vars != other.vars {
            return Err(TropicalError::VariableMismatch(self.vars.clone(), other.vars.clone()));
        }
        let mut terms: BTreeMap<Vec<i64>, PuiseuxSeries> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let p = c1 * c2;
                let s = match terms.get(&e) {
                    Some(x) => x + &p,
                    None => p,
                };
                terms.insert(e, s);
            }
        }
        Ok(Self::new(self.vars.clone(), terms))
    }

    /// Fixes every variable except `free` and returns the resulting polynomial in `free`.
    /// Negative powers of fixed variables are inverted to precision `target`.
    pub fn specialize(
        &self,
        values: &[Option<PuiseuxSeries>],
        free: usize,
        target: &Q,
    ) -> Result<UnivariatePolynomial, TropicalError> {
        if values.len() != self.vars.len() {
            return Err(TropicalError::Arity { got: values.len(), want: self.vars.len() });
        }
        let mut coeffs: Vec<PuiseuxSeries> = Vec::new();
        for (e, c) in &self.terms {
            let k = e[free];
            if k < 0 {
                return Err(TropicalError::NegativeFreePower);
            }
            let mut term = c.clone();
            for (i, (exp, v)) in e.iter().zip(values).enumerate() {
                if i == free || *exp == 0 {
                    continue;
                }
                let v = v.as_ref().expect("value for every fixed variable");
                let base = if *exp < 0 { v.invert(target)? } else { v.clone() };
                term = &term * &base.pow(exp.unsigned_abs() as u32);
            }
            let k = k as usize;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, PuiseuxSeries::zero());
            }
            coeffs[k] = &coeffs[k] + &term;
        }
        Ok(UnivariatePolynomial::new(coeffs))
    }
}

fn monomial_text(e: &[i64], vars: &[String]) -> String {
    let mut parts = Vec::new();
    for (k, name) in e.iter().zip(vars) {
        match *k {
            0 => {}
            1 => parts.push(name.clone()),
            k => parts.push(format!("{name}^{k}")),
        }
    }
    parts.join("*")
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let mono = monomial_text(e, &self.vars);
            let single = c.num_terms() == 1 && c.is_exact();
            let (neg, body) = if single {
                let (te, lc) = c.leading_term().unwrap();
                let neg = lc < &Q::zero();
                let mag = PuiseuxSeries::monomial(if neg { -lc.clone() } else { lc.clone() }, te.clone());
                (neg, mag.to_string())
            } else {
                (false, format!("({c})"))
            };
            let text = match (mono.is_empty(), body.as_str()) {
                (true, _) => body.clone(),
                (false, "1") => mono.clone(),
                (false, _) => format!("{body}*{mono}"),
            };
            match (first, neg) {
                (true, false) => write!(f, "{text}")?,
                (true, true) => write!(f, "-{text}")?,
                (false, false) => write!(f, " + {text}")?,
                (false, true) => write!(f, " - {text}")?,
            }
            first = false;
        }
        Ok(())
    }
}
