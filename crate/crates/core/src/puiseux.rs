//! Truncated Puiseux series over the rationals.
//!
//! A [`PuiseuxSeries`] is a finite sum `Σ cᵢ t^{eᵢ}` with rational exponents plus a
//! precision marker: either the series is exact, or everything from `t^N` on is unknown
//! (`+ O(t^N)`). Every operation propagates the tightest precision it can prove, so
//! "equal to precision" is a decidable question.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{denom_u64, fmt_q, frac, lcm_u64, sqrt_exact, Q};

/// Default absolute truncation order used when an exact input has an infinite expansion.
pub const DEFAULT_PRECISION: i64 = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("valuation is indeterminate: no known terms below t^{0}")]
    IndeterminateValuation(String),
    #[error("division by the exact zero series")]
    DivisionByZero,
    #[error("leading coefficient {0} is not the square of a rational")]
    NonSquareLeadingCoefficient(String),
    #[error("residue of a series with negative valuation {0}")]
    NegativeValuation(String),
}

/// Where the known part of a series ends.
///
/// Variant order matters: every finite cutoff compares below `Exact`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Precision {
    /// Terms with exponent `>= N` are unknown.
    Finite(Q),
    Exact,
}

impl Precision {
    pub fn finite(n: Q) -> Self {
        Precision::Finite(n)
    }

    pub fn value(&self) -> Option<&Q> {
        match self {
            Precision::Finite(n) => Some(n),
            Precision::Exact => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Precision::Exact)
    }

    /// `self + shift`, with `Exact` absorbing.
    pub fn shifted(&self, shift: &Q) -> Self {
        match self {
            Precision::Finite(n) => Precision::Finite(n + shift),
            Precision::Exact => Precision::Exact,
        }
    }

    /// True when every exponent `>= self` is also `>= n`, i.e. the cutoff reaches `n`.
    pub fn reaches(&self, n: &Q) -> bool {
        match self {
            Precision::Finite(m) => m >= n,
            Precision::Exact => true,
        }
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precision::Finite(n) => write!(f, "{}", fmt_q(n)),
            Precision::Exact => write!(f, "exact"),
        }
    }
}

/// A valuation: a rational, or `+∞` for the exact zero series.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(Q),
    Infinite,
}

impl Valuation {
    pub fn finite(&self) -> Option<&Q> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl Add for &Valuation {
    type Output = Valuation;
    fn add(self, rhs: &Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{}", fmt_q(v)),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// The residue of an element of the valuation ring, an element of the residue field ℚ.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueElement(pub Q);

/// A truncated Puiseux series with rational coefficients.
///
/// Invariants: no zero coefficients are stored, every stored exponent is below the
/// precision cutoff, and `ramification` is the lcm of the exponent denominators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PuiseuxSeries {
    terms: BTreeMap<Q, Q>,
    ramification: u64,
    precision: Precision,
}

impl PuiseuxSeries {
    pub fn zero() -> Self {
        Self::from_terms(std::iter::empty(), Precision::Exact)
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(c, Q::zero())
    }

    /// `c·t^e`, exact.
    pub fn monomial(c: Q, e: Q) -> Self {
        Self::from_terms([(e, c)], Precision::Exact)
    }

    /// The uniformizer `t`.
    pub fn t() -> Self {
        Self::monomial(Q::one(), Q::one())
    }

    /// `O(t^n)`: nothing known below `n`.
    pub fn unknown(n: Q) -> Self {
        Self::from_terms(std::iter::empty(), Precision::Finite(n))
    }

    /// Builds a series from `(exponent, coefficient)` pairs; repeated exponents are summed.
    pub fn from_terms<I>(terms: I, precision: Precision) -> Self
    where
        I: IntoIterator<Item = (Q, Q)>,
    {
        let mut map: BTreeMap<Q, Q> = BTreeMap::new();
        for (e, c) in terms {
            *map.entry(e).or_insert_with(Q::zero) += c;
        }
        let mut s = PuiseuxSeries { terms: map, ramification: 1, precision };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        self.terms.retain(|_, c| !c.is_zero());
        if let Precision::Finite(n) = &self.precision {
            let n = n.clone();
            self.terms.retain(|e, _| *e < n);
        }
        self.ramification = self.terms.keys().fold(1, |acc, e| lcm_u64(acc, denom_u64(e)));
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Q, &Q)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn precision(&self) -> &Precision {
        &self.precision
    }

    pub fn ramification(&self) -> u64 {
        self.ramification
    }

    pub fn is_exact(&self) -> bool {
        self.precision.is_exact()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.precision.is_exact()
    }

    /// Coefficient of `t^e`; zero when absent. Meaningful only for `e` below the cutoff.
    pub fn coefficient(&self, e: &Q) -> Q {
        self.terms.get(e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn leading_term(&self) -> Option<(&Q, &Q)> {
        self.terms.iter().next()
    }

    pub fn leading_coefficient(&self) -> Option<&Q> {
        self.leading_term().map(|(_, c)| c)
    }

    /// The least exponent present, `+∞` for the exact zero series.
    pub fn valuation(&self) -> Result<Valuation, SeriesError> {
        match (self.terms.keys().next(), &self.precision) {
            (Some(e), _) => Ok(Valuation::Finite(e.clone())),
            (None, Precision::Exact) => Ok(Valuation::Infinite),
            (None, Precision::Finite(n)) => Err(SeriesError::IndeterminateValuation(fmt_q(n))),
        }
    }

    /// Finite valuation; the exact zero series is reported as [`SeriesError::DivisionByZero`].
    pub fn order(&self) -> Result<Q, SeriesError> {
        match self.valuation()? {
            Valuation::Finite(v) => Ok(v),
            Valuation::Infinite => Err(SeriesError::DivisionByZero),
        }
    }

    /// A lower bound for the valuation that is always available.
    pub fn valuation_lower_bound(&self) -> Valuation {
        match (self.terms.keys().next(), &self.precision) {
            (Some(e), _) => Valuation::Finite(e.clone()),
            (None, Precision::Exact) => Valuation::Infinite,
            (None, Precision::Finite(n)) => Valuation::Finite(n.clone()),
        }
    }

    /// Drops everything from `t^n` on.
    pub fn truncate(&self, n: &Q) -> Self {
        let precision = std::cmp::min(self.precision.clone(), Precision::Finite(n.clone()));
        Self::from_terms(self.terms.iter().map(|(e, c)| (e.clone(), c.clone())), precision)
    }

    pub fn scale(&self, k: &Q) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self::from_terms(self.terms.iter().map(|(e, c)| (e.clone(), c * k)), self.precision.clone())
    }

    /// Multiplication by `t^shift`.
    pub fn shift(&self, shift: &Q) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| (e + shift, c.clone())), self.precision.shifted(shift))
    }

    /// Substitutes `t ↦ t^k` for a positive rational `k`.
    pub fn rescale_exponents(&self, k: &Q) -> Self {
        assert!(k.is_positive());
        let precision = match &self.precision {
            Precision::Finite(n) => Precision::Finite(n * k),
            Precision::Exact => Precision::Exact,
        };
        Self::from_terms(self.terms.iter().map(|(e, c)| (e * k, c.clone())), precision)
    }

    pub fn add_series(&self, other: &Self) -> Self {
        let precision = std::cmp::min(self.precision.clone(), other.precision.clone());
        Self::from_terms(self.terms.iter().chain(other.terms.iter()).map(|(e, c)| (e.clone(), c.clone())), precision)
    }

    pub fn mul_series(&self, other: &Self) -> Self {
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero();
        }
        let va = self.valuation_lower_bound();
        let vb = other.valuation_lower_bound();
        let pa = match (&va, &other.precision) {
            (Valuation::Finite(v), Precision::Finite(n)) => Precision::Finite(v + n),
            _ => Precision::Exact,
        };
        let pb = match (&vb, &self.precision) {
            (Valuation::Finite(v), Precision::Finite(n)) => Precision::Finite(v + n),
            _ => Precision::Exact,
        };
        let precision = std::cmp::min(pa, pb);
        let mut out: BTreeMap<Q, Q> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1 + e2;
                if let Precision::Finite(n) = &precision {
                    // exponents in `other` only grow from here
                    if &e >= n {
                        break;
                    }
                }
                *out.entry(e).or_insert_with(Q::zero) += c1 * c2;
            }
        }
        Self::from_terms(out, precision)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc.mul_series(self);
        }
        acc
    }

    /// Splits `s = c·t^v·(1 + h)` with `v(h) > 0`; returns `(c, v, h)`.
    fn unit_decomposition(&self) -> Result<(Q, Q, PuiseuxSeries), SeriesError> {
        let (v, c) = match self.valuation()? {
            Valuation::Infinite => return Err(SeriesError::DivisionByZero),
            Valuation::Finite(v) => (v.clone(), self.terms[&v].clone()),
        };
        let inv_c = c.recip();
        let h = Self::from_terms(
            self.terms.iter().skip(1).map(|(e, k)| (e - &v, k * &inv_c)),
            self.precision.shifted(&-v.clone()),
        );
        Ok((c, v, h))
    }

    /// Multiplicative inverse with absolute cutoff at most `target` for infinite expansions.
    ///
    /// The cutoff of the result never exceeds what the input precision supports:
    /// for `s` known to `O(t^N)` with `v(s) = v`, the inverse is known to `O(t^{N-2v})`.
    pub fn invert(&self, target: &Q) -> Result<Self, SeriesError> {
        let (c, v, h) = self.unit_decomposition()?;
        let lead = Self::monomial(c.recip(), -v.clone());
        if h.is_exact_zero() {
            return Ok(lead);
        }
        // relative precision of 1/(1+h)
        let intrinsic = h.precision.clone();
        let wanted = Precision::Finite(target + &v);
        let rel = std::cmp::min(intrinsic, wanted);
        let rel_n = rel.value().cloned().expect("finite relative precision");
        let neg_h = -&h;
        let mut term = Self::one();
        let mut sum = Self::one();
        loop {
            term = term.mul_series(&neg_h).truncate(&rel_n);
            if term.terms.is_empty() {
                break;
            }
            sum = sum.add_series(&term);
        }
        let unit_inv = sum.truncate(&rel_n);
        Ok(unit_inv.mul_series(&lead))
    }

    pub fn div_series(&self, other: &Self, target: &Q) -> Result<Self, SeriesError> {
        Ok(self.mul_series(&other.invert(target)?))
    }

    /// The square root whose leading coefficient is a positive rational.
    ///
    /// Odd valuations are fine: the result simply ramifies further.
    pub fn sqrt(&self, target: &Q) -> Result<Self, SeriesError> {
        if self.is_exact_zero() {
            return Ok(Self::zero());
        }
        let (c, v, h) = self.unit_decomposition()?;
        let root_c = sqrt_exact(&c).ok_or_else(|| SeriesError::NonSquareLeadingCoefficient(fmt_q(&c)))?;
        let half_v = &v / Q::from_integer(2.into());
        let lead = Self::monomial(root_c, half_v.clone());
        if h.is_exact_zero() {
            return Ok(lead);
        }
        let wanted = Precision::Finite(target - &half_v);
        let rel = std::cmp::min(h.precision.clone(), wanted);
        let rel_n = rel.value().cloned().expect("finite relative precision");
        // binomial series (1+h)^{1/2} = Σ binom(1/2, k) h^k
        let half = frac(1, 2);
        let mut binom = Q::one();
        let mut power = Self::one();
        let mut sum = Self::one();
        let mut k: i64 = 0;
        loop {
            binom = &binom * (&half - Q::from_integer(k.into())) / Q::from_integer((k + 1).into());
            k += 1;
            power = power.mul_series(&h).truncate(&rel_n);
            if power.terms.is_empty() {
                break;
            }
            sum = sum.add_series(&power.scale(&binom));
        }
        Ok(sum.truncate(&rel_n).mul_series(&lead))
    }

    /// Image in the residue field; requires `v(s) >= 0`.
    pub fn residue(&self) -> Result<ResidueElement, SeriesError> {
        match self.valuation_lower_bound() {
            Valuation::Infinite => Ok(ResidueElement(Q::zero())),
            Valuation::Finite(v) => {
                if v.is_negative() {
                    if self.terms.is_empty() {
                        // O(t^N) with N < 0 says nothing about the sign
                        return Err(SeriesError::IndeterminateValuation(fmt_q(&v)));
                    }
                    return Err(SeriesError::NegativeValuation(fmt_q(&v)));
                }
                if v.is_zero() && self.terms.is_empty() {
                    return Err(SeriesError::IndeterminateValuation(fmt_q(&v)));
                }
                Ok(ResidueElement(self.coefficient(&Q::zero())))
            }
        }
    }

    /// True when `self - other` has no known term below `n` and is known at least to `n`.
    pub fn eq_to_precision(&self, other: &Self, n: &Q) -> bool {
        let d = self - other;
        d.terms.keys().next().is_none_or(|e| e >= n) && d.precision.reaches(n)
    }

    /// Agreement on every term below the common cutoff of both series.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let d = self - other;
        d.terms.is_empty()
    }

    /// Compares term lists lexicographically by `(exponent, coefficient)`.
    pub fn cmp_terms(&self, other: &Self) -> Ordering {
        self.terms.iter().cmp(other.terms.iter())
    }

    pub fn parse(s: &str) -> Result<Self, crate::literal::ParseError> {
        crate::literal::parse_series(s)
    }

    /// JSON form: `{"terms": [["exp", "coeff"], ...], "precision": "N" | null}`.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> =
            self.terms.iter().map(|(e, c)| serde_json::json!([fmt_q(e), fmt_q(c)])).collect();
        let precision = match &self.precision {
            Precision::Finite(n) => serde_json::Value::String(fmt_q(n)),
            Precision::Exact => serde_json::Value::Null,
        };
        serde_json::json!({ "terms": terms, "precision": precision })
    }
}

impl From<Q> for PuiseuxSeries {
    fn from(c: Q) -> Self {
        PuiseuxSeries::constant(c)
    }
}

impl From<i64> for PuiseuxSeries {
    fn from(c: i64) -> Self {
        PuiseuxSeries::constant(Q::from_integer(c.into()))
    }
}

fn fmt_exponent(e: &Q) -> String {
    if e.is_integer() {
        fmt_q(e)
    } else {
        format!("({})", fmt_q(e))
    }
}

impl fmt::Display for PuiseuxSeries {
    /// Canonical literal, e.g. `1 - 2*t^(1/2) + t^3 + O(t^24)`; parses back to `self`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.terms {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            if e.is_zero() {
                write!(f, "{}", fmt_q(&abs))?;
                continue;
            }
            if !abs.is_one() {
                write!(f, "{}*", fmt_q(&abs))?;
            }
            if e.is_one() {
                write!(f, "t")?;
            } else {
                write!(f, "t^{}", fmt_exponent(e))?;
            }
        }
        match &self.precision {
            Precision::Exact => {
                if first {
                    write!(f, "0")?;
                }
            }
            Precision::Finite(n) => {
                if !first {
                    write!(f, " + ")?;
                }
                write!(f, "O(t^{})", fmt_exponent(n))?;
            }
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $impl_fn:ident) => {
        impl $trait<&PuiseuxSeries> for &PuiseuxSeries {
            type Output = PuiseuxSeries;
            fn $method(self, rhs: &PuiseuxSeries) -> PuiseuxSeries {
                self.$impl_fn(rhs)
            }
        }
        impl $trait<PuiseuxSeries> for PuiseuxSeries {
            type Output = PuiseuxSeries;
            fn $method(self, rhs: PuiseuxSeries) -> PuiseuxSeries {
                (&self).$impl_fn(&rhs)
            }
        }
        impl $trait<&PuiseuxSeries> for PuiseuxSeries {
            type Output = PuiseuxSeries;
            fn $method(self, rhs: &PuiseuxSeries) -> PuiseuxSeries {
                (&self).$impl_fn(rhs)
            }
        }
        impl $trait<PuiseuxSeries> for &PuiseuxSeries {
            type Output = PuiseuxSeries;
            fn $method(self, rhs: PuiseuxSeries) -> PuiseuxSeries {
                self.$impl_fn(&rhs)
            }
        }
    };
}

impl PuiseuxSeries {
    fn sub_series(&self, other: &Self) -> Self {
        self.add_series(&-other)
    }
}

forward_binop!(Add, add, add_series);
forward_binop!(Sub, sub, sub_series);
forward_binop!(Mul, mul, mul_series);

impl Neg for &PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn neg(self) -> PuiseuxSeries {
        PuiseuxSeries {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            ramification: self.ramification,
            precision: self.precision.clone(),
        }
    }
}

impl Neg for PuiseuxSeries {
    type Output = PuiseuxSeries;
    fn neg(self) -> PuiseuxSeries {
        -&self
    }
}
