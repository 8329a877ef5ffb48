//! Univariate polynomials over the Puiseux field and their roots by Newton–Puiseux descent.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::puiseux::{Precision, PuiseuxSeries, SeriesError, Valuation};
use crate::rational::{fmt_q, rational_roots, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NewtonError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("polynomial has degree 0")]
    ConstantPolynomial,
    #[error("Newton polygon needs at least two coefficients of determinate valuation")]
    TooFewPoints,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
}

/// Coefficients indexed by degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnivariatePolynomial {
    coeffs: Vec<PuiseuxSeries>,
}

impl UnivariatePolynomial {
    pub fn new(mut coeffs: Vec<PuiseuxSeries>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_exact_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(PuiseuxSeries::zero());
        }
        UnivariatePolynomial { coeffs }
    }

    pub fn from_rationals(coeffs: &[Q]) -> Self {
        Self::new(coeffs.iter().cloned().map(PuiseuxSeries::constant).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[PuiseuxSeries] {
        &self.coeffs
    }

    pub fn coefficient(&self, i: usize) -> PuiseuxSeries {
        self.coeffs.get(i).cloned().unwrap_or_else(PuiseuxSeries::zero)
    }

    pub fn eval(&self, x: &PuiseuxSeries) -> PuiseuxSeries {
        let mut acc = PuiseuxSeries::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// `p(z + s)`.
    pub fn shift(&self, s: &PuiseuxSeries) -> Self {
        let mut acc: Vec<PuiseuxSeries> = vec![PuiseuxSeries::zero()];
        for c in self.coeffs.iter().rev() {
            // acc <- acc * (z + s) + c
            let mut next = vec![PuiseuxSeries::zero(); acc.len() + 1];
            for (i, a) in acc.iter().enumerate() {
                next[i + 1] = &next[i + 1] + a;
                next[i] = &next[i] + &(a * s);
            }
            next[0] = &next[0] + c;
            acc = next;
        }
        Self::new(acc)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::new(vec![PuiseuxSeries::zero()]);
        }
        Self::new(
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.scale(&Q::from_integer((i as i64).into()))).collect(),
        )
    }

    pub fn scale_by(&self, s: &PuiseuxSeries) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }
}

impl fmt::Display for UnivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_exact_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*z")?,
                _ => write!(f, "({c})*z^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// One edge of a Newton polygon, between hull vertices `start < end`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonEdge {
    pub start: usize,
    pub end: usize,
    /// Valuation of the roots belonging to this edge, the negated slope.
    pub root_valuation: Q,
}

impl NewtonEdge {
    pub fn length(&self) -> usize {
        self.end - self.start
    }

    pub fn slope(&self) -> Q {
        -self.root_valuation.clone()
    }
}

// Lower convex hull of points sorted by x, as indices into `pts`.
fn lower_hull(pts: &[(usize, Q)]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::new();
    for (k, (x, y)) in pts.iter().enumerate() {
        while hull.len() >= 2 {
            let (x1, y1) = &pts[hull[hull.len() - 2]];
            let (x2, y2) = &pts[hull[hull.len() - 1]];
            // drop the middle point unless it lies strictly below the chord
            let lhs = (y2 - y1) * Q::from_integer(((*x - x1) as i64).into());
            let rhs = (y - y1) * Q::from_integer(((x2 - x1) as i64).into());
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    hull
}

fn edges_of(pts: &[(usize, Q)]) -> Vec<NewtonEdge> {
    let hull = lower_hull(pts);
    hull.windows(2)
        .map(|w| {
            let (a, va) = &pts[w[0]];
            let (b, vb) = &pts[w[1]];
            NewtonEdge { start: *a, end: *b, root_valuation: (va - vb) / Q::from_integer(((b - a) as i64).into()) }
        })
        .collect()
}

/// Newton polygon of `p`, edges from left to right (root valuations decreasing).
/// Exact-zero coefficients are skipped.
pub fn newton_polygon(p: &UnivariatePolynomial) -> Result<Vec<NewtonEdge>, NewtonError> {
    let mut pts = Vec::new();
    for (i, c) in p.coeffs.iter().enumerate() {
        match c.valuation()? {
            Valuation::Finite(v) => pts.push((i, v)),
            Valuation::Infinite => {}
        }
    }
    if pts.len() < 2 {
        return Err(NewtonError::TooFewPoints);
    }
    Ok(edges_of(&pts))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSolution {
    /// Exact finite expansion of the root.
    pub root: PuiseuxSeries,
    pub multiplicity: usize,
    /// Lower bound on `v(p(root))`.
    pub certified_precision: Precision,
    /// The true roots of this cluster agree with `root` below this exponent.
    pub root_precision: Precision,
}

impl RootSolution {
    /// The root with its uncertainty attached as `O(t^N)`.
    pub fn truncated(&self) -> PuiseuxSeries {
        PuiseuxSeries::from_terms(self.root.terms().map(|(e, c)| (e.clone(), c.clone())), self.root_precision.clone())
    }
}

/// Roots continuing `prefix + c·t^valuation + …` where `c` is a root of an irreducible
/// residue factor with no rational roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnresolvedBranch {
    pub prefix: PuiseuxSeries,
    pub valuation: Q,
    pub degree: usize,
    pub residue_factor: Vec<Q>,
}

impl UnresolvedBranch {
    /// Valuation shared by every root in the branch.
    pub fn root_valuation(&self) -> Q {
        match self.prefix.valuation() {
            Ok(Valuation::Finite(v)) => v,
            _ => self.valuation.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RootSet {
    pub roots: Vec<RootSolution>,
    pub unresolved: Vec<UnresolvedBranch>,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum::<usize>()
            + self.unresolved.iter().map(|u| u.degree).sum::<usize>()
    }
}

struct Descent<'a> {
    target: &'a Q,
    cap: usize,
    out: RootSet,
}

impl Descent<'_> {
    fn exhausted(&self, why: &str, prefix: &PuiseuxSeries) -> NewtonError {
        NewtonError::PrecisionExhausted(format!("{why} (branch {prefix}, target {})", fmt_q(self.target)))
    }

    fn cluster(
        &mut self,
        q: &UnivariatePolynomial,
        prefix: PuiseuxSeries,
        top: bool,
        m: usize,
        steps: usize,
    ) -> Result<(), NewtonError> {
        let i0 = q.coeffs.iter().take_while(|c| c.is_exact_zero()).count().min(m);
        if i0 > 0 {
            self.out.roots.push(RootSolution {
                root: prefix.clone(),
                multiplicity: i0,
                certified_precision: Precision::Exact,
                root_precision: Precision::Exact,
            });
            if i0 == m {
                return Ok(());
            }
        }
        let vm = match q.coefficient(m).valuation() {
            Ok(Valuation::Finite(v)) => v,
            _ => return Err(self.exhausted("cluster coefficient lost", &prefix)),
        };
        if i0 == 0 && !(top && prefix.is_exact_zero()) {
            let residual = q.coefficient(0).valuation_lower_bound();
            let mut rho: Option<Q> = None;
            for j in 0..m {
                if let Valuation::Finite(lb) = q.coefficient(j).valuation_lower_bound() {
                    let r = (lb - &vm) / Q::from_integer(((m - j) as i64).into());
                    rho = Some(match rho {
                        Some(x) if x <= r => x,
                        _ => r,
                    });
                }
            }
            let residual_ok = match &residual {
                Valuation::Finite(v) => v >= self.target,
                Valuation::Infinite => true,
            };
            let rho_ok = rho.as_ref().is_none_or(|r| r >= self.target);
            if residual_ok && rho_ok {
                let certified = match residual {
                    Valuation::Finite(v) => Precision::Finite(v),
                    Valuation::Infinite => Precision::Exact,
                };
                self.out.roots.push(RootSolution {
                    root: prefix,
                    multiplicity: m,
                    certified_precision: certified,
                    root_precision: rho.map(Precision::Finite).unwrap_or(Precision::Exact),
                });
                return Ok(());
            }
        }
        if steps > self.cap {
            return Err(self.exhausted("iteration bound reached", &prefix));
        }
        let mut known = Vec::new();
        let mut bounds = Vec::new();
        for j in i0..=m {
            let c = q.coefficient(j);
            if c.is_exact_zero() {
                continue;
            }
            match c.valuation() {
                Ok(Valuation::Finite(v)) => known.push((j, v)),
                _ => {
                    if j == i0 {
                        return Err(self.exhausted("constant coefficient indeterminate", &prefix));
                    }
                    bounds.push((j, c.valuation_lower_bound()));
                }
            }
        }
        let edges = edges_of(&known);
        for (j, lb) in &bounds {
            let e = edges.iter().find(|e| e.start < *j && *j < e.end).expect("interior point");
            let va = &known.iter().find(|(x, _)| *x == e.start).unwrap().1;
            let height = va - &e.root_valuation * Q::from_integer(((j - e.start) as i64).into());
            let above = match lb {
                Valuation::Finite(b) => *b > height,
                Valuation::Infinite => true,
            };
            if !above {
                return Err(self.exhausted("coefficient precision too low to fix the Newton polygon", &prefix));
            }
        }
        for e in edges {
            let gamma = e.root_valuation.clone();
            let (_, va) = known.iter().find(|(x, _)| *x == e.start).unwrap();
            let line = va + &gamma * Q::from_integer((e.start as i64).into());
            let mut residue = vec![Q::zero(); e.length() + 1];
            for (j, vj) in &known {
                if *j < e.start || *j > e.end {
                    continue;
                }
                if vj + &gamma * Q::from_integer((*j as i64).into()) == line {
                    residue[j - e.start] = q.coefficient(*j).leading_coefficient().unwrap().clone();
                }
            }
            let (found, cofactor) = rational_roots(&residue);
            for (c, mu) in found {
                let s = PuiseuxSeries::monomial(c, gamma.clone());
                let cluster = &line - &gamma * qi(mu) + qi(mu) * self.target.max(&gamma);
                let keep = cluster.max(self.target.clone()) + Q::one();
                let shifted = trim(q, &keep, &gamma).shift(&s);
                self.cluster(&shifted, &prefix + &s, false, mu, steps + 1)?;
            }
            if cofactor.len() > 1 {
                self.out.unresolved.push(UnresolvedBranch {
                    prefix: prefix.clone(),
                    valuation: gamma,
                    degree: cofactor.len() - 1,
                    residue_factor: cofactor,
                });
            }
        }
        Ok(())
    }
}

fn qi(n: usize) -> Q {
    Q::from_integer((n as i64).into())
}

// Drops the terms of coefficient j at or above `keep - j·gamma`; later shifts have
// valuation above `gamma`, so nothing below the target depends on them.
fn trim(q: &UnivariatePolynomial, keep: &Q, gamma: &Q) -> UnivariatePolynomial {
    let coeffs = q
        .coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let n = keep - gamma * qi(j);
            if c.is_exact() && c.terms().next_back().is_none_or(|(e, _)| *e < n) {
                c.clone()
            } else {
                c.truncate(&n)
            }
        })
        .collect();
    UnivariatePolynomial::new(coeffs)
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).fold(1u64, |a, b| a.saturating_mul(b))
}

/// Roots of `p` expanded until both the residual and the root expansion reach `target`.
pub fn roots(p: &UnivariatePolynomial, target: &Q) -> Result<RootSet, NewtonError> {
    let d = p.degree();
    if d == 0 {
        return Err(NewtonError::ConstantPolynomial);
    }
    if let Valuation::Infinite = p.coeffs[d].valuation()? {
        unreachable!("trailing zeros are trimmed");
    }
    let mut ram = 1u64;
    let mut vals: Vec<Q> = Vec::new();
    for c in &p.coeffs {
        ram = ram.lcm(&c.ramification());
        if let Valuation::Finite(v) = c.valuation_lower_bound() {
            vals.push(v);
        }
    }
    let spread = match (vals.iter().min(), vals.iter().max()) {
        (Some(a), Some(b)) => b - a,
        _ => Q::zero(),
    };
    let r = Q::from_integer((ram.saturating_mul(factorial(d)) as i64).into());
    let known: Vec<(usize, Q)> = p
        .coeffs
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.valuation().ok().and_then(|v| v.finite().cloned()).map(|v| (i, v)))
        .collect();
    let gamma0 = edges_of(&known).iter().map(|e| e.root_valuation.clone()).min().unwrap_or_else(Q::zero);
    let span = (target - &gamma0 + Q::one() + spread).max(Q::one()) * r;
    let cap = span.ceil().to_integer().to_usize().unwrap_or(usize::MAX / 2) + d + 4;
    let mut descent = Descent { target, cap, out: RootSet::default() };
    descent.cluster(p, PuiseuxSeries::zero(), true, d, 0)?;
    let mut out = descent.out;
    out.roots.sort_by(|a, b| order_roots(&a.root, &b.root));
    Ok(out)
}

/// Smallest ramification first, then lexicographic on terms.
pub fn order_roots(a: &PuiseuxSeries, b: &PuiseuxSeries) -> Ordering {
    a.ramification().cmp(&b.ramification()).then_with(|| a.cmp_terms(b))
}

/// Residual valuation bound of `p` at `x`.
pub fn residual_valuation(p: &UnivariatePolynomial, x: &PuiseuxSeries) -> Valuation {
    p.eval(x).valuation_lower_bound()
}

/// True when `v` clears the given precision.
pub fn meets(v: &Valuation, p: &Precision) -> bool {
    match (v, p) {
        (Valuation::Infinite, _) => true,
        (Valuation::Finite(_), Precision::Exact) => false,
        (Valuation::Finite(a), Precision::Finite(b)) => a >= b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};

    fn ps(s: &str) -> PuiseuxSeries {
        PuiseuxSeries::parse(s).unwrap()
    }

    fn poly(cs: &[&str]) -> UnivariatePolynomial {
        UnivariatePolynomial::new(cs.iter().map(|s| ps(s)).collect())
    }

    // brute-force lower hull: an edge (i,j) is on it iff every point lies on or above the line
    fn brute_edges(pts: &[(usize, Q)]) -> Vec<(usize, usize, Q)> {
        let mut out = Vec::new();
        let mut i = 0;
        while i + 1 < pts.len() {
            let mut best: Option<(usize, Q)> = None;
            for j in i + 1..pts.len() {
                let s = (&pts[j].1 - &pts[i].1) / Q::from_integer(((pts[j].0 - pts[i].0) as i64).into());
                match &best {
                    Some((_, b)) if s > *b => {}
                    Some((_, b)) if s == *b => best = Some((j, s)),
                    _ => best = Some((j, s)),
                }
            }
            let (j, s) = best.unwrap();
            out.push((pts[i].0, pts[j].0, -s));
            i = j;
        }
        out
    }

    #[test]
    fn polygon_examples() {
        let e = newton_polygon(&poly(&["-t", "0", "1"])).unwrap();
        assert_eq!(e, vec![NewtonEdge { start: 0, end: 2, root_valuation: frac(1, 2) }]);
        let e = newton_polygon(&poly(&["-t^3", "1"])).unwrap();
        assert_eq!(e[0].root_valuation, q(3));
        let e = newton_polygon(&poly(&["-1 - t", "0", "1"])).unwrap();
        assert_eq!((e[0].root_valuation.clone(), e[0].length()), (q(0), 2));
        assert_eq!(newton_polygon(&poly(&["1"])), Err(NewtonError::TooFewPoints));
    }

    #[test]
    fn polygon_matches_brute_force() {
        let p = poly(&["t^5", "t^2", "t^3", "1", "t^-1", "t"]);
        let pts: Vec<(usize, Q)> = p.coefficients().iter().enumerate().map(|(i, c)| (i, c.order().unwrap())).collect();
        let fast: Vec<(usize, usize, Q)> =
            newton_polygon(&p).unwrap().into_iter().map(|e| (e.start, e.end, e.root_valuation)).collect();
        assert_eq!(fast, brute_edges(&pts));
    }

    #[test]
    fn square_roots_of_one_plus_t() {
        let p = poly(&["-1 - t", "0", "1"]);
        let rs = roots(&p, &q(3)).unwrap();
        assert_eq!(rs.roots.len(), 2);
        let got: Vec<String> = rs.roots.iter().map(|r| r.truncated().to_string()).collect();
        assert!(got.contains(&"1 + 1/2*t - 1/8*t^2 + O(t^3)".to_string()));
        assert!(got.contains(&"-1 - 1/2*t + 1/8*t^2 + O(t^3)".to_string()));
        for r in &rs.roots {
            assert!(meets(&residual_valuation(&p, &r.root), &Precision::finite(q(3))));
        }
    }

    #[test]
    fn linear_and_exact_roots() {
        let rs = roots(&poly(&["-7", "1"]), &q(5)).unwrap();
        assert_eq!(rs.roots.len(), 1);
        assert_eq!(rs.roots[0].root, ps("7"));
        assert_eq!(rs.roots[0].multiplicity, 1);
        assert_eq!(rs.roots[0].certified_precision, Precision::Exact);
    }

    #[test]
    fn division_polynomial_has_zero_root() {
        // 3x^4 + 4x^3 - 12t x^2 + 12t^2 x
        let p = poly(&["0", "12*t^2", "-12*t", "4", "3"]);
        let rs = roots(&p, &q(4)).unwrap();
        assert!(rs.roots.iter().any(|r| r.root.is_exact_zero()));
        assert_eq!(rs.total_multiplicity(), 4);
    }

    #[test]
    fn ramified_roots() {
        let rs = roots(&poly(&["-t", "0", "1"]), &q(2)).unwrap();
        let got: Vec<String> = rs.roots.iter().map(|r| r.root.to_string()).collect();
        assert_eq!(got, vec!["-t^(1/2)", "t^(1/2)"]);
    }

    #[test]
    fn irrational_branches_are_reported() {
        let rs = roots(&poly(&["-2", "0", "1"]), &q(2)).unwrap();
        assert!(rs.roots.is_empty());
        assert_eq!(rs.unresolved.len(), 1);
        assert_eq!(rs.unresolved[0].degree, 2);
        assert_eq!(rs.unresolved[0].root_valuation(), q(0));
    }

    #[test]
    fn double_root_cluster() {
        // (z - 1 - t)^2 (z + 2)
        let p = poly(&["2 + 4*t + 2*t^2", "-3 - 2*t + t^2", "-2*t", "1"]);
        let rs = roots(&p, &q(6)).unwrap();
        assert_eq!(rs.total_multiplicity(), 3);
        let dbl = rs.roots.iter().find(|r| r.multiplicity == 2).unwrap();
        assert_eq!(dbl.root, ps("1 + t"));
    }

    #[test]
    fn truncated_coefficients_exhaust() {
        let p = poly(&["1 + O(t^3)", "-2", "1"]);
        assert!(matches!(roots(&p, &q(4)), Err(NewtonError::PrecisionExhausted(_))));
    }

    #[test]
    fn shift_and_derivative() {
        let p = poly(&["1", "2", "1"]);
        assert_eq!(p.shift(&ps("-1")), poly(&["0", "0", "1"]));
        assert_eq!(p.derivative(), poly(&["2", "2"]));
    }
}
