//! Strategies and property checks shared by the property suites and the acceptance run.
#![allow(dead_code)]

use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use tropell::curve::curve_of;
use tropell::newton::{meets, residual_valuation, roots, UnivariatePolynomial};
use tropell::rational::{frac, q};
use tropell::tropical::TropicalPolynomial;
use tropell::weierstrass::{apply_change_to, classify_reduction, is_minimal, CoordinateChange, WeierstrassModel};
use tropell::{Precision, PuiseuxSeries, Valuation, Q};

pub const CASES: u32 = 256;

pub fn config() -> Config {
    Config { cases: CASES, failure_persistence: None, ..Config::default() }
}

pub fn rational(num: std::ops::RangeInclusive<i64>, den: std::ops::RangeInclusive<i64>) -> impl Strategy<Value = Q> {
    (num, den).prop_map(|(n, d)| frac(n, d))
}

pub fn unit_coefficient() -> impl Strategy<Value = Q> {
    (1i64..=9, 1i64..=5, any::<bool>()).prop_map(|(n, d, neg)| frac(if neg { -n } else { n }, d))
}

pub fn exponent(lo: i64, hi: i64) -> impl Strategy<Value = Q> {
    (1i64..=3).prop_flat_map(move |d| (lo * d..=hi * d).prop_map(move |n| frac(n, d)))
}

/// Exact nonzero series with 1 to 4 terms.
pub fn series(lo: i64, hi: i64) -> impl Strategy<Value = PuiseuxSeries> {
    prop::collection::vec((exponent(lo, hi), unit_coefficient()), 1..=4)
        .prop_map(|terms| PuiseuxSeries::from_terms(terms, Precision::Exact))
        .prop_filter("nonzero", |s| !s.is_exact_zero())
}

/// Unit of valuation zero.
pub fn unit() -> impl Strategy<Value = PuiseuxSeries> {
    (unit_coefficient(), prop::collection::vec((exponent(1, 4), unit_coefficient()), 0..=1))
        .prop_map(|(c, rest)| PuiseuxSeries::from_terms(std::iter::once((Q::zero(), c)).chain(rest), Precision::Exact))
}

/// Integral series, possibly zero.
pub fn integral() -> impl Strategy<Value = PuiseuxSeries> {
    prop::collection::vec((exponent(0, 4), unit_coefficient()), 0..=2)
        .prop_map(|terms| PuiseuxSeries::from_terms(terms, Precision::Exact))
}

fn val(s: &PuiseuxSeries) -> Q {
    match s.valuation().expect("exact series") {
        Valuation::Finite(v) => v,
        Valuation::Infinite => panic!("zero series"),
    }
}

pub fn valuation_laws(a: &PuiseuxSeries, b: &PuiseuxSeries) -> Result<(), TestCaseError> {
    let (va, vb) = (val(a), val(b));
    prop_assert_eq!(val(&(a * b)), &va + &vb);
    let s = a + b;
    let m = std::cmp::min(va.clone(), vb.clone());
    match s.valuation().unwrap() {
        Valuation::Infinite => prop_assert_eq!(&va, &vb),
        Valuation::Finite(vs) => {
            prop_assert!(vs >= m);
            if va != vb {
                prop_assert_eq!(vs, m);
            }
        }
    }
    Ok(())
}

/// Round trips to relative precision `n`.
pub fn inverse_and_root(a: &PuiseuxSeries, n: &Q) -> Result<(), TestCaseError> {
    let v = val(a);
    let inv = a.invert(&(n - &v)).unwrap();
    let prod = a * &inv;
    prop_assert!(prod.eq_to_precision(&PuiseuxSeries::one(), n), "a·a⁻¹ = {}", prod);
    let sq = a * a;
    let r = sq.sqrt(&(&v + n)).unwrap();
    let back = &r * &r;
    prop_assert!(back.eq_to_precision(&sq, &(&v + &v + n)), "sqrt(a²)² = {} vs {}", back, sq);
    let rel = &v + n;
    prop_assert!(r.eq_to_precision(a, &rel) || r.eq_to_precision(&-a, &rel), "sqrt(a²) = {} for a = {}", r, a);
    Ok(())
}

/// `Π (X − r_i)` with the roots given.
pub fn from_roots(rs: &[PuiseuxSeries]) -> UnivariatePolynomial {
    let mut coeffs = vec![PuiseuxSeries::one()];
    for r in rs {
        let mut next = vec![PuiseuxSeries::zero(); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] = &next[i + 1] + c;
            next[i] = &next[i] - &(c * r);
        }
        coeffs = next;
    }
    UnivariatePolynomial::new(coeffs)
}

pub fn newton_certificates(
    p: &UnivariatePolynomial,
    planted: &[PuiseuxSeries],
    target: &Q,
) -> Result<(), TestCaseError> {
    let found = roots(p, target).unwrap();
    prop_assert_eq!(found.total_multiplicity(), p.degree());
    prop_assert!(found.unresolved.is_empty());
    let want = Precision::Finite(target.clone());
    for r in &found.roots {
        prop_assert!(r.certified_precision >= want, "certified {:?}", r.certified_precision);
        prop_assert!(meets(&residual_valuation(p, &r.root), &r.certified_precision));
        let hit = planted.iter().any(|x| match r.root_precision.value() {
            Some(n) => x.eq_to_precision(&r.root, n),
            None => *x == r.root,
        });
        prop_assert!(hit, "root {} matches none of the planted roots", r.root);
    }
    Ok(())
}

/// Random bivariate tropical polynomial with support in `[0,4]²`.
pub fn tropical_polynomial() -> impl Strategy<Value = TropicalPolynomial> {
    prop::collection::btree_map((0i64..=4, 0i64..=4), rational(-6..=6, 1..=2), 3..=8)
        .prop_map(|m| TropicalPolynomial::bivariate(m.into_iter().map(|((i, j), c)| ([i, j], c))))
}

pub fn duality(f: &TropicalPolynomial) -> Result<(), TestCaseError> {
    let c = curve_of(f).unwrap();
    let sub = &c.subdivision;
    if sub.cells.is_empty() {
        // collinear support: parallel lines only
        prop_assert!(c.edges.is_empty());
        return Ok(());
    }
    let (interior, boundary) = sub.edges();
    prop_assert_eq!(c.vertices.len(), sub.cells.len());
    prop_assert_eq!(c.edges.len(), interior.len());
    prop_assert_eq!(c.rays.len(), boundary.len());
    for e in &c.edges {
        let d = [e.dual[1][0] - e.dual[0][0], e.dual[1][1] - e.dual[0][1]];
        prop_assert_eq!(e.dir[0] * d[0] + e.dir[1] * d[1], 0);
        prop_assert!(e.length > Q::zero());
    }
    for r in &c.rays {
        let d = [r.dual[1][0] - r.dual[0][0], r.dual[1][1] - r.dual[0][1]];
        prop_assert_eq!(r.dir[0] * d[0] + r.dir[1] * d[1], 0);
    }
    for defect in c.balancing_defects() {
        prop_assert_eq!(defect, [0, 0]);
    }
    Ok(())
}

/// Point on the curve or nearby: a vertex, an edge point, a ray point, or a free point.
pub fn membership(f: &TropicalPolynomial, pick: usize, s: &Q, free: &[Q; 2]) -> Result<(), TestCaseError> {
    let c = curve_of(f).unwrap();
    let mut candidates: Vec<[Q; 2]> = vec![free.clone()];
    for v in &c.vertices {
        candidates.push(v.clone());
    }
    for e in &c.edges {
        let (a, b) = (&c.vertices[e.v[0]], &c.vertices[e.v[1]]);
        let lam = s.clone();
        candidates.push([&a[0] + (&b[0] - &a[0]) * &lam, &a[1] + (&b[1] - &a[1]) * &lam]);
    }
    for r in &c.rays {
        let a = &c.vertices[r.v];
        let lam = s * q(3);
        candidates.push([&a[0] + q(r.dir[0]) * &lam, &a[1] + q(r.dir[1]) * &lam]);
    }
    let p = &candidates[pick % candidates.len()];
    let shifted = [&p[0] + free[0].clone() * frac(1, 97), p[1].clone()];
    for p in [p, &shifted] {
        prop_assert_eq!(f.on_hypersurface(p), c.contains_point(p), "point ({}, {})", p[0], p[1]);
    }
    Ok(())
}

pub fn j_invariance(a: &PuiseuxSeries, b: &PuiseuxSeries, change: &CoordinateChange) -> Result<(), TestCaseError> {
    let w = WeierstrassModel::family(a, b);
    let n = q(12);
    let w2 = apply_change_to(&w, change, &n).unwrap();
    let (i1, i2) = (w.invariants_to(&n).unwrap(), w2.invariants_to(&n).unwrap());
    prop_assert_eq!(i1.v_j(), i2.v_j());
    prop_assert!(i1.j.agrees_with(&i2.j));
    prop_assert!(is_minimal(&w2).unwrap());
    prop_assert_eq!(classify_reduction(&w).unwrap().kind, classify_reduction(&w2).unwrap().kind);
    Ok(())
}

pub fn family_parameters() -> impl Strategy<Value = (PuiseuxSeries, PuiseuxSeries)> {
    let sq = unit_coefficient().prop_map(|c| &c * &c);
    (sq, prop::collection::vec((exponent(1, 4), unit_coefficient()), 0..=1), exponent(1, 3), unit_coefficient())
        .prop_map(|(c, rest, e, cb)| {
            let a = PuiseuxSeries::from_terms(std::iter::once((Q::zero(), c)).chain(rest), Precision::Exact);
            (a, PuiseuxSeries::monomial(cb, e))
        })
}

pub fn unit_change() -> impl Strategy<Value = CoordinateChange> {
    (unit(), integral(), integral(), integral()).prop_map(|(u, r, s, t)| CoordinateChange::new(u, r, s, t))
}

pub fn planted_roots() -> impl Strategy<Value = Vec<PuiseuxSeries>> {
    prop::collection::vec(series(-2, 3), 1..=3)
}

/// Runs one suite with the shared configuration; `Err` carries the shrunk failure.
pub fn run_suite<S: Strategy>(
    strategy: S,
    check: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<u32, String> {
    let mut runner = TestRunner::new(config());
    runner.run(&strategy, check).map(|_| CASES).map_err(|e| e.to_string())
}

pub fn target() -> Q {
    q(8)
}
