//! Exact rational helpers shared by every module.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// The rational numbers. Coefficients, exponents and tropical coordinates all live here.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Q::new(n, d))
}

/// `p` for integers, `p/q` otherwise.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn denom_u64(x: &Q) -> u64 {
    x.denom().to_u64().expect("denominator fits in u64")
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// Exact `n`-th root of a rational, if it is rational. For even `n` the non-negative root.
pub fn nth_root_exact(x: &Q, n: u32) -> Option<Q> {
    if n == 1 {
        return Some(x.clone());
    }
    if x.is_zero() {
        return Some(Q::zero());
    }
    if x.is_negative() {
        if n.is_multiple_of(2) {
            return None;
        }
        return nth_root_exact(&-x, n).map(|r| -r);
    }
    let rn = x.numer().nth_root(n);
    let rd = x.denom().nth_root(n);
    if num_traits::pow(rn.clone(), n as usize) == *x.numer() && num_traits::pow(rd.clone(), n as usize) == *x.denom() {
        Some(Q::new(rn, rd))
    } else {
        None
    }
}

pub fn sqrt_exact(x: &Q) -> Option<Q> {
    nth_root_exact(x, 2)
}

/// Integer vector `v` scaled to the primitive lattice vector in its direction, with the
/// scale factor `lambda` such that `v = lambda * primitive`.
pub fn primitive_direction(v: &[Q]) -> Option<(Vec<i64>, Q)> {
    if v.iter().all(|c| c.is_zero()) {
        return None;
    }
    let mut l = BigInt::one();
    for c in v {
        l = l.lcm(c.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|c| (c * Q::from_integer(l.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for c in &ints {
        g = g.gcd(c);
    }
    let prim: Vec<i64> = ints.iter().map(|c| (c / &g).to_i64().expect("direction fits in i64")).collect();
    let lambda = Q::new(g, l);
    Some((prim, lambda))
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Rational roots of a polynomial with rational coefficients (index = degree), with
/// multiplicities, and the cofactor left after dividing them out.
pub fn rational_roots(coeffs: &[Q]) -> (Vec<(Q, usize)>, Vec<Q>) {
    let mut poly: Vec<Q> = coeffs.to_vec();
    while poly.len() > 1 && poly.last().is_some_and(|c| c.is_zero()) {
        poly.pop();
    }
    let mut found: Vec<(Q, usize)> = Vec::new();
    let mut zero_mult = 0;
    while poly.len() > 1 && poly[0].is_zero() {
        poly.remove(0);
        zero_mult += 1;
    }
    if zero_mult > 0 {
        found.push((Q::zero(), zero_mult));
    }
    if poly.len() <= 1 {
        return (found, poly);
    }
    match poly.len() {
        2 => {
            found.push((-&poly[0] / &poly[1], 1));
            found.sort_by(|a, b| a.0.cmp(&b.0));
            return (found, vec![poly[1].clone()]);
        }
        3 => {
            let (c, b, a) = (&poly[0], &poly[1], &poly[2]);
            let disc = b * b - Q::from_integer(4.into()) * a * c;
            if let Some(s) = sqrt_exact(&disc) {
                let two_a = a * Q::from_integer(2.into());
                let r1 = (-b - &s) / &two_a;
                let r2 = (-b + &s) / &two_a;
                if s.is_zero() {
                    found.push((r1, 2));
                } else {
                    found.push((r1, 1));
                    found.push((r2, 1));
                }
                found.sort_by(|a, b| a.0.cmp(&b.0));
                return (found, vec![a.clone()]);
            }
            return (found, poly);
        }
        _ => {}
    }
    // clear denominators
    let mut l = BigInt::one();
    for c in &poly {
        l = l.lcm(c.denom());
    }
    let ints: Vec<BigInt> = poly.iter().map(|c| (c * Q::from_integer(l.clone())).to_integer()).collect();
    let lead = ints.last().unwrap().abs();
    let tail = ints[0].abs();
    let ps = divisors(&tail);
    let qs = divisors(&lead);
    let mut candidates: BTreeSet<Q> = BTreeSet::new();
    for p in &ps {
        for d in &qs {
            let c = Q::new(p.clone(), d.clone());
            candidates.insert(-c.clone());
            candidates.insert(c);
        }
    }
    for c in candidates {
        let mut mult = 0;
        loop {
            if poly.len() <= 1 {
                break;
            }
            let (quot, rem) = synthetic_division(&poly, &c);
            if !rem.is_zero() {
                break;
            }
            poly = quot;
            mult += 1;
        }
        if mult > 0 {
            found.push((c, mult));
        }
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    (found, poly)
}

/// Divides by `(z - c)`; returns quotient and remainder.
pub fn synthetic_division(poly: &[Q], c: &Q) -> (Vec<Q>, Q) {
    let n = poly.len();
    let mut quot = vec![Q::zero(); n - 1];
    let mut acc = Q::zero();
    for i in (0..n).rev() {
        acc = &acc * c + &poly[i];
        if i > 0 {
            quot[i - 1] = acc.clone();
        }
    }
    (quot, acc)
}

// Positive divisors of n (n > 0) by trial-division factorization.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.abs();
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut p = BigInt::from(2u32);
    let limit = BigInt::from(2_000_000u64);
    while &p * &p <= n && p <= limit {
        let mut e = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            factors.push((p.clone(), e));
        }
        p += 1;
    }
    if n > BigInt::one() {
        // either prime or a product of primes above the trial bound
        factors.push((n, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    divs
}
