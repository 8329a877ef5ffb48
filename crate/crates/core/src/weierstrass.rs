//! Weierstrass models over the Puiseux field: invariants, coordinate changes,
//! minimal models and reduction.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde_json::json;
use thiserror::Error;

use crate::literal::{offset_error, parse_series, split_bracket_list, ParseError};
use crate::newton::UnivariatePolynomial;
use crate::puiseux::{PuiseuxSeries, SeriesError, Valuation, DEFAULT_PRECISION};
use crate::rational::{fmt_q, q, rational_roots, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeierstrassError {
    #[error("singular model: discriminant is zero")]
    SingularModel,
    #[error("model is not integral: {0}")]
    NonIntegralInput(String),
    #[error("model is not minimal")]
    NotMinimal,
    #[error("coordinate change has u = 0")]
    ZeroScaling,
    #[error("point is not on the curve: residual {0}")]
    NotOnCurve(String),
    #[error("identity violated: {0}")]
    IdentityViolated(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

type Result<T> = std::result::Result<T, WeierstrassError>;

fn default_target() -> Q {
    q(DEFAULT_PRECISION)
}

/// `y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeierstrassModel {
    pub a1: PuiseuxSeries,
    pub a2: PuiseuxSeries,
    pub a3: PuiseuxSeries,
    pub a4: PuiseuxSeries,
    pub a6: PuiseuxSeries,
}

impl WeierstrassModel {
    pub fn new(a1: PuiseuxSeries, a2: PuiseuxSeries, a3: PuiseuxSeries, a4: PuiseuxSeries, a6: PuiseuxSeries) -> Self {
        WeierstrassModel { a1, a2, a3, a4, a6 }
    }

    /// `y² = x³ + A·x + B`.
    pub fn short(a: PuiseuxSeries, b: PuiseuxSeries) -> Self {
        let z = PuiseuxSeries::zero;
        Self::new(z(), z(), z(), a, b)
    }

    /// `y² = x³ + a·(x − b)²`.
    pub fn family(a: &PuiseuxSeries, b: &PuiseuxSeries) -> Self {
        let z = PuiseuxSeries::zero;
        let a4 = (a * b).scale(&q(-2));
        let a6 = &(a * b) * b;
        Self::new(z(), a.clone(), z(), a4, a6)
    }

    pub fn coefficients(&self) -> [&PuiseuxSeries; 5] {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
    }

    /// Parses `[a1, a2, a3, a4, a6]`.
    pub fn parse(src: &str) -> std::result::Result<Self, ParseError> {
        let parts = split_bracket_list(src)?;
        if parts.len() != 5 {
            return Err(ParseError { pos: 0, message: format!("expected 5 coefficients, found {}", parts.len()) });
        }
        let mut a = Vec::with_capacity(5);
        for (off, text) in parts {
            a.push(parse_series(text).map_err(|e| offset_error(e, off))?);
        }
        let mut it = a.into_iter();
        let mut next = || it.next().unwrap();
        Ok(Self::new(next(), next(), next(), next(), next()))
    }

    pub fn is_integral(&self) -> bool {
        self.coefficients().iter().all(|c| match c.valuation_lower_bound() {
            Valuation::Finite(v) => !v.is_negative(),
            Valuation::Infinite => true,
        })
    }

    pub fn invariants(&self) -> Result<StandardInvariants> {
        self.invariants_to(&default_target())
    }

    /// Invariants with `j` expanded to relative precision `target`.
    pub fn invariants_to(&self, target: &Q) -> Result<StandardInvariants> {
        let [b2, b4, b6, b8, c4, c6, delta] = self.polynomial_invariants();
        if delta.is_exact_zero() {
            return Err(WeierstrassError::SingularModel);
        }
        let vd = delta.order()?;
        let c4_cubed = &(&c4 * &c4) * &c4;
        let j = c4_cubed.div_series(&delta, &(target - &vd))?;
        let inv = StandardInvariants { b2, b4, b6, b8, c4, c6, delta, j };
        inv.check()?;
        Ok(inv)
    }

    // b2, b4, b6, b8, c4, c6, Δ
    fn polynomial_invariants(&self) -> [PuiseuxSeries; 7] {
        let (a1, a2, a3, a4, a6) = (&self.a1, &self.a2, &self.a3, &self.a4, &self.a6);
        let b2 = &(a1 * a1) + &a2.scale(&q(4));
        let b4 = &a4.scale(&q(2)) + &(a1 * a3);
        let b6 = &(a3 * a3) + &a6.scale(&q(4));
        let b8 = (&(&b2 * &b6) - &(&b4 * &b4)).scale(&Q::new(1.into(), 4.into()));
        let c4 = &(&b2 * &b2) - &b4.scale(&q(24));
        let c6 = &(&(&(&b2 * &b2) * &b2).scale(&q(-1)) + &(&b2 * &b4).scale(&q(36))) - &b6.scale(&q(216));
        let delta = &(&(&(&(&b2 * &b2) * &b8).scale(&q(-1)) - &(&(&b4 * &b4) * &b4).scale(&q(8)))
            - &(&b6 * &b6).scale(&q(27)))
            + &(&(&b2 * &b4) * &b6).scale(&q(9));
        [b2, b4, b6, b8, c4, c6, delta]
    }

    /// `(c4, c6, Δ)` without expanding `j`.
    fn discriminant_data(&self) -> Result<[PuiseuxSeries; 3]> {
        let [_, _, _, _, c4, c6, delta] = self.polynomial_invariants();
        if delta.is_exact_zero() {
            return Err(WeierstrassError::SingularModel);
        }
        Ok([c4, c6, delta])
    }

    pub fn j_invariant(&self) -> Result<PuiseuxSeries> {
        Ok(self.invariants()?.j)
    }

    /// Left-hand side minus right-hand side at the projective point `[X : Y : Z]`.
    pub fn residual(&self, p: &ProjectivePoint) -> PuiseuxSeries {
        let (x, y, z) = (&p.x, &p.y, &p.z);
        let lhs = &(&(&(y * y) * z) + &(&(&self.a1 * x) * &(y * z))) + &(&(&self.a3 * y) * &(z * z));
        let rhs = &(&(&(x * x) * x) + &(&(&self.a2 * x) * &(x * z)))
            + &(&(&(&self.a4 * x) * &(z * z)) + &(&self.a6 * &(&(z * z) * z)));
        &lhs - &rhs
    }

    /// `ψ₃ = 3x⁴ + b2·x³ + 3b4·x² + 3b6·x + b8`.
    pub fn division_polynomial_3(&self) -> Result<UnivariatePolynomial> {
        let i = self.invariants()?;
        Ok(UnivariatePolynomial::new(vec![
            i.b8.clone(),
            i.b6.scale(&q(3)),
            i.b4.scale(&q(3)),
            i.b2.clone(),
            PuiseuxSeries::constant(q(3)),
        ]))
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!(self.coefficients().iter().map(|c| c.to_json()).collect::<Vec<_>>())
    }
}

impl fmt::Display for WeierstrassModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}, {}, {}]", self.a1, self.a2, self.a3, self.a4, self.a6)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardInvariants {
    pub b2: PuiseuxSeries,
    pub b4: PuiseuxSeries,
    pub b6: PuiseuxSeries,
    pub b8: PuiseuxSeries,
    pub c4: PuiseuxSeries,
    pub c6: PuiseuxSeries,
    pub delta: PuiseuxSeries,
    pub j: PuiseuxSeries,
}

impl StandardInvariants {
    fn check(&self) -> Result<()> {
        let c4_cubed = &(&self.c4 * &self.c4) * &self.c4;
        let lhs = &c4_cubed - &(&self.c6 * &self.c6);
        let diff = &lhs - &self.delta.scale(&q(1728));
        if diff.num_terms() != 0 {
            return Err(WeierstrassError::IdentityViolated(format!("c4^3 - c6^2 - 1728*Delta = {diff}")));
        }
        let diff = &(&self.j * &self.delta) - &c4_cubed;
        if diff.num_terms() != 0 {
            return Err(WeierstrassError::IdentityViolated(format!("j*Delta - c4^3 = {diff}")));
        }
        Ok(())
    }

    pub fn v_delta(&self) -> Q {
        self.delta.order().expect("nonzero discriminant")
    }

    /// `v(j)`; infinite when `c4 = 0`.
    pub fn v_j(&self) -> Valuation {
        if self.c4.is_exact_zero() {
            return Valuation::Infinite;
        }
        let v4 = self.c4.order().expect("c4 nonzero");
        Valuation::Finite(v4 * q(3) - self.v_delta())
    }
}

/// `x = u²x′ + r`, `y = u³y′ + u²s·x′ + t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinateChange {
    pub u: PuiseuxSeries,
    pub r: PuiseuxSeries,
    pub s: PuiseuxSeries,
    pub t: PuiseuxSeries,
}

impl CoordinateChange {
    pub fn identity() -> Self {
        Self::new(PuiseuxSeries::one(), PuiseuxSeries::zero(), PuiseuxSeries::zero(), PuiseuxSeries::zero())
    }

    pub fn new(u: PuiseuxSeries, r: PuiseuxSeries, s: PuiseuxSeries, t: PuiseuxSeries) -> Self {
        CoordinateChange { u, r, s, t }
    }

    pub fn scaling(u: PuiseuxSeries) -> Self {
        Self::new(u, PuiseuxSeries::zero(), PuiseuxSeries::zero(), PuiseuxSeries::zero())
    }

    pub fn translation(r: PuiseuxSeries) -> Self {
        Self::new(PuiseuxSeries::one(), r, PuiseuxSeries::zero(), PuiseuxSeries::zero())
    }

    pub fn is_identity(&self) -> bool {
        self.u == PuiseuxSeries::one() && self.r.is_exact_zero() && self.s.is_exact_zero() && self.t.is_exact_zero()
    }

    /// Apply `self` first, then `then`.
    pub fn compose(&self, then: &CoordinateChange) -> CoordinateChange {
        let u1 = &self.u;
        let u1sq = u1 * u1;
        CoordinateChange {
            u: u1 * &then.u,
            r: &(&u1sq * &then.r) + &self.r,
            s: &self.s + &(u1 * &then.s),
            t: &(&self.t + &(&(&u1sq * &self.s) * &then.r)) + &(&(&u1sq * u1) * &then.t),
        }
    }

    /// Maps a point in the old coordinates to the new ones.
    pub fn pull_point(&self, p: &ProjectivePoint, target: &Q) -> Result<ProjectivePoint> {
        let ui = self.u.invert(target)?;
        let ui2 = &ui * &ui;
        let x = &(&p.x - &(&self.r * &p.z)) * &ui2;
        let sx = &(&self.s * &x) * &(&self.u * &self.u);
        let y = &(&(&p.y - &sx) - &(&self.t * &p.z)) * &(&ui2 * &ui);
        Ok(ProjectivePoint::new(x, y, p.z.clone()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({"u": self.u.to_json(), "r": self.r.to_json(), "s": self.s.to_json(), "t": self.t.to_json()})
    }
}

impl fmt::Display for CoordinateChange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u={}, r={}, s={}, t={}", self.u, self.r, self.s, self.t)
    }
}

/// The model in the new coordinates.
pub fn apply_change(w: &WeierstrassModel, c: &CoordinateChange) -> Result<WeierstrassModel> {
    apply_change_to(w, c, &default_target())
}

pub fn apply_change_to(w: &WeierstrassModel, c: &CoordinateChange, target: &Q) -> Result<WeierstrassModel> {
    if c.u.is_exact_zero() {
        return Err(WeierstrassError::ZeroScaling);
    }
    let (u, r, s, t) = (&c.u, &c.r, &c.s, &c.t);
    let (a1, a2, a3, a4, a6) = (&w.a1, &w.a2, &w.a3, &w.a4, &w.a6);
    let ui = u.invert(target)?;
    let n1 = a1 + &s.scale(&q(2));
    let n2 = &(&(a2 - &(s * a1)) + &r.scale(&q(3))) - &(s * s);
    let n3 = &(a3 + &(r * a1)) + &t.scale(&q(2));
    let n4 = &(&(&(&(a4 - &(s * a3)) + &(r * a2).scale(&q(2))) - &(&(t + &(r * s)) * a1)) + &(r * r).scale(&q(3)))
        - &(s * t).scale(&q(2));
    let n6 =
        &(&(&(&(&(a6 + &(r * a4)) + &(&(r * r) * a2)) + &(&(r * r) * r)) - &(t * a3)) - &(t * t)) - &(&(r * t) * a1);
    let p = |k: u32| ui.pow(k);
    let out = WeierstrassModel::new(&n1 * &p(1), &n2 * &p(2), &n3 * &p(3), &n4 * &p(4), &n6 * &p(6));
    let d_old = w.invariants_to(target)?.delta;
    let d_new = out.invariants_to(target)?.delta;
    let diff = &(&u.pow(12) * &d_new) - &d_old;
    if diff.num_terms() != 0 {
        return Err(WeierstrassError::IdentityViolated(format!("u^12*Delta' - Delta = {diff}")));
    }
    Ok(out)
}

fn integral_or_err(w: &WeierstrassModel) -> Result<()> {
    if !w.is_integral() {
        return Err(WeierstrassError::NonIntegralInput(w.to_string()));
    }
    Ok(())
}

fn v_or_inf(s: &PuiseuxSeries) -> Result<Valuation> {
    Ok(s.valuation()?)
}

/// `min{v(c4), v(c6)} = 0` for an integral model.
pub fn is_minimal(w: &WeierstrassModel) -> Result<bool> {
    integral_or_err(w)?;
    let [c4, c6, _] = w.discriminant_data()?;
    let zero = Valuation::Finite(Q::zero());
    Ok(v_or_inf(&c4)? == zero || v_or_inf(&c6)? == zero)
}

/// Short form followed by the scaling `u = t^m`, `m = min{v(c4)/4, v(c6)/6}`.
pub fn minimalize(w: &WeierstrassModel) -> Result<(WeierstrassModel, CoordinateChange)> {
    integral_or_err(w)?;
    if is_minimal(w)? {
        return Ok((w.clone(), CoordinateChange::identity()));
    }
    let [b2, _, _, _, c4, c6, _] = w.polynomial_invariants();
    let half = Q::new(1.into(), 2.into());
    let r = b2.scale(&Q::new((-1).into(), 12.into()));
    let s = w.a1.scale(&-half.clone());
    let t = (&w.a3 + &(&r * &w.a1)).scale(&-half);
    let short = CoordinateChange::new(PuiseuxSeries::one(), r, s, t);
    let mut m: Option<Q> = None;
    for (c, d) in [(&c4, 4), (&c6, 6)] {
        if let Valuation::Finite(v) = c.valuation()? {
            let cand = v / q(d);
            m = Some(match m {
                Some(x) if x <= cand => x,
                _ => cand,
            });
        }
    }
    let m = m.expect("c4 and c6 cannot both vanish on a nonsingular model");
    let change = short.compose(&CoordinateChange::scaling(PuiseuxSeries::monomial(Q::one(), m)));
    let out = apply_change(w, &change)?;
    integral_or_err(&out)?;
    if !is_minimal(&out)? {
        return Err(WeierstrassError::IdentityViolated(format!("minimalized model {out} is not minimal")));
    }
    Ok((out, change))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionKind {
    Good,
    Multiplicative,
    Additive,
}

impl ReductionKind {
    pub fn label(&self) -> &'static str {
        match self {
            ReductionKind::Good => "good",
            ReductionKind::Multiplicative => "mult",
            ReductionKind::Additive => "add",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub kind: ReductionKind,
    pub singular_point: Option<[Q; 2]>,
}

fn residue(s: &PuiseuxSeries) -> Result<Q> {
    Ok(s.residue()?.0)
}

/// Reduced coefficients `ā1..ā6`.
pub fn reduced_coefficients(w: &WeierstrassModel) -> Result<[Q; 5]> {
    Ok([residue(&w.a1)?, residue(&w.a2)?, residue(&w.a3)?, residue(&w.a4)?, residue(&w.a6)?])
}

fn reduced_residual(a: &[Q; 5], p: &[Q; 3]) -> Q {
    let (x, y, z) = (&p[0], &p[1], &p[2]);
    y * y * z + &a[0] * x * y * z + &a[2] * y * z * z
        - (x * x * x + &a[1] * x * x * z + &a[3] * x * z * z + &a[4] * z * z * z)
}

// Double root of the completed-square cubic of the reduced curve.
fn singular_point(a: &[Q; 5]) -> Option<[Q; 2]> {
    let [a1, a2, a3, a4, a6] = a;
    let b2 = a1 * a1 + q(4) * a2;
    let b4 = q(2) * a4 + a1 * a3;
    let b6 = a3 * a3 + q(4) * a6;
    let g = [b6 / q(4), b4 / q(2), b2 / q(4), Q::one()];
    let (roots, _) = rational_roots(&g);
    let (x, _) = roots.into_iter().find(|(_, m)| *m >= 2)?;
    let y = -(a1 * &x + a3) / q(2);
    Some([x, y])
}

/// Good, multiplicative or additive, with the singular point of the reduction.
pub fn classify_reduction(w: &WeierstrassModel) -> Result<Reduction> {
    if !is_minimal(w)? {
        return Err(WeierstrassError::NotMinimal);
    }
    let [c4, _, delta] = w.discriminant_data()?;
    if delta.order()?.is_zero() {
        return Ok(Reduction { kind: ReductionKind::Good, singular_point: None });
    }
    let abar = reduced_coefficients(w)?;
    let sp = singular_point(&abar);
    let kind = if residue(&c4)?.is_zero() { ReductionKind::Additive } else { ReductionKind::Multiplicative };
    if let Some(p) = &sp {
        debug_assert!(reduced_residual(&abar, &[p[0].clone(), p[1].clone(), Q::one()]).is_zero());
    }
    Ok(Reduction { kind, singular_point: sp })
}

/// Good exactly when `v(j) ≥ 0`, multiplicative exactly when `v(j) < 0`, never additive.
pub fn reduction_consistency(w: &WeierstrassModel) -> Result<bool> {
    let red = classify_reduction(w)?;
    let vj = w.invariants()?.v_j();
    let nonneg = match &vj {
        Valuation::Finite(v) => !v.is_negative(),
        Valuation::Infinite => true,
    };
    Ok((red.kind == ReductionKind::Good) == nonneg
        && (red.kind == ReductionKind::Multiplicative) == !nonneg
        && red.kind != ReductionKind::Additive)
}

/// `[X : Y : Z]`, not all zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectivePoint {
    pub x: PuiseuxSeries,
    pub y: PuiseuxSeries,
    pub z: PuiseuxSeries,
}

impl ProjectivePoint {
    pub fn new(x: PuiseuxSeries, y: PuiseuxSeries, z: PuiseuxSeries) -> Self {
        assert!(
            !(x.is_exact_zero() && y.is_exact_zero() && z.is_exact_zero()),
            "projective point with all coordinates zero"
        );
        ProjectivePoint { x, y, z }
    }

    pub fn affine(x: PuiseuxSeries, y: PuiseuxSeries) -> Self {
        Self::new(x, y, PuiseuxSeries::one())
    }

    pub fn identity() -> Self {
        Self::new(PuiseuxSeries::zero(), PuiseuxSeries::one(), PuiseuxSeries::zero())
    }

    /// Scaled by a power of `t` so the least coordinate valuation is 0.
    pub fn normalized(&self) -> Result<Self> {
        let mut m: Option<Q> = None;
        for c in [&self.x, &self.y, &self.z] {
            if let Valuation::Finite(v) = c.valuation()? {
                m = Some(match m {
                    Some(x) if x <= v => x,
                    _ => v,
                });
            }
        }
        let m = m.expect("some coordinate is nonzero");
        let shift = -m;
        Ok(Self::new(self.x.shift(&shift), self.y.shift(&shift), self.z.shift(&shift)))
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!([self.x.to_json(), self.y.to_json(), self.z.to_json()])
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} : {} : {}]", self.x, self.y, self.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    Identity,
    Singular,
    Smooth,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedPoint {
    /// `[x : y : 1]`, or `[0 : 1 : 0]` for the identity.
    pub coords: [Q; 3],
    pub class: PointClass,
}

/// Reduction of a point of a minimal model to the special fibre.
pub fn reduce_point(p: &ProjectivePoint, w: &WeierstrassModel) -> Result<ReducedPoint> {
    let res = w.residual(p);
    if res.num_terms() != 0 {
        return Err(WeierstrassError::NotOnCurve(res.to_string()));
    }
    let n = p.normalized()?;
    let (x, y, z) = (residue(&n.x)?, residue(&n.y)?, residue(&n.z)?);
    let coords = if z.is_zero() { [&x / &y, Q::one(), Q::zero()] } else { [&x / &z, &y / &z, Q::one()] };
    let abar = reduced_coefficients(w)?;
    assert!(reduced_residual(&abar, &coords).is_zero(), "reduced point off the reduced curve");
    let class = if coords[2].is_zero() {
        PointClass::Identity
    } else {
        let sp = if w.invariants()?.v_delta().is_zero() { None } else { singular_point(&abar) };
        match sp {
            Some(s) if s[0] == coords[0] && s[1] == coords[1] => PointClass::Singular,
            _ => PointClass::Smooth,
        }
    };
    Ok(ReducedPoint { coords, class })
}

/// Summary of invariants, minimal model and reduction type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Analysis {
    pub input: WeierstrassModel,
    pub input_minimal: bool,
    pub v_delta_input: Q,
    pub minimal_model: WeierstrassModel,
    pub change: CoordinateChange,
    pub v_delta: Q,
    pub v_j: Valuation,
    pub reduction: Reduction,
    pub consistent: bool,
}

pub fn analyze(w: &WeierstrassModel) -> Result<Analysis> {
    let inv = w.invariants()?;
    let input_minimal = is_minimal(w)?;
    let (m, change) = minimalize(w)?;
    let mi = m.invariants()?;
    let reduction = classify_reduction(&m)?;
    Ok(Analysis {
        input: w.clone(),
        input_minimal,
        v_delta_input: inv.v_delta(),
        v_delta: mi.v_delta(),
        v_j: inv.v_j(),
        consistent: reduction_consistency(&m)?,
        minimal_model: m,
        change,
        reduction,
    })
}

pub fn valuation_text(v: &Valuation) -> String {
    match v {
        Valuation::Finite(q) => fmt_q(q),
        Valuation::Infinite => "inf".into(),
    }
}

impl Analysis {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "minimal": self.input_minimal,
            "reduction": self.reduction.kind.label(),
            "vDelta": fmt_q(&self.v_delta),
            "vj": valuation_text(&self.v_j),
            "singular_point": self.reduction.singular_point.as_ref().map(|p| json!([fmt_q(&p[0]), fmt_q(&p[1])])),
            "input": self.input.to_string(),
            "vDelta_input": fmt_q(&self.v_delta_input),
            "minimal_model": self.minimal_model.to_string(),
            "change": {
                "u": self.change.u.to_string(),
                "r": self.change.r.to_string(),
                "s": self.change.s.to_string(),
                "t": self.change.t.to_string(),
            },
            "consistent": self.consistent,
        })
    }
}
