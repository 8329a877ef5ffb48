//! Certification of numerically faithful tropicalizations for elliptic curves with
//! multiplicative reduction, through the family `y² = x³ + a(x − b)²` and its plane model
//! `f²g + 2a′fg − fg² − 2a′b = 0`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use thiserror::Error;

use crate::curve::{curve_of, CurveError, CycleReport, TropicalPlaneCurve};
use crate::newton::{order_roots, roots, NewtonError};
use crate::puiseux::{PuiseuxSeries, SeriesError, Valuation, DEFAULT_PRECISION};
use crate::rational::{fmt_q, frac, q, Q};
use crate::tropical::{LaurentPolynomial, TropicalError, TropicalPolynomial};
use crate::weierstrass::{
    apply_change_to, classify_reduction, is_minimal, minimalize, reduce_point, valuation_text, CoordinateChange,
    PointClass, ProjectivePoint, Reduction, ReductionKind, WeierstrassError, WeierstrassModel,
};

/// Doublings of the working precision tried before giving up.
pub const MAX_ATTEMPTS: usize = 4;

/// The defining fractions of the embedding coordinates.
pub const FRACTIONS: [(&str, &str); 2] = [("f", "x^2/(y + a'*(x - b))"), ("g", "x^2/(y - a'*(x - b))")];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Input,
    Invariants,
    Minimalize,
    Reduction,
    Torsion,
    Family,
    Embedding,
    Tropicalize,
    Curve,
    Cycle,
    JInvariant,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Input => "input",
            Stage::Invariants => "invariants",
            Stage::Minimalize => "minimalize",
            Stage::Reduction => "reduction",
            Stage::Torsion => "torsion",
            Stage::Family => "family",
            Stage::Embedding => "embedding",
            Stage::Tropicalize => "tropicalize",
            Stage::Curve => "curve",
            Stage::Cycle => "cycle",
            Stage::JInvariant => "j-invariant",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FaithfulError {
    #[error("{stage}: {source}")]
    Weierstrass { stage: Stage, source: WeierstrassError },
    #[error("{stage}: {source}")]
    Newton { stage: Stage, source: NewtonError },
    #[error("{stage}: {source}")]
    Series { stage: Stage, source: SeriesError },
    #[error("{stage}: {source}")]
    Tropical { stage: Stage, source: TropicalError },
    #[error("{stage}: {source}")]
    Curve { stage: Stage, source: CurveError },
    #[error("torsion: every qualifying root of the 3-division polynomial needs irrational residues")]
    NoRationalBranch,
    #[error("{stage}: precision exhausted: {detail}")]
    PrecisionExhausted { stage: Stage, detail: String },
    #[error("family: discriminant a4^2 - 4*a2*a6 = {0} of the quadratic part does not vanish")]
    DiscriminantNotZero(String),
    #[error("family: {0}")]
    InvalidFamily(String),
    #[error("{stage}: check failed: {detail}")]
    CheckFailed { stage: Stage, detail: String },
}

fn series_precision_issue(e: &SeriesError) -> bool {
    matches!(e, SeriesError::IndeterminateValuation(_))
}

impl FaithfulError {
    /// True when a higher working precision might help.
    pub fn is_precision_issue(&self) -> bool {
        match self {
            FaithfulError::PrecisionExhausted { .. } => true,
            FaithfulError::Series { source, .. } => series_precision_issue(source),
            FaithfulError::Newton { source, .. } => match source {
                NewtonError::PrecisionExhausted(_) => true,
                NewtonError::Series(e) => series_precision_issue(e),
                _ => false,
            },
            FaithfulError::Weierstrass { source: WeierstrassError::Series(e), .. } => series_precision_issue(e),
            FaithfulError::Tropical { source: TropicalError::Series(e), .. } => series_precision_issue(e),
            _ => false,
        }
    }

    pub fn stage(&self) -> Stage {
        match self {
            FaithfulError::Weierstrass { stage, .. }
            | FaithfulError::Newton { stage, .. }
            | FaithfulError::Series { stage, .. }
            | FaithfulError::Tropical { stage, .. }
            | FaithfulError::Curve { stage, .. }
            | FaithfulError::PrecisionExhausted { stage, .. }
            | FaithfulError::CheckFailed { stage, .. } => *stage,
            FaithfulError::NoRationalBranch => Stage::Torsion,
            FaithfulError::DiscriminantNotZero(_) | FaithfulError::InvalidFamily(_) => Stage::Family,
        }
    }
}

type Result<T> = std::result::Result<T, FaithfulError>;

trait At<T> {
    fn at(self, stage: Stage) -> Result<T>;
}

macro_rules! at_impl {
    ($err:ty, $variant:ident) => {
        impl<T> At<T> for std::result::Result<T, $err> {
            fn at(self, stage: Stage) -> Result<T> {
                self.map_err(|source| FaithfulError::$variant { stage, source })
            }
        }
    };
}

at_impl!(WeierstrassError, Weierstrass);
at_impl!(NewtonError, Newton);
at_impl!(SeriesError, Series);
at_impl!(TropicalError, Tropical);
at_impl!(CurveError, Curve);

fn check(ok: bool, stage: Stage, detail: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(FaithfulError::CheckFailed { stage, detail: detail() })
    }
}

fn vanishes(s: &PuiseuxSeries) -> bool {
    s.num_terms() == 0
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Provenance {
    UserSupplied,
    /// `shift` maps `model` to the family form; `point` is the torsion point on `model`.
    DerivedFrom {
        model: WeierstrassModel,
        point: ProjectivePoint,
        shift: CoordinateChange,
    },
}

/// `y² = x³ + a(x − b)²` with `v(a) = 0`, `v(b) > 0` and `a_sqrt² = a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyForm {
    pub a: PuiseuxSeries,
    pub a_sqrt: PuiseuxSeries,
    pub b: PuiseuxSeries,
    pub provenance: Provenance,
}

impl FamilyForm {
    pub fn new(a: PuiseuxSeries, b: PuiseuxSeries, target: &Q, provenance: Provenance) -> Result<Self> {
        match a.valuation().at(Stage::Family)? {
            Valuation::Finite(v) if v.is_zero() => {}
            v => return Err(FaithfulError::InvalidFamily(format!("v(a) = {} must be 0", valuation_text(&v)))),
        }
        match b.valuation().at(Stage::Family)? {
            Valuation::Finite(v) if v.is_positive() => {}
            v => return Err(FaithfulError::InvalidFamily(format!("v(b) = {} must be positive", valuation_text(&v)))),
        }
        let a_sqrt = a.sqrt(target).at(Stage::Family)?;
        Ok(FamilyForm { a, a_sqrt, b, provenance })
    }

    pub fn user(a: PuiseuxSeries, b: PuiseuxSeries, target: &Q) -> Result<Self> {
        Self::new(a, b, target, Provenance::UserSupplied)
    }

    pub fn model(&self) -> WeierstrassModel {
        WeierstrassModel::family(&self.a, &self.b)
    }

    /// `P = (0, a′b)`.
    pub fn point(&self) -> ProjectivePoint {
        ProjectivePoint::affine(PuiseuxSeries::zero(), &self.a_sqrt * &self.b)
    }

    pub fn v_b(&self) -> Q {
        self.b.order().expect("validated on construction")
    }

    /// `j = −256·a(a + 6b)³ / (4ab³ + 27b⁴)`.
    pub fn j_from_formula(&self, target: &Q) -> Result<PuiseuxSeries> {
        let (a, b) = (&self.a, &self.b);
        let s = a + &b.scale(&q(6));
        let num = (a * &(&(&s * &s) * &s)).scale(&q(-256));
        let b3 = &(b * b) * b;
        let den = &(a * &b3).scale(&q(4)) + &(&b3 * b).scale(&q(27));
        let vd = den.order().at(Stage::JInvariant)?;
        num.div_series(&den, &(target - &vd)).at(Stage::JInvariant)
    }

    /// The embedding coordinates `(f, g)` of an affine point `(x, y)` with `x ≠ 0`.
    pub fn embed(&self, x: &PuiseuxSeries, y: &PuiseuxSeries, target: &Q) -> Result<(PuiseuxSeries, PuiseuxSeries)> {
        let lin = &self.a_sqrt * &(x - &self.b);
        let xi = x.invert(target).at(Stage::Embedding)?;
        Ok((&(y - &lin) * &xi, &(y + &lin) * &xi))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let provenance = match &self.provenance {
            Provenance::UserSupplied => json!("user"),
            Provenance::DerivedFrom { model, point, shift } => json!({
                "model": model.to_json(),
                "point": point.to_json(),
                "shift": shift.to_json(),
            }),
        };
        json!({
            "a": self.a.to_json(),
            "a_sqrt": self.a_sqrt.to_json(),
            "b": self.b.to_json(),
            "v_b": fmt_q(&self.v_b()),
            "provenance": provenance,
        })
    }
}

fn xy(vars: &[&str], terms: Vec<([i64; 2], PuiseuxSeries)>) -> LaurentPolynomial {
    let mut map: BTreeMap<Vec<i64>, PuiseuxSeries> = BTreeMap::new();
    for (e, c) in terms {
        let slot = map.entry(e.to_vec()).or_insert_with(PuiseuxSeries::zero);
        *slot = &*slot + &c;
    }
    LaurentPolynomial::new(vars.iter().map(|s| s.to_string()).collect(), map)
}

/// `f²g + 2a′fg − fg² − 2a′b`.
pub fn embedding_equation(fam: &FamilyForm) -> LaurentPolynomial {
    let one = PuiseuxSeries::one;
    xy(
        &["f", "g"],
        vec![
            ([2, 1], one()),
            ([1, 1], fam.a_sqrt.scale(&q(2))),
            ([1, 2], -one()),
            ([0, 0], (&fam.a_sqrt * &fam.b).scale(&q(-2))),
        ],
    )
}

/// Checks `(y − a′(x−b))(y + a′(x−b)) − (y² − x³ − a(x−b)²) = x³` coefficientwise.
pub fn inflection_certificate(fam: &FamilyForm) -> bool {
    let (a, ap, b) = (&fam.a, &fam.a_sqrt, &fam.b);
    let one = PuiseuxSeries::one;
    let apb = ap * b;
    let l1 = xy(&["x", "y"], vec![([0, 1], one()), ([1, 0], -ap), ([0, 0], apb.clone())]);
    let l2 = xy(&["x", "y"], vec![([0, 1], one()), ([1, 0], ap.clone()), ([0, 0], -&apb)]);
    let prod = l1.mul(&l2).expect("same variables");
    // y² − x³ − a(x − b)²
    let curve = xy(
        &["x", "y"],
        vec![
            ([0, 2], one()),
            ([3, 0], -one()),
            ([2, 0], -a),
            ([1, 0], (a * b).scale(&q(2))),
            ([0, 0], -&(&(a * b) * b)),
        ],
    );
    let neg_curve = xy(&["x", "y"], curve.terms().iter().map(|(e, c)| ([e[0], e[1]], -c)).collect());
    let diff = prod.add(&neg_curve).expect("same variables");
    diff.terms().iter().all(|(e, c)| if e == &vec![3, 0] { vanishes(&(c - &one())) } else { vanishes(c) })
}

fn cmp_points(p: &ProjectivePoint, r: &ProjectivePoint) -> Ordering {
    order_roots(&p.x, &r.x).then_with(|| order_roots(&p.y, &r.y))
}

/// A point of order 3 on a minimal model with multiplicative reduction that reduces to the node.
pub fn find_three_torsion(w: &WeierstrassModel, target: &Q) -> Result<ProjectivePoint> {
    let red = classify_reduction(w).at(Stage::Reduction)?;
    check(red.kind == ReductionKind::Multiplicative, Stage::Torsion, || {
        format!("reduction is {}, not multiplicative", red.kind.label())
    })?;
    let node = red.singular_point.clone().ok_or_else(|| FaithfulError::CheckFailed {
        stage: Stage::Torsion,
        detail: "reduced curve has no rational singular point".into(),
    })?;
    let psi = w.division_polynomial_3().at(Stage::Torsion)?;
    let found = roots(&psi, target).at(Stage::Torsion)?;
    let inv = w.invariants_to(target).at(Stage::Torsion)?;
    let mut irrational = found
        .unresolved
        .iter()
        .any(|u| u.valuation.is_positive() && u.prefix.residue().map(|r| r.0 == node[0]).unwrap_or(false));
    let mut candidates: Vec<ProjectivePoint> = Vec::new();
    for r in &found.roots {
        let x = r.truncated();
        match x.valuation_lower_bound() {
            Valuation::Finite(v) if v.is_negative() => continue,
            _ => {}
        }
        if x.residue().map(|r| r.0 != node[0]).unwrap_or(false) {
            continue;
        }
        // (2y + a1·x + a3)² = 4x³ + b2·x² + 2b4·x + b6
        let rhs =
            &(&(&(&(&x * &x) * &x).scale(&q(4)) + &(&inv.b2 * &(&x * &x))) + &(&inv.b4 * &x).scale(&q(2))) + &inv.b6;
        let lin = &(&w.a1 * &x) + &w.a3;
        let s = match rhs.sqrt(target) {
            Ok(s) => s,
            Err(SeriesError::NonSquareLeadingCoefficient(_)) => {
                irrational = true;
                continue;
            }
            Err(e) => return Err(e).at(Stage::Torsion),
        };
        let half = frac(1, 2);
        let ys = if s.is_exact_zero() { vec![s.clone()] } else { vec![s.clone(), -&s] };
        for root in ys {
            let y = (&root - &lin).scale(&half);
            let p = ProjectivePoint::affine(x.clone(), y);
            match reduce_point(&p, w) {
                Ok(rp) if rp.class == PointClass::Singular => candidates.push(p),
                Ok(_) => {}
                Err(WeierstrassError::NotOnCurve(res)) => {
                    return Err(FaithfulError::PrecisionExhausted {
                        stage: Stage::Torsion,
                        detail: format!("torsion candidate residual {res}"),
                    })
                }
                Err(e) => return Err(e).at(Stage::Torsion),
            }
        }
    }
    candidates.sort_by(cmp_points);
    match candidates.into_iter().next() {
        Some(p) => Ok(p),
        None if irrational => Err(FaithfulError::NoRationalBranch),
        None => Err(FaithfulError::CheckFailed {
            stage: Stage::Torsion,
            detail: "no root of the 3-division polynomial reduces to the node".into(),
        }),
    }
}

/// Moves `p` to `x = 0`, completes the square, and reads off `a`, `b` and `a′`.
/// Returns the family with `P = (0, a′b)`; the provenance records the (possibly negated)
/// torsion point on `w`.
pub fn shift_to_family(w: &WeierstrassModel, p: &ProjectivePoint, target: &Q) -> Result<FamilyForm> {
    check(p.z == PuiseuxSeries::one(), Stage::Family, || "torsion point must be affine".into())?;
    if let Valuation::Finite(v) = p.x.valuation_lower_bound() {
        check(!v.is_negative(), Stage::Family, || format!("v(x(P)) = {} is negative", fmt_q(&v)))?;
    }
    let half = frac(-1, 2);
    let r = p.x.clone();
    let s = w.a1.scale(&half);
    let t = (&w.a3 + &(&r * &w.a1)).scale(&half);
    let shift = CoordinateChange::new(PuiseuxSeries::one(), r, s, t);
    let m = apply_change_to(w, &shift, target).at(Stage::Family)?;
    check(vanishes(&m.a1) && vanishes(&m.a3), Stage::Family, || format!("square not completed: {m}"))?;
    let pm = shift.pull_point(p, target).at(Stage::Family)?;
    check(vanishes(&pm.x), Stage::Family, || format!("shifted point has x = {}", pm.x))?;
    // discriminant of the quadratic part a2·x² + a4·x + a6
    let disc = &(&m.a4 * &m.a4) - &(&m.a2 * &m.a6).scale(&q(4));
    if !vanishes(&disc) {
        return Err(FaithfulError::DiscriminantNotZero(disc.to_string()));
    }
    let a = m.a2.clone();
    let b = m.a4.div_series(&a.scale(&q(-2)), target).at(Stage::Family)?;
    let a6 = &(&a * &b) * &b;
    check(vanishes(&(&a6 - &m.a6)), Stage::Family, || format!("a*b^2 = {a6} but a6 = {}", m.a6))?;
    let mut fam = FamilyForm::new(a, b, target, Provenance::UserSupplied)?;
    let want = &fam.a_sqrt * &fam.b;
    let point = if vanishes(&(&pm.y - &want)) {
        p.clone()
    } else if vanishes(&(&pm.y + &want)) {
        // −P = (x, −y − a1·x − a3)
        let y = -&(&(&p.y + &(&w.a1 * &p.x)) + &w.a3);
        ProjectivePoint::affine(p.x.clone(), y)
    } else {
        return Err(FaithfulError::CheckFailed {
            stage: Stage::Family,
            detail: format!("shifted point has y = {}, expected ±{want}", pm.y),
        });
    };
    fam.provenance = Provenance::DerivedFrom { model: w.clone(), point, shift };
    Ok(fam)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    General,
    Family,
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::General => "general",
            Mode::Family => "family",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaithfulReport {
    pub mode: Mode,
    pub precision: Q,
    pub input: WeierstrassModel,
    pub minimal_model: WeierstrassModel,
    pub change: CoordinateChange,
    pub reduction: Reduction,
    /// On the minimal model.
    pub torsion_point: ProjectivePoint,
    pub family: FamilyForm,
    pub embedding: LaurentPolynomial,
    pub tropical: TropicalPolynomial,
    pub curve: TropicalPlaneCurve,
    pub cycle: Option<CycleReport>,
    pub cycle_length: Option<Q>,
    /// `−v(j)` from the invariants of the input model.
    pub minus_v_j: Q,
    /// `−v(j)` from the closed formula in `a`, `b`.
    pub minus_v_j_formula: Q,
    pub three_v_b: Q,
    pub j: PuiseuxSeries,
    pub verdict: bool,
}

impl FaithfulReport {
    pub fn to_json(&self) -> serde_json::Value {
        let cycle = self.cycle.as_ref().map(|c| {
            json!({
                "edges": c.edges,
                "vertices": c.vertices,
                "length": fmt_q(&c.total_lattice_length),
            })
        });
        let sp = self.reduction.singular_point.as_ref().map(|p| json!([fmt_q(&p[0]), fmt_q(&p[1])]));
        let fractions: serde_json::Map<String, serde_json::Value> =
            FRACTIONS.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
        json!({
            "mode": self.mode.label(),
            "precision": fmt_q(&self.precision),
            "input": self.input.to_json(),
            "minimal_model": self.minimal_model.to_json(),
            "change": self.change.to_json(),
            "reduction": {"type": self.reduction.kind.label(), "singular_point": sp},
            "torsion_point": self.torsion_point.to_json(),
            "family": self.family.to_json(),
            "family_point": self.family.point().to_json(),
            "embedding": {
                "equation": self.embedding.to_string(),
                "fractions": fractions,
                "tropical": self.tropical.to_json(),
                "tropical_text": self.tropical.to_string(),
            },
            "curve": self.curve.to_json(),
            "unimodular": self.curve.subdivision.is_unimodular(),
            "cycle": cycle,
            "cycle_length": self.cycle_length.as_ref().map(fmt_q),
            "minus_v_j": fmt_q(&self.minus_v_j),
            "minus_v_j_formula": fmt_q(&self.minus_v_j_formula),
            "three_v_b": fmt_q(&self.three_v_b),
            "j": self.j.to_json(),
            "verdict": self.verdict,
        })
    }
}

/// Outcome for a model whose minimal model does not have multiplicative reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotMultiplicative {
    pub input: WeierstrassModel,
    pub minimal_model: WeierstrassModel,
    pub reduction: Reduction,
    pub v_j: Valuation,
}

impl NotMultiplicative {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "input": self.input.to_json(),
            "minimal_model": self.minimal_model.to_json(),
            "reduction": {"type": self.reduction.kind.label()},
            "vj": valuation_text(&self.v_j),
            "verdict": null,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Certification {
    Faithful(Box<FaithfulReport>),
    NotMultiplicative(NotMultiplicative),
}

impl Certification {
    pub fn report(&self) -> Option<&FaithfulReport> {
        match self {
            Certification::Faithful(r) => Some(r),
            Certification::NotMultiplicative(_) => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Certification::Faithful(r) => r.to_json(),
            Certification::NotMultiplicative(n) => n.to_json(),
        }
    }
}

fn with_retry<T>(precision: &Q, mut run: impl FnMut(&Q) -> Result<T>) -> Result<T> {
    let mut p = precision.clone();
    let mut attempt = 1;
    loop {
        match run(&p) {
            Err(e) if e.is_precision_issue() && attempt < MAX_ATTEMPTS => {
                p = &p * q(2);
                attempt += 1;
            }
            r => return r,
        }
    }
}

pub fn default_precision() -> Q {
    q(DEFAULT_PRECISION)
}

/// The full pipeline on an integral model.
pub fn certify(w: &WeierstrassModel, precision: &Q) -> Result<Certification> {
    with_retry(precision, |p| certify_once(w, p))
}

/// The pipeline on a user-supplied family `y² = x³ + a(x − b)²`.
pub fn certify_family(a: &PuiseuxSeries, b: &PuiseuxSeries, precision: &Q) -> Result<Certification> {
    with_retry(precision, |p| certify_family_once(a, b, p))
}

fn certify_once(w: &WeierstrassModel, target: &Q) -> Result<Certification> {
    check(w.is_integral(), Stage::Input, || format!("model {w} is not integral"))?;
    let j = w.invariants_to(target).at(Stage::Invariants)?.j;
    let (m, change) = minimalize(w).at(Stage::Minimalize)?;
    let red = classify_reduction(&m).at(Stage::Reduction)?;
    if red.kind != ReductionKind::Multiplicative {
        let v_j = w.invariants().at(Stage::Invariants)?.v_j();
        return Ok(Certification::NotMultiplicative(NotMultiplicative {
            input: w.clone(),
            minimal_model: m,
            reduction: red,
            v_j,
        }));
    }
    let p = find_three_torsion(&m, target)?;
    let fam = shift_to_family(&m, &p, target)?;
    let point = match &fam.provenance {
        Provenance::DerivedFrom { point, .. } => point.clone(),
        Provenance::UserSupplied => unreachable!("derived family"),
    };
    finish(Mode::General, w, j, m, change, red, point, fam, target)
}

fn certify_family_once(a: &PuiseuxSeries, b: &PuiseuxSeries, target: &Q) -> Result<Certification> {
    let fam = FamilyForm::user(a.clone(), b.clone(), target)?;
    let w = fam.model();
    let j = w.invariants_to(target).at(Stage::Invariants)?.j;
    check(is_minimal(&w).at(Stage::Minimalize)?, Stage::Minimalize, || format!("family model {w} is not minimal"))?;
    let red = classify_reduction(&w).at(Stage::Reduction)?;
    check(red.kind == ReductionKind::Multiplicative, Stage::Reduction, || {
        format!("family model has {} reduction", red.kind.label())
    })?;
    let point = fam.point();
    finish(Mode::Family, &w, j, w.clone(), CoordinateChange::identity(), red, point, fam, target)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    mode: Mode,
    input: &WeierstrassModel,
    j: PuiseuxSeries,
    minimal_model: WeierstrassModel,
    change: CoordinateChange,
    reduction: Reduction,
    torsion_point: ProjectivePoint,
    family: FamilyForm,
    target: &Q,
) -> Result<Certification> {
    let v_j = j.order().at(Stage::JInvariant)?;
    check(v_j.is_negative(), Stage::JInvariant, || format!("v(j) = {} is not negative", fmt_q(&v_j)))?;
    let minus_v_j = -v_j;

    let fam_model = family.model();
    let j_min = minimal_model.invariants_to(target).at(Stage::JInvariant)?.j;
    let j_fam = fam_model.invariants_to(target).at(Stage::JInvariant)?.j;
    check(j.agrees_with(&j_min), Stage::JInvariant, || format!("j changed under minimalization: {j} vs {j_min}"))?;
    check(j.agrees_with(&j_fam), Stage::JInvariant, || format!("j changed under the torsion shift: {j} vs {j_fam}"))?;
    let j_formula = family.j_from_formula(target)?;
    check(j_formula.agrees_with(&j_fam), Stage::JInvariant, || {
        format!("closed form {j_formula} disagrees with c4^3/Delta = {j_fam}")
    })?;
    let minus_v_j_formula = -j_formula.order().at(Stage::JInvariant)?;
    check(minus_v_j_formula == minus_v_j, Stage::JInvariant, || {
        format!(
            "-v(j) is {} from the invariants but {} from the closed form",
            fmt_q(&minus_v_j),
            fmt_q(&minus_v_j_formula)
        )
    })?;

    check(inflection_certificate(&family), Stage::Torsion, || "(y - a'(x-b))(y + a'(x-b)) != x^3".into())?;
    let res = fam_model.residual(&family.point());
    check(vanishes(&res), Stage::Torsion, || format!("(0, a'b) is off the family curve: residual {res}"))?;
    let reduced = reduce_point(&torsion_point, &minimal_model).at(Stage::Torsion)?;
    check(reduced.class != PointClass::Identity, Stage::Torsion, || "torsion point reduces to the identity".into())?;
    check(reduced.class == PointClass::Singular, Stage::Torsion, || {
        "torsion point does not reduce to the node".into()
    })?;

    let embedding = embedding_equation(&family);
    let tropical = embedding.tropicalize().at(Stage::Tropicalize)?;
    let curve = curve_of(&tropical).at(Stage::Curve)?;
    let cycle = curve.find_cycle().at(Stage::Cycle)?;
    let cycle_length = cycle.as_ref().map(|c| c.total_lattice_length.clone());
    let three_v_b = family.v_b() * q(3);
    let verdict = cycle_length.as_ref() == Some(&minus_v_j) && cycle_length.as_ref() == Some(&three_v_b);
    Ok(Certification::Faithful(Box::new(FaithfulReport {
        mode,
        precision: target.clone(),
        input: input.clone(),
        minimal_model,
        change,
        reduction,
        torsion_point,
        family,
        embedding,
        tropical,
        curve,
        cycle,
        cycle_length,
        minus_v_j,
        minus_v_j_formula,
        three_v_b,
        j,
        verdict,
    })))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplePoint {
    pub f: PuiseuxSeries,
    /// `(v(f), v(g))` for each root `g`.
    pub points: Vec<[Q; 2]>,
    pub on_curve: Vec<bool>,
    pub unresolved: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SampleStats {
    pub samples: usize,
    /// Samples whose roots were all expanded.
    pub resolved: usize,
    /// Samples with at least one unresolved branch.
    pub unresolved: usize,
    /// Resolved roots whose valuation point is off the curve, plus solver errors.
    pub failures: usize,
    /// Unresolved branches whose common valuation lands on the curve.
    pub unresolved_on_curve: usize,
    pub unresolved_branches: usize,
    pub details: Vec<SamplePoint>,
}

impl SampleStats {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn unresolved_fraction(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.unresolved as f64 / self.samples as f64
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let details: Vec<serde_json::Value> = self
            .details
            .iter()
            .map(|s| {
                json!({
                    "f": s.f.to_string(),
                    "points": s.points.iter().map(|p| json!([fmt_q(&p[0]), fmt_q(&p[1])])).collect::<Vec<_>>(),
                    "on_curve": s.on_curve,
                    "unresolved": s.unresolved,
                })
            })
            .collect();
        json!({
            "samples": self.samples,
            "resolved": self.resolved,
            "unresolved": self.unresolved,
            "failures": self.failures,
            "unresolved_branches": self.unresolved_branches,
            "unresolved_on_curve": self.unresolved_on_curve,
            "passed": self.passed(),
            "details": details,
        })
    }
}

/// Window of sampled valuations `v(f) ∈ [−v(b), 9v(b)/8]`.
pub fn sample_window(v_b: &Q) -> (Q, Q) {
    (-v_b.clone(), v_b * frac(9, 8))
}

fn random_unit(rng: &mut ChaCha8Rng) -> Q {
    let n = rng.gen_range(1..=5i64);
    let d = rng.gen_range(1..=4i64);
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    frac(sign * n, d)
}

fn random_exponent(rng: &mut ChaCha8Rng, lo: &Q, hi: &Q) -> Q {
    let d = rng.gen_range(1..=3i64);
    let dq = q(d);
    let nlo = (lo * &dq).ceil().to_integer();
    let nhi = (hi * &dq).floor().to_integer();
    let (nlo, nhi): (i64, i64) = (nlo.try_into().unwrap_or(0), nhi.try_into().unwrap_or(0));
    let n = if nlo <= nhi { rng.gen_range(nlo..=nhi) } else { nlo };
    frac(n, d)
}

/// Fixes `f = c·t^q` at random and checks that every solution `g` of the embedding
/// equation gives a point `(v(f), v(g))` on the tropical curve.
pub fn sample_check(report: &FaithfulReport, num_samples: usize, seed: u64) -> SampleStats {
    sample_check_in(report, num_samples, seed, &sample_window(&report.family.v_b()))
}

/// As [`sample_check`], with `v(f)` drawn from `window` (denominators up to 3).
pub fn sample_check_in(report: &FaithfulReport, num_samples: usize, seed: u64, window: &(Q, Q)) -> SampleStats {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = window;
    let v_b = report.family.v_b();
    let mut stats = SampleStats { samples: num_samples, ..Default::default() };
    for _ in 0..num_samples {
        let e = random_exponent(&mut rng, lo, hi);
        let c = random_unit(&mut rng);
        let f = PuiseuxSeries::monomial(c, e.clone());
        // root valuations are at most 2·v(b) + |v(f)|
        let target = &v_b * q(2) + e.abs() + Q::one();
        let solved = report
            .embedding
            .specialize(&[Some(f.clone()), None], 1, &target)
            .map_err(|e| e.to_string())
            .and_then(|p| roots(&p, &target).map_err(|e| e.to_string()));
        let rs = match solved {
            Ok(rs) => rs,
            Err(_) => {
                stats.failures += 1;
                stats.details.push(SamplePoint { f, points: Vec::new(), on_curve: Vec::new(), unresolved: 0 });
                continue;
            }
        };
        let mut points = Vec::new();
        let mut on_curve = Vec::new();
        for r in &rs.roots {
            let vg = match r.root.valuation() {
                Ok(Valuation::Finite(v)) => v,
                _ => {
                    stats.failures += 1;
                    continue;
                }
            };
            let p = [e.clone(), vg];
            let ok = report.curve.contains_point(&p);
            if !ok {
                stats.failures += 1;
            }
            points.push(p);
            on_curve.push(ok);
        }
        for u in &rs.unresolved {
            stats.unresolved_branches += 1;
            if report.curve.contains_point(&[e.clone(), u.root_valuation()]) {
                stats.unresolved_on_curve += 1;
            }
        }
        if rs.unresolved.is_empty() {
            stats.resolved += 1;
        } else {
            stats.unresolved += 1;
        }
        stats.details.push(SamplePoint { f, points, on_curve, unresolved: rs.unresolved.len() });
    }
    stats
}
