//! One PASS/FAIL line per acceptance criterion. Run with `--nocapture` to see them.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tropell::curve::{curve_of, TropicalPlaneCurve};
use tropell::faithful::{certify, certify_family, default_precision, sample_check, FaithfulReport};
use tropell::rational::{frac, q};
use tropell::tropical::LaurentPolynomial;
use tropell::weierstrass::{
    classify_reduction, is_minimal, minimalize, reduced_coefficients, reduction_consistency, ReductionKind,
    WeierstrassModel,
};
use tropell::{PuiseuxSeries, Valuation, Q};

const SWEEP_BUDGET_PER_K: Duration = Duration::from_secs(1);
const SAMPLING_BUDGET: Duration = Duration::from_secs(5);
const MIN_SAMPLES: usize = 20;
const MAX_UNRESOLVED_FRACTION: f64 = 0.20;
const SAMPLE_SEED: u64 = 0;
const RANDOM_FAMILIES: usize = 100;
const MIN_PROPERTY_CASES: u32 = 200;
const DETERMINISM_SEED: &str = "7";

/// Criteria whose stated form cannot hold; the line prints FAIL and the
/// correct behaviour is asserted separately.
const KNOWN_UNATTAINABLE: &[u32] = &[4];

struct Line {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn series(s: &str) -> PuiseuxSeries {
    PuiseuxSeries::parse(s).unwrap()
}

fn model(s: &str) -> WeierstrassModel {
    WeierstrassModel::parse(s).unwrap()
}

fn curve(s: &str) -> TropicalPlaneCurve {
    curve_of(&LaurentPolynomial::parse(s).unwrap().tropicalize().unwrap()).unwrap()
}

fn fmt_point(p: &[Q; 2]) -> String {
    format!("({}, {})", p[0], p[1])
}

fn faithful_report(run: impl FnOnce() -> tropell::faithful::Certification) -> FaithfulReport {
    run().report().cloned().expect("multiplicative reduction")
}

fn sweep() -> Line {
    let mut pass = true;
    let mut worst = Duration::ZERO;
    let mut notes = Vec::new();
    for k in 1..=6i64 {
        let start = Instant::now();
        let general = faithful_report(|| {
            certify(&model(&format!("[0,1,0,-2*t^{k},t^{}]", 2 * k)), &default_precision()).unwrap()
        });
        let family =
            faithful_report(|| certify_family(&series("1"), &series(&format!("t^{k}")), &default_precision()).unwrap());
        let elapsed = start.elapsed();
        worst = worst.max(elapsed);
        for (mode, r) in [("general", &general), ("family", &family)] {
            let three_k = q(3 * k);
            let v_j = r.input.invariants().unwrap().v_j();
            let ok = r.cycle_length.as_ref() == Some(&three_k)
                && r.minus_v_j == three_k
                && v_j == Valuation::Finite(-three_k.clone())
                && r.verdict;
            if !ok {
                notes.push(format!("k={k} {mode}: cycle {:?}, -v(j) {}", r.cycle_length, r.minus_v_j));
            }
            pass &= ok;
        }
        if elapsed >= SWEEP_BUDGET_PER_K {
            notes.push(format!("k={k} took {elapsed:?}"));
            pass = false;
        }
    }
    let detail = if notes.is_empty() {
        format!("k=1..6 cycle length 3k = -v(j) in both modes, slowest k {worst:.2?} (budget {SWEEP_BUDGET_PER_K:?})")
    } else {
        notes.join("; ")
    };
    Line { id: 1, name: "sweep", pass, detail }
}

fn minimalization() -> Line {
    let w = model("[0,0,0,t^4,t^6]");
    let inv = w.invariants().unwrap();
    let lead = inv.delta.leading_coefficient().cloned();
    let (m, change) = minimalize(&w).unwrap();
    let v_u = change.u.order().unwrap();
    let v_delta_min = m.invariants().unwrap().v_delta();
    let reduced = reduced_coefficients(&m).unwrap();
    let want = [Q::zero(), Q::zero(), Q::zero(), Q::one(), Q::one()];
    let pass = inv.v_delta() == q(12)
        && lead == Some(q(-496))
        && !is_minimal(&w).unwrap()
        && v_u == Q::one()
        && v_delta_min.is_zero()
        && reduced == want;
    let detail = format!(
        "v(Delta) = {}, leading coefficient {:?}, v(u) = {v_u}, v(Delta') = {v_delta_min}, reduction {:?}",
        inv.v_delta(),
        lead.map(|c| c.to_string()),
        reduced.iter().map(|c| c.to_string()).collect::<Vec<_>>()
    );
    Line { id: 2, name: "minimalization", pass, detail }
}

fn random_family(rng: &mut ChaCha8Rng) -> (PuiseuxSeries, PuiseuxSeries) {
    let unit = |rng: &mut ChaCha8Rng| {
        let n = rng.gen_range(1..=9i64);
        frac(if rng.gen_bool(0.5) { n } else { -n }, rng.gen_range(1..=5i64))
    };
    let mut a = PuiseuxSeries::constant(unit(rng));
    if rng.gen_bool(0.5) {
        a = &a + &PuiseuxSeries::monomial(unit(rng), frac(rng.gen_range(1..=6i64), rng.gen_range(1..=3i64)));
    }
    let e = frac(rng.gen_range(1..=10i64), rng.gen_range(1..=3i64));
    (a, PuiseuxSeries::monomial(unit(rng), e))
}

fn reduction_triple() -> Line {
    let mult = classify_reduction(&model("[0,1,0,0,t^2]")).unwrap();
    let node = mult.singular_point.clone();
    let first = mult.kind == ReductionKind::Multiplicative && node == Some([Q::zero(), Q::zero()]);
    let (m, _) = minimalize(&model("[0,0,0,t^4,t^6]")).unwrap();
    let good = classify_reduction(&m).unwrap().kind == ReductionKind::Good;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut consistent = 0;
    let mut multiplicative = 0;
    for _ in 0..RANDOM_FAMILIES {
        let (a, b) = random_family(&mut rng);
        let w = WeierstrassModel::family(&a, &b);
        if reduction_consistency(&w).unwrap() {
            consistent += 1;
        }
        if classify_reduction(&w).unwrap().kind == ReductionKind::Multiplicative {
            multiplicative += 1;
        }
    }
    let pass = first && good && consistent == RANDOM_FAMILIES && multiplicative == RANDOM_FAMILIES;
    let detail = format!(
        "[0,1,0,0,t^2] {:?} node {:?}; minimalized [0,0,0,t^4,t^6] good: {good}; random families consistent {consistent}/{RANDOM_FAMILIES}, multiplicative {multiplicative}/{RANDOM_FAMILIES}",
        mult.kind,
        node.map(|p| fmt_point(&p))
    );
    Line { id: 3, name: "reduction classification", pass, detail }
}

fn sorted_rays(c: &TropicalPlaneCurve) -> Vec<[i64; 2]> {
    let mut r: Vec<[i64; 2]> = c.rays.iter().map(|r| r.dir).collect();
    r.sort();
    r
}

/// Returns the printed line and whether every check other than the `(v(B)/3, v(B)/2)` corner holds.
fn tropical_fixtures() -> (Line, bool) {
    let mut notes = Vec::new();

    let line = curve("t^-3*x + t^-2*y - 1");
    let plane = line.vertices == vec![[q(3), q(2)]]
        && line.edges.is_empty()
        && sorted_rays(&line) == vec![[-1, -1], [0, 1], [1, 0]];
    notes.push(format!("line vertex {} rays {:?}", fmt_point(&line.vertices[0]), sorted_rays(&line)));

    let mut triangles = true;
    for k in 1..=6i64 {
        let c = curve(&format!("x^2*y + x*y + x*y^2 + t^{k}"));
        let mut vs = c.vertices.clone();
        vs.sort();
        let cycle = c.find_cycle().unwrap();
        triangles &= vs == vec![[q(0), q(0)], [q(0), q(k)], [q(k), q(0)]]
            && c.edges.len() == 3
            && c.edges.iter().all(|e| e.length == q(k))
            && cycle.map(|cy| cy.total_lattice_length) == Some(q(3 * k));
    }
    notes.push(format!("triangles k=1..6: {triangles}"));

    // v(A) = 2, v(B) = 6
    let (va, vb) = (q(2), q(6));
    let w = curve("y^2 - x^3 - t^2*x - t^6");
    let pieces = w.edges.len() + w.rays.len();
    let mut rays = sorted_rays(&w);
    rays.dedup();
    let first_corner = [&va / q(2), &va * frac(3, 4)];
    let derived_corner = [&vb - &va, &vb / q(2)];
    let expected_corner = [&vb / q(3), &vb / q(2)];
    let geometry = pieces == 5
        && w.vertices.len() == 2
        && w.vertices.contains(&first_corner)
        && w.vertices.contains(&derived_corner)
        && w.edges.len() == 1
        && w.edges[0].dir == [2, 1]
        && rays == vec![[-2, -3], [0, 1], [1, 0]]
        && w.find_cycle().unwrap().is_none();
    let expected = w.vertices.contains(&expected_corner);
    // (v(B)/3, v(B)/2) does not lie on the edge 2y = v(A) + x
    let on_edge = &expected_corner[1] * q(2) == &va + &expected_corner[0];
    notes.push(format!(
        "Weierstrass v(A)=2, v(B)=6: {pieces} pieces, corners {}; corner (v(B)/3, v(B)/2) = {} {} (on 2y = v(A) + x: {on_edge}), computed (v(B) - v(A), v(B)/2) = {}",
        w.vertices.iter().map(fmt_point).collect::<Vec<_>>().join(" "),
        fmt_point(&expected_corner),
        if expected { "found" } else { "absent" },
        fmt_point(&derived_corner)
    ));

    // v(A) = 4, v(B) = 3
    let w2 = curve("y^2 - x^3 - t^4*x - t^3");
    let three =
        w2.vertices.len() == 1 && w2.edges.is_empty() && w2.rays.len() == 3 && w2.find_cycle().unwrap().is_none();
    notes.push(format!("Weierstrass v(A)=4, v(B)=3: {} rays, no cycle: {three}", w2.rays.len()));

    let correct = plane && triangles && geometry && three;
    (Line { id: 4, name: "tropical fixtures", pass: correct && expected, detail: notes.join("; ") }, correct)
}

fn sampling() -> Line {
    let start = Instant::now();
    let r = faithful_report(|| certify_family(&series("1"), &series("t^2"), &default_precision()).unwrap());
    let stats = sample_check(&r, MIN_SAMPLES, SAMPLE_SEED);
    let elapsed = start.elapsed();
    let on_curve = stats.details.iter().all(|s| s.on_curve.iter().all(|b| *b));
    let pass = stats.samples >= MIN_SAMPLES
        && stats.passed()
        && on_curve
        && stats.unresolved_fraction() <= MAX_UNRESOLVED_FRACTION
        && elapsed < SAMPLING_BUDGET;
    let detail = format!(
        "{} samples (seed {SAMPLE_SEED}): {} resolved, {} with unresolved branches ({:.0}% <= {:.0}%), {} off-curve, {elapsed:.2?} (budget {SAMPLING_BUDGET:?})",
        stats.samples,
        stats.resolved,
        stats.unresolved,
        100.0 * stats.unresolved_fraction(),
        100.0 * MAX_UNRESOLVED_FRACTION,
        stats.failures
    );
    Line { id: 5, name: "sampling", pass, detail }
}

fn property_suites() -> Line {
    use common::*;
    use proptest::strategy::Strategy;
    let target = q(8);
    let results: Vec<(&str, Result<u32, String>)> = vec![
        ("valuation", run_suite((series(-4, 8), series(-4, 8)), |(a, b)| valuation_laws(&a, &b))),
        ("invert/sqrt", run_suite((series(-3, 6), 2i64..=10), |(a, n)| inverse_and_root(&a, &q(n)))),
        ("newton", run_suite(planted_roots(), |rs| newton_certificates(&from_roots(&rs), &rs, &target))),
        ("duality", run_suite(tropical_polynomial(), |f| duality(&f))),
        (
            "membership",
            run_suite(
                (
                    tropical_polynomial(),
                    0usize..64,
                    rational(0..=8, 1..=8),
                    (rational(-12..=12, 1..=4), rational(-12..=12, 1..=4)),
                ),
                |(f, pick, s, free)| membership(&f, pick, &s, &[free.0, free.1]),
            ),
        ),
        (
            "j-invariance",
            run_suite((family_parameters(), unit_change()).boxed(), |((a, b), c)| j_invariance(&a, &b, &c)),
        ),
    ];
    let pass = CASES >= MIN_PROPERTY_CASES && results.iter().all(|(_, r)| r.is_ok());
    let detail = results
        .iter()
        .map(|(n, r)| match r {
            Ok(c) => format!("{n} {c} cases"),
            Err(e) => format!("{n} failed: {e}"),
        })
        .collect::<Vec<_>>()
        .join(", ");
    Line { id: 6, name: "property suites", pass, detail }
}

fn determinism() -> Line {
    let dir = std::env::temp_dir().join(format!("tropell-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let run = |i: usize| {
        let json = dir.join(format!("run{i}.json"));
        let svg = dir.join(format!("run{i}.svg"));
        let out = Command::new(env!("CARGO_BIN_EXE_tropell"))
            .args(["faithful", "--family", "a=1", "b=t^3", "--seed", DETERMINISM_SEED])
            .arg("--json")
            .arg(&json)
            .arg("--svg")
            .arg(&svg)
            .output()
            .unwrap();
        (out.status.code(), out.stdout, std::fs::read(json).unwrap(), std::fs::read(svg).unwrap())
    };
    let (a, b) = (run(1), run(2));
    std::fs::remove_dir_all(&dir).ok();
    let pass = a.0 == Some(0) && a == b;
    let detail = format!(
        "exit {:?}/{:?}; stdout {} bytes, JSON {} bytes, SVG {} bytes; identical: {}",
        a.0,
        b.0,
        a.1.len(),
        a.2.len(),
        a.3.len(),
        a == b
    );
    Line { id: 7, name: "determinism", pass, detail }
}

#[test]
fn acceptance() {
    let (fixtures, fixtures_correct) = tropical_fixtures();
    let lines =
        vec![sweep(), minimalization(), reduction_triple(), fixtures, sampling(), property_suites(), determinism()];
    for l in &lines {
        println!("{} [{}] {}: {}", if l.pass { "PASS" } else { "FAIL" }, l.id, l.name, l.detail);
    }
    assert!(fixtures_correct, "tropical fixtures regressed");
    for l in &lines {
        if !KNOWN_UNATTAINABLE.contains(&l.id) {
            assert!(l.pass, "criterion {} ({}) failed: {}", l.id, l.name, l.detail);
        }
    }
}
