//! Plane tropical curves through the dual regular subdivision of the Newton polygon.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde_json::json;
use thiserror::Error;

use crate::rational::{fmt_q, gcd_i64, primitive_direction, Q};
use crate::tropical::TropicalPolynomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("a plane curve needs at least two terms")]
    DegenerateInput,
    #[error("expected a bivariate polynomial, got {0} variables")]
    NotBivariate(usize),
    #[error("edge endpoints coincide")]
    ZeroLengthEdge,
    #[error("bounded part has first Betti number {0}")]
    MultipleCycles(usize),
}

pub type Point = [Q; 2];
pub type Lattice = [i64; 2];
/// Subdivision edge with the cells it bounds.
pub type DualEdge<C> = ([Lattice; 2], C);

fn qi(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// A cell of the subdivision with its lifting plane `h = c0 + c1·x + c2·y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    /// Corners, counterclockwise starting from the lexicographically smallest.
    pub vertices: Vec<Lattice>,
    /// Every term exponent lying on the lower face, corners included.
    pub points: Vec<Lattice>,
    pub plane: [Q; 3],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualSubdivision {
    pub cells: Vec<Cell>,
    /// Lower-hull points when the Newton polygon is a segment or a point.
    pub segments: Vec<[Lattice; 2]>,
}

impl DualSubdivision {
    /// Interior edges (shared by two cells) and boundary edges (one cell).
    pub fn edges(&self) -> (Vec<DualEdge<[usize; 2]>>, Vec<DualEdge<usize>>) {
        let mut owners: BTreeMap<[Lattice; 2], Vec<usize>> = BTreeMap::new();
        for (ci, cell) in self.cells.iter().enumerate() {
            let n = cell.vertices.len();
            for k in 0..n {
                let a = cell.vertices[k];
                let b = cell.vertices[(k + 1) % n];
                let key = if a <= b { [a, b] } else { [b, a] };
                owners.entry(key).or_default().push(ci);
            }
        }
        let mut interior = Vec::new();
        let mut boundary = Vec::new();
        for (e, cs) in owners {
            match cs.as_slice() {
                [c] => boundary.push((e, *c)),
                [c, d] => interior.push((e, [*c, *d])),
                _ => panic!("edge shared by more than two cells"),
            }
        }
        (interior, boundary)
    }

    /// True when every cell is a triangle of normalized area one.
    pub fn is_unimodular(&self) -> bool {
        !self.cells.is_empty()
            && self
                .cells
                .iter()
                .all(|c| c.points.len() == 3 && c.vertices.len() == 3 && twice_area(&c.vertices).abs() == 1)
    }
}

fn cross(o: &Lattice, a: &Lattice, b: &Lattice) -> i64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn twice_area(poly: &[Lattice]) -> i64 {
    let n = poly.len();
    (0..n).map(|k| poly[k][0] * poly[(k + 1) % n][1] - poly[(k + 1) % n][0] * poly[k][1]).sum()
}

// Strict convex hull, counterclockwise, starting at the lexicographic minimum.
fn convex_hull(points: &[Lattice]) -> Vec<Lattice> {
    let mut pts: Vec<Lattice> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Lattice> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<Lattice> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn det3(m: [[Q; 3]; 3]) -> Q {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]) - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

// Plane h = c0 + c1 x + c2 y through three lifted points with non-collinear projections.
fn plane_through(p: [(&Lattice, &Q); 3]) -> [Q; 3] {
    let rows: Vec<[Q; 3]> = p.iter().map(|(e, _)| [qi(1), qi(e[0]), qi(e[1])]).collect();
    let a = [rows[0].clone(), rows[1].clone(), rows[2].clone()];
    let d = det3(a.clone());
    let mut out: [Q; 3] = [Q::zero(), Q::zero(), Q::zero()];
    for (col, slot) in out.iter_mut().enumerate() {
        let mut m = a.clone();
        for r in 0..3 {
            m[r][col] = p[r].1.clone();
        }
        *slot = det3(m) / &d;
    }
    out
}

fn plane_at(plane: &[Q; 3], e: &Lattice) -> Q {
    &plane[0] + &plane[1] * qi(e[0]) + &plane[2] * qi(e[1])
}

fn lattice_terms(f: &TropicalPolynomial) -> Result<Vec<(Lattice, Q)>, CurveError> {
    if f.arity() != 2 {
        return Err(CurveError::NotBivariate(f.arity()));
    }
    Ok(f.terms().iter().map(|(e, c)| ([e[0], e[1]], c.clone())).collect())
}

/// Projection of the lower faces of the lifted term exponents.
pub fn dual_subdivision(f: &TropicalPolynomial) -> Result<DualSubdivision, CurveError> {
    let pts = lattice_terms(f)?;
    let n = pts.len();
    let mut seen: BTreeSet<Vec<Lattice>> = BTreeSet::new();
    let mut cells = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if cross(&pts[i].0, &pts[j].0, &pts[k].0) == 0 {
                    continue;
                }
                let plane = plane_through([(&pts[i].0, &pts[i].1), (&pts[j].0, &pts[j].1), (&pts[k].0, &pts[k].1)]);
                let mut on = Vec::new();
                let mut lower = true;
                for (e, h) in &pts {
                    let z = plane_at(&plane, e);
                    if *h < z {
                        lower = false;
                        break;
                    }
                    if *h == z {
                        on.push(*e);
                    }
                }
                if !lower || !seen.insert(on.clone()) {
                    continue;
                }
                cells.push(Cell { vertices: convex_hull(&on), points: on, plane });
            }
        }
    }
    cells.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    let segments = if cells.is_empty() { lower_segments(&pts) } else { Vec::new() };
    Ok(DualSubdivision { cells, segments })
}

// Lower hull of collinear lifted points, as consecutive pairs along the line.
fn lower_segments(pts: &[(Lattice, Q)]) -> Vec<[Lattice; 2]> {
    let mut sorted: Vec<(Lattice, Q)> = pts.to_vec();
    sorted.sort_by_key(|a| a.0);
    if sorted.len() < 2 {
        return Vec::new();
    }
    let o = sorted[0].0;
    // parameter along the line, measured in the coordinate with the larger spread
    let pos = |e: &Lattice| -> i64 {
        let dx = e[0] - o[0];
        if dx != 0 {
            dx
        } else {
            e[1] - o[1]
        }
    };
    let mut hull: Vec<usize> = Vec::new();
    for k in 0..sorted.len() {
        while hull.len() >= 2 {
            let a = &sorted[hull[hull.len() - 2]];
            let b = &sorted[hull[hull.len() - 1]];
            let c = &sorted[k];
            let lhs = (&b.1 - &a.1) * qi(pos(&c.0) - pos(&a.0));
            let rhs = (&c.1 - &a.1) * qi(pos(&b.0) - pos(&a.0));
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    hull.windows(2).map(|w| [sorted[w[0]].0, sorted[w[1]].0]).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveEdge {
    pub v: [usize; 2],
    /// Primitive direction from `v[0]` to `v[1]`.
    pub dir: Lattice,
    pub length: Q,
    pub weight: u64,
    pub dual: [Lattice; 2],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveRay {
    pub v: usize,
    pub dir: Lattice,
    pub weight: u64,
    pub dual: [Lattice; 2],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalPlaneCurve {
    pub vertices: Vec<Point>,
    pub edges: Vec<CurveEdge>,
    pub rays: Vec<CurveRay>,
    pub subdivision: DualSubdivision,
}

fn weight_of(a: &Lattice, b: &Lattice) -> u64 {
    gcd_i64(b[0] - a[0], b[1] - a[1]).unsigned_abs()
}

// Primitive normal of the segment a→b, pointing to the side of `inside`.
fn inward_normal(a: &Lattice, b: &Lattice, inside: &Lattice) -> Lattice {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let g = gcd_i64(dx, dy).abs();
    let mut nrm = [-dy / g, dx / g];
    let side = nrm[0] * (inside[0] - a[0]) + nrm[1] * (inside[1] - a[1]);
    if side < 0 {
        nrm = [-nrm[0], -nrm[1]];
    }
    nrm
}

/// Lattice length of the segment `a → b`.
pub fn lattice_length(a: &Point, b: &Point) -> Result<Q, CurveError> {
    let d = [&b[0] - &a[0], &b[1] - &a[1]];
    primitive_direction(&d).map(|(_, l)| l).ok_or(CurveError::ZeroLengthEdge)
}

/// The corner locus of a bivariate tropical polynomial.
pub fn curve_of(f: &TropicalPolynomial) -> Result<TropicalPlaneCurve, CurveError> {
    let pts = lattice_terms(f)?;
    if pts.len() < 2 {
        return Err(CurveError::DegenerateInput);
    }
    let sub = dual_subdivision(f)?;
    if sub.cells.is_empty() {
        return Ok(lines_curve(&pts, sub));
    }
    // vertex of a cell is minus the gradient of its lifting plane
    let raw: Vec<Point> = sub.cells.iter().map(|c| [-c.plane[1].clone(), -c.plane[2].clone()]).collect();
    for (c, p) in sub.cells.iter().zip(&raw) {
        let mut am = f.argmin_terms(p);
        am.sort();
        let mut want: Vec<Vec<i64>> = c.points.iter().map(|e| e.to_vec()).collect();
        want.sort();
        assert_eq!(am, want, "cell terms must be exactly the minimizers at its vertex");
    }
    let mut order: Vec<usize> = (0..raw.len()).collect();
    order.sort_by(|a, b| raw[*a].cmp(&raw[*b]));
    let mut index = vec![0; raw.len()];
    for (new, old) in order.iter().enumerate() {
        index[*old] = new;
    }
    let vertices: Vec<Point> = order.iter().map(|i| raw[*i].clone()).collect();
    let (interior, boundary) = sub.edges();
    let mut edges = Vec::new();
    for (dual, [c, d]) in interior {
        let (mut i, mut j) = (index[c], index[d]);
        if i > j {
            std::mem::swap(&mut i, &mut j);
        }
        let diff = [&vertices[j][0] - &vertices[i][0], &vertices[j][1] - &vertices[i][1]];
        let (dir, length) = primitive_direction(&diff).expect("distinct cell vertices");
        edges.push(CurveEdge { v: [i, j], dir: [dir[0], dir[1]], length, weight: weight_of(&dual[0], &dual[1]), dual });
    }
    let mut rays = Vec::new();
    for (dual, c) in boundary {
        let cell = &sub.cells[c];
        let inside = cell
            .vertices
            .iter()
            .find(|w| cross(&dual[0], &dual[1], w) != 0)
            .expect("2-cell has a vertex off each edge");
        rays.push(CurveRay {
            v: index[c],
            dir: inward_normal(&dual[0], &dual[1], inside),
            weight: weight_of(&dual[0], &dual[1]),
            dual,
        });
    }
    edges.sort_by_key(|a| (a.v, a.dir));
    rays.sort_by_key(|a| (a.v, a.dir));
    Ok(TropicalPlaneCurve { vertices, edges, rays, subdivision: sub })
}

// Parallel lines for a segment Newton polygon; each line is a base point with two opposite rays.
fn lines_curve(pts: &[(Lattice, Q)], sub: DualSubdivision) -> TropicalPlaneCurve {
    let coeff: BTreeMap<Lattice, Q> = pts.iter().cloned().collect();
    let mut vertices = Vec::new();
    let mut rays = Vec::new();
    for seg in &sub.segments {
        let [u, v] = *seg;
        let w = [v[0] - u[0], v[1] - u[1]];
        // base point s·w on the line c_u + u·p = c_v + v·p
        let s = (&coeff[&u] - &coeff[&v]) / qi(w[0] * w[0] + w[1] * w[1]);
        vertices.push([&s * qi(w[0]), &s * qi(w[1])]);
        let g = gcd_i64(w[0], w[1]).abs();
        let nrm = [-w[1] / g, w[0] / g];
        let idx = vertices.len() - 1;
        for d in [nrm, [-nrm[0], -nrm[1]]] {
            rays.push(CurveRay { v: idx, dir: d, weight: g as u64, dual: *seg });
        }
    }
    TropicalPlaneCurve { vertices, edges: Vec::new(), rays, subdivision: sub }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleReport {
    /// Indices into the curve's bounded edges, in walk order.
    pub edges: Vec<usize>,
    /// Vertices visited, in walk order.
    pub vertices: Vec<usize>,
    pub total_lattice_length: Q,
}

impl TropicalPlaneCurve {
    pub fn find_cycle(&self) -> Result<Option<CycleReport>, CurveError> {
        find_cycle(self)
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        contains_point(self, p)
    }

    /// `Σ weight · direction` at every vertex.
    pub fn balancing_defects(&self) -> Vec<Lattice> {
        let mut acc = vec![[0i64, 0i64]; self.vertices.len()];
        for e in &self.edges {
            let w = e.weight as i64;
            acc[e.v[0]][0] += w * e.dir[0];
            acc[e.v[0]][1] += w * e.dir[1];
            acc[e.v[1]][0] -= w * e.dir[0];
            acc[e.v[1]][1] -= w * e.dir[1];
        }
        for r in &self.rays {
            let w = r.weight as i64;
            acc[r.v][0] += w * r.dir[0];
            acc[r.v][1] += w * r.dir[1];
        }
        acc
    }

    pub fn to_json(&self) -> serde_json::Value {
        let vertices: Vec<serde_json::Value> =
            self.vertices.iter().map(|p| json!([fmt_q(&p[0]), fmt_q(&p[1])])).collect();
        let edges: Vec<serde_json::Value> = self
            .edges
            .iter()
            .map(|e| json!({"v": e.v, "dir": e.dir, "len": fmt_q(&e.length), "weight": e.weight}))
            .collect();
        let rays: Vec<serde_json::Value> =
            self.rays.iter().map(|r| json!({"v": r.v, "dir": r.dir, "weight": r.weight})).collect();
        json!({"vertices": vertices, "edges": edges, "rays": rays})
    }
}

/// Prunes leaves off the bounded part and returns the remaining cycle, if any.
pub fn find_cycle(c: &TropicalPlaneCurve) -> Result<Option<CycleReport>, CurveError> {
    let mut alive: Vec<bool> = vec![true; c.edges.len()];
    loop {
        let mut deg = vec![0usize; c.vertices.len()];
        for (k, e) in c.edges.iter().enumerate() {
            if alive[k] {
                deg[e.v[0]] += 1;
                deg[e.v[1]] += 1;
            }
        }
        let mut changed = false;
        for (k, e) in c.edges.iter().enumerate() {
            if alive[k] && (deg[e.v[0]] == 1 || deg[e.v[1]] == 1) {
                alive[k] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let kept: Vec<usize> = (0..c.edges.len()).filter(|k| alive[*k]).collect();
    if kept.is_empty() {
        return Ok(None);
    }
    let mut verts: BTreeSet<usize> = BTreeSet::new();
    for k in &kept {
        verts.extend(c.edges[*k].v);
    }
    // union-find for the component count
    let mut parent: BTreeMap<usize, usize> = verts.iter().map(|v| (*v, *v)).collect();
    fn root(parent: &mut BTreeMap<usize, usize>, v: usize) -> usize {
        let p = parent[&v];
        if p == v {
            return v;
        }
        let r = root(parent, p);
        parent.insert(v, r);
        r
    }
    for k in &kept {
        let [a, b] = c.edges[*k].v;
        let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
        if ra != rb {
            parent.insert(ra, rb);
        }
    }
    let comps = verts.iter().filter(|v| parent[v] == **v).count();
    let betti = kept.len() + comps - verts.len();
    if betti != 1 {
        return Err(CurveError::MultipleCycles(betti));
    }
    // leafless with Betti number one: a simple cycle
    let start = *verts.iter().next().unwrap();
    let mut walk_v = vec![start];
    let mut walk_e: Vec<usize> = Vec::new();
    let mut cur = start;
    loop {
        let next = kept.iter().find(|k| !walk_e.contains(k) && c.edges[**k].v.contains(&cur)).copied();
        let Some(k) = next else { break };
        walk_e.push(k);
        let [a, b] = c.edges[k].v;
        cur = if a == cur { b } else { a };
        if cur == start {
            break;
        }
        walk_v.push(cur);
    }
    let total = walk_e.iter().map(|k| c.edges[*k].length.clone()).sum();
    Ok(Some(CycleReport { edges: walk_e, vertices: walk_v, total_lattice_length: total }))
}

fn rel(p: &Point, a: &Point) -> [Q; 2] {
    [&p[0] - &a[0], &p[1] - &a[1]]
}

// Parameter s with p - a = s·dir when p lies on the line through a with direction dir.
fn along(p: &Point, a: &Point, dir: &Lattice) -> Option<Q> {
    let d = rel(p, a);
    let (dx, dy) = (qi(dir[0]), qi(dir[1]));
    if &d[0] * &dy - &d[1] * &dx != Q::zero() {
        return None;
    }
    Some((&d[0] * &dx + &d[1] * &dy) / (&dx * &dx + &dy * &dy))
}

/// Exact incidence of `p` with a vertex, bounded edge or ray.
pub fn contains_point(c: &TropicalPlaneCurve, p: &Point) -> bool {
    if c.vertices.iter().any(|v| v == p) {
        return true;
    }
    for e in &c.edges {
        if let Some(s) = along(p, &c.vertices[e.v[0]], &e.dir) {
            if !s.is_negative() && s <= e.length {
                return true;
            }
        }
    }
    for r in &c.rays {
        if let Some(s) = along(p, &c.vertices[r.v], &r.dir) {
            if !s.is_negative() {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, q};
    use crate::tropical::LaurentPolynomial;

    fn curve(src: &str) -> TropicalPlaneCurve {
        curve_of(&LaurentPolynomial::parse(src).unwrap().tropicalize().unwrap()).unwrap()
    }

    #[test]
    fn three_rays_from_one_vertex() {
        let c = curve("t^-3*x + t^-2*y - 1");
        assert_eq!(c.vertices, vec![[q(3), q(2)]]);
        let mut dirs: Vec<Lattice> = c.rays.iter().map(|r| r.dir).collect();
        dirs.sort();
        assert_eq!(dirs, vec![[-1, -1], [0, 1], [1, 0]]);
        assert!(c.edges.is_empty());
        assert!(c.contains_point(&[q(3), q(2)]));
        assert!(c.contains_point(&[q(0), q(-1)]));
        assert!(c.contains_point(&[q(3), q(9)]));
        assert!(!c.contains_point(&[q(10), q(10)]));
        assert_eq!(find_cycle(&c).unwrap(), None);
    }

    #[test]
    fn triangle_with_cycle() {
        for k in 1..=4 {
            let c = curve(&format!("x^2*y + x*y + x*y^2 + t^{k}"));
            let mut vs = c.vertices.clone();
            vs.sort();
            assert_eq!(vs, vec![[q(0), q(0)], [q(0), q(k)], [q(k), q(0)]]);
            assert!(c.edges.iter().all(|e| e.length == q(k)));
            let cyc = find_cycle(&c).unwrap().unwrap();
            assert_eq!(cyc.total_lattice_length, q(3 * k));
            assert_eq!(cyc.edges.len(), 3);
            assert_eq!(c.subdivision.cells.len(), 3);
            assert!(c.subdivision.is_unimodular());
        }
    }

    #[test]
    fn weierstrass_form_has_no_cycle() {
        // y^2 = x^3 + A x + B, v(A) = 2, v(B) = 6
        let c = curve("y^2 - x^3 - t^2*x - t^6");
        assert_eq!(c.vertices, vec![[q(1), frac(3, 2)], [q(4), q(3)]]);
        assert_eq!(c.edges.len(), 1);
        assert_eq!(c.edges[0].dir, [2, 1]);
        assert_eq!(c.edges[0].length, frac(3, 2));
        assert_eq!(c.rays.len(), 4);
        assert_eq!(find_cycle(&c).unwrap(), None);
        assert!(c.balancing_defects().iter().all(|d| *d == [0, 0]));
        let c = curve("y^2 - x^3 - t^4*x - t^3");
        assert_eq!(c.vertices, vec![[q(1), frac(3, 2)]]);
        assert_eq!(c.rays.len(), 3);
    }

    #[test]
    fn subdivision_examples() {
        let f = TropicalPolynomial::bivariate([([0, 0], q(0)), ([1, 0], q(0)), ([0, 1], q(0))]);
        let s = dual_subdivision(&f).unwrap();
        assert_eq!(s.cells.len(), 1);
        assert_eq!(s.cells[0].vertices, vec![[0, 0], [1, 0], [0, 1]]);
        let single = TropicalPolynomial::bivariate([([1, 1], q(0))]);
        assert!(dual_subdivision(&single).unwrap().cells.is_empty());
        assert_eq!(curve_of(&single), Err(CurveError::DegenerateInput));
    }

    #[test]
    fn segment_newton_polygon_gives_lines() {
        let c = curve("x^2 + t*x + t^3 + 0*y");
        // lines x = 1 and x = 2
        let mut vs = c.vertices.clone();
        vs.sort();
        assert_eq!(vs, vec![[q(1), q(0)], [q(2), q(0)]]);
        assert!(c.contains_point(&[q(1), q(-7)]));
        assert!(c.contains_point(&[q(2), q(5)]));
        assert!(!c.contains_point(&[q(3), q(0)]));
        assert!(c.balancing_defects().iter().all(|d| *d == [0, 0]));
    }

    #[test]
    fn heavy_edges() {
        let c = curve("y^2 + t^2 + x");
        assert!(c.rays.iter().any(|r| r.weight == 2));
        assert!(c.balancing_defects().iter().all(|d| *d == [0, 0]));
    }

    #[test]
    fn lattice_lengths() {
        assert_eq!(lattice_length(&[q(0), q(3)], &[q(3), q(0)]).unwrap(), q(3));
        assert_eq!(lattice_length(&[q(0), q(0)], &[q(0), q(5)]).unwrap(), q(5));
        assert_eq!(lattice_length(&[q(0), q(0)], &[q(2), q(4)]).unwrap(), q(2));
        assert_eq!(lattice_length(&[q(1), q(1)], &[q(1), q(1)]), Err(CurveError::ZeroLengthEdge));
    }

    #[test]
    fn json_shape() {
        let c = curve("x^2*y + x*y + x*y^2 + t^3");
        let j = c.to_json();
        assert_eq!(j["vertices"].as_array().unwrap().len(), 3);
        assert_eq!(j["edges"][0]["len"], "3");
        assert_eq!(j["rays"].as_array().unwrap().len(), 3);
    }
}
