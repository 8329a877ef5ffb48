//! Deterministic SVG rendering of plane tropical curves.

use std::fmt::Write;

use crate::curve::{CycleReport, TropicalPlaneCurve};
use crate::rational::{fmt_q, to_f64};

const SIZE: f64 = 480.0;
const MARGIN: f64 = 1.0;

struct View {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
    scale: f64,
}

impl View {
    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.x0) * self.scale, (self.y1 - y) * self.scale)
    }

    // Parameter at which the ray from (x, y) along (dx, dy) leaves the box.
    fn exit(&self, x: f64, y: f64, dx: f64, dy: f64) -> f64 {
        let mut s = f64::INFINITY;
        if dx > 0.0 {
            s = s.min((self.x1 - x) / dx);
        } else if dx < 0.0 {
            s = s.min((self.x0 - x) / dx);
        }
        if dy > 0.0 {
            s = s.min((self.y1 - y) / dy);
        } else if dy < 0.0 {
            s = s.min((self.y0 - y) / dy);
        }
        s.max(0.0)
    }
}

fn fit(curve: &TropicalPlaneCurve) -> View {
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for v in &curve.vertices {
        xs.push(to_f64(&v[0]));
        ys.push(to_f64(&v[1]));
    }
    for r in &curve.rays {
        let v = &curve.vertices[r.v];
        xs.push(to_f64(&v[0]) + r.dir[0] as f64);
        ys.push(to_f64(&v[1]) + r.dir[1] as f64);
    }
    if xs.is_empty() {
        xs.push(0.0);
        ys.push(0.0);
    }
    let lo = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min) - MARGIN;
    let hi = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + MARGIN;
    let (x0, x1, y0, y1) = (lo(&xs), hi(&xs), lo(&ys), hi(&ys));
    let scale = SIZE / (x1 - x0).max(y1 - y0);
    View { x0, y0, x1, y1, scale }
}

/// Renders `curve`, drawing the cycle edges (if given) in a highlight colour.
pub fn render(curve: &TropicalPlaneCurve, cycle: Option<&CycleReport>) -> String {
    let view = fit(curve);
    let w = (view.x1 - view.x0) * view.scale;
    let h = (view.y1 - view.y0) * view.scale;
    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.3}" height="{h:.3}" viewBox="0 0 {w:.3} {h:.3}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect x="0" y="0" width="{w:.3}" height="{h:.3}" fill="white"/>"#).unwrap();
    writeln!(out, r#"<g stroke="black" stroke-width="2" stroke-linecap="round">"#).unwrap();
    for (k, e) in curve.edges.iter().enumerate() {
        let a = &curve.vertices[e.v[0]];
        let b = &curve.vertices[e.v[1]];
        let (ax, ay) = view.px(to_f64(&a[0]), to_f64(&a[1]));
        let (bx, by) = view.px(to_f64(&b[0]), to_f64(&b[1]));
        let on_cycle = cycle.is_some_and(|c| c.edges.contains(&k));
        let style = if on_cycle { r#" stroke="crimson" stroke-width="4""# } else { "" };
        writeln!(
            out,
            r#"<line x1="{ax:.3}" y1="{ay:.3}" x2="{bx:.3}" y2="{by:.3}"{style}><title>len {}</title></line>"#,
            fmt_q(&e.length)
        )
        .unwrap();
    }
    for r in &curve.rays {
        let v = &curve.vertices[r.v];
        let (x, y) = (to_f64(&v[0]), to_f64(&v[1]));
        let (dx, dy) = (r.dir[0] as f64, r.dir[1] as f64);
        let s = view.exit(x, y, dx, dy);
        let (ax, ay) = view.px(x, y);
        let (bx, by) = view.px(x + s * dx, y + s * dy);
        writeln!(out, r#"<line x1="{ax:.3}" y1="{ay:.3}" x2="{bx:.3}" y2="{by:.3}" stroke-dasharray="6 3"/>"#).unwrap();
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, r#"<g fill="black">"#).unwrap();
    for v in &curve.vertices {
        let (x, y) = view.px(to_f64(&v[0]), to_f64(&v[1]));
        writeln!(
            out,
            r#"<circle cx="{x:.3}" cy="{y:.3}" r="4"><title>({}, {})</title></circle>"#,
            fmt_q(&v[0]),
            fmt_q(&v[1])
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, "</svg>").unwrap();
    out
}
