//! Schematic SVG chord diagrams. The surface is drawn as the usual
//! `4G`-gon `a1 b1 a1^-1 b1^-1 ...`; each letter of a curve is a crossing
//! of the matching edge pair, and consecutive crossings are joined by a
//! chord. This shows combinatorics only, not an isotopy-faithful picture.

use std::f64::consts::PI;
use std::fmt::Write;

use crate::diagrams::MultisectionDiagram;
use crate::freewords::Letter;

const SIZE: f64 = 640.0;
const RADIUS: f64 = 250.0;
const COLORS: [&str; 8] = [
    "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
const DASHES: [&str; 3] = ["none", "6 3", "2 3"];

struct Polygon {
    corners: Vec<(f64, f64)>,
}

impl Polygon {
    fn new(edges: usize) -> Self {
        let c = SIZE / 2.0;
        let corners = (0..edges)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / edges as f64 - PI / 2.0;
                (c + RADIUS * t.cos(), c + RADIUS * t.sin())
            })
            .collect();
        Polygon { corners }
    }

    fn point(&self, edge: usize, t: f64) -> (f64, f64) {
        let n = self.corners.len();
        let (x0, y0) = self.corners[edge];
        let (x1, y1) = self.corners[(edge + 1) % n];
        (x0 + t * (x1 - x0), y0 + t * (y1 - y0))
    }
}

/// Edge crossed when leaving through `l`, and the identified edge it
/// re-enters through.
fn edges_of(l: Letter) -> (usize, usize) {
    let idx = l.index();
    let pair = (idx - 1) / 2;
    let base = 4 * pair + if idx % 2 == 1 { 0 } else { 1 };
    if l.is_positive() {
        (base, base + 2)
    } else {
        (base + 2, base)
    }
}

pub fn render_svg(d: &MultisectionDiagram) -> String {
    let g = d.genus();
    let rank = 2 * g;
    let poly = Polygon::new(4 * g);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{h}" viewBox="0 0 {SIZE} {h}">"#,
        h = SIZE + 20.0 * d.system_count() as f64
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if g > 0 {
        let pts: Vec<String> = poly.corners.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            svg,
            r#"<polygon points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
        for pair in 0..g {
            for (k, name) in [
                format!("a{}", pair + 1),
                format!("b{}", pair + 1),
                format!("a{}'", pair + 1),
                format!("b{}'", pair + 1),
            ]
            .iter()
            .enumerate()
            {
                let (x, y) = poly.point(4 * pair + k, 0.5);
                let c = SIZE / 2.0;
                let (lx, ly) = (c + (x - c) * 1.08, c + (y - c) * 1.08);
                let _ = writeln!(
                    svg,
                    r#"<text x="{lx:.2}" y="{ly:.2}" font-size="12" text-anchor="middle">{name}</text>"#
                );
            }
        }
    }

    // crossings of each generator, numbered in drawing order
    let mut total = vec![0usize; rank];
    for sys in d.systems() {
        for c in sys.curves() {
            for l in c.letters() {
                total[l.index() - 1] += 1;
            }
        }
    }
    let mut seen = vec![0usize; rank];
    let c = SIZE / 2.0;
    for (si, sys) in d.systems().iter().enumerate() {
        let color = COLORS[si % COLORS.len()];
        let dash = DASHES[(si / COLORS.len()) % DASHES.len()];
        let _ = writeln!(
            svg,
            r#"<g id="system-{}" stroke="{color}" stroke-dasharray="{dash}" stroke-width="1.5" fill="none">"#,
            si + 1
        );
        for curve in sys.curves() {
            let letters = curve.letters();
            // exit point and matching entry point for each crossing
            let crossings: Vec<((f64, f64), (f64, f64))> = letters
                .iter()
                .map(|&l| {
                    let i = l.index() - 1;
                    seen[i] += 1;
                    let t = seen[i] as f64 / (total[i] + 1) as f64;
                    let (out_edge, in_edge) = edges_of(l);
                    let (t_out, t_in) = if l.is_positive() { (t, 1.0 - t) } else { (1.0 - t, t) };
                    (poly.point(out_edge, t_out), poly.point(in_edge, t_in))
                })
                .collect();
            let n = crossings.len();
            for k in 0..n {
                let (_, (x0, y0)) = crossings[k];
                let ((x1, y1), _) = crossings[(k + 1) % n];
                let (mx, my) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
                let (qx, qy) = (mx + (c - mx) * 0.4, my + (c - my) * 0.4);
                let _ = writeln!(svg, r#"<path d="M {x0:.2} {y0:.2} Q {qx:.2} {qy:.2} {x1:.2} {y1:.2}"/>"#);
            }
        }
        let _ = writeln!(svg, "</g>");
        let ly = SIZE + 20.0 * si as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="20" y1="{ly}" x2="60" y2="{ly}" stroke="{color}" stroke-dasharray="{dash}" stroke-width="2"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="70" y="{}" font-size="12">{}</text>"#,
            ly + 4.0,
            sys.label()
        );
    }
    svg.push_str("</svg>\n");
    svg
}
