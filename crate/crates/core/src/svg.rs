//! Deterministic SVG drawings of instances, cell partitions and trees.

use std::fmt::Write as _;

use crate::geom::Color;
use crate::grid::{CellComplex, CellKind, PieceKind};
use crate::instance::Instance;
use crate::pipeline::Solution;
use crate::surd::SPoint;

const CANVAS: f64 = 800.0;
const MARGIN: f64 = 20.0;

/// Maps lattice coordinates onto the canvas, y pointing up.
struct View {
    min_x: f64,
    max_y: f64,
    scale: f64,
    width: f64,
    height: f64,
}

impl View {
    fn new(bounds: (f64, f64, f64, f64)) -> Self {
        let (min_x, min_y, max_x, max_y) = bounds;
        let span = (max_x - min_x).max(max_y - min_y).max(1.0);
        let scale = (CANVAS - 2.0 * MARGIN) / span;
        Self {
            min_x,
            max_y,
            scale,
            width: (max_x - min_x) * scale + 2.0 * MARGIN,
            height: (max_y - min_y) * scale + 2.0 * MARGIN,
        }
    }

    fn x(&self, x: f64) -> f64 {
        MARGIN + (x - self.min_x) * self.scale
    }

    fn y(&self, y: f64) -> f64 {
        MARGIN + (self.max_y - y) * self.scale
    }
}

/// Layers to draw.
#[derive(Clone, Copy, Debug, Default)]
pub struct Layers<'a> {
    pub complex: Option<&'a CellComplex>,
    /// Draw the initial grid cells shaded by kind instead of final cells.
    pub initial_cells: bool,
    pub edges: Option<&'a [(usize, usize)]>,
    /// Edges before this index are drawn as cell-internal.
    pub star_edges: usize,
}

fn bounds(inst: &Instance, cx: Option<&CellComplex>) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut grow = |x: f64, y: f64| {
        b = (b.0.min(x), b.1.min(y), b.2.max(x), b.3.max(y));
    };
    for p in inst.points() {
        grow(p.pos.x as f64, p.pos.y as f64);
    }
    if let Some(cx) = cx {
        let f = &cx.frame.field;
        for (c, r) in [(0, 0), (cx.frame.cols, cx.frame.rows)] {
            let (x, y) = f.to_f64_point(cx.frame.vertex(c, r));
            grow(x, y);
        }
    }
    b
}

fn polygon(out: &mut String, view: &View, cx: &CellComplex, pts: &[SPoint], class: &str) {
    let f = &cx.frame.field;
    let coords: Vec<String> = pts
        .iter()
        .map(|p| {
            let (x, y) = f.to_f64_point(*p);
            format!("{:.2},{:.2}", view.x(x), view.y(y))
        })
        .collect();
    let _ = writeln!(out, "<polygon class=\"{class}\" points=\"{}\"/>", coords.join(" "));
}

const STYLE: &str = "<style>\
.grid{stroke:#bbb;stroke-width:0.5}\
.cell{fill:#f4f4f4;stroke:#888;stroke-width:0.7}\
.bichromatic{fill:#eef5e9}.mono-r{fill:#fbeaea}.mono-b{fill:#e9eefb}.partitioned{fill:#f2f2f2}\
.lune{fill:#f6d98b;fill-opacity:0.6}.disk{fill:#c9a0dc;fill-opacity:0.6}\
.star{stroke:#555;stroke-width:1}.link{stroke:#2a9d3a;stroke-width:2}\
.red{fill:#d62828}.blue{fill:#1d4ed8}\
</style>";

pub fn render_svg(inst: &Instance, layers: Layers<'_>) -> String {
    let view = View::new(bounds(inst, layers.complex));
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.2} {:.2}\">",
        view.width.ceil(),
        view.height.ceil(),
        view.width,
        view.height
    );
    out.push_str(STYLE);
    out.push('\n');
    if let Some(cx) = layers.complex {
        let fr = &cx.frame;
        let f = &fr.field;
        if layers.initial_cells {
            for c in &cx.cells {
                let class = match c.kind {
                    CellKind::Bichromatic => "bichromatic",
                    CellKind::Mono(Color::Red) => "mono-r",
                    CellKind::Mono(Color::Blue) => "mono-b",
                    CellKind::Empty => continue,
                };
                let class = if c.status.is_kept() { class } else { "partitioned" };
                polygon(&mut out, &view, cx, &fr.square(c.id), class);
            }
        } else {
            for fc in &cx.final_cells {
                polygon(&mut out, &view, cx, &fc.region, "cell");
                for piece in &fc.pieces {
                    match piece.kind {
                        PieceKind::Trapezoid => {}
                        PieceKind::EndTriangle(e) => {
                            polygon(&mut out, &view, cx, &fr.end_triangle(piece.from, piece.side, e), "lune")
                        }
                        PieceKind::Disk(e) => {
                            polygon(&mut out, &view, cx, &fr.end_triangle(piece.from, piece.side, e), "disk")
                        }
                    }
                }
            }
        }
        let (x0, y0) = f.to_f64_point(fr.vertex(0, 0));
        let (x1, y1) = f.to_f64_point(fr.vertex(fr.cols, fr.rows));
        for c in 0..=fr.cols {
            let (x, _) = f.to_f64_point(fr.vertex(c, 0));
            let _ = writeln!(
                out,
                "<line class=\"grid\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"/>",
                view.x(x),
                view.y(y0),
                view.x(x),
                view.y(y1)
            );
        }
        for r in 0..=fr.rows {
            let (_, y) = f.to_f64_point(fr.vertex(0, r));
            let _ = writeln!(
                out,
                "<line class=\"grid\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"/>",
                view.x(x0),
                view.y(y),
                view.x(x1),
                view.y(y)
            );
        }
    }
    if let Some(edges) = layers.edges {
        for (k, &(a, b)) in edges.iter().enumerate() {
            let (pa, pb) = (inst.pos(a), inst.pos(b));
            let class = if k < layers.star_edges { "star" } else { "link" };
            let _ = writeln!(
                out,
                "<line class=\"{class}\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"/>",
                view.x(pa.x as f64),
                view.y(pa.y as f64),
                view.x(pb.x as f64),
                view.y(pb.y as f64)
            );
        }
    }
    for p in inst.points() {
        let class = match p.color {
            Color::Red => "red",
            Color::Blue => "blue",
        };
        let _ = writeln!(
            out,
            "<circle class=\"{class}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\"/>",
            view.x(p.pos.x as f64),
            view.y(p.pos.y as f64)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// One drawing per construction stage, with file names.
pub fn stage_svgs(inst: &Instance, sol: &Solution) -> Vec<(String, String)> {
    let cx = sol.complex.as_ref();
    let star = &sol.edges[..sol.star_edges];
    vec![
        ("01-points.svg".into(), render_svg(inst, Layers::default())),
        ("02-grid.svg".into(), render_svg(inst, Layers { complex: cx, initial_cells: true, ..Layers::default() })),
        ("03-cells.svg".into(), render_svg(inst, Layers { complex: cx, ..Layers::default() })),
        (
            "04-stars.svg".into(),
            render_svg(inst, Layers { complex: cx, edges: Some(star), star_edges: star.len(), ..Layers::default() }),
        ),
        (
            "05-tree.svg".into(),
            render_svg(
                inst,
                Layers { complex: cx, edges: Some(&sol.edges), star_edges: sol.star_edges, ..Layers::default() },
            ),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;

    #[test]
    fn two_points_one_edge() {
        let inst = Instance::new(vec![(Point::new(0, 0), Color::Red), (Point::new(1, 0), Color::Blue)], 0).unwrap();
        let svg = render_svg(&inst, Layers { edges: Some(&[(0, 1)]), ..Layers::default() });
        assert_eq!(svg.matches("<circle").count(), 2);
        assert_eq!(svg.matches("<line").count(), 1);
        assert!(svg.contains("class=\"red\""));
        assert!(svg.contains("class=\"blue\""));
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }
}
