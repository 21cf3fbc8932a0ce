//! Static SVG and Graphviz output for configurations and plans.

use std::fmt::Write;

use quadmorph_core::plan::HopPlan;
use quadmorph_core::validate::StepKind;
use quadmorph_core::{Configuration, SlotGraph};

const UNIT: i32 = 40;
const PAD: i32 = 10;

/// One picture: module cells plus the edges present at that moment.
#[derive(Clone, Debug)]
pub struct Frame {
    pub title: String,
    pub config: Configuration,
    pub graph: SlotGraph,
}

impl Frame {
    pub fn of(config: &Configuration, title: impl Into<String>) -> Frame {
        Frame { title: title.into(), graph: config.graph(), config: config.clone() }
    }
}

/// The start, then one frame after every step of every hop.
pub fn plan_frames(start: &Configuration, hops: &[HopPlan]) -> Vec<Frame> {
    let mut frames = vec![Frame::of(start, "start")];
    let mut k = 0;
    for (h, hop) in hops.iter().enumerate() {
        let mut g = hop.from.graph();
        for (i, s) in hop.steps.iter().enumerate() {
            k += 1;
            match s.kind {
                StepKind::Connect => {
                    g.connect(s.edge);
                }
                StepKind::Disconnect => {
                    g.disconnect(s.edge.u, s.edge.v);
                }
            }
            let title = format!("step {k} (hop {h})");
            // the last step of a hop lands on the re-embedded shape
            if i + 1 == hop.steps.len() && g.pairs() == hop.mapped_goal().pairs() {
                frames.push(Frame::of(&hop.to, title));
            } else {
                frames.push(Frame { title, config: hop.from.clone(), graph: g.clone() });
            }
        }
    }
    frames
}

fn bounds(c: &Configuration) -> (i32, i32, i32, i32) {
    let xs = c.cells().iter().map(|p| p.0);
    let ys = c.cells().iter().map(|p| p.1);
    (xs.clone().min().unwrap_or(0), ys.clone().min().unwrap_or(0), xs.max().unwrap_or(0), ys.max().unwrap_or(0))
}

fn draw_frame(out: &mut String, f: &Frame, dx: i32, height: i32) {
    let (x0, y0, _, _) = bounds(&f.config);
    let center = |i: usize| {
        let (x, y) = f.config.cell(i);
        (dx + PAD + (x - x0) * UNIT + UNIT / 2, height - PAD - (y - y0) * UNIT - UNIT / 2)
    };
    let _ = writeln!(out, "<g class=\"frame\"><title>{}</title>", f.title);
    for i in 0..f.config.n() {
        let (cx, cy) = center(i);
        let _ = writeln!(
            out,
            "<rect class=\"module\" x=\"{}\" y=\"{}\" width=\"{UNIT}\" height=\"{UNIT}\" fill=\"#dde6f0\" stroke=\"#345\"/>",
            cx - UNIT / 2,
            cy - UNIT / 2
        );
        let _ = writeln!(
            out,
            "<text x=\"{cx}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">{}</text>",
            cy + 4,
            f.config.id(i)
        );
    }
    for (a, b) in f.graph.pairs() {
        let ((ax, ay), (bx, by)) = (center(a), center(b));
        let (ca, cb) = (f.config.cell(a), f.config.cell(b));
        let adjacent = (ca.0 - cb.0).abs() + (ca.1 - cb.1).abs() == 1;
        let class = if adjacent { "edge" } else { "edge loop" };
        let dash = if adjacent { "" } else { " stroke-dasharray=\"4 3\"" };
        let _ = writeln!(out, "<line class=\"{class}\" x1=\"{ax}\" y1=\"{ay}\" x2=\"{bx}\" y2=\"{by}\" stroke=\"#c33\" stroke-width=\"2\"{dash}/>");
    }
    out.push_str("</g>\n");
}

pub fn svg_frames(frames: &[Frame]) -> String {
    let size = |f: &Frame| {
        let (x0, y0, x1, y1) = bounds(&f.config);
        ((x1 - x0 + 1) * UNIT + 2 * PAD, (y1 - y0 + 1) * UNIT + 2 * PAD)
    };
    let width: i32 = frames.iter().map(|f| size(f).0).sum();
    let height = frames.iter().map(|f| size(f).1).max().unwrap_or(0);
    let mut out = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n");
    let mut dx = 0;
    for f in frames {
        draw_frame(&mut out, f, dx, height);
        dx += size(f).0;
    }
    out.push_str("</svg>\n");
    out
}

pub fn config_svg(c: &Configuration) -> String {
    svg_frames(&[Frame::of(c, "configuration")])
}

pub fn plan_svg(start: &Configuration, hops: &[HopPlan]) -> String {
    svg_frames(&plan_frames(start, hops))
}

pub fn dot_frames(frames: &[Frame]) -> String {
    let mut out = String::from("graph quadmorph {\n  node [shape=square];\n");
    for (k, f) in frames.iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{k} {{\n    label=\"{}\";", f.title);
        for i in 0..f.config.n() {
            let (x, y) = f.config.cell(i);
            let _ = writeln!(out, "    f{k}_{} [label=\"{}\", pos=\"{x},{y}!\"];", f.config.id(i), f.config.id(i));
        }
        for e in f.graph.edges() {
            let (a, b) = (f.config.id(e.u), f.config.id(e.v));
            let _ = writeln!(out, "    f{k}_{a} -- f{k}_{b} [taillabel=\"{}\", headlabel=\"{}\"];", e.su, e.sv);
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

pub fn config_dot(c: &Configuration) -> String {
    dot_frames(&[Frame::of(c, "configuration")])
}

pub fn plan_dot(start: &Configuration, hops: &[HopPlan]) -> String {
    dot_frames(&plan_frames(start, hops))
}

#[cfg(test)]
mod tests {
    use super::*;
    use quadmorph_core::plan::{plan, PlanParams};

    #[test]
    fn block_has_four_squares_and_four_edges() {
        let c = Configuration::from_cells(&[(0, 0), (1, 0), (0, 1), (1, 1)]).unwrap();
        let svg = config_svg(&c);
        assert_eq!(svg.matches("<rect").count(), 4);
        assert_eq!(svg.matches("class=\"edge\"").count(), 4);
        for id in 1..=4 {
            assert!(svg.contains(&format!(">{id}</text>")));
        }
        let dot = config_dot(&c);
        assert_eq!(dot.matches(" -- ").count(), 4);
    }

    #[test]
    fn one_frame_per_step() {
        let start = Configuration::from_cells(&[(0, 0), (1, 0), (2, 0), (0, 1)]).unwrap();
        let goal = Configuration::from_cells(&[(0, 0), (1, 0), (1, 1), (2, 1)]).unwrap();
        let p = plan(&start, &goal, &PlanParams::default()).unwrap();
        let frames = plan_frames(&p.start, &p.hops);
        assert_eq!(frames.len(), 1 + p.step_count());
        let svg = plan_svg(&p.start, &p.hops);
        assert_eq!(svg.matches("<g class=\"frame\">").count(), frames.len());
        let last = frames.last().unwrap();
        assert!(last.graph.pairs().iter().all(|&(a, b)| {
            let (ca, cb) = (last.config.cell(a), last.config.cell(b));
            (ca.0 - cb.0).abs() + (ca.1 - cb.1).abs() == 1
        }));
    }
}
