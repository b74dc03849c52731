//! Plain-text SVG plots on a fixed 800×600 canvas.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use phenotopo_core::{BranchingEvent, PersistenceDiagram, PointCloud};

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;

const DGM0_COLOR: &str = "#1f77b4";
const DGM1_COLOR: &str = "#ff7f0e";
const CYCLE_COLOR: &str = "#d62728";
const PALETTE: [&str; 10] =
    ["#1f77b4", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#ff7f0e", "#393b79"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Linear map from data units to a pixel span.
#[derive(Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn at(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }
}

fn open(out: &mut String, title: &str) {
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    )
    .unwrap();
    writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>").unwrap();
    writeln!(out, "<text x=\"{}\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">{}</text>", WIDTH / 2.0, escape(title))
        .unwrap();
}

/// Frame, ticks and axis labels for a plot area.
fn axes(out: &mut String, x: Axis, y: Axis, x_label: &str, y_label: &str) {
    writeln!(
        out,
        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"black\"/>",
        x.px_lo,
        y.px_hi,
        x.px_hi - x.px_lo,
        y.px_lo - y.px_hi
    )
    .unwrap();
    for k in 0..=5 {
        let t = k as f64 / 5.0;
        let (vx, vy) = (x.lo + t * (x.hi - x.lo), y.lo + t * (y.hi - y.lo));
        let (px, py) = (x.at(vx), y.at(vy));
        writeln!(out, "<line x1=\"{px:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/>", y.px_lo, y.px_lo + 5.0)
            .unwrap();
        writeln!(out, "<text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{vx:.2}</text>", y.px_lo + 19.0).unwrap();
        writeln!(out, "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" stroke=\"black\"/>", x.px_lo - 5.0, x.px_lo)
            .unwrap();
        writeln!(out, "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{vy:.2}</text>", x.px_lo - 8.0, py + 4.0).unwrap();
    }
    writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
        (x.px_lo + x.px_hi) / 2.0,
        y.px_lo + 42.0,
        escape(x_label)
    )
    .unwrap();
    let (lx, ly) = (x.px_lo - 50.0, (y.px_lo + y.px_hi) / 2.0);
    writeln!(
        out,
        "<text x=\"{lx:.2}\" y=\"{ly:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 {lx:.2} {ly:.2})\">{}</text>",
        escape(y_label)
    )
    .unwrap();
}

fn legend(out: &mut String, x: f64, mut y: f64, entries: &[(String, String, bool)]) {
    for (label, color, square) in entries {
        if *square {
            writeln!(out, "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"10\" height=\"10\" fill=\"{color}\"/>", x - 5.0, y - 5.0)
                .unwrap();
        } else {
            writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"5\" fill=\"{color}\"/>").unwrap();
        }
        writeln!(out, "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>", x + 12.0, y + 4.0, escape(label)).unwrap();
        y += 20.0;
    }
}

/// Birth/death plot: dimension 0 as blue circles, dimension 1 as orange
/// squares, the diagonal dashed, essential classes on a row marked ∞ above
/// the plot area.
pub fn diagram_svg(diagram: &PersistenceDiagram, title: &str) -> String {
    let finite_max = diagram
        .pairs
        .iter()
        .flat_map(|p| [p.birth, if p.is_essential() { 0.0 } else { p.death }])
        .fold(0.0f64, f64::max);
    let hi = if finite_max > 0.0 { finite_max * 1.05 } else { 1.0 };
    let x = Axis { lo: 0.0, hi, px_lo: 90.0, px_hi: 570.0 };
    let y = Axis { lo: 0.0, hi, px_lo: 540.0, px_hi: 80.0 };
    let infinity_row = 62.0;

    let mut out = String::new();
    open(&mut out, title);
    axes(&mut out, x, y, "birth", "death");
    writeln!(
        out,
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>",
        x.at(0.0),
        y.at(0.0),
        x.at(hi),
        y.at(hi)
    )
    .unwrap();
    writeln!(
        out,
        "<line x1=\"{:.2}\" y1=\"{infinity_row:.2}\" x2=\"{:.2}\" y2=\"{infinity_row:.2}\" stroke=\"gray\" stroke-dasharray=\"2 3\"/>",
        x.px_lo, x.px_hi
    )
    .unwrap();
    writeln!(out, "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">∞</text>", x.px_lo - 8.0, infinity_row + 4.0).unwrap();

    for pair in &diagram.pairs {
        let px = x.at(pair.birth);
        let py = if pair.is_essential() { infinity_row } else { y.at(pair.death) };
        if pair.dimension == 0 {
            writeln!(out, "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"4\" fill=\"{DGM0_COLOR}\" fill-opacity=\"0.8\"/>").unwrap();
        } else {
            writeln!(
                out,
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"8\" height=\"8\" fill=\"{DGM1_COLOR}\" fill-opacity=\"0.9\"/>",
                px - 4.0,
                py - 4.0
            )
            .unwrap();
        }
    }
    legend(
        &mut out,
        610.0,
        100.0,
        &[("H0 (components)".into(), DGM0_COLOR.into(), false), ("H1 (holes)".into(), DGM1_COLOR.into(), true)],
    );
    out.push_str("</svg>\n");
    out
}

/// The normalized point cloud colored by season, with each event's
/// representative cycle drawn over it and numbered by rank.
pub fn events_svg(cloud: &PointCloud, events: &[BranchingEvent], title: &str) -> String {
    let x = Axis { lo: 0.0, hi: 1.0, px_lo: 90.0, px_hi: 600.0 };
    let y = Axis { lo: 0.0, hi: 1.0, px_lo: 540.0, px_hi: 60.0 };
    let seasons: BTreeMap<&str, &str> = cloud
        .points()
        .iter()
        .map(|p| p.season.as_str())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(k, s)| (s, PALETTE[k % PALETTE.len()]))
        .collect();

    let mut out = String::new();
    open(&mut out, title);
    axes(&mut out, x, y, "season day (scaled)", "risk margin (rescaled)");
    for p in cloud.points() {
        writeln!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{}\" fill-opacity=\"0.7\"/>",
            x.at(p.x),
            y.at(p.y),
            seasons[p.season.as_str()]
        )
        .unwrap();
    }
    let points = cloud.points();
    for (rank, event) in events.iter().enumerate() {
        writeln!(out, "<g stroke=\"{CYCLE_COLOR}\" stroke-width=\"2.5\" stroke-linecap=\"round\">").unwrap();
        for &(a, b) in &event.representative {
            let (pa, pb) = (&points[a], &points[b]);
            writeln!(
                out,
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"/>",
                x.at(pa.x),
                y.at(pa.y),
                x.at(pb.x),
                y.at(pb.y)
            )
            .unwrap();
        }
        out.push_str("</g>\n");
        if let Some(&(a, _)) = event.representative.iter().min_by(|l, r| {
            points[l.0].y.total_cmp(&points[r.0].y).reverse().then(l.cmp(r))
        }) {
            writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{:.2}\" fill=\"{CYCLE_COLOR}\" font-weight=\"bold\">{}</text>",
                x.at(points[a].x) + 4.0,
                y.at(points[a].y) - 6.0,
                rank + 1
            )
            .unwrap();
        }
    }
    let mut entries: Vec<(String, String, bool)> =
        seasons.iter().map(|(s, c)| (s.to_string(), c.to_string(), false)).collect();
    entries.push(("event cycle".into(), CYCLE_COLOR.into(), true));
    legend(&mut out, 630.0, 80.0, &entries);
    out.push_str("</svg>\n");
    out
}
