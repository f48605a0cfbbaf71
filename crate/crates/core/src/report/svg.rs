use std::fmt::Write;

use super::export::xml_escape;
use super::NetworkReport;
use crate::distributions::{Ccdf, PowerLawFit};
use crate::graph::DirectedGraph;

const W: f64 = 640.0;
const H: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

const IN_COLOR: &str = "#1f77b4";
const OUT_COLOR: &str = "#d62728";

/// Maps data coordinates onto the plot rectangle.
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (W - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        H - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (H - TOP - BOTTOM)
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        (self.x0..=self.x1).contains(&x) && (self.y0..=self.y1).contains(&y)
    }
}

fn open(title: &str) -> String {
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        xml_escape(title)
    )
    .unwrap();
    s
}

fn axes(s: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - LEFT - RIGHT,
        H - TOP - BOTTOM
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        H - 12.0,
        xml_escape(xlabel)
    )
    .unwrap();
    let cy = (TOP + H - BOTTOM) / 2.0;
    writeln!(
        s,
        r#"<text x="18" y="{cy}" text-anchor="middle" transform="rotate(-90 18 {cy})">{}</text>"#,
        xml_escape(ylabel)
    )
    .unwrap();
    let _ = f;
}

fn xtick(s: &mut String, f: &Frame, x: f64, label: &str) {
    let p = f.px(x);
    let base = H - BOTTOM;
    writeln!(s, r#"<line x1="{p:.2}" y1="{base}" x2="{p:.2}" y2="{}" stroke="black"/>"#, base + 5.0).unwrap();
    writeln!(s, r#"<text x="{p:.2}" y="{}" text-anchor="middle">{label}</text>"#, base + 18.0).unwrap();
}

fn ytick(s: &mut String, f: &Frame, y: f64, label: &str) {
    let p = f.py(y);
    writeln!(s, r#"<line x1="{}" y1="{p:.2}" x2="{LEFT}" y2="{p:.2}" stroke="black"/>"#, LEFT - 5.0).unwrap();
    writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{label}</text>"#, LEFT - 8.0, p + 4.0).unwrap();
}

fn legend(s: &mut String, entries: &[(&str, &str)]) {
    for (i, (color, text)) in entries.iter().enumerate() {
        let y = TOP + 16.0 + 16.0 * i as f64;
        let x = W - RIGHT - 170.0;
        writeln!(s, r#"<rect x="{x}" y="{}" width="10" height="10" fill="{color}"/>"#, y - 9.0).unwrap();
        writeln!(s, r#"<text x="{}" y="{y}">{}</text>"#, x + 16.0, xml_escape(text)).unwrap();
    }
}

fn fit_segment(s: &mut String, f: &Frame, fit: &PowerLawFit, k_hi: f64, color: &str) {
    let lo = (fit.k_min as f64).max(fit.ols_shift + 1e-9);
    let hi = fit.k_max.map_or(k_hi, |k| k as f64);
    let mut pts = Vec::new();
    for i in 0..=64 {
        let k = lo * (hi / lo).powf(i as f64 / 64.0);
        let p = fit.ols_line(k);
        let (x, y) = (k.log10(), p.log10());
        if p > 0.0 && f.contains(x, y) {
            pts.push(format!("{:.2},{:.2}", f.px(x), f.py(y)));
        }
    }
    if pts.len() >= 2 {
        writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5" stroke-dasharray="6 4"/>"#,
            pts.join(" ")
        )
        .unwrap();
    }
}

/// Log-log overlay of both CCDFs with the regression lines over their fit
/// ranges and a vertical marker at the crossing.
pub fn ccdf_svg(title: &str, ccdf_in: &Ccdf, ccdf_out: &Ccdf, report: &NetworkReport) -> String {
    let positive = |c: &Ccdf| c.points().iter().filter(|p| p.0 > 0 && p.1 > 0.0).copied().collect::<Vec<_>>();
    let (pin, pout) = (positive(ccdf_in), positive(ccdf_out));
    let all: Vec<(u64, f64)> = pin.iter().chain(&pout).copied().collect();
    let k_hi = all.iter().map(|p| p.0).max().unwrap_or(10).max(10) as f64;
    let p_lo = all.iter().map(|p| p.1).fold(1.0, f64::min).min(0.1);
    let f = Frame {
        x0: 0.0,
        x1: k_hi.log10().ceil(),
        y0: p_lo.log10().floor(),
        y1: 0.0,
    };

    let mut s = open(title);
    axes(&mut s, &f, "k", "P(K >= k)");
    for e in 0..=f.x1 as i32 {
        xtick(&mut s, &f, e as f64, &format!("1e{e}"));
    }
    for e in (f.y0 as i32)..=0 {
        ytick(&mut s, &f, e as f64, &format!("1e{e}"));
    }

    for (pts, color) in [(&pin, IN_COLOR), (&pout, OUT_COLOR)] {
        for &(k, p) in pts {
            writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                f.px((k as f64).log10()),
                f.py(p.log10())
            )
            .unwrap();
        }
    }
    if let Some(fit) = report.fit_in.value() {
        fit_segment(&mut s, &f, fit, k_hi, IN_COLOR);
    }
    if let Some(fit) = report.fit_out.value() {
        fit_segment(&mut s, &f, fit, k_hi, OUT_COLOR);
    }
    if let Some(k) = report.crossing.value().and_then(|c| c.k_star) {
        let x = f.px(k.log10());
        writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{}" stroke="gray" stroke-dasharray="3 3"/>"#,
            H - BOTTOM
        )
        .unwrap();
        writeln!(s, r#"<text x="{:.2}" y="{}">k* = {k:.2}</text>"#, x + 4.0, TOP + 14.0).unwrap();
    }

    let gamma = |m: &super::Measured<PowerLawFit>| {
        m.value().map_or_else(|| "n/a".to_string(), |f| format!("{:.2}", f.gamma_ols))
    };
    legend(
        &mut s,
        &[
            (IN_COLOR, &format!("in-degree, gamma {}", gamma(&report.fit_in))),
            (OUT_COLOR, &format!("out-degree, gamma {}", gamma(&report.fit_out))),
        ],
    );
    s.push_str("</svg>\n");
    s
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|&st| st >= raw).unwrap_or(10.0 * mag)
}

/// k_out against k_in for every node, with the least-squares line and R².
pub fn scatter_svg(title: &str, graph: &DirectedGraph, report: &NetworkReport) -> String {
    let pts: Vec<(f64, f64)> = graph
        .nodes()
        .map(|v| (graph.in_degree(v) as f64, graph.out_degree(v) as f64))
        .collect();
    let xmax = pts.iter().map(|p| p.0).fold(1.0, f64::max);
    let ymax = pts.iter().map(|p| p.1).fold(1.0, f64::max);
    let (sx, sy) = (nice_step(xmax), nice_step(ymax));
    let f = Frame {
        x0: 0.0,
        x1: (xmax / sx).ceil() * sx,
        y0: 0.0,
        y1: (ymax / sy).ceil() * sy,
    };

    let mut s = open(title);
    axes(&mut s, &f, "in-degree", "out-degree");
    let mut t = 0.0;
    while t <= f.x1 + 1e-9 {
        xtick(&mut s, &f, t, &format!("{t}"));
        t += sx;
    }
    let mut t = 0.0;
    while t <= f.y1 + 1e-9 {
        ytick(&mut s, &f, t, &format!("{t}"));
        t += sy;
    }
    for &(x, y) in &pts {
        writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{IN_COLOR}" fill-opacity="0.6"/>"#,
            f.px(x),
            f.py(y)
        )
        .unwrap();
    }
    if let Some(r) = report.correlation_raw.value() {
        // Clip y = a + b x to the frame.
        let mut ends = Vec::new();
        for x in [f.x0, f.x1] {
            ends.push((x, r.intercept + r.slope * x));
        }
        for y in [f.y0, f.y1] {
            if r.slope != 0.0 {
                ends.push(((y - r.intercept) / r.slope, y));
            }
        }
        let mut inside: Vec<(f64, f64)> = ends.into_iter().filter(|&(x, y)| f.contains(x, y)).collect();
        inside.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let (Some(a), Some(b)) = (inside.first(), inside.last()) {
            writeln!(
                s,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{OUT_COLOR}" stroke-width="1.5"/>"#,
                f.px(a.0),
                f.py(a.1),
                f.px(b.0),
                f.py(b.1)
            )
            .unwrap();
        }
        let mut label = format!("R² = {:.3}", r.r2);
        if let Some(fr) = report.correlation_filtered.value() {
            if !report.special_nodes.is_empty() {
                label += &format!(" (filtered {:.3})", fr.r2);
            }
        }
        writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, LEFT + 10.0, TOP + 18.0, xml_escape(&label)).unwrap();
    }
    s.push_str("</svg>\n");
    s
}
