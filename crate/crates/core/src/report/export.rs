use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::graph::DirectedGraph;
use crate::metrics::cycle_members;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportFormat {
    Dot,
    Graphml,
}

fn cycle_mask(graph: &DirectedGraph) -> Vec<bool> {
    let mut mask = vec![false; graph.node_count()];
    for v in cycle_members(graph) {
        mask[v.0] = true;
    }
    mask
}

fn style(on_cycle: bool) -> (&'static str, &'static str) {
    if on_cycle {
        ("triangle", "blue")
    } else {
        ("circle", "red")
    }
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

pub(crate) fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && !matches!(c, '\t' | '\n' | '\r') => {}
            _ => out.push(c),
        }
    }
    out
}

/// Cycle members as blue triangles, everything else as red circles.
pub fn write_dot<W: Write>(graph: &DirectedGraph, mut w: W) -> std::io::Result<()> {
    let mask = cycle_mask(graph);
    writeln!(w, "digraph network {{")?;
    writeln!(w, "  node [style=filled];")?;
    for v in graph.nodes() {
        let (shape, color) = style(mask[v.0]);
        writeln!(
            w,
            "  {} [shape={shape}, color={color}, fillcolor={color}];",
            dot_quote(graph.label(v))
        )?;
    }
    for e in graph.edges() {
        writeln!(w, "  {} -> {};", dot_quote(graph.label(e.source)), dot_quote(graph.label(e.target)))?;
    }
    writeln!(w, "}}")
}

pub fn write_graphml<W: Write>(graph: &DirectedGraph, mut w: W) -> std::io::Result<()> {
    let mask = cycle_mask(graph);
    writeln!(w, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(w, r#"<graphml xmlns="http://graphml.graphdrawing.org/xmlns">"#)?;
    writeln!(w, r#"  <key id="label" for="node" attr.name="label" attr.type="string"/>"#)?;
    writeln!(w, r#"  <key id="shape" for="node" attr.name="shape" attr.type="string"/>"#)?;
    writeln!(w, r#"  <key id="color" for="node" attr.name="color" attr.type="string"/>"#)?;
    writeln!(w, r#"  <key id="cycle" for="node" attr.name="in_cycle" attr.type="boolean"/>"#)?;
    writeln!(w, r#"  <graph id="G" edgedefault="directed">"#)?;
    for v in graph.nodes() {
        let (shape, color) = style(mask[v.0]);
        writeln!(
            w,
            r#"    <node id="n{}"><data key="label">{}</data><data key="shape">{shape}</data><data key="color">{color}</data><data key="cycle">{}</data></node>"#,
            v.0,
            xml_escape(graph.label(v)),
            mask[v.0]
        )?;
    }
    for (i, e) in graph.edges().enumerate() {
        writeln!(w, r#"    <edge id="e{i}" source="n{}" target="n{}"/>"#, e.source.0, e.target.0)?;
    }
    writeln!(w, "  </graph>")?;
    writeln!(w, "</graphml>")
}
