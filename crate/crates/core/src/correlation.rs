//! In-degree versus out-degree correlation and the special-node filter.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{degrees, filter_nodes, DegreeRecord, DirectedGraph, NodeId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub r2: f64,
    pub pearson_r: f64,
    pub slope: f64,
    pub intercept: f64,
    pub n_points: usize,
    pub special_nodes: Vec<NodeId>,
}

/// Which degrees the filtered correlation uses for the surviving nodes.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterMode {
    /// Degrees of the induced subgraph after removal.
    #[default]
    Recompute,
    /// Original degrees, with the removed rows simply dropped.
    Freeze,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialNodeRule {
    pub out_max: usize,
    pub in_min_exclusive: usize,
}

impl Default for SpecialNodeRule {
    fn default() -> Self {
        SpecialNodeRule {
            out_max: 0,
            in_min_exclusive: 50,
        }
    }
}

impl SpecialNodeRule {
    pub fn matches(&self, d: &DegreeRecord) -> bool {
        d.k_out <= self.out_max && d.k_in > self.in_min_exclusive
    }
}

/// Least squares of `ys` on `xs`.
pub fn scatter_correlation(xs: &[f64], ys: &[f64]) -> Result<CorrelationResult> {
    let n = xs.len();
    if n < 3 || ys.len() != n {
        return Err(Error::DegenerateScatter);
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::DegenerateScatter);
    }
    let pearson_r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let slope = sxy / sxx;
    Ok(CorrelationResult {
        r2: pearson_r * pearson_r,
        pearson_r,
        slope,
        intercept: my - slope * mx,
        n_points: n,
        special_nodes: Vec::new(),
    })
}

fn records_correlation(records: &[DegreeRecord]) -> Result<CorrelationResult> {
    let xs: Vec<f64> = records.iter().map(|d| d.k_in as f64).collect();
    let ys: Vec<f64> = records.iter().map(|d| d.k_out as f64).collect();
    scatter_correlation(&xs, &ys)
}

/// Regresses k_out on k_in over every node.
pub fn degree_correlation(graph: &DirectedGraph) -> Result<CorrelationResult> {
    let mut r = records_correlation(&degrees(graph))?;
    r.special_nodes = find_special_nodes(graph, &SpecialNodeRule::default());
    Ok(r)
}

/// Nodes matching `rule`, highest in-degree first.
pub fn find_special_nodes(graph: &DirectedGraph, rule: &SpecialNodeRule) -> Vec<NodeId> {
    let mut hits: Vec<DegreeRecord> = degrees(graph).into_iter().filter(|d| rule.matches(d)).collect();
    hits.sort_by(|a, b| b.k_in.cmp(&a.k_in).then(a.node.cmp(&b.node)));
    hits.into_iter().map(|d| d.node).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FilteredCorrelation {
    pub raw: CorrelationResult,
    /// `Err` carries the reason the filtered scatter could not be fitted.
    pub filtered: std::result::Result<CorrelationResult, String>,
}

/// Correlation before and after removing the special nodes.
pub fn filtered_correlation(
    graph: &DirectedGraph,
    rule: &SpecialNodeRule,
    mode: FilterMode,
) -> Result<FilteredCorrelation> {
    let special = find_special_nodes(graph, rule);
    let mut raw = records_correlation(&degrees(graph))?;
    raw.special_nodes = special.clone();
    if special.is_empty() {
        return Ok(FilteredCorrelation {
            filtered: Ok(raw.clone()),
            raw,
        });
    }

    let filtered = match mode {
        FilterMode::Recompute => filter_nodes(graph, |d| rule.matches(d))
            .and_then(|sub| records_correlation(&degrees(&sub))),
        FilterMode::Freeze => {
            let kept: Vec<DegreeRecord> = degrees(graph).into_iter().filter(|d| !rule.matches(d)).collect();
            records_correlation(&kept)
        }
    }
    .map(|mut r| {
        r.special_nodes = special;
        r
    })
    .map_err(|e| e.to_string());

    Ok(FilteredCorrelation { raw, filtered })
}

/// Writes `label\tk_in\tk_out` rows in node order.
pub fn write_scatter<W: Write>(graph: &DirectedGraph, mut out: W) -> Result<()> {
    writeln!(out, "# label\tk_in\tk_out")?;
    for d in degrees(graph) {
        writeln!(out, "{}\t{}\t{}", graph.label(d.node), d.k_in, d.k_out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(xs: &[(f64, f64)]) -> Result<CorrelationResult> {
        let (a, b): (Vec<f64>, Vec<f64>) = xs.iter().copied().unzip();
        scatter_correlation(&a, &b)
    }

    #[test]
    fn perfect_lines() {
        let r = pairs(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]).unwrap();
        assert!((r.r2 - 1.0).abs() < 1e-12 && (r.slope - 1.0).abs() < 1e-12);
        let r = pairs(&[(1.0, 3.0), (2.0, 2.0), (3.0, 1.0)]).unwrap();
        assert!((r.r2 - 1.0).abs() < 1e-12 && (r.slope + 1.0).abs() < 1e-12);
        assert!(r.pearson_r < 0.0);
    }

    #[test]
    fn zero_variance_is_degenerate() {
        assert!(matches!(pairs(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)]), Err(Error::DegenerateScatter)));
        assert!(matches!(pairs(&[(1.0, 2.0), (2.0, 2.0), (3.0, 2.0)]), Err(Error::DegenerateScatter)));
    }

    /// Node 0 is a sink with in-degree `k_in`, optionally with one out-edge.
    fn hub_graph(k_in: usize, out: bool) -> DirectedGraph {
        let mut edges: Vec<(usize, usize)> = (1..=k_in).map(|i| (i, 0)).collect();
        if out {
            edges.push((0, k_in + 1));
        }
        DirectedGraph::with_anonymous_nodes(k_in + 2, edges).unwrap().0
    }

    #[test]
    fn special_node_boundaries() {
        let rule = SpecialNodeRule::default();
        assert_eq!(find_special_nodes(&hub_graph(60, false), &rule), vec![NodeId(0)]);
        assert!(find_special_nodes(&hub_graph(50, false), &rule).is_empty());
        assert!(find_special_nodes(&hub_graph(60, true), &rule).is_empty());
        let never = SpecialNodeRule {
            out_max: usize::MAX,
            in_min_exclusive: usize::MAX,
        };
        assert!(find_special_nodes(&hub_graph(60, false), &never).is_empty());
    }

    #[test]
    fn no_special_nodes_means_identity() {
        let (g, _) = DirectedGraph::with_anonymous_nodes(4, [(0, 1), (1, 2), (2, 3), (0, 2), (1, 3)]).unwrap();
        let f = filtered_correlation(&g, &SpecialNodeRule::default(), FilterMode::Recompute).unwrap();
        assert_eq!(f.filtered.unwrap(), f.raw);
    }

    #[test]
    fn freeze_and_recompute_differ_when_removal_changes_degrees() {
        // 0 -> 1 -> 2, plus a hub 3 fed by 51 leaves.
        let mut edges = vec![(0, 1), (1, 2)];
        edges.extend((4..55).map(|i| (i, 3)));
        let (g, _) = DirectedGraph::with_anonymous_nodes(55, edges).unwrap();
        let rule = SpecialNodeRule::default();
        let rec = filtered_correlation(&g, &rule, FilterMode::Recompute).unwrap();
        let frz = filtered_correlation(&g, &rule, FilterMode::Freeze).unwrap();
        assert_eq!(rec.raw.special_nodes, vec![NodeId(3)]);
        // Leaves become isolated after removal; both modes keep 54 rows.
        assert_eq!(rec.filtered.as_ref().unwrap().n_points, 54);
        assert_ne!(rec.filtered.unwrap().slope, frz.filtered.unwrap().slope);
    }

    #[test]
    fn scatter_rows() {
        let (g, _) = DirectedGraph::with_anonymous_nodes(2, [(0, 1)]).unwrap();
        let mut buf = Vec::new();
        write_scatter(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# label\tk_in\tk_out\nv0\t0\t1\nv1\t1\t0\n");
    }
}
