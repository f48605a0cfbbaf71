//! Directed network representation and edge-list I/O.
//!
//! Networks are simple digraphs: duplicate edges collapse and self-loops are
//! rejected at construction. Node ids are dense `0..N` in order of first
//! appearance; labels are kept alongside for reporting.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(
    Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub source: NodeId,
    pub target: NodeId,
}

/// In- and out-degree of a single node.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeRecord {
    pub node: NodeId,
    pub k_in: usize,
    pub k_out: usize,
}

/// Counts of edges discarded while building a simple digraph.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropCounts {
    pub duplicates_dropped: usize,
    pub self_loops_rejected: usize,
}

/// Immutable simple digraph with sorted adjacency in both directions.
#[derive(Clone, Debug)]
pub struct DirectedGraph {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    out_adj: Vec<Vec<NodeId>>,
    in_adj: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl DirectedGraph {
    /// Builds a graph over `labels.len()` nodes from `(source, target)` index
    /// pairs. Duplicates are collapsed and self-loops dropped; the returned
    /// counts say how many of each were seen.
    pub fn from_edges<I>(labels: Vec<String>, edges: I) -> Result<(Self, DropCounts)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = labels.len();
        let mut index = HashMap::with_capacity(n);
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), NodeId(i)).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate label {label:?}")));
            }
        }

        let mut drops = DropCounts::default();
        let mut out_adj: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for (s, t) in edges {
            if s >= n || t >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({s}, {t}) references a node outside 0..{n}"
                )));
            }
            if s == t {
                drops.self_loops_rejected += 1;
                continue;
            }
            out_adj[s].push(NodeId(t));
        }

        let mut in_adj: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        let mut edge_count = 0;
        for (s, succ) in out_adj.iter_mut().enumerate() {
            let before = succ.len();
            succ.sort_unstable();
            succ.dedup();
            drops.duplicates_dropped += before - succ.len();
            edge_count += succ.len();
            for t in succ.iter() {
                in_adj[t.0].push(NodeId(s));
            }
        }
        // Sources are visited in increasing order, so predecessor lists are
        // already sorted.

        Ok((
            DirectedGraph {
                labels,
                index,
                out_adj,
                in_adj,
                edge_count,
            },
            drops,
        ))
    }

    /// Graph with nodes labelled `v0..v{n-1}`.
    pub fn with_anonymous_nodes<I>(n: usize, edges: I) -> Result<(Self, DropCounts)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges((0..n).map(|i| format!("v{i}")).collect(), edges)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.labels.len()).map(NodeId)
    }

    pub fn successors(&self, v: NodeId) -> &[NodeId] {
        &self.out_adj[v.0]
    }

    pub fn predecessors(&self, v: NodeId) -> &[NodeId] {
        &self.in_adj[v.0]
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_adj[v.0].len()
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_adj[v.0].len()
    }

    pub fn has_edge(&self, source: NodeId, target: NodeId) -> bool {
        self.out_adj[source.0].binary_search(&target).is_ok()
    }

    /// Edges in (source, target) lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.out_adj.iter().enumerate().flat_map(|(s, succ)| {
            succ.iter().map(move |&t| Edge {
                source: NodeId(s),
                target: t,
            })
        })
    }

    /// Sorted, deduplicated neighbors of `v` ignoring direction.
    pub fn undirected_neighbors(&self, v: NodeId) -> Vec<NodeId> {
        merge_sorted(&self.out_adj[v.0], &self.in_adj[v.0])
    }

    /// Edge set keyed by labels, for comparing graphs whose ids differ.
    pub fn labeled_edge_set(&self) -> std::collections::BTreeSet<(String, String)> {
        self.edges()
            .map(|e| {
                (
                    self.labels[e.source.0].clone(),
                    self.labels[e.target.0].clone(),
                )
            })
            .collect()
    }
}

fn merge_sorted(a: &[NodeId], b: &[NodeId]) -> Vec<NodeId> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Separator {
    #[default]
    Tab,
    Comma,
    /// Any run of whitespace.
    Whitespace,
}

impl Separator {
    fn split<'a>(&self, line: &'a str) -> Vec<&'a str> {
        match self {
            Separator::Tab => line.split('\t').collect(),
            Separator::Comma => line.split(',').collect(),
            Separator::Whitespace => line.split_whitespace().collect(),
        }
    }

    fn as_char(&self) -> char {
        match self {
            Separator::Tab | Separator::Whitespace => '\t',
            Separator::Comma => ',',
        }
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct LoadOptions {
    pub separator: Separator,
    /// Treat each line as `target source` (customer listed first).
    pub reverse: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadSummary {
    pub nodes: usize,
    pub edges: usize,
    pub duplicates_dropped: usize,
    pub self_loops_rejected: usize,
}

impl fmt::Display for LoadSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "nodes={} edges={} duplicates_dropped={} self_loops_rejected={}",
            self.nodes, self.edges, self.duplicates_dropped, self.self_loops_rejected
        )
    }
}

/// Reads an edge list: one `source<SEP>target` pair per line, `#` comments
/// and blank lines skipped. Extra fields after the second are ignored.
pub fn load_edge_list<R: BufRead>(
    reader: R,
    options: &LoadOptions,
) -> Result<(DirectedGraph, LoadSummary)> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut self_loops = 0;

    let mut intern = |label: &str, labels: &mut Vec<String>| -> usize {
        if let Some(&i) = index.get(label) {
            return i;
        }
        let i = labels.len();
        labels.push(label.to_owned());
        index.insert(label.to_owned(), i);
        i
    };

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields = options.separator.split(trimmed);
        if fields.len() < 2 {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected 2 fields, found {}", fields.len()),
            });
        }
        let (mut source, mut target) = (fields[0].trim(), fields[1].trim());
        if source.is_empty() || target.is_empty() {
            return Err(Error::Parse {
                line: lineno + 1,
                message: "empty node label".into(),
            });
        }
        if options.reverse {
            std::mem::swap(&mut source, &mut target);
        }
        if source == target {
            self_loops += 1;
            continue;
        }
        let s = intern(source, &mut labels);
        let t = intern(target, &mut labels);
        edges.push((s, t));
    }

    if edges.is_empty() {
        return Err(Error::NoEdges);
    }

    let (graph, drops) = DirectedGraph::from_edges(labels, edges)?;
    let summary = LoadSummary {
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        duplicates_dropped: drops.duplicates_dropped,
        self_loops_rejected: self_loops,
    };
    Ok((graph, summary))
}

/// Writes the graph as an edge list, preceded by `header` lines as `#`
/// comments. Isolated nodes have no line and are lost on reload.
pub fn write_edge_list<W: Write>(
    graph: &DirectedGraph,
    mut writer: W,
    separator: Separator,
    header: &[String],
) -> std::io::Result<()> {
    for line in header {
        writeln!(writer, "# {line}")?;
    }
    let sep = separator.as_char();
    for e in graph.edges() {
        writeln!(
            writer,
            "{}{}{}",
            graph.label(e.source),
            sep,
            graph.label(e.target)
        )?;
    }
    Ok(())
}

pub fn degrees(graph: &DirectedGraph) -> Vec<DegreeRecord> {
    graph
        .nodes()
        .map(|v| DegreeRecord {
            node: v,
            k_in: graph.in_degree(v),
            k_out: graph.out_degree(v),
        })
        .collect()
}

/// Induced subgraph on the nodes for which `remove` returns false. Ids are
/// re-densified in their original order; labels are preserved.
pub fn filter_nodes<F>(graph: &DirectedGraph, remove: F) -> Result<DirectedGraph>
where
    F: Fn(&DegreeRecord) -> bool,
{
    let mut new_id = vec![usize::MAX; graph.node_count()];
    let mut labels = Vec::new();
    for rec in degrees(graph) {
        if !remove(&rec) {
            new_id[rec.node.0] = labels.len();
            labels.push(graph.label(rec.node).to_owned());
        }
    }
    if labels.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let edges = graph.edges().filter_map(|e| {
        let (s, t) = (new_id[e.source.0], new_id[e.target.0]);
        (s != usize::MAX && t != usize::MAX).then_some((s, t))
    });
    let (sub, _) = DirectedGraph::from_edges(labels, edges.collect::<Vec<_>>())?;
    Ok(sub)
}
