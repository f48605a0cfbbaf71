//! Descriptive statistics of a directed network: average degree, clustering,
//! path length, strongly connected components, and hierarchy degree.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Edge, NodeId};

/// Partition of the nodes into strongly connected components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccPartition {
    pub component_of: Vec<usize>,
    pub component_sizes: Vec<usize>,
}

impl SccPartition {
    pub fn component_count(&self) -> usize {
        self.component_sizes.len()
    }

    pub fn same_component(&self, a: NodeId, b: NodeId) -> bool {
        self.component_of[a.0] == self.component_of[b.0]
    }
}

/// Tarjan's algorithm with an explicit call stack. Components are numbered
/// in the order they complete (sinks of the condensation first).
pub fn scc_decompose(graph: &DirectedGraph) -> SccPartition {
    const UNVISITED: usize = usize::MAX;
    let n = graph.node_count();
    let mut index = vec![UNVISITED; n];
    let mut lowlink = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut component_of = vec![UNVISITED; n];
    let mut component_sizes = Vec::new();
    let mut next_index = 0;
    // (node, position in its successor list)
    let mut calls: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        calls.push((root, 0));
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = calls.last_mut() {
            let succ = graph.successors(NodeId(v));
            if *pos < succ.len() {
                let w = succ[*pos].0;
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    calls.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
                continue;
            }

            calls.pop();
            if let Some(&(parent, _)) = calls.last() {
                lowlink[parent] = lowlink[parent].min(lowlink[v]);
            }
            if lowlink[v] == index[v] {
                let id = component_sizes.len();
                let mut size = 0;
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component_of[w] = id;
                    size += 1;
                    if w == v {
                        break;
                    }
                }
                component_sizes.push(size);
            }
        }
    }

    SccPartition {
        component_of,
        component_sizes,
    }
}

/// Nodes lying on at least one directed cycle, i.e. in an SCC of size >= 2.
pub fn cycle_members(graph: &DirectedGraph) -> Vec<NodeId> {
    cycle_members_in(graph, &scc_decompose(graph))
}

pub fn cycle_members_in(graph: &DirectedGraph, scc: &SccPartition) -> Vec<NodeId> {
    graph
        .nodes()
        .filter(|v| scc.component_sizes[scc.component_of[v.0]] >= 2)
        .collect()
}

/// Per-edge flag, in [`DirectedGraph::edges`] order: true when the edge
/// lies on a directed cycle (both endpoints in one SCC).
pub fn cyclic_edge_flags(graph: &DirectedGraph) -> Vec<(Edge, bool)> {
    let scc = scc_decompose(graph);
    graph
        .edges()
        .map(|e| (e, scc.same_component(e.source, e.target)))
        .collect()
}

/// Fraction of edges that lie on no directed cycle.
pub fn hierarchy_degree(graph: &DirectedGraph) -> Result<f64> {
    let l = graph.edge_count();
    if l == 0 {
        return Err(Error::Edgeless);
    }
    let scc = scc_decompose(graph);
    let acyclic = graph
        .edges()
        .filter(|e| !scc.same_component(e.source, e.target))
        .count();
    Ok(acyclic as f64 / l as f64)
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusteringOptions {
    /// Drop nodes with fewer than two neighbors from the average instead of
    /// counting them as zero.
    pub exclude_low_degree: bool,
}

/// Local clustering coefficient of every node on the undirected projection.
pub fn local_clustering(graph: &DirectedGraph) -> Vec<Option<f64>> {
    let neighbors: Vec<Vec<NodeId>> = graph.nodes().map(|v| graph.undirected_neighbors(v)).collect();
    neighbors
        .par_iter()
        .map(|nv| {
            let d = nv.len();
            if d < 2 {
                return None;
            }
            // Each neighbor-neighbor link is seen from both ends.
            let twice_links: usize = nv
                .iter()
                .map(|u| sorted_intersection_len(nv, &neighbors[u.0]))
                .sum();
            let links = twice_links / 2;
            Some(links as f64 / (d * (d - 1) / 2) as f64)
        })
        .collect()
}

fn sorted_intersection_len(a: &[NodeId], b: &[NodeId]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Mean local clustering coefficient on the undirected projection.
pub fn clustering_coefficient(graph: &DirectedGraph) -> f64 {
    clustering_coefficient_with(graph, &ClusteringOptions::default())
}

pub fn clustering_coefficient_with(graph: &DirectedGraph, options: &ClusteringOptions) -> f64 {
    let local = local_clustering(graph);
    let (sum, count) = local.iter().fold((0.0, 0usize), |(s, c), x| match x {
        Some(v) => (s + v, c + 1),
        None if options.exclude_low_degree => (s, c),
        None => (s, c + 1),
    });
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMode {
    #[default]
    Undirected,
    Directed,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathStats {
    pub mean: f64,
    /// Ordered pairs (u, v), u != v, with v reachable from u.
    pub reachable_pairs: u64,
    /// Ordered pairs left out of the mean because v is unreachable.
    pub excluded_pairs: u64,
}

/// Mean hop distance over reachable ordered pairs, by BFS from every node.
pub fn avg_shortest_path(graph: &DirectedGraph, mode: PathMode) -> Result<PathStats> {
    let n = graph.node_count();
    let undirected: Vec<Vec<NodeId>> = match mode {
        PathMode::Undirected => graph.nodes().map(|v| graph.undirected_neighbors(v)).collect(),
        PathMode::Directed => Vec::new(),
    };
    let neighbors = |v: usize| -> &[NodeId] {
        match mode {
            PathMode::Undirected => &undirected[v],
            PathMode::Directed => graph.successors(NodeId(v)),
        }
    };

    // Integer sums keep the reduction independent of scheduling order.
    let (total, pairs) = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![u32::MAX; n], VecDeque::new()),
            |(dist, queue), s| {
                dist.fill(u32::MAX);
                dist[s] = 0;
                queue.clear();
                queue.push_back(s);
                let (mut total, mut pairs) = (0u64, 0u64);
                while let Some(v) = queue.pop_front() {
                    let dv = dist[v];
                    if v != s {
                        total += dv as u64;
                        pairs += 1;
                    }
                    for w in neighbors(v) {
                        if dist[w.0] == u32::MAX {
                            dist[w.0] = dv + 1;
                            queue.push_back(w.0);
                        }
                    }
                }
                (total, pairs)
            },
        )
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    if pairs == 0 {
        return Err(Error::NoPaths);
    }
    let all = n as u64 * (n as u64 - 1);
    Ok(PathStats {
        mean: total as f64 / pairs as f64,
        reachable_pairs: pairs,
        excluded_pairs: all - pairs,
    })
}

/// The descriptive statistics row for one network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n: usize,
    pub l: usize,
    pub avg_degree: f64,
    pub clustering: f64,
    pub path_length: f64,
    pub path_mode: PathMode,
    pub excluded_pairs: u64,
    pub hierarchy: f64,
}

pub fn summary_stats(graph: &DirectedGraph) -> Result<SummaryStats> {
    summary_stats_with(graph, PathMode::Undirected, &ClusteringOptions::default())
}

pub fn summary_stats_with(
    graph: &DirectedGraph,
    mode: PathMode,
    clustering: &ClusteringOptions,
) -> Result<SummaryStats> {
    let hierarchy = hierarchy_degree(graph)?;
    let paths = avg_shortest_path(graph, mode)?;
    Ok(SummaryStats {
        n: graph.node_count(),
        l: graph.edge_count(),
        avg_degree: average_degree(graph),
        clustering: clustering_coefficient_with(graph, clustering),
        path_length: paths.mean,
        path_mode: mode,
        excluded_pairs: paths.excluded_pairs,
        hierarchy,
    })
}

/// L / N: each edge counted once.
pub fn average_degree(graph: &DirectedGraph) -> f64 {
    graph.edge_count() as f64 / graph.node_count() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{load_edge_list, LoadOptions};

    fn g(text: &str) -> DirectedGraph {
        load_edge_list(text.replace(' ', "\t").replace(',', "\n").as_bytes(), &LoadOptions::default())
            .unwrap()
            .0
    }

    fn comp_sets(graph: &DirectedGraph) -> Vec<Vec<String>> {
        let scc = scc_decompose(graph);
        let mut sets: Vec<Vec<String>> = vec![Vec::new(); scc.component_count()];
        for v in graph.nodes() {
            sets[scc.component_of[v.0]].push(graph.label(v).to_string());
        }
        for s in sets.iter_mut() {
            s.sort();
        }
        sets.sort();
        sets
    }

    #[test]
    fn scc_examples() {
        assert_eq!(comp_sets(&g("a b,b c")), vec![vec!["a"], vec!["b"], vec!["c"]]);
        assert_eq!(comp_sets(&g("a b,b c,c a")), vec![vec!["a", "b", "c"]]);
        assert_eq!(comp_sets(&g("a b,b a,b c")), vec![vec!["a", "b"], vec!["c"]]);
    }

    #[test]
    fn scc_survives_deep_chains() {
        let n = 200_000;
        let (chain, _) =
            DirectedGraph::with_anonymous_nodes(n, (0..n - 1).map(|i| (i, i + 1))).unwrap();
        assert_eq!(scc_decompose(&chain).component_count(), n);
        let (ring, _) = DirectedGraph::with_anonymous_nodes(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap();
        assert_eq!(scc_decompose(&ring).component_sizes, vec![n]);
    }

    fn member_labels(graph: &DirectedGraph) -> Vec<String> {
        let mut v: Vec<String> = cycle_members(graph).iter().map(|&v| graph.label(v).to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn cycle_member_examples() {
        assert!(member_labels(&g("a b,b c,a c")).is_empty());
        assert_eq!(member_labels(&g("a b,b c,c a,c d")), vec!["a", "b", "c"]);
        assert_eq!(member_labels(&g("a b,b a,c d,d c")), vec!["a", "b", "c", "d"]);
    }

    #[test]
    fn hierarchy_examples() {
        assert_eq!(hierarchy_degree(&g("a b,b c,a c,c d")).unwrap(), 1.0);
        assert_eq!(hierarchy_degree(&g("a b,b c,c a")).unwrap(), 0.0);
        assert!((hierarchy_degree(&g("a b,b c,c a,c d,d e")).unwrap() - 0.4).abs() < 1e-15);
        let (empty, _) = DirectedGraph::with_anonymous_nodes(3, []).unwrap();
        assert!(matches!(hierarchy_degree(&empty), Err(Error::Edgeless)));
    }

    #[test]
    fn clustering_examples() {
        assert_eq!(clustering_coefficient(&g("a b,b c,c a")), 1.0);
        assert_eq!(clustering_coefficient(&g("a b,a c,a d")), 0.0);
        let c = clustering_coefficient(&g("a b,b c,c a,a d"));
        assert!((c - 7.0 / 12.0).abs() < 1e-15);
        // Excluding d (degree 1) averages over a, b, c only.
        let c = clustering_coefficient_with(
            &g("a b,b c,c a,a d"),
            &ClusteringOptions {
                exclude_low_degree: true,
            },
        );
        assert!((c - 7.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn reciprocal_edges_count_once_in_projection() {
        assert_eq!(clustering_coefficient(&g("a b,b a,b c,c b,c a,a c")), 1.0);
    }

    #[test]
    fn path_examples() {
        let p = avg_shortest_path(&g("a b,b c"), PathMode::Undirected).unwrap();
        assert!((p.mean - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!((p.reachable_pairs, p.excluded_pairs), (6, 0));

        let p = avg_shortest_path(&g("a b,b c"), PathMode::Directed).unwrap();
        assert!((p.mean - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!((p.reachable_pairs, p.excluded_pairs), (3, 3));

        let all: Vec<(usize, usize)> =
            (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).collect();
        let (k4, _) = DirectedGraph::with_anonymous_nodes(4, all).unwrap();
        for mode in [PathMode::Undirected, PathMode::Directed] {
            assert_eq!(avg_shortest_path(&k4, mode).unwrap().mean, 1.0);
        }

        let (empty, _) = DirectedGraph::with_anonymous_nodes(3, []).unwrap();
        assert!(matches!(avg_shortest_path(&empty, PathMode::Directed), Err(Error::NoPaths)));
    }

    #[test]
    fn summary_of_three_cycle() {
        let s = summary_stats(&g("a b,b c,c a")).unwrap();
        assert_eq!((s.n, s.l), (3, 3));
        assert_eq!(s.avg_degree, 1.0);
        assert_eq!(s.clustering, 1.0);
        assert_eq!(s.path_length, 1.0);
        assert_eq!(s.hierarchy, 0.0);
    }

    #[test]
    fn average_degree_matches_published_rows() {
        for (n, l, want) in [(356, 1480, 4.157), (679, 2437, 3.589), (627, 2175, 3.469), (227, 648, 2.855)] {
            let k = l as f64 / n as f64;
            assert_eq!(format!("{k:.3}"), format!("{want:.3}"));
        }
    }
}
