//! Brute-force reference implementations shared by the integration tests
//! and the acceptance runner.

#![allow(dead_code)]

use netprofile::metrics::PathMode;
use netprofile::DirectedGraph;
use rand::Rng;

/// Random simple digraph on `n` nodes, each ordered pair present with
/// probability `p`.
pub fn random_digraph<R: Rng>(rng: &mut R, n: usize, p: f64) -> DirectedGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    DirectedGraph::with_anonymous_nodes(n, edges).unwrap().0
}

fn adjacency(graph: &DirectedGraph) -> Vec<Vec<bool>> {
    let n = graph.node_count();
    let mut a = vec![vec![false; n]; n];
    for e in graph.edges() {
        a[e.source.0][e.target.0] = true;
    }
    a
}

/// Marks every edge that appears on at least one simple directed cycle, by
/// enumerating all simple cycles (each rooted at its smallest node).
pub fn cycle_edges_by_enumeration(graph: &DirectedGraph) -> Vec<((usize, usize), bool)> {
    let n = graph.node_count();
    let adj = adjacency(graph);
    let mut on_cycle = vec![vec![false; n]; n];

    fn extend(
        start: usize,
        path: &mut Vec<usize>,
        used: &mut Vec<bool>,
        adj: &[Vec<bool>],
        on_cycle: &mut [Vec<bool>],
    ) {
        let last = *path.last().unwrap();
        for next in start..adj.len() {
            if !adj[last][next] {
                continue;
            }
            if next == start {
                for w in path.windows(2) {
                    on_cycle[w[0]][w[1]] = true;
                }
                on_cycle[last][start] = true;
            } else if !used[next] {
                used[next] = true;
                path.push(next);
                extend(start, path, used, adj, on_cycle);
                path.pop();
                used[next] = false;
            }
        }
    }

    for start in 0..n {
        let mut used = vec![false; n];
        used[start] = true;
        extend(start, &mut vec![start], &mut used, &adj, &mut on_cycle);
    }
    graph
        .edges()
        .map(|e| ((e.source.0, e.target.0), on_cycle[e.source.0][e.target.0]))
        .collect()
}

/// Per-node (links among neighbours, neighbour count) on the undirected
/// projection, by checking every neighbour pair.
pub fn triangle_counts(graph: &DirectedGraph) -> Vec<(usize, usize)> {
    let n = graph.node_count();
    let a = adjacency(graph);
    let und = |i: usize, j: usize| a[i][j] || a[j][i];
    (0..n)
        .map(|i| {
            let nb: Vec<usize> = (0..n).filter(|&j| j != i && und(i, j)).collect();
            let mut links = 0;
            for x in 0..nb.len() {
                for y in x + 1..nb.len() {
                    if und(nb[x], nb[y]) {
                        links += 1;
                    }
                }
            }
            (links, nb.len())
        })
        .collect()
}

/// Mean local clustering; nodes with fewer than two neighbours count as
/// zero unless `exclude_low_degree`.
pub fn clustering_oracle(graph: &DirectedGraph, exclude_low_degree: bool) -> f64 {
    let (mut sum, mut count) = (0.0, 0usize);
    for (links, d) in triangle_counts(graph) {
        if d < 2 {
            if !exclude_low_degree {
                count += 1;
            }
            continue;
        }
        sum += links as f64 / (d * (d - 1) / 2) as f64;
        count += 1;
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Floyd–Warshall: (sum of finite distances, reachable ordered pairs,
/// unreachable ordered pairs).
pub fn floyd_warshall(graph: &DirectedGraph, mode: PathMode) -> (u64, u64, u64) {
    const INF: u64 = u64::MAX / 4;
    let n = graph.node_count();
    let a = adjacency(graph);
    let mut d = vec![vec![INF; n]; n];
    for i in 0..n {
        d[i][i] = 0;
        for j in 0..n {
            let linked = match mode {
                PathMode::Directed => a[i][j],
                PathMode::Undirected => a[i][j] || a[j][i],
            };
            if linked {
                d[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    let (mut sum, mut reach, mut miss) = (0, 0, 0);
    for (i, row) in d.iter().enumerate() {
        for (j, &dist) in row.iter().enumerate() {
            if i == j {
                continue;
            }
            if dist < INF {
                sum += dist;
                reach += 1;
            } else {
                miss += 1;
            }
        }
    }
    (sum, reach, miss)
}

/// Fraction of edges on no directed cycle, from the enumeration oracle.
pub fn hierarchy_oracle(graph: &DirectedGraph) -> f64 {
    let flags = cycle_edges_by_enumeration(graph);
    flags.iter().filter(|f| !f.1).count() as f64 / flags.len() as f64
}

/// Ordinary least squares of y on x by the textbook normal equations.
pub fn r2_oracle(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (sx, sy): (f64, f64) = (xs.iter().sum(), ys.iter().sum());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let syy: f64 = ys.iter().map(|y| y * y).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let num = n * sxy - sx * sy;
    num * num / ((n * sxx - sx * sx) * (n * syy - sy * sy))
}
