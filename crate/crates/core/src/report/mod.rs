//! Structured per-network report and the files written beside it.

mod export;
mod svg;

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use export::{write_dot, write_graphml, ExportFormat};
pub use svg::{ccdf_svg, scatter_svg};

use crate::correlation::{filtered_correlation, CorrelationResult, FilterMode, SpecialNodeRule};
use crate::distributions::{
    ccdf, classify, crossing_point, fit_with_cutoff, write_ccdf, AsymmetryDirection, CrossingResult,
    CutoffResult, DegreeSequence, Direction, PowerLawFit, DEFAULT_TAU,
};
use crate::error::Result;
use crate::graph::{DirectedGraph, LoadSummary, Separator};
use crate::metrics::{
    avg_shortest_path, clustering_coefficient_with, cycle_members, hierarchy_degree, ClusteringOptions,
    PathMode,
};

/// A value that was computed, or the reason it was not.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measured<T> {
    Value(T),
    Absent(String),
}

impl<T> Measured<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            Measured::Value(v) => Some(v),
            Measured::Absent(_) => None,
        }
    }

    pub fn is_present(&self) -> bool {
        matches!(self, Measured::Value(_))
    }

    pub fn absent_reason(&self) -> Option<&str> {
        match self {
            Measured::Value(_) => None,
            Measured::Absent(r) => Some(r),
        }
    }
}

impl Measured<f64> {
    fn finite(x: f64, reason: &str) -> Self {
        if x.is_finite() {
            Measured::Value(x)
        } else {
            Measured::Absent(reason.to_string())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageError {
    pub stage: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceInfo {
    pub path: String,
    pub load: LoadSummary,
    pub separator: Separator,
    pub reversed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub tau: f64,
    /// `None` selects k_min per direction.
    pub k_min: Option<u64>,
    pub path_mode: PathMode,
    pub special_rule: SpecialNodeRule,
    pub filter_mode: FilterMode,
    /// Minimum gamma_ols gap before a direction is called steeper.
    pub tolerance: f64,
    pub exclude_low_degree: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            tau: DEFAULT_TAU,
            k_min: None,
            path_mode: PathMode::Undirected,
            special_rule: SpecialNodeRule::default(),
            filter_mode: FilterMode::Recompute,
            tolerance: 0.05,
            exclude_low_degree: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsSection {
    pub n: usize,
    pub l: usize,
    pub avg_degree: Measured<f64>,
    pub clustering: Measured<f64>,
    pub path_length: Measured<f64>,
    pub path_mode: PathMode,
    pub excluded_pairs: Measured<u64>,
    pub hierarchy: Measured<f64>,
}

impl StatsSection {
    /// `N=3 L=3 <k>=1.000 C=1.000 l=1.000 H=0.000`, with `NA` for absent values.
    pub fn line(&self) -> String {
        let f = |m: &Measured<f64>| m.value().map_or_else(|| "NA".to_string(), |v| format!("{v:.3}"));
        format!(
            "N={} L={} <k>={} C={} l={} H={}",
            self.n,
            self.l,
            f(&self.avg_degree),
            f(&self.clustering),
            f(&self.path_length),
            f(&self.hierarchy)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecialNode {
    pub label: String,
    pub k_in: usize,
    pub k_out: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkReport {
    pub source: SourceInfo,
    pub options: AnalysisOptions,
    pub stats: StatsSection,
    pub fit_in: Measured<PowerLawFit>,
    pub fit_out: Measured<PowerLawFit>,
    pub crossing: Measured<CrossingResult>,
    pub cutoff_in: Measured<CutoffResult>,
    pub cutoff_out: Measured<CutoffResult>,
    pub asymmetry_direction: Measured<AsymmetryDirection>,
    pub correlation_raw: Measured<CorrelationResult>,
    pub correlation_filtered: Measured<CorrelationResult>,
    pub special_nodes: Vec<SpecialNode>,
    pub cycle_node_count: usize,
    pub stage_errors: Vec<StageError>,
}

impl NetworkReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are serializable")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn is_partial(&self) -> bool {
        !self.stage_errors.is_empty()
    }
}

struct Stages(Vec<StageError>);

impl Stages {
    fn record<T>(&mut self, stage: &str, r: Result<T>) -> Measured<T> {
        match r {
            Ok(v) => Measured::Value(v),
            Err(e) => {
                let message = e.to_string();
                self.0.push(StageError {
                    stage: stage.to_string(),
                    message: message.clone(),
                });
                Measured::Absent(format!("{stage}: {message}"))
            }
        }
    }
}

fn fit_is_finite(f: &PowerLawFit) -> bool {
    [
        f.gamma_mle,
        f.gamma_mle_approx,
        f.gamma_ols,
        f.ols_slope,
        f.ols_intercept,
        f.ks_distance,
        f.anchor,
    ]
    .iter()
    .all(|x| x.is_finite())
}

pub fn stats_section(graph: &DirectedGraph, options: &AnalysisOptions) -> (StatsSection, Vec<StageError>) {
    let mut stages = Stages(Vec::new());
    let n = graph.node_count();
    let l = graph.edge_count();
    let avg_degree = if n == 0 {
        Measured::Absent("empty graph".into())
    } else {
        Measured::finite(l as f64 / n as f64, "non-finite")
    };
    let clustering = Measured::finite(
        clustering_coefficient_with(
            graph,
            &ClusteringOptions {
                exclude_low_degree: options.exclude_low_degree,
            },
        ),
        "no eligible nodes",
    );
    let paths = stages.record("path_length", avg_shortest_path(graph, options.path_mode));
    let (path_length, excluded_pairs) = match paths {
        Measured::Value(p) => (Measured::finite(p.mean, "non-finite"), Measured::Value(p.excluded_pairs)),
        Measured::Absent(r) => (Measured::Absent(r.clone()), Measured::Absent(r)),
    };
    let hierarchy = stages.record("hierarchy", hierarchy_degree(graph));
    let section = StatsSection {
        n,
        l,
        avg_degree,
        clustering,
        path_length,
        path_mode: options.path_mode,
        excluded_pairs,
        hierarchy,
    };
    (section, stages.0)
}

/// Runs every analysis stage; a failing stage is recorded and the rest
/// still run.
pub fn analyze_graph(graph: &DirectedGraph, source: SourceInfo, options: &AnalysisOptions) -> NetworkReport {
    let (stats, errors) = stats_section(graph, options);
    let mut stages = Stages(errors);

    let fit = |stage: &str, direction: Direction, stages: &mut Stages| {
        let seq = DegreeSequence::from_graph(graph, direction);
        match stages.record(stage, fit_with_cutoff(&seq, options.k_min, options.tau)) {
            Measured::Value((f, _)) if !fit_is_finite(&f) => {
                let m: Measured<PowerLawFit> = Measured::Absent(format!("{stage}: non-finite fit"));
                (m.clone(), Measured::Absent(format!("{stage}: non-finite fit")))
            }
            Measured::Value((f, c)) => (Measured::Value(f), Measured::Value(c)),
            Measured::Absent(r) => (Measured::Absent(r.clone()), Measured::Absent(r)),
        }
    };
    let (fit_in, cutoff_in) = fit("fit_in", Direction::In, &mut stages);
    let (fit_out, cutoff_out) = fit("fit_out", Direction::Out, &mut stages);

    let crossing = {
        let seq_in = DegreeSequence::from_graph(graph, Direction::In);
        let seq_out = DegreeSequence::from_graph(graph, Direction::Out);
        let r = ccdf(&seq_in).and_then(|a| ccdf(&seq_out).and_then(|b| crossing_point(&a, &b)));
        match stages.record("crossing", r) {
            Measured::Value(c) if c.k_star.is_none() => Measured::Absent("curves do not cross".into()),
            m => m,
        }
    };

    let asymmetry_direction = match (fit_in.value(), fit_out.value()) {
        (Some(a), Some(b)) => Measured::Value(classify(a, b, options.tolerance)),
        _ => Measured::Absent("needs both fits".into()),
    };

    let (correlation_raw, correlation_filtered) =
        match stages.record("correlation", filtered_correlation(graph, &options.special_rule, options.filter_mode)) {
            Measured::Value(fc) => {
                let filtered = match fc.filtered {
                    Ok(r) => Measured::Value(r),
                    Err(message) => {
                        stages.0.push(StageError {
                            stage: "correlation_filtered".into(),
                            message: message.clone(),
                        });
                        Measured::Absent(format!("correlation_filtered: {message}"))
                    }
                };
                (Measured::Value(fc.raw), filtered)
            }
            Measured::Absent(r) => (Measured::Absent(r.clone()), Measured::Absent(r)),
        };

    let special_nodes = crate::correlation::find_special_nodes(graph, &options.special_rule)
        .into_iter()
        .map(|v| SpecialNode {
            label: graph.label(v).to_string(),
            k_in: graph.in_degree(v),
            k_out: graph.out_degree(v),
        })
        .collect();

    NetworkReport {
        source,
        options: options.clone(),
        stats,
        fit_in,
        fit_out,
        crossing,
        cutoff_in,
        cutoff_out,
        asymmetry_direction,
        correlation_raw,
        correlation_filtered,
        special_nodes,
        cycle_node_count: cycle_members(graph).len(),
        stage_errors: stages.0,
    }
}

/// Writes `<stem>.report.json`, both CCDF tables, the scatter table, and the
/// two SVG figures into `dir`. Returns the paths written.
pub fn write_artifacts(graph: &DirectedGraph, report: &NetworkReport, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, body: &[u8]| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };

    put(format!("{stem}.report.json"), (report.to_json() + "\n").as_bytes())?;

    let seq_in = DegreeSequence::from_graph(graph, Direction::In);
    let seq_out = DegreeSequence::from_graph(graph, Direction::Out);
    let (c_in, c_out) = (ccdf(&seq_in).ok(), ccdf(&seq_out).ok());
    for (c, tag) in [(&c_in, "in"), (&c_out, "out")] {
        if let Some(c) = c {
            let mut buf = Vec::new();
            write_ccdf(c, BufWriter::new(&mut buf))?;
            put(format!("{stem}.ccdf_{tag}.tsv"), &buf)?;
        }
    }
    if let (Some(a), Some(b)) = (&c_in, &c_out) {
        put(format!("{stem}.ccdf.svg"), ccdf_svg(stem, a, b, report).as_bytes())?;
    }

    let mut buf = Vec::new();
    crate::correlation::write_scatter(graph, &mut buf)?;
    put(format!("{stem}.scatter.tsv"), &buf)?;
    put(format!("{stem}.scatter.svg"), scatter_svg(stem, graph, report).as_bytes())?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{load_edge_list, LoadOptions};

    fn load(text: &str) -> (DirectedGraph, SourceInfo) {
        let (g, load) = load_edge_list(text.as_bytes(), &LoadOptions::default()).unwrap();
        let source = SourceInfo {
            path: "mem".into(),
            load,
            separator: Separator::Tab,
            reversed: false,
        };
        (g, source)
    }

    #[test]
    fn triangle_stats_line() {
        let (g, _) = load("a\tb\nb\tc\nc\ta\n");
        let (s, errors) = stats_section(&g, &AnalysisOptions::default());
        assert!(errors.is_empty());
        assert_eq!(s.line(), "N=3 L=3 <k>=1.000 C=1.000 l=1.000 H=0.000");
    }

    #[test]
    fn tiny_graph_is_partial_but_serializable() {
        let (g, source) = load("a\tb\nb\tc\nc\ta\nc\td\n");
        let r = analyze_graph(&g, source, &AnalysisOptions::default());
        assert!(r.is_partial());
        assert!(!r.fit_in.is_present());
        assert_eq!(r.cycle_node_count, 3);
        let back = NetworkReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn absent_marker_shape() {
        let m: Measured<f64> = Measured::Absent("no paths".into());
        assert_eq!(serde_json::to_string(&m).unwrap(), r#"{"absent":"no paths"}"#);
        let v: Measured<f64> = Measured::Value(0.0);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"value":0.0}"#);
    }

    #[test]
    fn sink_hub_listed() {
        let mut text = String::from("x\ty\ny\tz\nz\tx\n");
        for i in 0..60 {
            text += &format!("s{i}\thub\n");
        }
        let (g, source) = load(&text);
        let r = analyze_graph(&g, source, &AnalysisOptions::default());
        assert_eq!(
            r.special_nodes,
            vec![SpecialNode {
                label: "hub".into(),
                k_in: 60,
                k_out: 0
            }]
        );
    }
}
