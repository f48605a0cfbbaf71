//! Cumulative degree distributions and the in/out asymmetry analysis:
//! power-law regime fits, the in/out crossing point, and cutoff detection.

mod asymmetry;
mod ccdf;
mod crossing;
mod cutoff;
mod fit;
pub mod zeta;

use serde::{Deserialize, Serialize};

use crate::graph::DirectedGraph;

pub use asymmetry::{
    asymmetry_report, classify, fit_direction, fit_with_cutoff, AsymmetryDirection, AsymmetryOptions,
    AsymmetryReport,
};
pub use ccdf::{ccdf, ccdf_with, write_ccdf, Ccdf, CcdfConvention};
pub use crossing::{crossing_point, CrossingResult};
pub use cutoff::{detect_cutoff, CutoffResult, DEFAULT_TAU, MIN_RUN};
pub use fit::{
    approx_discrete_mle, fit_power_law, fit_power_law_with, select_k_min, FitOptions,
    PowerLawFit, MIN_SELECT_SAMPLES, MIN_SPAN_DECADES, MIN_TAIL, OLS_MIN_SUPPORT, OLS_SHIFT,
};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    In,
    Out,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::In => "in",
            Direction::Out => "out",
        }
    }
}

/// Multiset of degrees for one direction; `len()` is the node count of the
/// source graph, zero-degree nodes included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeSequence {
    pub direction: Option<Direction>,
    pub values: Vec<u64>,
}

impl DegreeSequence {
    pub fn new(direction: Option<Direction>, values: Vec<u64>) -> Self {
        DegreeSequence { direction, values }
    }

    pub fn from_graph(graph: &DirectedGraph, direction: Direction) -> Self {
        let values = graph
            .nodes()
            .map(|v| match direction {
                Direction::In => graph.in_degree(v),
                Direction::Out => graph.out_degree(v),
            } as u64)
            .collect();
        DegreeSequence {
            direction: Some(direction),
            values,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.values.iter().sum()
    }

    pub fn max(&self) -> u64 {
        self.values.iter().copied().max().unwrap_or(0)
    }

    /// Values sorted ascending.
    pub fn sorted(&self) -> Vec<u64> {
        let mut v = self.values.clone();
        v.sort_unstable();
        v
    }
}
