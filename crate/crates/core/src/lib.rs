//! Topology profiling for directed networks: hierarchy, small-world
//! statistics, in/out-degree distributions and their asymmetry.

pub mod cli;
pub mod correlation;
pub mod distributions;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod report;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{DirectedGraph, NodeId};
