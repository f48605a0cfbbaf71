use serde::{Deserialize, Serialize};

use super::{
    ccdf, crossing_point, detect_cutoff, fit_power_law, select_k_min, CrossingResult,
    CutoffResult, DegreeSequence, Direction, PowerLawFit, DEFAULT_TAU,
};
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymmetryDirection {
    OutSteeper,
    InSteeper,
    /// Regression exponents within tolerance of each other.
    Neither,
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct AsymmetryOptions {
    /// Fixed lower fit bound; `None` selects it by KS distance per direction.
    pub k_min: Option<u64>,
    pub tau: f64,
    /// Minimum gamma_ols gap before one direction is called steeper.
    pub tolerance: f64,
}

impl Default for AsymmetryOptions {
    fn default() -> Self {
        AsymmetryOptions {
            k_min: None,
            tau: DEFAULT_TAU,
            tolerance: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymmetryReport {
    pub fit_in: PowerLawFit,
    pub fit_out: PowerLawFit,
    pub crossing: CrossingResult,
    pub cutoff_in: CutoffResult,
    pub cutoff_out: CutoffResult,
    pub direction: AsymmetryDirection,
}

pub fn classify(fit_in: &PowerLawFit, fit_out: &PowerLawFit, tolerance: f64) -> AsymmetryDirection {
    let gap = fit_out.gamma_ols - fit_in.gamma_ols;
    if gap > tolerance {
        AsymmetryDirection::OutSteeper
    } else if gap < -tolerance {
        AsymmetryDirection::InSteeper
    } else {
        AsymmetryDirection::Neither
    }
}

pub fn fit_direction(sequence: &DegreeSequence, k_min: Option<u64>) -> Result<PowerLawFit> {
    let k_min = match k_min {
        Some(k) => k,
        None => select_k_min(sequence)?,
    };
    fit_power_law(sequence, k_min, None)
}

/// Fit and cutoff for one direction. When a cutoff is found, the reported
/// fit is redone on the scaling region [k_min, k_plus − 1] if that still
/// holds enough samples; the cutoff itself is measured against the
/// untruncated fit.
pub fn fit_with_cutoff(
    sequence: &DegreeSequence,
    k_min: Option<u64>,
    tau: f64,
) -> Result<(PowerLawFit, CutoffResult)> {
    let full = fit_direction(sequence, k_min)?;
    let cutoff = detect_cutoff(sequence, &full, tau)?;
    let fit = match cutoff.k_plus {
        Some(k_plus) if k_plus > full.k_min + 1 => {
            fit_power_law(sequence, full.k_min, Some(k_plus - 1)).unwrap_or(full)
        }
        _ => full,
    };
    Ok((fit, cutoff))
}

/// Fits both directions, locates the crossing, and runs both cutoff
/// detectors on one network.
pub fn asymmetry_report(graph: &DirectedGraph, options: &AsymmetryOptions) -> Result<AsymmetryReport> {
    if graph.edge_count() == 0 {
        return Err(Error::Edgeless);
    }
    let seq_in = DegreeSequence::from_graph(graph, Direction::In);
    let seq_out = DegreeSequence::from_graph(graph, Direction::Out);

    let (fit_in, cutoff_in) = fit_with_cutoff(&seq_in, options.k_min, options.tau)?;
    let (fit_out, cutoff_out) = fit_with_cutoff(&seq_out, options.k_min, options.tau)?;
    let crossing = crossing_point(&ccdf(&seq_in)?, &ccdf(&seq_out)?)?;
    let direction = classify(&fit_in, &fit_out, options.tolerance);

    Ok(AsymmetryReport {
        fit_in,
        fit_out,
        crossing,
        cutoff_in,
        cutoff_out,
        direction,
    })
}
