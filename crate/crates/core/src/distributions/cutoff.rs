use serde::{Deserialize, Serialize};

use super::{ccdf, DegreeSequence, PowerLawFit};
use crate::error::{Error, Result};

/// Default shortfall threshold, in decades.
pub const DEFAULT_TAU: f64 = 0.5;

/// Shortest run of represented degrees that counts as a persistent shortfall;
/// a lone extreme sample below the curve is not a cutoff.
pub const MIN_RUN: usize = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffResult {
    /// Start of the persistent shortfall, if any.
    pub k_plus: Option<u64>,
    /// Largest shortfall below the fitted curve over the fitted tail, in
    /// decades (0 when the data never fall below it).
    pub departure_magnitude: f64,
}

/// Finds the degree beyond which the empirical CCDF stays more than `tau`
/// decades below the extrapolated power-law fit. Only represented degrees
/// at or above `fit.k_min` are examined; `tau = inf` disables detection.
pub fn detect_cutoff(sequence: &DegreeSequence, fit: &PowerLawFit, tau: f64) -> Result<CutoffResult> {
    if tau.is_nan() || tau < 0.0 {
        return Err(Error::InvalidParameter(format!("tau must be >= 0, got {tau}")));
    }
    let curve = ccdf(sequence)?;
    let shortfalls: Vec<(u64, f64)> = curve
        .points()
        .iter()
        .filter(|p| p.0 >= fit.k_min)
        .map(|&(k, p)| (k, fit.predicted_ccdf(k).log10() - p.log10()))
        .collect();

    let departure_magnitude = shortfalls.iter().map(|s| s.1).fold(0.0, f64::max);
    let run = shortfalls.iter().rev().take_while(|s| s.1 > tau).count();
    let k_plus = (run >= MIN_RUN).then(|| shortfalls[shortfalls.len() - run].0);
    Ok(CutoffResult {
        k_plus,
        departure_magnitude,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::fit_power_law;

    /// Counts chosen so P(K >= k) tracks the fitted law closely.
    fn near_power_law() -> DegreeSequence {
        let mut v = Vec::new();
        for k in 1..=60u64 {
            let c = (6000.0 * (k as f64).powf(-2.0)).round() as usize;
            v.extend(std::iter::repeat_n(k, c.max(1)));
        }
        DegreeSequence::new(None, v)
    }

    #[test]
    fn infinite_tau_disables() {
        let s = near_power_law();
        let fit = fit_power_law(&s, 1, None).unwrap();
        let r = detect_cutoff(&s, &fit, f64::INFINITY).unwrap();
        assert_eq!(r.k_plus, None);
    }

    #[test]
    fn sharp_drop_is_flagged_after_k_min() {
        let mut s = near_power_law();
        // Remove everything above 20: the tail collapses.
        s.values.retain(|&k| k <= 20);
        let fit = fit_power_law(&s, 1, None).unwrap();
        let r = detect_cutoff(&s, &fit, 0.3).unwrap();
        let k = r.k_plus.expect("cutoff");
        assert!(k > fit.k_min && k <= 20);
        assert!(r.departure_magnitude > 0.3);
    }

    #[test]
    fn monotone_in_tau() {
        let mut s = near_power_law();
        s.values.retain(|&k| k <= 25);
        let fit = fit_power_law(&s, 1, None).unwrap();
        let mut last = 0;
        for tau in [0.0, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2] {
            match detect_cutoff(&s, &fit, tau).unwrap().k_plus {
                Some(k) => {
                    assert!(k >= last);
                    last = k;
                }
                None => last = u64::MAX,
            }
        }
    }

    #[test]
    fn single_thin_point_is_not_a_cutoff() {
        let mut s = near_power_law();
        let fit = fit_power_law(&s, 1, None).unwrap();
        // One far-out sample sits well under the extrapolated curve only at
        // its own degree.
        s.values.push(10_000);
        let r = detect_cutoff(&s, &fit, 0.3).unwrap();
        assert!(r.departure_magnitude > 0.3);
        assert_eq!(r.k_plus, None);
    }

    #[test]
    fn rejects_bad_tau() {
        let s = near_power_law();
        let fit = fit_power_law(&s, 1, None).unwrap();
        assert!(detect_cutoff(&s, &fit, -1.0).is_err());
        assert!(detect_cutoff(&s, &fit, f64::NAN).is_err());
    }
}
