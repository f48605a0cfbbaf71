use serde::{Deserialize, Serialize};

use super::Ccdf;
use crate::error::{Error, Result};

/// |D| at or below this is contact, not a side.
const ZERO_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingResult {
    /// Degree of the first sign change of log P_out − log P_in.
    pub k_star: Option<f64>,
    pub sign_changes: usize,
    /// Integer degrees on either side of `k_star`.
    pub bracket: Option<(u64, u64)>,
}

/// Locates where the out-degree CCDF crosses the in-degree CCDF.
///
/// D(k) = log10 P_out(k) − log10 P_in(k) is evaluated on the union of both
/// curves' represented k where both are positive. The first sign change is
/// narrowed to the unit interval where the step functions actually swap
/// order, and k* is interpolated linearly in (log k, D) there. Exact zeros
/// separating the two signs pin k* to the first zero.
pub fn crossing_point(ccdf_in: &Ccdf, ccdf_out: &Ccdf) -> Result<CrossingResult> {
    let mut ks: Vec<u64> = ccdf_in
        .points()
        .iter()
        .chain(ccdf_out.points())
        .map(|p| p.0)
        .collect();
    ks.sort_unstable();
    ks.dedup();

    let diff = |k: u64| -> Option<f64> {
        let (pi, po) = (ccdf_in.value_at(k), ccdf_out.value_at(k));
        (pi > 0.0 && po > 0.0).then(|| po.log10() - pi.log10())
    };

    let mut any_support = false;
    let mut last: Option<(u64, f64)> = None;
    let mut first_zero: Option<u64> = None;
    let mut sign_changes = 0;
    let mut first: Option<(f64, (u64, u64))> = None;

    for &k in &ks {
        let Some(d) = diff(k) else { continue };
        any_support = true;
        if d.abs() <= ZERO_TOL {
            if last.is_some() && first_zero.is_none() {
                first_zero = Some(k);
            }
            continue;
        }
        if let Some((ka, da)) = last {
            if da.signum() != d.signum() {
                sign_changes += 1;
                if first.is_none() {
                    first = Some(match first_zero {
                        Some(kz) => (kz as f64, (kz, kz)),
                        None => refine(ka, da, k, d, &diff),
                    });
                }
            }
        }
        last = Some((k, d));
        first_zero = None;
    }

    if !any_support {
        return Err(Error::NoCommonSupport);
    }
    Ok(CrossingResult {
        k_star: first.map(|f| f.0),
        sign_changes,
        bracket: first.map(|f| f.1),
    })
}

/// Between represented points `ka < kb` both curves are constant except for
/// a single step, at `ka + 1` (P(K>=k) form) or at `kb` (P(K>k) form).
fn refine(
    ka: u64,
    da: f64,
    kb: u64,
    db: f64,
    diff: &impl Fn(u64) -> Option<f64>,
) -> (f64, (u64, u64)) {
    let (lo, dlo, hi, dhi) = if kb == ka + 1 {
        (ka, da, kb, db)
    } else {
        match diff(ka + 1) {
            Some(d) if d.signum() == da.signum() && d.abs() > ZERO_TOL => match diff(kb - 1) {
                Some(d2) => (kb - 1, d2, kb, db),
                None => (ka, da, kb, db),
            },
            Some(d) if d.abs() > ZERO_TOL => (ka, da, ka + 1, d),
            _ => (ka, da, kb, db),
        }
    };
    let (xl, xh) = ((lo as f64).log10(), (hi as f64).log10());
    let t = dlo / (dlo - dhi);
    (10f64.powf(xl + t * (xh - xl)), (lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{ccdf, DegreeSequence};

    fn power_ccdf(coef: f64, slope: f64, kmax: u64) -> Ccdf {
        Ccdf::from_points((1..=kmax).map(|k| (k, coef * (k as f64).powf(-slope))).collect())
            .unwrap()
    }

    #[test]
    fn identical_curves_never_cross() {
        let a = power_ccdf(1.0, 0.5, 50);
        let r = crossing_point(&a, &a).unwrap();
        assert_eq!(r.k_star, None);
        assert_eq!(r.sign_changes, 0);
    }

    #[test]
    fn closed_form_power_laws_cross_at_ten() {
        let pin = power_ccdf(1.0, 0.5, 100);
        let pout = power_ccdf(10f64.powf(0.6), 1.1, 100);
        let r = crossing_point(&pin, &pout).unwrap();
        let k = r.k_star.unwrap();
        assert!((k - 10.0).abs() <= 0.5, "k* = {k}");
        assert_eq!(r.sign_changes, 1);
    }

    #[test]
    fn constant_sign_has_no_crossing() {
        let pin = power_ccdf(1.0, 0.5, 100);
        let pout = power_ccdf(0.5, 1.1, 100);
        let r = crossing_point(&pin, &pout).unwrap();
        assert!(r.k_star.is_none());
        assert_eq!(r.sign_changes, 0);
    }

    #[test]
    fn bracket_respects_step_semantics_with_gaps() {
        // in: P(K>=k) is 1 at k=1, 0.6 on 2..=3, 0.4 on 4..=20.
        let pin = ccdf(&DegreeSequence::new(None, vec![1, 1, 1, 1, 3, 3, 20, 20, 20, 20])).unwrap();
        // out: 1 at k=1, 0.8 at k=2, 0.3 on 3..=10.
        let pout = ccdf(&DegreeSequence::new(None, vec![2, 2, 2, 2, 2, 10, 10, 10, 1, 1])).unwrap();
        let r = crossing_point(&pin, &pout).unwrap();
        let (lo, hi) = r.bracket.unwrap();
        let k = r.k_star.unwrap();
        assert!(lo as f64 <= k && k <= hi as f64);
        let d = |k: u64| pout.value_at(k).log10() - pin.value_at(k).log10();
        assert!(d(lo).signum() != d(hi).signum() || d(lo) == 0.0 || d(hi) == 0.0);
        assert!(hi - lo <= 1);
    }

    #[test]
    fn swapping_inputs_preserves_result() {
        let pin = power_ccdf(1.0, 0.5, 100);
        let pout = power_ccdf(10f64.powf(0.6), 1.1, 100);
        let a = crossing_point(&pin, &pout).unwrap();
        let b = crossing_point(&pout, &pin).unwrap();
        assert_eq!(a.sign_changes, b.sign_changes);
        assert!((a.k_star.unwrap() - b.k_star.unwrap()).abs() < 1e-12);
    }
}
