use serde::{Deserialize, Serialize};

use super::zeta::{hurwitz, power_sum};
use super::DegreeSequence;
use crate::error::{Error, Result};

/// Minimum number of samples inside the fit range.
pub const MIN_TAIL: usize = 10;
/// Minimum sequence length for automatic k_min selection.
pub const MIN_SELECT_SAMPLES: usize = 50;

const GAMMA_LO: f64 = 1.0 + 1e-6;
const GAMMA_HI: f64 = 30.0;

/// Minimum number of samples at or above k for a CCDF point to enter the
/// regression.
pub const OLS_MIN_SUPPORT: usize = 5;
/// Continuity shift of the regression abscissa: points sit at log10(k − ½).
pub const OLS_SHIFT: f64 = 0.5;

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct FitOptions {
    pub min_tail: usize,
    pub ols_min_support: usize,
    pub ols_shift: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            min_tail: MIN_TAIL,
            ols_min_support: OLS_MIN_SUPPORT,
            ols_shift: OLS_SHIFT,
        }
    }
}

impl FitOptions {
    /// Plain regression on (log10 k, log10 P(k)) over every point in range.
    pub fn unadjusted_ols(min_tail: usize) -> Self {
        FitOptions {
            min_tail,
            ols_min_support: 1,
            ols_shift: 0.0,
        }
    }
}

/// Discrete power law p(k) ~ k^-γ fitted on [k_min, k_max].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    /// Exact discrete maximum-likelihood density exponent.
    pub gamma_mle: f64,
    /// Closed-form approximation 1 + n / Σ ln(k / (k_min - 1/2)).
    pub gamma_mle_approx: f64,
    /// 1 + |slope| of the log-log regression on the CCDF.
    pub gamma_ols: f64,
    /// Regression line: log10 P(k) = ols_intercept + ols_slope * log10(k − ols_shift).
    pub ols_slope: f64,
    pub ols_intercept: f64,
    pub ols_shift: f64,
    pub k_min: u64,
    pub k_max: Option<u64>,
    pub ks_distance: f64,
    pub n_tail: usize,
    /// P(K >= k_min) over the whole sequence; anchors the fitted curve.
    pub anchor: f64,
}

impl PowerLawFit {
    /// Exponent of the cumulative distribution, γ − 1.
    pub fn cumulative_exponent(&self) -> f64 {
        self.gamma_mle - 1.0
    }

    /// P(K >= k) predicted by the untruncated MLE power law, on the scale of
    /// the whole sequence.
    pub fn predicted_ccdf(&self, k: u64) -> f64 {
        if k <= self.k_min {
            return self.anchor;
        }
        self.anchor * hurwitz(self.gamma_mle, k as f64) / hurwitz(self.gamma_mle, self.k_min as f64)
    }

    pub fn ols_line(&self, k: f64) -> f64 {
        10f64.powf(self.ols_intercept + self.ols_slope * (k - self.ols_shift).log10())
    }
}

/// 1 + n / Σ ln(k_i / (k_min − ½)) over `tail`.
pub fn approx_discrete_mle(tail: &[u64], k_min: u64) -> f64 {
    let shift = k_min as f64 - 0.5;
    let s: f64 = tail.iter().map(|&k| (k as f64 / shift).ln()).sum();
    1.0 + tail.len() as f64 / s
}

pub fn fit_power_law(sequence: &DegreeSequence, k_min: u64, k_max: Option<u64>) -> Result<PowerLawFit> {
    fit_power_law_with(sequence, k_min, k_max, &FitOptions::default())
}

pub fn fit_power_law_with(
    sequence: &DegreeSequence,
    k_min: u64,
    k_max: Option<u64>,
    options: &FitOptions,
) -> Result<PowerLawFit> {
    fit_sorted(&sequence.sorted(), k_min, k_max, options)
}

fn fit_sorted(sorted: &[u64], k_min: u64, k_max: Option<u64>, options: &FitOptions) -> Result<PowerLawFit> {
    if k_min == 0 {
        return Err(Error::InvalidParameter("k_min must be >= 1".into()));
    }
    if let Some(hi) = k_max {
        if hi < k_min {
            return Err(Error::InvalidParameter(format!("k_max {hi} < k_min {k_min}")));
        }
    }
    let n = sorted.len();
    let lo = sorted.partition_point(|&k| k < k_min);
    let hi = k_max.map_or(n, |m| sorted.partition_point(|&k| k <= m));
    let tail = &sorted[lo..hi];
    if tail.len() < options.min_tail.max(1) {
        return Err(Error::InsufficientTail {
            found: tail.len(),
            required: options.min_tail.max(1),
        });
    }
    if tail[0] == tail[tail.len() - 1] {
        return Err(Error::ZeroVariance);
    }

    let gamma_mle = discrete_mle(tail, k_min, k_max);
    let gamma_mle_approx = approx_discrete_mle(tail, k_min);
    let (ols_slope, ols_intercept) = ols_on_ccdf(sorted, lo, hi, options);
    let ks_distance = ks_distance(tail, gamma_mle, k_min, k_max);

    Ok(PowerLawFit {
        gamma_mle,
        gamma_mle_approx,
        gamma_ols: 1.0 + ols_slope.abs(),
        ols_slope,
        ols_intercept,
        ols_shift: options.ols_shift,
        k_min,
        k_max,
        ks_distance,
        n_tail: tail.len(),
        anchor: (n - lo) as f64 / n as f64,
    })
}

/// Maximizes ℓ(γ) = −γ Σ ln k − n ln Z(γ), Z the (possibly truncated)
/// Hurwitz normalizer. ℓ is concave, so golden-section search suffices.
fn discrete_mle(tail: &[u64], k_min: u64, k_max: Option<u64>) -> f64 {
    let sum_ln: f64 = tail.iter().map(|&k| (k as f64).ln()).sum();
    let n = tail.len() as f64;
    let loglik = |g: f64| -g * sum_ln - n * power_sum(g, k_min, k_max).ln();

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (GAMMA_LO, GAMMA_HI);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (loglik(c), loglik(d));
    while b - a > 1e-10 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = loglik(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = loglik(d);
        }
    }
    0.5 * (a + b)
}

/// Least squares of log10 P(k) on log10(k − shift) over the CCDF points
/// that fall in `sorted[lo..hi]`, with P measured against the whole
/// sequence. Points resting on fewer than `ols_min_support` samples are
/// dropped unless that would leave fewer than two.
fn ols_on_ccdf(sorted: &[u64], lo: usize, hi: usize, options: &FitOptions) -> (f64, f64) {
    let n = sorted.len() as f64;
    let mut points = Vec::new();
    let mut i = lo;
    while i < hi {
        let k = sorted[i];
        let support = sorted.len() - i;
        points.push(((k as f64 - options.ols_shift).log10(), (support as f64 / n).log10(), support));
        i += sorted[i..hi].partition_point(|&x| x == k);
    }
    let supported = points.iter().filter(|p| p.2 >= options.ols_min_support).count();
    if supported >= 2 {
        points.retain(|p| p.2 >= options.ols_min_support);
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    simple_ols(&xs, &ys)
}

/// (slope, intercept) of y on x.
pub(crate) fn simple_ols(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// sup over integer k in range of |S_emp(k) − S_fit(k)|, both conditional on
/// the fit range. Both are step functions; the empirical one only moves
/// just past an observed value, so each constant run is checked at its ends.
fn ks_distance(tail: &[u64], gamma: f64, k_min: u64, k_max: Option<u64>) -> f64 {
    let m = tail.len() as f64;
    let upper = k_max.map_or(0.0, |hi| hurwitz(gamma, hi as f64 + 1.0));
    let norm = hurwitz(gamma, k_min as f64) - upper;
    let fitted = |k: u64| (hurwitz(gamma, k as f64) - upper) / norm;

    let mut worst: f64 = 0.0;
    let mut prev = k_min - 1;
    let mut i = 0;
    while i < tail.len() {
        let k = tail[i];
        let emp = (tail.len() - i) as f64 / m;
        worst = worst.max((emp - fitted(k)).abs());
        if k > prev + 1 {
            worst = worst.max((emp - fitted(prev + 1)).abs());
        }
        prev = k;
        i += tail[i..].partition_point(|&x| x == k);
    }
    worst
}

/// Candidates must leave a fit range at least this many decades wide
/// (k_min * 10^span <= largest observed value) when any such candidate exists.
pub const MIN_SPAN_DECADES: f64 = 1.0;

/// Chooses k_min by minimizing the KS distance of the MLE fit over the
/// observed degree values that leave at least `MIN_TAIL` samples in the tail
/// and at least `MIN_SPAN_DECADES` of range above them.
pub fn select_k_min(sequence: &DegreeSequence) -> Result<u64> {
    if sequence.len() < MIN_SELECT_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "k_min selection needs at least {MIN_SELECT_SAMPLES} samples, got {}",
            sequence.len()
        )));
    }
    let sorted = sequence.sorted();
    let n = sorted.len();
    let options = FitOptions::default();

    let mut candidates = Vec::new();
    let mut i = sorted.partition_point(|&k| k < 1);
    while i < n && n - i >= MIN_TAIL {
        let k = sorted[i];
        candidates.push(k);
        i += sorted[i..].partition_point(|&x| x == k);
    }
    let top = sorted[n - 1] as f64;
    let wide: Vec<u64> = candidates
        .iter()
        .copied()
        .filter(|&k| k as f64 * 10f64.powf(MIN_SPAN_DECADES) <= top)
        .collect();
    if !wide.is_empty() {
        candidates = wide;
    }

    let mut best: Option<(f64, u64)> = None;
    for k in candidates {
        if let Ok(fit) = fit_sorted(&sorted, k, None, &options) {
            if best.is_none_or(|(d, _)| fit.ks_distance < d) {
                best = Some((fit.ks_distance, k));
            }
        }
    }
    best.map(|(_, k)| k).ok_or(Error::InsufficientTail {
        found: 0,
        required: MIN_TAIL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[u64]) -> DegreeSequence {
        DegreeSequence::new(None, v.to_vec())
    }

    #[test]
    fn closed_form_matches_hand_evaluation() {
        // Σ ln(k / 0.5) over {1,1,1,2,4} = 8 ln 2.
        let want = 1.0 + 5.0 / (8.0 * std::f64::consts::LN_2);
        let options = FitOptions {
            min_tail: 1,
            ..FitOptions::default()
        };
        let fit = fit_power_law_with(&seq(&[1, 1, 1, 2, 4]), 1, None, &options).unwrap();
        assert!((fit.gamma_mle_approx - want).abs() < 1e-12);
        assert!((fit.gamma_mle_approx - 1.902).abs() < 5e-4);
    }

    #[test]
    fn exact_mle_solves_score_equation() {
        // At the optimum, mean ln k equals E_γ[ln k] under the fitted law.
        let data = [1u64, 1, 1, 1, 2, 2, 3, 5, 8, 13, 1, 2];
        let fit = fit_power_law(&seq(&data), 1, None).unwrap();
        let g = fit.gamma_mle;
        let mean_ln = data.iter().map(|&k| (k as f64).ln()).sum::<f64>() / data.len() as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for k in 1..2_000_000u64 {
            let w = (k as f64).powf(-g);
            num += (k as f64).ln() * w;
            den += w;
        }
        assert!((num / den - mean_ln).abs() < 1e-3, "{} vs {mean_ln}", num / den);
    }

    #[test]
    fn guards() {
        let short = seq(&[1, 2, 3]);
        assert!(matches!(
            fit_power_law(&short, 1, None),
            Err(Error::InsufficientTail { found: 3, .. })
        ));
        assert!(matches!(fit_power_law(&seq(&[4; 20]), 1, None), Err(Error::ZeroVariance)));
        assert!(fit_power_law(&seq(&[4; 20]), 0, None).is_err());
        assert!(fit_power_law(&seq(&[4; 20]), 5, Some(3)).is_err());
        assert!(select_k_min(&seq(&[1; 49])).is_err());
    }

    #[test]
    fn truncated_range_counts_only_inside() {
        let data: Vec<u64> = (1..=40).collect();
        let fit = fit_power_law(&seq(&data), 5, Some(20)).unwrap();
        assert_eq!(fit.n_tail, 16);
        assert_eq!(fit.k_max, Some(20));
        assert!((fit.anchor - 36.0 / 40.0).abs() < 1e-15);
    }

    #[test]
    fn ols_recovers_exact_line() {
        // CCDF of {1,2,4,8} with multiplicities making P(k) = 1/k exactly:
        // counts of >= k are 8,4,2,1 → values 1×4, 2×2, 4×1, 8×1.
        let data = [1, 1, 1, 1, 2, 2, 4, 8];
        let fit = fit_power_law_with(&seq(&data), 1, None, &FitOptions::unadjusted_ols(1)).unwrap();
        assert!((fit.ols_slope + 1.0).abs() < 1e-12);
        assert!(fit.ols_intercept.abs() < 1e-12);
        assert!((fit.gamma_ols - 2.0).abs() < 1e-12);
        assert!((fit.ols_line(4.0) - 0.25).abs() < 1e-12);
    }

    #[test]
    fn default_ols_shifts_abscissa_and_drops_thin_points() {
        // 20 samples; the last two distinct values carry support 2 and 1.
        let mut data = vec![1u64; 8];
        data.extend([2, 2, 2, 2, 3, 3, 3, 5, 5, 5, 9, 12]);
        let fit = fit_power_law(&seq(&data), 1, None).unwrap();
        // Kept points: k = 1, 2, 3, 5 with support 20, 12, 8, 5.
        let pts = [(1.0, 20.0), (2.0, 12.0), (3.0, 8.0), (5.0, 5.0)];
        let xs: Vec<f64> = pts.iter().map(|p: &(f64, f64)| (p.0 - 0.5).log10()).collect();
        let ys: Vec<f64> = pts.iter().map(|p| (p.1 / 20.0).log10()).collect();
        let mx = xs.iter().sum::<f64>() / 4.0;
        let my = ys.iter().sum::<f64>() / 4.0;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        assert!((fit.ols_slope - sxy / sxx).abs() < 1e-12);
        assert!((fit.ols_intercept - (my - sxy / sxx * mx)).abs() < 1e-12);
    }

    #[test]
    fn ks_is_a_probability_gap() {
        let data: Vec<u64> = (1..=100).collect();
        let fit = fit_power_law(&seq(&data), 1, None).unwrap();
        assert!(fit.ks_distance > 0.0 && fit.ks_distance <= 1.0);
    }
}
