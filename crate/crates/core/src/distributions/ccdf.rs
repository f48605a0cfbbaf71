use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{DegreeSequence, Direction};
use crate::error::{Error, Result};

/// Which tail probability a CCDF reports.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CcdfConvention {
    /// P(K >= k): the sum-from-k form of the cumulative power law.
    #[default]
    AtLeast,
    /// P(K > k).
    Exceeds,
}

/// Step function P(k) over integer k >= 1, stored at the k values where it
/// changes. `k` strictly increases and `p` strictly decreases along `points`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ccdf {
    pub direction: Option<Direction>,
    pub convention: CcdfConvention,
    /// Sample count behind the curve, when it came from data.
    pub n: Option<usize>,
    points: Vec<(u64, f64)>,
    support_max: u64,
}

pub fn ccdf(sequence: &DegreeSequence) -> Result<Ccdf> {
    ccdf_with(sequence, CcdfConvention::AtLeast)
}

/// Zero-degree nodes count in the denominator but produce no point.
pub fn ccdf_with(sequence: &DegreeSequence, convention: CcdfConvention) -> Result<Ccdf> {
    let n = sequence.len();
    let sorted = sequence.sorted();
    if sorted.last().copied().unwrap_or(0) == 0 {
        return Err(Error::DegenerateSequence);
    }
    let nf = n as f64;

    // (value, count of samples >= value) for each distinct positive value.
    let mut runs: Vec<(u64, usize)> = Vec::new();
    let mut i = 0;
    while i < n {
        let v = sorted[i];
        let j = sorted[i..].partition_point(|&x| x == v) + i;
        if v > 0 {
            runs.push((v, n - i));
        }
        i = j;
    }
    let support_max = runs.last().map(|r| r.0).unwrap_or(0);

    let points = match convention {
        CcdfConvention::AtLeast => runs.iter().map(|&(k, c)| (k, c as f64 / nf)).collect(),
        CcdfConvention::Exceeds => {
            let exceeding = |k: u64| n - sorted.partition_point(|&x| x <= k);
            let mut ks: Vec<u64> = std::iter::once(1).chain(runs.iter().map(|r| r.0)).collect();
            ks.dedup();
            let mut pts: Vec<(u64, f64)> = Vec::new();
            for k in ks {
                let c = exceeding(k);
                if c == 0 {
                    break;
                }
                let p = c as f64 / nf;
                if pts.last().is_none_or(|&(_, last)| p < last) {
                    pts.push((k, p));
                }
            }
            if pts.is_empty() {
                return Err(Error::DegenerateSequence);
            }
            pts
        }
    };

    Ok(Ccdf {
        direction: sequence.direction,
        convention,
        n: Some(n),
        points,
        support_max,
    })
}

impl Ccdf {
    /// A P(K >= k) curve from explicit samples, e.g. a closed-form law.
    /// Values need not be bounded by 1.
    pub fn from_points(points: Vec<(u64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("ccdf needs at least one point".into()));
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 || w[1].1 >= w[0].1 {
                return Err(Error::InvalidParameter(
                    "ccdf points must have increasing k and decreasing p".into(),
                ));
            }
        }
        if points[0].0 == 0 || points.iter().any(|p| !(p.1 > 0.0 && p.1.is_finite())) {
            return Err(Error::InvalidParameter(
                "ccdf points need k >= 1 and finite p > 0".into(),
            ));
        }
        let support_max = points.last().unwrap().0;
        Ok(Ccdf {
            direction: None,
            convention: CcdfConvention::AtLeast,
            n: None,
            points,
            support_max,
        })
    }

    pub fn points(&self) -> &[(u64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The step function evaluated at any integer k >= 1.
    pub fn value_at(&self, k: u64) -> f64 {
        match self.convention {
            CcdfConvention::AtLeast => {
                let i = self.points.partition_point(|&(pk, _)| pk < k);
                self.points.get(i).map_or(0.0, |p| p.1)
            }
            CcdfConvention::Exceeds => {
                if k >= self.support_max {
                    return 0.0;
                }
                let i = self.points.partition_point(|&(pk, _)| pk <= k);
                if i == 0 {
                    self.points[0].1
                } else {
                    self.points[i - 1].1
                }
            }
        }
    }
}

/// Writes `k<TAB>p` lines under a comment header naming direction and n.
pub fn write_ccdf<W: Write>(ccdf: &Ccdf, mut w: W) -> std::io::Result<()> {
    let direction = ccdf.direction.map_or("unspecified", Direction::as_str);
    let n = ccdf.n.map_or_else(|| "unknown".to_string(), |n| n.to_string());
    let convention = match ccdf.convention {
        CcdfConvention::AtLeast => "P(K>=k)",
        CcdfConvention::Exceeds => "P(K>k)",
    };
    writeln!(w, "# direction={direction} n={n} p={convention}")?;
    writeln!(w, "# k\tp")?;
    for &(k, p) in &ccdf.points {
        writeln!(w, "{k}\t{p}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[u64]) -> DegreeSequence {
        DegreeSequence::new(None, v.to_vec())
    }

    #[test]
    fn hand_counted_points() {
        let c = ccdf(&seq(&[1, 1, 2, 3])).unwrap();
        assert_eq!(c.points(), &[(1, 1.0), (2, 0.5), (3, 0.25)]);
    }

    #[test]
    fn constant_sequence_is_single_plateau() {
        let c = ccdf(&seq(&[4, 4, 4])).unwrap();
        assert_eq!(c.points(), &[(4, 1.0)]);
        for k in 1..=4 {
            assert_eq!(c.value_at(k), 1.0);
        }
        assert_eq!(c.value_at(5), 0.0);
    }

    #[test]
    fn zero_degrees_dilute_the_plateau() {
        let c = ccdf(&seq(&[0, 0, 5])).unwrap();
        assert_eq!(c.points(), &[(5, 1.0 / 3.0)]);
        for k in 1..=5 {
            assert!((c.value_at(k) - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn all_zero_is_degenerate() {
        assert!(matches!(ccdf(&seq(&[0, 0])), Err(Error::DegenerateSequence)));
        assert!(matches!(ccdf(&seq(&[])), Err(Error::DegenerateSequence)));
    }

    #[test]
    fn strict_convention() {
        // P(K>1)=2/4, P(K>2)=1/4, P(K>3)=0.
        let c = ccdf_with(&seq(&[1, 1, 2, 3]), CcdfConvention::Exceeds).unwrap();
        assert_eq!(c.points(), &[(1, 0.5), (2, 0.25)]);
        assert_eq!(c.value_at(3), 0.0);
        let c = ccdf_with(&seq(&[0, 4]), CcdfConvention::Exceeds).unwrap();
        assert_eq!(c.points(), &[(1, 0.5)]);
        assert_eq!(c.value_at(3), 0.5);
        assert_eq!(c.value_at(4), 0.0);
        assert!(ccdf_with(&seq(&[1, 1]), CcdfConvention::Exceeds).is_err());
    }

    #[test]
    fn from_points_validates() {
        assert!(Ccdf::from_points(vec![(1, 2.0), (2, 1.0)]).is_ok());
        assert!(Ccdf::from_points(vec![(1, 1.0), (2, 1.0)]).is_err());
        assert!(Ccdf::from_points(vec![(2, 1.0), (1, 0.5)]).is_err());
        assert!(Ccdf::from_points(vec![]).is_err());
    }

    #[test]
    fn export_format() {
        let c = ccdf(&DegreeSequence::new(Some(Direction::Out), vec![1, 2])).unwrap();
        let mut buf = Vec::new();
        write_ccdf(&c, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "# direction=out n=2 p=P(K>=k)\n# k\tp\n1\t1\n2\t0.5\n");
    }
}
