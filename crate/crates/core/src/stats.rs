//! Descriptive and outlier-resistant estimators.
//!
//! A [`Sample`] keeps its values sorted, so every estimator sums in the same
//! canonical order regardless of how the caller assembled the data.

use serde::Serialize;
use thiserror::Error;

/// Name of the quantile rule, reported alongside rendered summaries.
pub const QUANTILE_METHOD: &str = "linear interpolation at rank (n-1)p";
/// Name of the skewness estimator, reported alongside rendered summaries.
pub const SKEWNESS_METHOD: &str = "moment ratio g1 = m3 / m2^1.5";
/// Default fraction cut (or replaced) from each tail by the robust means.
pub const DEFAULT_TAIL_FRACTION: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("insufficient data: need at least {required} values, have {actual}")]
    InsufficientData { required: usize, actual: usize },
    #[error("skewness is undefined for a sample with zero variance")]
    ZeroVariance,
    #[error("value at position {0} is not finite")]
    NonFinite(usize),
    #[error("fraction {0} must lie in [0, 0.5)")]
    InvalidFraction(f64),
    #[error("probability {0} must lie in [0, 1]")]
    InvalidProbability(f64),
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Sample {
    sorted: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self, StatsError> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite(pos));
        }
        let mut sorted = values;
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn count(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Values in ascending order.
    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted
    }

    fn require(&self, n: usize) -> Result<(), StatsError> {
        if self.count() < n {
            Err(StatsError::InsufficientData { required: n, actual: self.count() })
        } else {
            Ok(())
        }
    }

    pub fn min(&self) -> Result<f64, StatsError> {
        self.require(1)?;
        Ok(self.sorted[0])
    }

    pub fn max(&self) -> Result<f64, StatsError> {
        self.require(1)?;
        Ok(self.sorted[self.count() - 1])
    }

    pub fn mean(&self) -> Result<f64, StatsError> {
        self.require(1)?;
        Ok(self.sorted.iter().sum::<f64>() / self.count() as f64)
    }

    /// Sample standard deviation with the n-1 denominator.
    pub fn sd(&self) -> Result<f64, StatsError> {
        self.require(2)?;
        let m = self.mean()?;
        let ss: f64 = self.sorted.iter().map(|v| (v - m) * (v - m)).sum();
        Ok((ss / (self.count() - 1) as f64).sqrt())
    }

    pub fn quantile(&self, p: f64) -> Result<f64, StatsError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(StatsError::InvalidProbability(p));
        }
        self.require(1)?;
        let h = (self.count() - 1) as f64 * p;
        let lo = h.floor() as usize;
        let frac = h - lo as f64;
        let below = self.sorted[lo];
        if frac == 0.0 {
            return Ok(below);
        }
        let above = self.sorted[lo + 1];
        Ok(below + frac * (above - below))
    }

    pub fn median(&self) -> Result<f64, StatsError> {
        self.quantile(0.5)
    }

    fn tail_count(&self, fraction: f64) -> Result<usize, StatsError> {
        if !(0.0..0.5).contains(&fraction) {
            return Err(StatsError::InvalidFraction(fraction));
        }
        self.require(1)?;
        Ok((fraction * self.count() as f64).floor() as usize)
    }

    /// Mean after dropping `floor(fraction * n)` values from each end.
    pub fn trimmed_mean(&self, fraction: f64) -> Result<f64, StatsError> {
        let k = self.tail_count(fraction)?;
        let kept = &self.sorted[k..self.count() - k];
        Ok(kept.iter().sum::<f64>() / kept.len() as f64)
    }

    /// Mean after replacing the `floor(fraction * n)` smallest values with the
    /// next smallest and the same number of largest values with the next largest.
    pub fn winsorized_mean(&self, fraction: f64) -> Result<f64, StatsError> {
        let k = self.tail_count(fraction)?;
        let n = self.count();
        let low = self.sorted[k];
        let high = self.sorted[n - 1 - k];
        let total: f64 = std::iter::repeat_n(low, k)
            .chain(self.sorted[k..n - k].iter().copied())
            .chain(std::iter::repeat_n(high, k))
            .sum();
        Ok(total / n as f64)
    }

    /// Moment-ratio skewness `m3 / m2^(3/2)` with population (n) denominators.
    pub fn skewness(&self) -> Result<f64, StatsError> {
        self.require(3)?;
        let n = self.count() as f64;
        let m = self.mean()?;
        let (m2, m3) = self.sorted.iter().fold((0.0, 0.0), |(s2, s3), v| {
            let d = v - m;
            (s2 + d * d, s3 + d * d * d)
        });
        let (m2, m3) = (m2 / n, m3 / n);
        if m2 == 0.0 {
            return Err(StatsError::ZeroVariance);
        }
        Ok(m3 / m2.powf(1.5))
    }

    pub fn five_number(&self) -> Result<FiveNumber, StatsError> {
        Ok(FiveNumber {
            minimum: self.min()?,
            q1: self.quantile(0.25)?,
            median: self.quantile(0.5)?,
            q3: self.quantile(0.75)?,
            maximum: self.max()?,
        })
    }

    /// Every summary statistic that the sample is large enough to support.
    pub fn summarize(&self, trim_fraction: f64, winsor_fraction: f64) -> SummaryRow {
        SummaryRow {
            size: self.count(),
            average: self.mean().ok(),
            sd: self.sd().ok(),
            median: self.median().ok(),
            truncated_mean: self.trimmed_mean(trim_fraction).ok(),
            winsorized_mean: self.winsorized_mean(winsor_fraction).ok(),
            skewness: self.skewness().ok(),
            maximum: self.max().ok(),
            minimum: self.min().ok(),
        }
    }
}

impl TryFrom<Vec<f64>> for Sample {
    type Error = StatsError;

    fn try_from(values: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiveNumber {
    pub minimum: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub maximum: f64,
}

impl FiveNumber {
    pub fn as_array(&self) -> [f64; 5] {
        [self.minimum, self.q1, self.median, self.q3, self.maximum]
    }
}

/// One column of a summary table. `None` marks a statistic the sample is too
/// small (or too degenerate) to support, which is different from zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct SummaryRow {
    pub size: usize,
    pub average: Option<f64>,
    pub sd: Option<f64>,
    pub median: Option<f64>,
    pub truncated_mean: Option<f64>,
    pub winsorized_mean: Option<f64>,
    pub skewness: Option<f64>,
    pub maximum: Option<f64>,
    pub minimum: Option<f64>,
}

impl SummaryRow {
    pub const LABELS: [&'static str; 9] = [
        "Size",
        "Average",
        "Standard deviation",
        "Median",
        "Truncated mean",
        "Winsorized mean",
        "Skewness",
        "Maximum",
        "Minimum",
    ];

    /// Statistic values in [`Self::LABELS`] order, excluding size.
    pub fn statistics(&self) -> [Option<f64>; 8] {
        [
            self.average,
            self.sd,
            self.median,
            self.truncated_mean,
            self.winsorized_mean,
            self.skewness,
            self.maximum,
            self.minimum,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn s(v: &[f64]) -> Sample {
        Sample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn mean_and_sd() {
        assert_eq!(s(&[2.0, 4.0, 6.0]).mean().unwrap(), 4.0);
        assert_eq!(s(&[1.0, 1.0, 1.0]).sd().unwrap(), 0.0);
        assert_abs_diff_eq!(s(&[1.0, 2.0, 3.0, 4.0]).sd().unwrap(), 1.29099, epsilon = 1e-5);
        assert_eq!(
            s(&[1.0]).sd(),
            Err(StatsError::InsufficientData { required: 2, actual: 1 })
        );
        assert!(s(&[]).mean().is_err());
    }

    #[test]
    fn rejects_non_finite() {
        assert_eq!(Sample::new(vec![1.0, f64::NAN]), Err(StatsError::NonFinite(1)));
        assert!(Sample::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn quantiles() {
        let x = s(&[4.0, 1.0, 3.0, 2.0]);
        assert_eq!(x.quantile(0.5).unwrap(), 2.5);
        assert_eq!(x.quantile(0.0).unwrap(), 1.0);
        assert_eq!(x.quantile(1.0).unwrap(), 4.0);
        assert!(x.quantile(1.1).is_err());
        assert!(s(&[]).quantile(0.5).is_err());
    }

    #[test]
    fn trimmed_and_winsorized() {
        let x = s(&[1.0, 2.0, 3.0, 4.0, 100.0]);
        assert_eq!(x.trimmed_mean(0.2).unwrap(), 3.0);
        assert_eq!(x.winsorized_mean(0.2).unwrap(), 3.0);
        assert_eq!(x.trimmed_mean(0.0).unwrap(), x.mean().unwrap());
        assert_eq!(x.winsorized_mean(0.0).unwrap(), x.mean().unwrap());
        assert_eq!(s(&[5.0, 5.0, 5.0]).winsorized_mean(0.2).unwrap(), 5.0);
        assert_eq!(s(&[5.0, 5.0, 5.0]).trimmed_mean(0.4).unwrap(), 5.0);
        assert_eq!(x.trimmed_mean(0.5), Err(StatsError::InvalidFraction(0.5)));
        assert!(s(&[]).trimmed_mean(0.1).is_err());
    }

    #[test]
    fn skewness_examples() {
        assert_abs_diff_eq!(s(&[1.0, 2.0, 3.0]).skewness().unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s(&[0.0, 0.0, 0.0, 1.0]).skewness().unwrap(), 1.1547, epsilon = 1e-4);
        assert_eq!(s(&[2.0, 2.0, 2.0]).skewness(), Err(StatsError::ZeroVariance));
        assert!(matches!(s(&[1.0, 2.0]).skewness(), Err(StatsError::InsufficientData { .. })));
    }

    #[test]
    fn five_number_examples() {
        let f = s(&[1.0, 2.0, 3.0, 4.0, 5.0]).five_number().unwrap();
        assert_eq!(f.as_array(), [1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(s(&[7.0]).five_number().unwrap().as_array(), [7.0; 5]);
    }

    #[test]
    fn summarize_examples() {
        let row = s(&[1.0, 2.0, 3.0, 4.0, 100.0]).summarize(0.2, 0.2);
        assert_eq!(row.size, 5);
        assert_eq!(row.average, Some(22.0));
        assert_eq!(row.median, Some(3.0));
        assert_eq!(row.truncated_mean, Some(3.0));
        assert_eq!(row.winsorized_mean, Some(3.0));
        assert_eq!((row.minimum, row.maximum), (Some(1.0), Some(100.0)));

        let single = s(&[9.0]).summarize(0.05, 0.05);
        assert_eq!((single.size, single.average, single.sd, single.skewness), (1, Some(9.0), None, None));

        let empty = s(&[]).summarize(0.05, 0.05);
        assert_eq!(empty.size, 0);
        assert!(empty.statistics().iter().all(Option::is_none));
    }

    fn arb_values() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1e4f64..1e4, 3..60)
    }

    proptest! {
        #[test]
        fn skewness_flips_sign(v in arb_values()) {
            let a = s(&v);
            let neg: Vec<f64> = v.iter().map(|x| -x).collect();
            if let Ok(g) = a.skewness() {
                let h = s(&neg).skewness().unwrap();
                prop_assert!((g + h).abs() <= 1e-9 * g.abs().max(1.0));
            }
        }

        #[test]
        fn duplication_preserves_location(v in arb_values()) {
            let a = s(&v);
            let doubled: Vec<f64> = v.iter().chain(v.iter()).copied().collect();
            let b = s(&doubled);
            prop_assert!((a.mean().unwrap() - b.mean().unwrap()).abs() <= 1e-9 * a.mean().unwrap().abs().max(1.0));
            prop_assert_eq!(a.median().unwrap(), b.median().unwrap());
            prop_assert_eq!(a.min().unwrap(), b.min().unwrap());
            prop_assert_eq!(a.max().unwrap(), b.max().unwrap());
        }
    }
}
