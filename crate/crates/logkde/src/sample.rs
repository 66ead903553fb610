//! Validated samples of strictly positive observations.

use crate::error::{Error, Result};

/// Observations below this threshold are rejected: their logarithms would
/// stretch the log-domain range past anything a finite grid can cover.
const MIN_OBSERVATION: f64 = 1e-300;

/// An IID sample of strictly positive values with its log transform cached.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    log_values: Vec<f64>,
}

impl Sample {
    /// Validate and wrap a collection of observations. Every value must be
    /// finite and strictly positive; duplicates are permitted.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Sample("sample is empty".into()));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Domain(format!(
                    "observation {} is not finite ({v})",
                    i + 1
                )));
            }
            if v <= 0.0 {
                return Err(Error::Domain(format!(
                    "observation {} is not strictly positive ({v})",
                    i + 1
                )));
            }
            if v < MIN_OBSERVATION {
                return Err(Error::Domain(format!(
                    "observation {} is below the supported range ({v} < {MIN_OBSERVATION})",
                    i + 1
                )));
            }
        }
        let log_values = values.iter().map(|v| v.ln()).collect();
        Ok(Sample { values, log_values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Observations in natural units.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Cached `ln` of each observation.
    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn log_min(&self) -> f64 {
        self.log_values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn log_max(&self) -> f64 {
        self.log_values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// True when all log-scale observations coincide, in which case every
    /// scale statistic is zero.
    pub fn is_log_degenerate(&self) -> bool {
        let first = self.log_values[0];
        self.log_values.iter().all(|&y| y == first)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caches_log_transform() {
        let s = Sample::new(vec![1.0, std::f64::consts::E, 4.0]).unwrap();
        assert_eq!(s.n(), 3);
        assert!((s.log_values()[1] - 1.0).abs() < 1e-15);
        assert_eq!(s.min(), 1.0);
        assert_eq!(s.max(), 4.0);
    }

    #[test]
    fn rejects_invalid_observations() {
        assert!(Sample::new(vec![]).is_err());
        assert!(Sample::new(vec![1.0, 0.0]).is_err());
        assert!(Sample::new(vec![1.0, -3.0]).is_err());
        assert!(Sample::new(vec![f64::NAN]).is_err());
        assert!(Sample::new(vec![f64::INFINITY]).is_err());
        assert!(Sample::new(vec![1e-301]).is_err());
        let err = Sample::new(vec![2.0, -1.0]).unwrap_err();
        assert!(err.to_string().contains("observation 2"));
    }

    #[test]
    fn detects_degenerate_log_data() {
        assert!(Sample::new(vec![3.0, 3.0, 3.0]).unwrap().is_log_degenerate());
        assert!(!Sample::new(vec![3.0, 3.1]).unwrap().is_log_degenerate());
    }
}
