//! Evaluation grids on the positive half-line.

use crate::error::{Error, Result};
use crate::sample::Sample;

/// Strictly increasing positive abscissae at which a density is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationGrid {
    points: Vec<f64>,
}

impl EvaluationGrid {
    /// Wrap explicit points; they must be finite, positive, and strictly
    /// increasing.
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Config("evaluation grid needs at least 2 points".into()));
        }
        for &p in &points {
            if !p.is_finite() || p <= 0.0 {
                return Err(Error::Domain(format!("grid point {p} is not a positive finite real")));
            }
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("grid points must be strictly increasing".into()));
        }
        Ok(EvaluationGrid { points })
    }

    /// `count` geometrically spaced points from `from` to `to` inclusive.
    pub fn geometric(from: f64, to: f64, count: usize) -> Result<Self> {
        if !(from > 0.0) || !from.is_finite() || !to.is_finite() {
            return Err(Error::Domain(format!("grid range [{from}, {to}] must be positive and finite")));
        }
        if to <= from {
            return Err(Error::Config(format!("grid range [{from}, {to}] is empty")));
        }
        if count < 2 {
            return Err(Error::Config("evaluation grid needs at least 2 points".into()));
        }
        let (la, lb) = (from.ln(), to.ln());
        let step = (lb - la) / (count - 1) as f64;
        let mut points: Vec<f64> = (0..count).map(|i| (la + step * i as f64).exp()).collect();
        points[0] = from;
        points[count - 1] = to;
        EvaluationGrid::from_points(points)
    }

    /// The default grid for a log-scale fit: geometric spacing over the data
    /// range padded by `cut` bandwidths on the log scale.
    pub fn log_padded(sample: &Sample, h: f64, cut: f64, count: usize) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::Domain(format!("bandwidth h must be positive, got {h}")));
        }
        let lo = (sample.log_min() - cut * h).exp();
        let hi = (sample.log_max() + cut * h).exp();
        if hi <= lo {
            // all observations equal and cut*h rounded away; widen slightly
            return EvaluationGrid::geometric(lo * 0.5, lo * 2.0, count);
        }
        EvaluationGrid::geometric(lo, hi, count)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_grid_hits_endpoints() {
        let g = EvaluationGrid::geometric(0.5, 8.0, 5).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g.points()[0], 0.5);
        assert_eq!(g.points()[4], 8.0);
        // geometric: constant ratio
        let r = g.points()[1] / g.points()[0];
        for w in g.points().windows(2) {
            assert!((w[1] / w[0] - r).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(EvaluationGrid::from_points(vec![1.0]).is_err());
        assert!(EvaluationGrid::from_points(vec![1.0, 1.0]).is_err());
        assert!(EvaluationGrid::from_points(vec![-1.0, 1.0]).is_err());
        assert!(EvaluationGrid::from_points(vec![0.0, 1.0]).is_err());
        assert!(EvaluationGrid::geometric(2.0, 1.0, 8).is_err());
        assert!(EvaluationGrid::geometric(-1.0, 1.0, 8).is_err());
    }

    #[test]
    fn log_padded_covers_sample() {
        let s = Sample::new(vec![0.5, 1.0, 4.0]).unwrap();
        let g = EvaluationGrid::log_padded(&s, 0.5, 3.0, 64).unwrap();
        assert!(g.points()[0] < 0.5);
        assert!(*g.points().last().unwrap() > 4.0);
        assert!((g.points()[0] - 0.5 * (-1.5f64).exp()).abs() < 1e-12);
    }
}
