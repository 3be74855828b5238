//! Metric structure on spaces of sampled self-maps.
//!
//! A map is observed through its images on a fixed grid. The distance
//! between two maps is a weighted sum of pointwise distances; weights sum
//! to a finite constant. On the stacked-circles space each ring carries
//! total weight 2^-n (weight 1 on the inner and outer circles), split
//! evenly over that ring's grid points, so deep rings contribute little
//! and convergence in this metric matches pointwise convergence ring by
//! ring. All other spaces use uniform weights summing to 1.

use crate::error::{Error, Result};
use crate::space::{MetricSpace, Point, Ring, SpaceKind};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

/// A fixed observation grid on a space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub space: MetricSpace,
    pub points: Vec<Point>,
}

impl Grid {
    pub fn new(space: MetricSpace, points: Vec<Point>) -> Arc<Grid> {
        Arc::new(Grid { space, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Weighted pointwise metric on maps observed over a grid.
#[derive(Debug, Clone)]
pub struct FunctionMetric {
    grid: Arc<Grid>,
    weights: Vec<f64>,
}

impl FunctionMetric {
    /// Uniform weights 1/n.
    pub fn uniform(grid: Arc<Grid>) -> FunctionMetric {
        let n = grid.len().max(1);
        let w = 1.0 / n as f64;
        let weights = vec![w; grid.len()];
        FunctionMetric { grid, weights }
    }

    /// Standard weighting for the grid's space: ring-weighted on the
    /// stacked circles, uniform elsewhere.
    pub fn standard(grid: Arc<Grid>) -> FunctionMetric {
        match grid.space.kind {
            SpaceKind::Stack { .. } => {
                let mut counts: BTreeMap<String, usize> = BTreeMap::new();
                for p in &grid.points {
                    if let Point::Stack { ring, .. } = p {
                        *counts.entry(ring.describe()).or_insert(0) += 1;
                    }
                }
                let weights = grid
                    .points
                    .iter()
                    .map(|p| match p {
                        Point::Stack { ring, .. } => {
                            let total = match ring {
                                Ring::Level(n) => 0.5f64.powi(*n as i32),
                                Ring::Outer => 1.0,
                            };
                            total / counts[&ring.describe()] as f64
                        }
                        _ => 0.0,
                    })
                    .collect();
                FunctionMetric { grid, weights }
            }
            _ => FunctionMetric::uniform(grid),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn check_len(&self, a: &[Point], b: &[Point]) -> Result<()> {
        if a.len() != self.grid.len() || b.len() != self.grid.len() {
            return Err(Error::GridMismatch {
                left: a.len(),
                right: b.len(),
            });
        }
        Ok(())
    }

    /// Weighted distance between two image arrays over this grid.
    pub fn distance(&self, a: &[Point], b: &[Point]) -> f64 {
        debug_assert_eq!(a.len(), self.grid.len());
        debug_assert_eq!(b.len(), self.grid.len());
        let space = &self.grid.space;
        let mut sum = 0.0;
        for i in 0..a.len() {
            sum += self.weights[i] * space.distance(&a[i], &b[i]);
        }
        sum
    }

    pub fn try_distance(&self, a: &[Point], b: &[Point]) -> Result<f64> {
        self.check_len(a, b)?;
        Ok(self.distance(a, b))
    }

    /// Distance with early exit: None as soon as the partial sum proves the
    /// full distance is >= bound. Weights are nonnegative so partial sums
    /// only grow.
    pub fn distance_within(&self, a: &[Point], b: &[Point], bound: f64) -> Option<f64> {
        debug_assert_eq!(a.len(), self.grid.len());
        let space = &self.grid.space;
        let mut sum = 0.0;
        for i in 0..a.len() {
            sum += self.weights[i] * space.distance(&a[i], &b[i]);
            if sum >= bound {
                return None;
            }
        }
        Some(sum)
    }
}

/// Closeness of two maps observed at a single base point of the grid:
/// (p, q) are within the entourage when d(p(base), q(base)) < epsilon.
#[derive(Debug, Clone)]
pub struct FunctionEntourage {
    pub base_index: usize,
    pub epsilon: f64,
}

impl FunctionEntourage {
    pub fn new(base_index: usize, epsilon: f64) -> FunctionEntourage {
        FunctionEntourage {
            base_index,
            epsilon,
        }
    }

    pub fn separation(&self, space: &MetricSpace, a: &[Point], b: &[Point]) -> f64 {
        space.distance(&a[self.base_index], &b[self.base_index])
    }

    pub fn contains(&self, space: &MetricSpace, a: &[Point], b: &[Point]) -> bool {
        self.separation(space, a, b) < self.epsilon
    }
}
