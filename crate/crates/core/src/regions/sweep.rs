//! Sweep grids shared by the boundary tracers.

use crate::error::{Error, Result};

/// Whether a sweep covers its interval endpoints or only the interior.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CornerHandling {
    IncludeCorners,
    InteriorOnly,
}

/// Number of samples and endpoint policy for one swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepSpec {
    n_points: usize,
    corner_handling: CornerHandling,
}

impl SweepSpec {
    pub fn new(n_points: usize, corner_handling: CornerHandling) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::InvalidParameter(format!(
                "a sweep needs at least 2 points, got {n_points}"
            )));
        }
        Ok(Self {
            n_points,
            corner_handling,
        })
    }

    /// Inclusive-corner sweep with the given resolution.
    pub fn with_corners(n_points: usize) -> Result<Self> {
        Self::new(n_points, CornerHandling::IncludeCorners)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn corner_handling(&self) -> CornerHandling {
        self.corner_handling
    }

    /// The sampled values over `[lo, hi]`. With `IncludeCorners` the grid
    /// contains both endpoints; with `InteriorOnly` all samples are
    /// strictly inside.
    pub fn values(&self, lo: f64, hi: f64) -> Vec<f64> {
        let n = self.n_points;
        match self.corner_handling {
            CornerHandling::IncludeCorners => (0..n)
                .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                .collect(),
            CornerHandling::InteriorOnly => (1..=n)
                .map(|i| lo + (hi - lo) * i as f64 / (n + 1) as f64)
                .collect(),
        }
    }
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            n_points: 101,
            corner_handling: CornerHandling::IncludeCorners,
        }
    }
}
