use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest grid accepted anywhere in the crate.
pub const MIN_POINTS: usize = 64;

/// Uniform one-dimensional sampling grid `center ± half_width` with
/// `points` nodes including both end points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub center: f64,
    pub half_width: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(center: f64, half_width: f64, points: usize) -> Result<Self> {
        let g = Self {
            center,
            half_width,
            points,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.center.is_finite() {
            return Err(Error::DegenerateGrid(format!("center {} is not finite", self.center)));
        }
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(Error::DegenerateGrid(format!(
                "half_width must be finite and > 0, got {}",
                self.half_width
            )));
        }
        if self.points < MIN_POINTS {
            return Err(Error::DegenerateGrid(format!(
                "need at least {MIN_POINTS} points, got {}",
                self.points
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.center - self.half_width + i as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.node(i)).collect()
    }

    /// Trapezoid weights.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.spacing();
        let mut w = vec![h; self.points];
        w[0] = 0.5 * h;
        w[self.points - 1] = 0.5 * h;
        w
    }

    pub fn lo(&self) -> f64 {
        self.center - self.half_width
    }

    pub fn hi(&self) -> f64 {
        self.center + self.half_width
    }
}
