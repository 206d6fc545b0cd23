//! Curve data: per-sigma mutual information samples with the optimizer
//! parameters and distribution that produced them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One sample of an MI-versus-noise curve.
///
/// `lambda` is the shaping parameter for Maxwell–Boltzmann rows and the
/// Lagrange multiplier for constrained-solver rows; `alpha` is the input gain
/// where one applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiPoint {
    pub sigma: f64,
    pub snr_db: f64,
    pub mi_bits: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<f64>>,
}

/// A sequence of [`MiPoint`]s over a sigma grid, sorted by sigma.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiCurve {
    /// Dimension of the underlying constellation (1 or 2).
    pub dimension: usize,
    pub points: Vec<MiPoint>,
}

impl MiCurve {
    pub fn new(dimension: usize, mut points: Vec<MiPoint>) -> Self {
        points.sort_by(|a, b| a.sigma.total_cmp(&b.sigma));
        Self { dimension, points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn sigmas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.sigma).collect()
    }

    pub fn mi_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.mi_bits).collect()
    }

    /// Errors unless `other` is defined on exactly the same sigma grid.
    pub fn check_same_grid(&self, other: &MiCurve) -> Result<()> {
        if self.len() != other.len()
            || self
                .points
                .iter()
                .zip(&other.points)
                .any(|(a, b)| a.sigma != b.sigma)
        {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}
