//! Distribution and curve comparison: KL divergence, its symmetrized form,
//! squared curve differences, and gaps to the AWGN capacity.

use crate::channel::{awgn_capacity, snr_from_sigma};
use crate::constellation::InputDistribution;
use crate::curve::MiCurve;
use crate::error::{Error, Result};

/// `D(P || Q) = sum_x P(x) log2( P(x) / Q(x) )` in bits, with 0 log 0 = 0.
pub fn kl_divergence(p: &InputDistribution, q: &InputDistribution) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "distributions over {} and {} symbols",
            p.len(),
            q.len()
        )));
    }
    let mut total = 0.0;
    for (&pi, &qi) in p.probabilities().iter().zip(q.probabilities()) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Err(Error::SupportMismatch);
            }
            total += pi * (pi / qi).log2();
        }
    }
    Ok(total)
}

/// Symmetrized divergence `(D(P||Q) + D(Q||P)) / 2`.
pub fn kl_commutative(p: &InputDistribution, q: &InputDistribution) -> Result<f64> {
    Ok(0.5 * (kl_divergence(p, q)? + kl_divergence(q, p)?))
}

/// Sum of squared per-point MI differences of two curves on the same grid.
pub fn curve_difference_energy(a: &MiCurve, b: &MiCurve) -> Result<f64> {
    a.check_same_grid(b)?;
    Ok(a.points
        .iter()
        .zip(&b.points)
        .map(|(x, y)| (x.mi_bits - y.mi_bits) * (x.mi_bits - y.mi_bits))
        .sum())
}

/// Per-point distance from a curve to the AWGN capacity at the stated
/// average power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapPoint {
    pub sigma: f64,
    pub gap_bits: f64,
}

/// AWGN capacity (at `power` and each point's sigma) minus the curve's MI.
///
/// Capacity is counted per channel use: the full Shannon–Hartley value for
/// two-dimensional constellations, half of it for one-dimensional ones.
pub fn capacity_gap_report(curve: &MiCurve, power: f64) -> Result<Vec<GapPoint>> {
    let factor = match curve.dimension {
        1 => 0.5,
        2 => 1.0,
        d => return Err(Error::InvalidDimension(d)),
    };
    curve
        .points
        .iter()
        .map(|p| {
            let snr = snr_from_sigma(power, p.sigma, curve.dimension)?;
            Ok(GapPoint {
                sigma: p.sigma,
                gap_bits: factor * awgn_capacity(snr) - p.mi_bits,
            })
        })
        .collect()
}
