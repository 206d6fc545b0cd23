//! Maxwell–Boltzmann input distributions and per-sigma envelope curves.
//!
//! `p(x) ∝ exp(-lambda ||x||^2)` concentrates on low-energy symbols for
//! lambda > 0, is uniform at lambda = 0, and concentrates on high-energy
//! symbols for lambda < 0. The lambda recorded in results always refers to
//! the constellation handed in, not to any rescaled copy of it.

use rayon::prelude::*;

use crate::channel::snr_from_sigma;
use crate::constellation::{Constellation, InputDistribution};
use crate::curve::{MiCurve, MiPoint};
use crate::error::{Error, Result};
use crate::mi_exact::mi_discrete;
use crate::quantizer::{build_grid, transition_matrix, QuantSettings};

/// Maxwell–Boltzmann distribution with parameter `lambda` (either sign).
///
/// Computed with max-exponent subtraction; extreme parameters underflow the
/// far symbols to exactly zero rather than overflowing.
pub fn mb_distribution(c: &Constellation, lambda: f64) -> InputDistribution {
    let exponents: Vec<f64> = c.norms_squared().iter().map(|n2| -lambda * n2).collect();
    let max = exponents.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = exponents.iter().map(|e| (e - max).exp()).collect();
    InputDistribution::from_weights(weights).expect("weights contain a 1 at the max exponent")
}

/// The Maxwell–Boltzmann pair (scaled constellation, distribution) with unit
/// average power.
///
/// The pmf is computed on the unscaled points and kept; only the points are
/// rescaled. On the scaled points the same pmf is again Maxwell–Boltzmann,
/// with parameter `lambda * power`.
pub fn mb_unit_energy_system(
    c: &Constellation,
    lambda: f64,
) -> Result<(Constellation, InputDistribution)> {
    if !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite lambda {lambda}")));
    }
    let d = mb_distribution(c, lambda);
    let scaled = c.normalize_unit_energy(&d)?;
    Ok((scaled, d))
}

/// The lambda grid `1 - exp(v)` for `count` values of `v` uniform on
/// `[0, v_max]`: a dense sweep of nonpositive parameters reaching large
/// negative values.
pub fn negative_lambda_grid(count: usize, v_max: f64) -> Vec<f64> {
    if count == 1 {
        return vec![0.0];
    }
    (0..count)
        .map(|i| {
            let v = v_max * i as f64 / (count - 1) as f64;
            1.0 - v.exp()
        })
        .collect()
}

/// Per-sigma maximum of the discrete MI over a lambda grid.
///
/// With `unit_energy` set, each lambda's system is rescaled to unit power
/// (with its own quantizer grid); otherwise the constellation and transition
/// matrix stay fixed and only the pmf varies. Ties in the maximum break
/// toward the lambda closer to zero.
pub fn mb_envelope(
    c: &Constellation,
    lambdas: &[f64],
    sigmas: &[f64],
    quant: &QuantSettings,
    unit_energy: bool,
) -> Result<MiCurve> {
    if lambdas.is_empty() || sigmas.is_empty() {
        return Err(Error::InvalidParameter("lambda and sigma grids must be nonempty".into()));
    }
    let points: Vec<MiPoint> = sigmas
        .par_iter()
        .map(|&sigma| -> Result<MiPoint> {
            let mut best: Option<(f64, f64, InputDistribution, f64)> = None;
            let fixed = if unit_energy {
                None
            } else {
                let grid = build_grid(c, sigma, quant.shift_multiplier, quant.bits_per_dim)?;
                Some(transition_matrix(c, &grid, sigma)?)
            };
            for &lambda in lambdas {
                let (mi, d, power) = if unit_energy {
                    let (scaled, d) = mb_unit_energy_system(c, lambda)?;
                    let grid = build_grid(&scaled, sigma, quant.shift_multiplier, quant.bits_per_dim)?;
                    let w = transition_matrix(&scaled, &grid, sigma)?;
                    let power = scaled.average_power(&d)?;
                    (mi_discrete(&w, &d)?, d, power)
                } else {
                    let d = mb_distribution(c, lambda);
                    let power = c.average_power(&d)?;
                    (mi_discrete(fixed.as_ref().unwrap(), &d)?, d, power)
                };
                let replace = match &best {
                    None => true,
                    Some((best_mi, best_lambda, _, _)) => {
                        mi > *best_mi || (mi == *best_mi && lambda.abs() < best_lambda.abs())
                    }
                };
                if replace {
                    best = Some((mi, lambda, d, power));
                }
            }
            let (mi_bits, lambda, d, power) = best.expect("nonempty lambda grid");
            let snr = snr_from_sigma(power, sigma, c.dimension())?;
            Ok(MiPoint {
                sigma,
                snr_db: snr.snr_db,
                mi_bits,
                lambda: Some(lambda),
                alpha: None,
                power: Some(power),
                probabilities: Some(d.probabilities().to_vec()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MiCurve::new(c.dimension(), points))
}
