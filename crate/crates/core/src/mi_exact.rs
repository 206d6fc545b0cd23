//! Exact mutual information of the quantized-output channel.
//!
//! All logarithms are base 2; every result is in bits. Terms with zero
//! probability follow the convention 0 log 0 = 0.

use rayon::prelude::*;

use crate::constellation::{Constellation, InputDistribution};
use crate::error::{Error, Result};
use crate::quantizer::{build_grid, transition_matrix, TransitionMatrix};

fn check_aligned(w: &TransitionMatrix, d: &InputDistribution) -> Result<()> {
    if w.rows() != d.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} rows but distribution has {} entries",
            w.rows(),
            d.len()
        )));
    }
    Ok(())
}

/// Output marginal `q_y = sum_x p(x) p(y|x)`.
pub(crate) fn output_marginal(w: &TransitionMatrix, p: &[f64]) -> Vec<f64> {
    let mut q = vec![0.0; w.cols()];
    for (i, &pi) in p.iter().enumerate() {
        if pi <= 0.0 {
            continue;
        }
        for (qy, wy) in q.iter_mut().zip(w.row(i)) {
            *qy += pi * wy;
        }
    }
    q
}

/// `I(X;Y) = sum_x p(x) sum_y p(y|x) log2( p(y|x) / q_y )` in bits.
pub fn mi_discrete(w: &TransitionMatrix, d: &InputDistribution) -> Result<f64> {
    check_aligned(w, d)?;
    let p = d.probabilities();
    let q = output_marginal(w, p);
    let mut total = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        if pi <= 0.0 {
            continue;
        }
        let mut row_sum = 0.0;
        for (&wy, &qy) in w.row(i).iter().zip(&q) {
            if wy > 0.0 {
                row_sum += wy * (wy / qy).log2();
            }
        }
        total += pi * row_sum;
    }
    Ok(total)
}

/// Cross-check path computing the same quantity as `H(Y) - H(Y|X)`.
pub fn mi_entropy_decomposition(w: &TransitionMatrix, d: &InputDistribution) -> Result<f64> {
    check_aligned(w, d)?;
    let p = d.probabilities();
    let q = output_marginal(w, p);
    let h_y: f64 = -q.iter().filter(|&&qy| qy > 0.0).map(|qy| qy * qy.log2()).sum::<f64>();
    let mut h_y_given_x = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        if pi <= 0.0 {
            continue;
        }
        let row: f64 = w
            .row(i)
            .iter()
            .filter(|&&wy| wy > 0.0)
            .map(|wy| wy * wy.log2())
            .sum();
        h_y_given_x -= pi * row;
    }
    Ok(h_y - h_y_given_x)
}

/// One point of a quantizer shift study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftSweepPoint {
    pub multiplier: f64,
    pub mi_bits: f64,
    /// `mi_bits` minus the minimum over the sweep, for plotting curves with a
    /// common zero.
    pub mi_minus_min: f64,
}

/// Evaluates the discrete MI for a sequence of shift multipliers, rebuilding
/// the grid each time.
pub fn quantizer_shift_sweep(
    c: &Constellation,
    d: &InputDistribution,
    sigma: f64,
    multipliers: &[f64],
    bits_per_dim: u32,
) -> Result<Vec<ShiftSweepPoint>> {
    if multipliers.is_empty() {
        return Err(Error::InvalidParameter("multiplier sweep is empty".into()));
    }
    if multipliers.iter().any(|m| !m.is_finite() || *m < 0.0) {
        return Err(Error::InvalidParameter("shift multipliers must be nonnegative".into()));
    }
    let mis: Vec<f64> = multipliers
        .par_iter()
        .map(|&m| -> Result<f64> {
            let grid = build_grid(c, sigma, m, bits_per_dim)?;
            let w = transition_matrix(c, &grid, sigma)?;
            mi_discrete(&w, d)
        })
        .collect::<Result<Vec<_>>>()?;
    let min = mis.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(multipliers
        .iter()
        .zip(mis)
        .map(|(&multiplier, mi_bits)| ShiftSweepPoint {
            multiplier,
            mi_bits,
            mi_minus_min: mi_bits - min,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::Family;

    #[test]
    fn noiseless_channel_mi_is_log_n() {
        let rows = (0..4)
            .map(|i| {
                let mut r = vec![0.0; 4];
                r[i] = 1.0;
                r
            })
            .collect();
        let w = TransitionMatrix::from_rows(rows).unwrap();
        let d = InputDistribution::uniform(4);
        assert_eq!(mi_discrete(&w, &d).unwrap(), 2.0);
        assert_eq!(mi_entropy_decomposition(&w, &d).unwrap(), 2.0);
    }

    #[test]
    fn useless_channel_mi_is_zero() {
        let w = TransitionMatrix::from_rows(vec![vec![0.3, 0.7]; 5]).unwrap();
        let d = InputDistribution::uniform(5);
        assert_eq!(mi_discrete(&w, &d).unwrap(), 0.0);
    }

    #[test]
    fn decomposition_matches_direct_sum() {
        let c = Constellation::from_family(Family::Pam, 2).unwrap();
        let g = build_grid(&c, 1.0, 2.0, 8).unwrap();
        let w = transition_matrix(&c, &g, 1.0).unwrap();
        for d in [
            InputDistribution::uniform(2),
            InputDistribution::new(vec![0.9, 0.1]).unwrap(),
            InputDistribution::point_mass(2, 0),
        ] {
            let a = mi_discrete(&w, &d).unwrap();
            let b = mi_entropy_decomposition(&w, &d).unwrap();
            assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn mi_bounded_by_entropy_and_output_size() {
        let c = Constellation::from_family(Family::Qam, 16).unwrap();
        let u = InputDistribution::uniform(16);
        let c = c.normalize_unit_energy(&u).unwrap();
        let g = build_grid(&c, 0.5, 2.0, 3).unwrap();
        let w = transition_matrix(&c, &g, 0.5).unwrap();
        for d in [
            InputDistribution::uniform(16),
            InputDistribution::new({
                let mut p = [1.0 / 30.0; 16];
                p[0] = 0.5;
                let s: f64 = p.iter().sum();
                p.iter().map(|x| x / s).collect()
            })
            .unwrap(),
        ] {
            let mi = mi_discrete(&w, &d).unwrap();
            assert!(mi >= 0.0);
            assert!(mi <= d.entropy_bits() + 1e-12);
            assert!(mi <= (w.cols() as f64).log2() + 1e-12);
        }
    }

    #[test]
    fn mi_is_concave_in_the_input() {
        let c = Constellation::from_family(Family::Pam, 4).unwrap();
        let g = build_grid(&c, 0.7, 2.0, 5).unwrap();
        let w = transition_matrix(&c, &g, 0.7).unwrap();
        let d1 = InputDistribution::new(vec![0.4, 0.1, 0.2, 0.3]).unwrap();
        let d2 = InputDistribution::new(vec![0.1, 0.6, 0.1, 0.2]).unwrap();
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let mix = InputDistribution::new(
                d1.probabilities()
                    .iter()
                    .zip(d2.probabilities())
                    .map(|(a, b)| t * a + (1.0 - t) * b)
                    .collect(),
            )
            .unwrap();
            let lhs = mi_discrete(&w, &mix).unwrap();
            let rhs = t * mi_discrete(&w, &d1).unwrap() + (1.0 - t) * mi_discrete(&w, &d2).unwrap();
            assert!(lhs >= rhs - 1e-10);
        }
    }

    #[test]
    fn shift_sweep_single_point() {
        let c = Constellation::from_family(Family::Pam, 2).unwrap();
        let d = InputDistribution::uniform(2);
        let sweep = quantizer_shift_sweep(&c, &d, 0.5, &[2.0], 6).unwrap();
        assert_eq!(sweep.len(), 1);
        assert_eq!(sweep[0].mi_minus_min, 0.0);
    }

    #[test]
    fn shift_sweep_interior_argmax() {
        // rises quickly then falls off slowly, so the best multiplier is
        // interior rather than at zero
        let c = Constellation::from_family(Family::Qam, 16).unwrap();
        let u = InputDistribution::uniform(16);
        let c = c.normalize_unit_energy(&u).unwrap();
        let multipliers: Vec<f64> = (0..=12).map(|k| 0.5 * k as f64).collect();
        let sweep = quantizer_shift_sweep(&c, &u, 0.5, &multipliers, 4).unwrap();
        let argmax = sweep
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.mi_bits.total_cmp(&b.1.mi_bits))
            .unwrap()
            .0;
        assert!(argmax > 0 && argmax < sweep.len() - 1, "argmax at {argmax}");
    }

    #[test]
    fn finer_quantizer_never_loses_information() {
        let c = Constellation::from_family(Family::Qam, 16).unwrap();
        let u = InputDistribution::uniform(16);
        let c = c.normalize_unit_energy(&u).unwrap();
        let multipliers = [0.5, 1.0, 2.0, 3.0];
        let coarse = quantizer_shift_sweep(&c, &u, 1.0, &multipliers, 2).unwrap();
        let fine = quantizer_shift_sweep(&c, &u, 1.0, &multipliers, 6).unwrap();
        for (a, b) in coarse.iter().zip(&fine) {
            assert!(b.mi_bits >= a.mi_bits - 1e-9, "bits 6 lost MI at multiplier {}", a.multiplier);
        }
    }

    #[test]
    fn misaligned_distribution_rejected() {
        let w = TransitionMatrix::from_rows(vec![vec![0.5, 0.5]; 2]).unwrap();
        let d = InputDistribution::uniform(3);
        assert!(matches!(mi_discrete(&w, &d), Err(Error::DimensionMismatch(_))));
    }
}
