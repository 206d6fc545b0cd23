//! Blahut–Arimoto capacity iteration for an arbitrary discrete channel,
//! plus an independent numerical maximizer used to cross-check it.
//!
//! The iteration is expressed in base 2 throughout, so the convergence
//! threshold and `I*` are both in bits.

use rayon::prelude::*;

use crate::channel::snr_from_sigma;
use crate::constellation::{Constellation, InputDistribution};
use crate::curve::{MiCurve, MiPoint};
use crate::error::{Error, Result};
use crate::mi_exact::output_marginal;
use crate::quantizer::{build_grid, transition_matrix, QuantSettings, TransitionMatrix};

/// Default convergence threshold on the per-iteration change of `I*`, bits.
pub const DEFAULT_BA_EPSILON: f64 = 1e-7;
/// Default iteration cap.
pub const DEFAULT_BA_MAX_ITERS: usize = 100_000;

/// Probability floor keeping `log Q` finite while an iterate collapses.
const Q_FLOOR: f64 = 1e-300;

/// Outcome of a capacity optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct BaResult {
    pub distribution: InputDistribution,
    pub capacity_bits: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// The alternating-maximization state: the current input iterate `Q`, the
/// bound value `I*`, and the pieces needed to continue.
///
/// Stepping is exposed so callers can watch `I*` grow; the conditional
/// distribution of the input given each output and the per-symbol update
/// weights are recomputed on demand.
pub struct BaSolver<'a> {
    matrix: &'a TransitionMatrix,
    q: Vec<f64>,
    /// `sum_y p(y|x) log2 p(y|x)` per row; constant across iterations.
    row_self_info: Vec<f64>,
    log2_r: Vec<f64>,
    i_star: f64,
    iteration: usize,
}

impl<'a> BaSolver<'a> {
    pub fn new(matrix: &'a TransitionMatrix) -> Result<Self> {
        for i in 0..matrix.rows() {
            let sum: f64 = matrix.row(i).iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidMatrix(format!("row {i} sums to {sum}")));
            }
        }
        let row_self_info = (0..matrix.rows())
            .map(|i| {
                matrix
                    .row(i)
                    .iter()
                    .filter(|&&w| w > 0.0)
                    .map(|w| w * w.log2())
                    .sum()
            })
            .collect();
        let n = matrix.rows();
        Ok(Self {
            matrix,
            q: vec![1.0 / n as f64; n],
            row_self_info,
            log2_r: vec![0.0; n],
            i_star: f64::NEG_INFINITY,
            iteration: 0,
        })
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn i_star_bits(&self) -> f64 {
        self.i_star
    }

    pub fn input_distribution(&self) -> InputDistribution {
        InputDistribution::from_weights(self.q.clone()).expect("iterate stays normalized")
    }

    /// `D( p(.|x) || q )` in bits for every symbol under the current iterate;
    /// equal across the support at the optimum.
    pub fn divergences(&self) -> Vec<f64> {
        divergences(self.matrix, &self.row_self_info, &self.q)
    }

    /// The multiplicative update weights `r_x` of the last step; `I*` equals
    /// `log2` of their sum.
    pub fn update_weights(&self) -> Vec<f64> {
        self.log2_r.iter().map(|lr| lr.exp2()).collect()
    }

    /// The conditional distribution of the input given each output, column
    /// by column (row-major, same shape as the transition matrix). Columns
    /// with zero output probability are left at zero.
    pub fn conditional_matrix(&self) -> Vec<f64> {
        let w = self.matrix;
        let marginal = output_marginal(w, &self.q);
        let mut g = vec![0.0; w.rows() * w.cols()];
        for i in 0..w.rows() {
            for (j, (&wy, &qy)) in w.row(i).iter().zip(&marginal).enumerate() {
                if qy > 0.0 {
                    g[i * w.cols() + j] = self.q[i] * wy / qy;
                }
            }
        }
        g
    }

    /// One update of the iterate. Returns the new `I*`, which never decreases.
    pub fn step(&mut self) -> f64 {
        let divs = self.divergences();
        for (i, d) in divs.iter().enumerate() {
            self.log2_r[i] = self.q[i].log2() + d;
        }
        let max = self.log2_r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for (qi, lr) in self.q.iter_mut().zip(&self.log2_r) {
            let v = (lr - max).exp2();
            *qi = v;
            sum += v;
        }
        for qi in self.q.iter_mut() {
            *qi = (*qi / sum).max(Q_FLOOR);
        }
        let i_star = max + sum.log2();
        debug_assert!(
            self.iteration == 0 || i_star >= self.i_star - 1e-12,
            "I* decreased: {} -> {}",
            self.i_star,
            i_star
        );
        self.i_star = i_star;
        self.iteration += 1;
        i_star
    }
}

fn divergences(w: &TransitionMatrix, row_self_info: &[f64], q: &[f64]) -> Vec<f64> {
    let marginal = output_marginal(w, q);
    let log_marginal: Vec<f64> = marginal
        .iter()
        .map(|&m| if m > 0.0 { m.log2() } else { 0.0 })
        .collect();
    (0..w.rows())
        .map(|i| {
            let cross: f64 = w
                .row(i)
                .iter()
                .zip(&log_marginal)
                .filter(|(&wy, _)| wy > 0.0)
                .map(|(&wy, &lm)| wy * lm)
                .sum();
            row_self_info[i] - cross
        })
        .collect()
}

/// Capacity of the channel `w` by Blahut–Arimoto iteration from the uniform
/// distribution, stopping when `I*` changes by at most `epsilon` bits.
pub fn ba_capacity(w: &TransitionMatrix, epsilon: f64, max_iters: usize) -> Result<BaResult> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let mut solver = BaSolver::new(w)?;
    let mut last = f64::NEG_INFINITY;
    let mut converged = false;
    while solver.iteration() < max_iters {
        let i_star = solver.step();
        if (i_star - last).abs() <= epsilon {
            converged = true;
            break;
        }
        last = i_star;
    }
    Ok(BaResult {
        distribution: solver.input_distribution(),
        capacity_bits: solver.i_star_bits().max(0.0),
        iterations: solver.iteration(),
        converged,
    })
}

/// Independent capacity maximizer: projected gradient ascent over the
/// probability simplex with a backtracking step, terminated by the
/// first-order optimality certificate `max_x D(p(.|x) || q) - I(p) <= tol`
/// (which brackets the capacity on both sides).
pub fn numerical_capacity_oracle(w: &TransitionMatrix, tolerance: f64) -> Result<BaResult> {
    if !tolerance.is_finite() || tolerance <= 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tolerance}")));
    }
    let solver = BaSolver::new(w)?; // reuse the row validation + self-info
    let row_self_info = solver.row_self_info.clone();
    drop(solver);

    let n = w.rows();
    let mut p = vec![1.0 / n as f64; n];
    let eval = |p: &[f64]| -> (f64, Vec<f64>) {
        let divs = divergences(w, &row_self_info, p);
        let f = p.iter().zip(&divs).map(|(pi, di)| pi * di).sum();
        (f, divs)
    };
    let (mut f, mut divs) = eval(&p);
    let mut step = 1.0;
    const MAX_ITERS: usize = 500_000;
    for iteration in 0..MAX_ITERS {
        let gap = divs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - f;
        if gap <= tolerance {
            return Ok(BaResult {
                distribution: InputDistribution::new(p)
                    .map_err(|e| Error::ConvergenceFailure(e.to_string()))?,
                capacity_bits: f.max(0.0),
                iterations: iteration,
                converged: true,
            });
        }
        let mut improved = false;
        while step >= 1e-14 {
            let candidate: Vec<f64> = project_to_simplex(
                &p.iter().zip(&divs).map(|(pi, di)| pi + step * di).collect::<Vec<_>>(),
            );
            let (fc, dc) = eval(&candidate);
            if fc >= f {
                p = candidate;
                f = fc;
                divs = dc;
                improved = true;
                step *= 1.3;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            step = 1.0; // restart the line search rather than stall
        }
    }
    Err(Error::ConvergenceFailure(format!(
        "optimality gap still above {tolerance} after {MAX_ITERS} iterations"
    )))
}

/// Euclidean projection onto the probability simplex.
fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Capacity curve of a fixed constellation over a sigma grid.
///
/// The constellation is not rescaled between points; the optimized
/// distribution is free to raise the average power above 1, and the recorded
/// SNR reflects the power that the optimizer actually used.
pub fn ba_sweep(
    c: &Constellation,
    sigmas: &[f64],
    quant: &QuantSettings,
    epsilon: f64,
) -> Result<MiCurve> {
    if sigmas.is_empty() {
        return Err(Error::InvalidParameter("sigma grid is empty".into()));
    }
    let points: Vec<MiPoint> = sigmas
        .par_iter()
        .map(|&sigma| -> Result<MiPoint> {
            let grid = build_grid(c, sigma, quant.shift_multiplier, quant.bits_per_dim)?;
            let w = transition_matrix(c, &grid, sigma)?;
            let result = ba_capacity(&w, epsilon, DEFAULT_BA_MAX_ITERS)?;
            let power = c.average_power(&result.distribution)?;
            let snr = snr_from_sigma(power, sigma, c.dimension())?;
            Ok(MiPoint {
                sigma,
                snr_db: snr.snr_db,
                mi_bits: result.capacity_bits,
                lambda: None,
                alpha: None,
                power: Some(power),
                probabilities: Some(result.distribution.probabilities().to_vec()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MiCurve::new(c.dimension(), points))
}
