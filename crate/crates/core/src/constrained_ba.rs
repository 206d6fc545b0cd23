//! Power-constrained Blahut–Arimoto: an input gain plus a Lagrange
//! multiplier pin the average power of the optimized distribution to a
//! target, and an outer logarithmic search picks the best gain.
//!
//! The inner loop alternates three exact steps: the posterior statistic
//! `T_x`, the multiplier root of `g(lambda)`, and the closed-form
//! distribution update. `g` keeps one sign when the gain puts every symbol
//! on the same side of the power target; such gains have no feasible
//! solution and are skipped by the gain search.

use rayon::prelude::*;

use crate::channel::snr_from_sigma;
use crate::constellation::{Constellation, InputDistribution};
use crate::curve::{MiCurve, MiPoint};
use crate::error::{Error, Result};
use crate::mi_exact::{mi_discrete, output_marginal};
use crate::quantizer::{build_grid, transition_matrix, QuantSettings, TransitionMatrix};

/// Probability floor keeping the posterior logs finite between iterations.
const P_FLOOR: f64 = 1e-300;

/// What to do when a gain admits no Lagrange root.
///
/// `Skip` is the shipped behavior. `IgnoreConstraint` continues with the
/// unconstrained update (lambda = 0) and exists so tests can demonstrate the
/// boundary-gain artifact that skipping prevents; the power constraint is
/// silently violated in that mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoRootPolicy {
    #[default]
    Skip,
    IgnoreConstraint,
}

/// Configuration of the outer gain search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainSearchConfig {
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Gains evaluated per depth (n >= 3).
    pub points_per_depth: usize,
    /// Number of interval refinements.
    pub depth: usize,
    /// Convergence threshold of the inner loop, bits.
    pub inner_epsilon: f64,
    /// Iteration cap of the inner loop.
    pub inner_max_iters: usize,
    /// Average-power target.
    pub power_target: f64,
    pub no_root_policy: NoRootPolicy,
}

impl Default for GainSearchConfig {
    fn default() -> Self {
        Self {
            alpha_min: 0.5,
            alpha_max: 4.0,
            points_per_depth: 50,
            depth: 20,
            inner_epsilon: 1e-7,
            inner_max_iters: 100_000,
            power_target: 1.0,
            no_root_policy: NoRootPolicy::Skip,
        }
    }
}

impl GainSearchConfig {
    fn validate(&self) -> Result<()> {
        let range_ok = self.alpha_min.is_finite()
            && self.alpha_max.is_finite()
            && self.alpha_min > 0.0
            && self.alpha_max > self.alpha_min;
        if !range_ok {
            return Err(Error::InvalidParameter(format!(
                "need 0 < alpha_min < alpha_max, got [{}, {}]",
                self.alpha_min, self.alpha_max
            )));
        }
        if self.points_per_depth < 3 {
            return Err(Error::InvalidParameter("points_per_depth must be at least 3".into()));
        }
        if self.depth < 1 {
            return Err(Error::InvalidParameter("depth must be at least 1".into()));
        }
        if !self.inner_epsilon.is_finite() || self.inner_epsilon <= 0.0 {
            return Err(Error::InvalidParameter("inner_epsilon must be positive".into()));
        }
        if !self.power_target.is_finite() || self.power_target <= 0.0 {
            return Err(Error::InvalidParameter("power_target must be positive".into()));
        }
        Ok(())
    }
}

/// Result of a constrained optimization at one (sigma, gain) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedBaResult {
    pub distribution: InputDistribution,
    /// Input gain the result was computed at.
    pub alpha: f64,
    /// Lagrange multiplier of the final update.
    pub lambda: f64,
    pub mi_bits: f64,
    /// `sum_x p(x) ||alpha x||^2`; equals the target within 1e-6 whenever the
    /// run converged under the `Skip` policy.
    pub achieved_power: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Set by the gain search when the winning gain sits on the configured
    /// interval boundary, which usually signals a too-wide gain range.
    pub boundary_gain: bool,
}

/// Posterior statistic `T_x = sum_y p(y|x) log2 p(x|y)`.
///
/// Algebraically identical to averaging `p(x|y) log2 p(x|y) / p(x)` over the
/// output marginal, but stays stable when some `p(x)` is small; the
/// equivalence of the two forms is pinned by a test. Requires a strictly
/// positive distribution.
pub fn compute_t(w: &TransitionMatrix, d: &InputDistribution) -> Result<Vec<f64>> {
    if w.rows() != d.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} rows but distribution has {} entries",
            w.rows(),
            d.len()
        )));
    }
    let p = d.probabilities();
    if p.iter().any(|&pi| pi <= 0.0) {
        return Err(Error::DegenerateDistribution);
    }
    let marginal = output_marginal(w, p);
    let mut t = vec![0.0; w.rows()];
    for (i, &pi) in p.iter().enumerate() {
        let mut acc = 0.0;
        for (&wy, &qy) in w.row(i).iter().zip(&marginal) {
            if wy > 0.0 {
                acc += wy * (pi * wy / qy).log2();
            }
        }
        t[i] = acc;
    }
    Ok(t)
}

/// `g(lambda) / Z`: the power-constraint residual of the distribution
/// `p(x) ∝ 2^(T_x + lambda cost_x)`.
fn constraint_residual(lambda: f64, t: &[f64], costs: &[f64], target: f64) -> f64 {
    let max = t
        .iter()
        .zip(costs)
        .map(|(ti, ci)| ti + lambda * ci)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    let mut moment = 0.0;
    for (ti, ci) in t.iter().zip(costs) {
        let u = (ti + lambda * ci - max).exp2();
        z += u;
        moment += (target - ci) * u;
    }
    moment / z
}

/// Root of `g(lambda) = sum_x (P - cost_x) 2^(T_x + lambda cost_x)` for the
/// costs `alpha^2 ||x||^2`, found by doubling-bracket plus bisection.
///
/// Returns zero when every cost equals the target exactly (any lambda is a
/// root then), and `NoRoot` when the costs sit entirely on one side of the
/// target, which is the signal that the gain is out of range.
pub fn solve_lagrange_lambda(
    t: &[f64],
    c: &Constellation,
    alpha: f64,
    power_target: f64,
) -> Result<f64> {
    if t.len() != c.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} statistics for {} symbols",
            t.len(),
            c.len()
        )));
    }
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::NonPositiveGain(alpha));
    }
    let costs: Vec<f64> = c.norms_squared().iter().map(|n2| alpha * alpha * n2).collect();
    solve_lambda_for_costs(t, &costs, power_target)
}

fn solve_lambda_for_costs(t: &[f64], costs: &[f64], target: f64) -> Result<f64> {
    if costs.iter().all(|&ci| ci == target) {
        return Ok(0.0);
    }
    let min = costs.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = costs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if min >= target || max <= target {
        return Err(Error::NoRoot);
    }
    // residual is positive for lambda -> -inf and negative for +inf; expand a
    // bracket from zero by doubling until the sign flips
    let g0 = constraint_residual(0.0, t, costs, target);
    if g0 == 0.0 {
        return Ok(0.0);
    }
    let mut lo;
    let mut hi;
    if g0 > 0.0 {
        lo = 0.0;
        hi = 1.0;
        let mut found = false;
        for _ in 0..=60 {
            if constraint_residual(hi, t, costs, target) < 0.0 {
                found = true;
                break;
            }
            lo = hi;
            hi *= 2.0;
        }
        if !found {
            return Err(Error::NoRoot);
        }
    } else {
        hi = 0.0;
        lo = -1.0;
        let mut found = false;
        for _ in 0..=60 {
            if constraint_residual(lo, t, costs, target) > 0.0 {
                found = true;
                break;
            }
            hi = lo;
            lo *= 2.0;
        }
        if !found {
            return Err(Error::NoRoot);
        }
    }
    // bisect to floating-point resolution
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = constraint_residual(mid, t, costs, target);
        if g > 0.0 {
            lo = mid;
        } else if g < 0.0 {
            hi = mid;
        } else {
            return Ok(mid);
        }
    }
    Ok(0.5 * (lo + hi))
}

fn distribution_from_statistics(t: &[f64], costs: &[f64], lambda: f64) -> InputDistribution {
    let exponents: Vec<f64> = t.iter().zip(costs).map(|(ti, ci)| ti + lambda * ci).collect();
    let max = exponents.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = exponents.iter().map(|e| (e - max).exp2().max(P_FLOOR)).collect();
    InputDistribution::from_weights(weights).expect("max weight is 1")
}

/// Power-constrained capacity iteration at a fixed gain.
///
/// `w_alpha` must be the transition matrix of the gain-scaled constellation
/// `c_alpha`; the cost of each symbol is its squared norm there.
pub fn modified_ba(
    w_alpha: &TransitionMatrix,
    c_alpha: &Constellation,
    alpha: f64,
    power_target: f64,
    epsilon: f64,
    max_iters: usize,
) -> Result<ConstrainedBaResult> {
    modified_ba_with_policy(
        w_alpha,
        c_alpha,
        alpha,
        power_target,
        epsilon,
        max_iters,
        NoRootPolicy::Skip,
    )
}

/// [`modified_ba`] with an explicit no-root policy; see [`NoRootPolicy`].
pub fn modified_ba_with_policy(
    w_alpha: &TransitionMatrix,
    c_alpha: &Constellation,
    alpha: f64,
    power_target: f64,
    epsilon: f64,
    max_iters: usize,
    policy: NoRootPolicy,
) -> Result<ConstrainedBaResult> {
    if w_alpha.rows() != c_alpha.len() {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {} rows but constellation has {} symbols",
            w_alpha.rows(),
            c_alpha.len()
        )));
    }
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    if !power_target.is_finite() || power_target <= 0.0 {
        return Err(Error::InvalidParameter("power target must be positive".into()));
    }
    let costs = c_alpha.norms_squared();
    let mut p = InputDistribution::uniform(c_alpha.len());
    let mut last_mi = f64::INFINITY;
    let mut lambda = 0.0;
    let mut mi = 0.0;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iters {
        let t = compute_t(w_alpha, &p)?;
        lambda = match solve_lambda_for_costs(&t, &costs, power_target) {
            Ok(l) => l,
            Err(Error::NoRoot) if policy == NoRootPolicy::IgnoreConstraint => 0.0,
            Err(e) => return Err(e),
        };
        p = distribution_from_statistics(&t, &costs, lambda);
        mi = mi_discrete(w_alpha, &p)?;
        iterations += 1;
        if (mi - last_mi).abs() <= epsilon {
            converged = true;
            break;
        }
        last_mi = mi;
    }
    let achieved_power: f64 = p
        .probabilities()
        .iter()
        .zip(&costs)
        .map(|(pi, ci)| pi * ci)
        .sum();
    Ok(ConstrainedBaResult {
        distribution: p,
        alpha,
        lambda,
        mi_bits: mi,
        achieved_power,
        iterations,
        converged,
        boundary_gain: false,
    })
}

/// One refinement of the gain interval around the current best gain; the
/// width shrinks by a factor `2 / (n - 1)` and stays inside the previous
/// interval.
pub fn contract_gain_interval(lo: f64, hi: f64, alpha_cap: f64, points_per_depth: usize) -> (f64, f64) {
    let step = (hi - lo) / (points_per_depth - 1) as f64;
    ((alpha_cap - step).max(lo), (alpha_cap + step).min(hi))
}

/// Logarithmic search for the gain maximizing the constrained capacity.
///
/// At every depth the current interval is sampled at `points_per_depth`
/// evenly spaced gains (grid and transition matrix rebuilt per gain, since
/// the bounds follow the scaled constellation), infeasible gains are dropped,
/// and the interval contracts around the best one.
pub fn gain_search(
    c: &Constellation,
    sigma: f64,
    cfg: &GainSearchConfig,
    quant: &QuantSettings,
) -> Result<ConstrainedBaResult> {
    cfg.validate()?;
    let n = cfg.points_per_depth;
    let mut lo = cfg.alpha_min;
    let mut hi = cfg.alpha_max;
    let mut best: Option<ConstrainedBaResult> = None;
    for depth in 0..cfg.depth {
        let gains: Vec<f64> = (0..n)
            .map(|k| lo + k as f64 * (hi - lo) / (n - 1) as f64)
            .collect();
        let evaluated: Vec<Option<ConstrainedBaResult>> = gains
            .par_iter()
            .map(|&alpha| -> Result<Option<ConstrainedBaResult>> {
                let scaled = c.apply_gain(alpha)?;
                let grid = build_grid(&scaled, sigma, quant.shift_multiplier, quant.bits_per_dim)?;
                let w = transition_matrix(&scaled, &grid, sigma)?;
                match modified_ba_with_policy(
                    &w,
                    &scaled,
                    alpha,
                    cfg.power_target,
                    cfg.inner_epsilon,
                    cfg.inner_max_iters,
                    cfg.no_root_policy,
                ) {
                    Ok(r) => Ok(Some(r)),
                    Err(Error::NoRoot) => Ok(None),
                    Err(e) => Err(e),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        // ties prefer the smaller gain
        let depth_best = evaluated.into_iter().flatten().fold(
            None::<ConstrainedBaResult>,
            |best, r| match best {
                Some(b) if r.mi_bits <= b.mi_bits => Some(b),
                _ => Some(r),
            },
        );
        let Some(depth_best) = depth_best else {
            if depth == 0 {
                return Err(Error::AllGainsInfeasible);
            }
            break;
        };
        let alpha_cap = depth_best.alpha;
        if best.as_ref().is_none_or(|b| depth_best.mi_bits > b.mi_bits) {
            best = Some(depth_best);
        }
        (lo, hi) = contract_gain_interval(lo, hi, alpha_cap, n);
    }
    let mut best = best.expect("at least one depth produced a result");
    best.boundary_gain =
        best.alpha <= cfg.alpha_min + 1e-12 || best.alpha >= cfg.alpha_max - 1e-12;
    Ok(best)
}

/// Constrained-capacity curve over a sigma grid.
pub fn cba_sweep(
    c: &Constellation,
    sigmas: &[f64],
    cfg: &GainSearchConfig,
    quant: &QuantSettings,
) -> Result<MiCurve> {
    if sigmas.is_empty() {
        return Err(Error::InvalidParameter("sigma grid is empty".into()));
    }
    let points: Vec<MiPoint> = sigmas
        .par_iter()
        .map(|&sigma| -> Result<MiPoint> {
            let r = gain_search(c, sigma, cfg, quant)?;
            let snr = snr_from_sigma(r.achieved_power, sigma, c.dimension())?;
            Ok(MiPoint {
                sigma,
                snr_db: snr.snr_db,
                mi_bits: r.mi_bits,
                lambda: Some(r.lambda),
                alpha: Some(r.alpha),
                power: Some(r.achieved_power),
                probabilities: Some(r.distribution.probabilities().to_vec()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MiCurve::new(c.dimension(), points))
}
