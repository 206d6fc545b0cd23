//! Monte-Carlo mutual information estimation for the continuous-output
//! AWGN channel.
//!
//! The expectation over the noise uses one shared batch of samples for all
//! symbols (common random numbers), which keeps sweep curves smooth. The
//! inner log-sum-exp subtracts the maximum exponent first; the exponents grow
//! like 1/sigma^2, so the naive form overflows already around sigma = 0.05.

use rayon::prelude::*;

use crate::channel::AwgnChannel;
use crate::constellation::{Constellation, InputDistribution};
use crate::error::{Error, Result};

/// Monte-Carlo sample budget and seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub sample_count: usize,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { sample_count: 100_000, seed: 0 }
    }
}

/// Estimate in bits, clamped to `[0, log2 n]`, with the raw value kept for
/// diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mi_bits: f64,
    pub raw_bits: f64,
}

/// MI estimate under the uniform input distribution.
pub fn mi_mc_uniform(c: &Constellation, sigma: f64, cfg: &McConfig) -> Result<McEstimate> {
    mi_mc_general(c, &InputDistribution::uniform(c.len()), sigma, cfg)
}

/// MI estimate under an arbitrary input distribution.
///
/// Estimates `-sum_x p(x) E_W[ log2 sum_x' p(x') exp(-(|W+x-x'|^2-|W|^2)/(2 sigma^2)) ]`
/// over a shared noise batch; symbols with zero probability are skipped.
pub fn mi_mc_general(
    c: &Constellation,
    d: &InputDistribution,
    sigma: f64,
    cfg: &McConfig,
) -> Result<McEstimate> {
    if d.len() != c.len() {
        return Err(Error::DimensionMismatch(format!(
            "distribution over {} symbols applied to {} points",
            d.len(),
            c.len()
        )));
    }
    if cfg.sample_count == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    let channel = AwgnChannel::new(sigma, c.dimension())?;
    let m = c.dimension();
    let active: Vec<usize> = (0..c.len()).filter(|&i| d.probabilities()[i] > 0.0).collect();
    let na = active.len();

    // pairwise deltas x_i - x_j and the constant part of the exponent
    let ln_p: Vec<f64> = active.iter().map(|&j| d.probabilities()[j].ln()).collect();
    let inv_s2 = 1.0 / (sigma * sigma);
    let mut delta = vec![0.0; na * na * m];
    let mut const_term = vec![0.0; na * na];
    for (a, &i) in active.iter().enumerate() {
        for (b, &j) in active.iter().enumerate() {
            let mut n2 = 0.0;
            for dim in 0..m {
                let dv = c.point(i)[dim] - c.point(j)[dim];
                delta[(a * na + b) * m + dim] = dv;
                n2 += dv * dv;
            }
            const_term[a * na + b] = ln_p[b] - 0.5 * n2 * inv_s2;
        }
    }

    let noise = channel.sample_noise(cfg.sample_count, cfg.seed);

    // fixed-size chunks summed in chunk order keep the result identical no
    // matter how rayon schedules the work
    const CHUNK: usize = 4096;
    let partials: Vec<Vec<f64>> = noise
        .par_chunks(CHUNK * m)
        .map(|chunk| {
            let mut acc = vec![0.0; na];
            let mut exps = vec![0.0; na];
            for w in chunk.chunks_exact(m) {
                for a in 0..na {
                    let mut max = f64::NEG_INFINITY;
                    for b in 0..na {
                        let mut dot = 0.0;
                        for (dim, wv) in w.iter().enumerate() {
                            dot += wv * delta[(a * na + b) * m + dim];
                        }
                        let e = const_term[a * na + b] - dot * inv_s2;
                        exps[b] = e;
                        if e > max {
                            max = e;
                        }
                    }
                    let sum: f64 = exps.iter().map(|e| (e - max).exp()).sum();
                    acc[a] += max + sum.ln();
                }
            }
            acc
        })
        .collect();

    let mut sums = vec![0.0; na];
    for part in &partials {
        for (s, p) in sums.iter_mut().zip(part) {
            *s += p;
        }
    }

    let n_f = cfg.sample_count as f64;
    let ln2 = std::f64::consts::LN_2;
    let mut raw = 0.0;
    for (a, &i) in active.iter().enumerate() {
        raw -= d.probabilities()[i] * sums[a] / (n_f * ln2);
    }
    let cap = (c.len() as f64).log2();
    Ok(McEstimate { mi_bits: raw.clamp(0.0, cap), raw_bits: raw })
}
