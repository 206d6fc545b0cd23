//! AWGN channel mathematics: SNR bookkeeping, the Shannon–Hartley bound,
//! the standard normal CDF and reproducible noise sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A signal-to-noise ratio carried in both linear and decibel form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrPoint {
    pub snr_linear: f64,
    pub snr_db: f64,
}

impl SnrPoint {
    pub fn from_linear(snr_linear: f64) -> Result<Self> {
        if !snr_linear.is_finite() || snr_linear <= 0.0 {
            return Err(Error::InvalidParameter(format!("SNR must be positive, got {snr_linear}")));
        }
        Ok(Self { snr_linear, snr_db: 10.0 * snr_linear.log10() })
    }

    pub fn from_db(snr_db: f64) -> Result<Self> {
        if !snr_db.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite SNR {snr_db} dB")));
        }
        Ok(Self { snr_linear: 10f64.powf(snr_db / 10.0), snr_db })
    }
}

/// SNR for average signal power and per-dimension noise deviation `sigma`:
/// `power / sigma^2` in one dimension, `power / (2 sigma^2)` in two.
pub fn snr_from_sigma(signal_power: f64, sigma: f64, dimension: usize) -> Result<SnrPoint> {
    if dimension != 1 && dimension != 2 {
        return Err(Error::InvalidDimension(dimension));
    }
    if !signal_power.is_finite() || signal_power <= 0.0 {
        return Err(Error::InvalidParameter(format!("signal power must be positive, got {signal_power}")));
    }
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    let noise_power = if dimension == 1 { sigma * sigma } else { 2.0 * sigma * sigma };
    SnrPoint::from_linear(signal_power / noise_power)
}

/// Inverse of [`snr_from_sigma`]: the per-dimension `sigma` realizing a target SNR.
pub fn sigma_from_snr(signal_power: f64, snr_linear: f64, dimension: usize) -> Result<f64> {
    if dimension != 1 && dimension != 2 {
        return Err(Error::InvalidDimension(dimension));
    }
    if !signal_power.is_finite() || signal_power <= 0.0 || !snr_linear.is_finite() || snr_linear <= 0.0 {
        return Err(Error::InvalidParameter("signal power and SNR must be positive".into()));
    }
    let noise_power = signal_power / snr_linear;
    Ok(if dimension == 1 { noise_power.sqrt() } else { (noise_power / 2.0).sqrt() })
}

/// Shannon–Hartley bound `log2(1 + SNR)` in bits per two dimensions.
///
/// Comparisons against one-dimensional constellations use half this value.
pub fn awgn_capacity(snr: SnrPoint) -> f64 {
    (1.0 + snr.snr_linear).log2()
}

/// Standard normal CDF.
///
/// Evaluated through the complementary error function, which keeps full
/// absolute accuracy in both tails; saturates to exactly 0/1 for |z| beyond
/// roughly 39.
pub fn gaussian_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Discrete-time AWGN channel with per-dimension noise deviation `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AwgnChannel {
    sigma: f64,
    dimension: usize,
}

impl AwgnChannel {
    pub fn new(sigma: f64, dimension: usize) -> Result<Self> {
        if dimension != 1 && dimension != 2 {
            return Err(Error::InvalidDimension(dimension));
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self { sigma, dimension })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// SNR of this channel for the given average signal power.
    pub fn snr_for_power(&self, signal_power: f64) -> Result<SnrPoint> {
        snr_from_sigma(signal_power, self.sigma, self.dimension)
    }

    /// `count` i.i.d. noise vectors, flattened row-major
    /// (`count * dimension` coordinates). Deterministic for a given seed.
    pub fn sample_noise(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count * self.dimension)
            .map(|_| {
                let z: f64 = rng.sample(StandardNormal);
                z * self.sigma
            })
            .collect()
    }
}

/// Free-function form of [`AwgnChannel::sample_noise`].
pub fn sample_noise(sigma: f64, dimension: usize, count: usize, seed: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    Ok(AwgnChannel::new(sigma, dimension)?.sample_noise(count, seed))
}
