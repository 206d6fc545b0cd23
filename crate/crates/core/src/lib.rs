//! Mutual information of finite signal constellations over the discrete-time
//! AWGN channel, and input distributions that maximize it.
//!
//! The crate covers the full pipeline:
//!
//! * [`constellation`] — PAM/QAM/PSK/AMPM alphabets, custom point sets, and
//!   probability mass functions over them;
//! * [`channel`] — SNR bookkeeping, the Shannon–Hartley bound, Gaussian CDF
//!   and reproducible noise sampling;
//! * [`quantizer`] — the uniform output grid and the exact transition matrix
//!   obtained by integrating the noise density over its cells;
//! * [`mi_mc`] / [`mi_exact`] — Monte-Carlo estimation for the continuous
//!   output and exact evaluation for the quantized output;
//! * [`shaping`] — Maxwell–Boltzmann distributions and their per-sigma
//!   envelopes;
//! * [`blahut_arimoto`] — the capacity iteration for a fixed alphabet, with
//!   an independent numerical maximizer for cross-checks;
//! * [`constrained_ba`] — the power-constrained variant with an input gain
//!   and the logarithmic gain search;
//! * [`analysis`] — KL divergences and curve comparisons.
//!
//! Everything is measured in bits; noise is parameterized by the
//! per-dimension standard deviation sigma.

pub mod analysis;
pub mod blahut_arimoto;
pub mod channel;
pub mod constellation;
pub mod constrained_ba;
pub mod curve;
pub mod error;
pub mod mi_exact;
pub mod mi_mc;
pub mod quantizer;
pub mod shaping;

pub use analysis::{capacity_gap_report, curve_difference_energy, kl_commutative, kl_divergence};
pub use blahut_arimoto::{
    ba_capacity, ba_sweep, numerical_capacity_oracle, BaResult, BaSolver, DEFAULT_BA_EPSILON,
    DEFAULT_BA_MAX_ITERS,
};
pub use channel::{
    awgn_capacity, gaussian_cdf, sample_noise, sigma_from_snr, snr_from_sigma, AwgnChannel,
    SnrPoint,
};
pub use constellation::{Constellation, ConstellationFile, Family, InputDistribution};
pub use constrained_ba::{
    cba_sweep, compute_t, contract_gain_interval, gain_search, modified_ba,
    modified_ba_with_policy, solve_lagrange_lambda, ConstrainedBaResult, GainSearchConfig,
    NoRootPolicy,
};
pub use curve::{MiCurve, MiPoint};
pub use error::{Error, Result};
pub use mi_exact::{mi_discrete, mi_entropy_decomposition, quantizer_shift_sweep, ShiftSweepPoint};
pub use mi_mc::{mi_mc_general, mi_mc_uniform, McConfig, McEstimate};
pub use quantizer::{build_grid, transition_matrix, QuantSettings, QuantizerGrid, TransitionMatrix};
pub use shaping::{mb_distribution, mb_envelope, mb_unit_energy_system, negative_lambda_grid};
