//! Uniform output quantizer and the exact channel transition matrix.
//!
//! The output alphabet is a per-dimension uniform grid. With per-dimension
//! bounds `lo = min coordinate - s` and `hi = max coordinate + s` (shift
//! `s = shift_multiplier * sigma`), the grid places `2^b` points at
//! `lo + k * step` with `step = (hi - lo) / 2^b`. Cells are the Voronoi
//! regions of the points: boundaries at midpoints, the two outer cells
//! extending to infinity, so every row of the transition matrix carries the
//! full probability mass.

use std::io::Write;

use rayon::prelude::*;

use crate::channel::gaussian_cdf;
use crate::constellation::Constellation;
use crate::error::{Error, Result};

/// Quantizer configuration: grid margin (in multiples of sigma) and
/// resolution (bits per dimension).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantSettings {
    pub shift_multiplier: f64,
    pub bits_per_dim: u32,
}

impl QuantSettings {
    pub fn new(shift_multiplier: f64, bits_per_dim: u32) -> Result<Self> {
        if !shift_multiplier.is_finite() || shift_multiplier < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "shift multiplier must be nonnegative, got {shift_multiplier}"
            )));
        }
        if !(1..=16).contains(&bits_per_dim) {
            return Err(Error::InvalidParameter(format!(
                "bits per dimension must lie in [1, 16], got {bits_per_dim}"
            )));
        }
        Ok(Self { shift_multiplier, bits_per_dim })
    }

    /// Resolution defaults that keep the matrix small without visibly moving
    /// the curves: 5 bits for a 16-QAM, 6 for larger 2-D alphabets, 9 for
    /// one-dimensional ones. Shift defaults to two sigmas everywhere.
    pub fn default_for(c: &Constellation) -> Self {
        let bits = if c.dimension() == 1 {
            9
        } else if c.len() <= 16 {
            5
        } else {
            6
        };
        Self { shift_multiplier: 2.0, bits_per_dim: bits }
    }
}

impl Default for QuantSettings {
    fn default() -> Self {
        Self { shift_multiplier: 2.0, bits_per_dim: 5 }
    }
}

/// Per-dimension uniform grid defining the discrete output alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizerGrid {
    dimension: usize,
    bits_per_dim: u32,
    shift: f64,
    lo: Vec<f64>,
    hi: Vec<f64>,
    step: Vec<f64>,
}

impl QuantizerGrid {
    /// Grid from explicit per-dimension bounds.
    pub fn from_bounds(lo: Vec<f64>, hi: Vec<f64>, bits_per_dim: u32, shift: f64) -> Result<Self> {
        let dimension = lo.len();
        if dimension != 1 && dimension != 2 {
            return Err(Error::InvalidDimension(dimension));
        }
        if hi.len() != dimension {
            return Err(Error::DimensionMismatch("lo/hi bound lengths differ".into()));
        }
        if !(1..=16).contains(&bits_per_dim) {
            return Err(Error::InvalidParameter(format!(
                "bits per dimension must lie in [1, 16], got {bits_per_dim}"
            )));
        }
        for (d, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if !l.is_finite() || !h.is_finite() || h <= l {
                return Err(Error::DegenerateConstellation(d));
            }
        }
        let n = (1u64 << bits_per_dim) as f64;
        let step = lo.iter().zip(&hi).map(|(l, h)| (h - l) / n).collect();
        Ok(Self { dimension, bits_per_dim, shift, lo, hi, step })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn bits_per_dim(&self) -> u32 {
        self.bits_per_dim
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Number of grid points per dimension (2^b).
    pub fn points_per_dim(&self) -> usize {
        1usize << self.bits_per_dim
    }

    /// Total number of cells, `(2^b)^m`.
    pub fn num_cells(&self) -> usize {
        self.points_per_dim().pow(self.dimension as u32)
    }

    /// Coordinate of grid point `k` in dimension `dim`.
    pub fn point_coord(&self, dim: usize, k: usize) -> f64 {
        self.lo[dim] + k as f64 * self.step[dim]
    }

    /// Voronoi cell of point `k` in dimension `dim`; outer cells are
    /// half-infinite.
    pub fn cell_bounds(&self, dim: usize, k: usize) -> (f64, f64) {
        let last = self.points_per_dim() - 1;
        let lo = if k == 0 {
            f64::NEG_INFINITY
        } else {
            self.lo[dim] + (k as f64 - 0.5) * self.step[dim]
        };
        let hi = if k == last {
            f64::INFINITY
        } else {
            self.lo[dim] + (k as f64 + 0.5) * self.step[dim]
        };
        (lo, hi)
    }

    /// Flattened cell index from per-dimension indices (first dimension major).
    pub fn cell_index(&self, per_dim: &[usize]) -> usize {
        let ppd = self.points_per_dim();
        per_dim.iter().fold(0, |acc, &k| acc * ppd + k)
    }

    /// Index of the grid point nearest to `y`; ties break toward the lower
    /// index, points beyond the bounds map to the outer cells.
    pub fn quantize(&self, y: &[f64]) -> usize {
        debug_assert_eq!(y.len(), self.dimension);
        let last = (self.points_per_dim() - 1) as f64;
        let ppd = self.points_per_dim();
        y.iter()
            .zip(self.lo.iter().zip(&self.step))
            .fold(0, |index, (v, (lo, step))| {
                let t = (v - lo) / step;
                let k = (t - 0.5).ceil().clamp(0.0, last) as usize;
                index * ppd + k
            })
    }
}

/// Builds the output grid for a constellation: the bounding box expanded by
/// `shift_multiplier * sigma` in every direction.
pub fn build_grid(
    c: &Constellation,
    sigma: f64,
    shift_multiplier: f64,
    bits_per_dim: u32,
) -> Result<QuantizerGrid> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    if !shift_multiplier.is_finite() || shift_multiplier < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "shift multiplier must be nonnegative, got {shift_multiplier}"
        )));
    }
    let shift = shift_multiplier * sigma;
    let mut lo = Vec::with_capacity(c.dimension());
    let mut hi = Vec::with_capacity(c.dimension());
    for d in 0..c.dimension() {
        let (min, max) = c.coordinate_range(d);
        if max - min <= 0.0 {
            return Err(Error::DegenerateConstellation(d));
        }
        lo.push(min - shift);
        hi.push(max + shift);
    }
    QuantizerGrid::from_bounds(lo, hi, bits_per_dim, shift)
}

/// Row-stochastic matrix of cell probabilities `p(y | x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl TransitionMatrix {
    /// Builds from explicit rows, validating row-stochasticity.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidMatrix("empty matrix".into()));
        }
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidMatrix(format!("ragged row {i}")));
            }
            if row.iter().any(|p| !p.is_finite() || *p < 0.0 || *p > 1.0 + 1e-12) {
                return Err(Error::InvalidMatrix(format!("entry outside [0, 1] in row {i}")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidMatrix(format!("row {i} sums to {sum}")));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    /// Unchecked constructor for crate-internal use.
    pub(crate) fn from_raw(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// One CSV line per symbol, for external verification.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for i in 0..self.rows {
            let line = self
                .row(i)
                .iter()
                .map(|v| format!("{v:.16e}"))
                .collect::<Vec<_>>()
                .join(",");
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// Gaussian mass on `[lo, hi]` for mean `x` and deviation `sigma`, keeping
/// relative accuracy in both tails (upper tails are evaluated through the
/// complement to avoid cancellation).
fn interval_prob(lo: f64, hi: f64, x: f64, sigma: f64) -> f64 {
    let a = (lo - x) / sigma;
    let b = (hi - x) / sigma;
    if a > 0.0 {
        gaussian_cdf(-a) - gaussian_cdf(-b)
    } else {
        gaussian_cdf(b) - gaussian_cdf(a)
    }
}

/// Exact transition matrix: the Gaussian factorizes per dimension, so each
/// entry is a product of per-dimension CDF differences over the cell.
pub fn transition_matrix(
    c: &Constellation,
    grid: &QuantizerGrid,
    sigma: f64,
) -> Result<TransitionMatrix> {
    if c.dimension() != grid.dimension() {
        return Err(Error::DimensionMismatch(format!(
            "constellation is {}-dimensional but grid is {}-dimensional",
            c.dimension(),
            grid.dimension()
        )));
    }
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    let n = c.len();
    let ppd = grid.points_per_dim();
    let cols = grid.num_cells();
    // dense storage; half a gigabyte is far beyond any useful resolution
    const MAX_ENTRIES: usize = 1 << 26;
    if n.saturating_mul(cols) > MAX_ENTRIES {
        return Err(Error::InvalidParameter(format!(
            "transition matrix would hold {} entries; lower the bits per dimension",
            n * cols
        )));
    }

    // per-dimension cell probabilities for every symbol
    let per_dim: Vec<Vec<f64>> = (0..c.dimension())
        .map(|d| {
            let mut table = vec![0.0; n * ppd];
            for (i, point) in c.points().iter().enumerate() {
                for k in 0..ppd {
                    let (lo, hi) = grid.cell_bounds(d, k);
                    table[i * ppd + k] = interval_prob(lo, hi, point[d], sigma);
                }
            }
            table
        })
        .collect();

    let mut data = vec![0.0; n * cols];
    data.par_chunks_mut(cols).enumerate().for_each(|(i, row)| {
        if c.dimension() == 1 {
            row.copy_from_slice(&per_dim[0][i * ppd..(i + 1) * ppd]);
        } else {
            let first = &per_dim[0][i * ppd..(i + 1) * ppd];
            let second = &per_dim[1][i * ppd..(i + 1) * ppd];
            for (k0, p0) in first.iter().enumerate() {
                for (k1, p1) in second.iter().enumerate() {
                    row[k0 * ppd + k1] = p0 * p1;
                }
            }
        }
    });
    Ok(TransitionMatrix::from_raw(n, cols, data))
}
