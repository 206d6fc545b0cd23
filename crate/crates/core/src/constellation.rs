//! Finite input alphabets (PAM, QAM, PSK, AMPM and custom point sets) and
//! probability mass functions over them.
//!
//! Symbol ordering is fixed at construction so that distributions, transition
//! matrices and serialized outputs always line up: PAM points ascend, QAM is
//! row-major over (first, second) coordinate, PSK runs counterclockwise from
//! angle zero, and AMPM runs counterclockwise interleaving the two rings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constellation family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Pam,
    Qam,
    Psk,
    Ampm,
    Custom,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Pam => "PAM",
            Family::Qam => "QAM",
            Family::Psk => "PSK",
            Family::Ampm => "AMPM",
            Family::Custom => "custom",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Ratio of the outer to the inner ring radius of the 8-AMPM layout.
///
/// Two concentric 4-point squares rotated 45 degrees against each other; this
/// ratio (2 cos 15 deg) makes the inner-ring distance equal to the cross-ring
/// distance, which maximizes the minimum distance of the layout.
pub const AMPM_RING_RATIO: f64 = 1.931_851_652_578_136_6;

/// An ordered finite set of symbol coordinates in 1 or 2 real dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    family: Family,
    label: String,
    dimension: usize,
    points: Vec<Vec<f64>>,
}

impl Constellation {
    /// Canonical integer-lattice or unit-circle layout for a standard family.
    ///
    /// The result is not normalized; see [`Constellation::normalize_unit_energy`].
    pub fn from_family(family: Family, n: usize) -> Result<Self> {
        let points: Vec<Vec<f64>> = match family {
            Family::Pam => {
                if n < 2 {
                    return Err(Error::UnsupportedSize { family: "PAM", size: n });
                }
                (0..n).map(|k| vec![(2 * k) as f64 - (n - 1) as f64]).collect()
            }
            Family::Qam => {
                let side = (n as f64).sqrt().round() as usize;
                if side * side != n || !side.is_multiple_of(2) || side < 2 {
                    return Err(Error::UnsupportedSize { family: "QAM", size: n });
                }
                let level = |k: usize| (2 * k) as f64 - (side - 1) as f64;
                let mut pts = Vec::with_capacity(n);
                for i in 0..side {
                    for j in 0..side {
                        pts.push(vec![level(i), level(j)]);
                    }
                }
                pts
            }
            Family::Psk => {
                if n < 2 {
                    return Err(Error::UnsupportedSize { family: "PSK", size: n });
                }
                (0..n)
                    .map(|k| {
                        let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                        vec![a.cos(), a.sin()]
                    })
                    .collect()
            }
            Family::Ampm => {
                if n != 8 {
                    return Err(Error::UnsupportedSize { family: "AMPM", size: n });
                }
                let mut pts = Vec::with_capacity(8);
                for k in 0..4 {
                    let outer = std::f64::consts::FRAC_PI_2 * k as f64;
                    let inner = outer + std::f64::consts::FRAC_PI_4;
                    pts.push(vec![AMPM_RING_RATIO * outer.cos(), AMPM_RING_RATIO * outer.sin()]);
                    pts.push(vec![inner.cos(), inner.sin()]);
                }
                pts
            }
            Family::Custom => {
                return Err(Error::UnsupportedSize { family: "custom", size: n });
            }
        };
        let label = format!("{}-{}", n, family.name());
        let c = Self::build(family, label, points)?;
        debug_assert!(c.mean_norm() < 1e-12, "standard families are zero-mean");
        Ok(c)
    }

    /// Constellation from an explicit point list, e.g. loaded from a file.
    pub fn custom(points: Vec<Vec<f64>>, label: impl Into<String>) -> Result<Self> {
        Self::build(Family::Custom, label.into(), points)
    }

    fn build(family: Family, label: String, points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("constellation must contain at least one point".into()));
        }
        let dimension = points[0].len();
        if dimension != 1 && dimension != 2 {
            return Err(Error::InvalidDimension(dimension));
        }
        for p in &points {
            if p.len() != dimension {
                return Err(Error::DimensionMismatch(format!(
                    "point with {} coordinates in a {}-dimensional constellation",
                    p.len(),
                    dimension
                )));
            }
            if !p.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidParameter("non-finite point coordinate".into()));
            }
        }
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                if points[i] == points[j] {
                    return Err(Error::InvalidParameter(format!("duplicate points at indices {i} and {j}")));
                }
            }
        }
        Ok(Self { family, label, dimension, points })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of real dimensions (1 or 2).
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Number of symbols.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    /// Squared Euclidean norm of every symbol, in symbol order.
    pub fn norms_squared(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.iter().map(|v| v * v).sum()).collect()
    }

    /// (min, max) coordinate over all symbols in the given dimension.
    pub fn coordinate_range(&self, dim: usize) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in &self.points {
            lo = lo.min(p[dim]);
            hi = hi.max(p[dim]);
        }
        (lo, hi)
    }

    fn mean_norm(&self) -> f64 {
        let mut mean = vec![0.0; self.dimension];
        for p in &self.points {
            for (m, v) in mean.iter_mut().zip(p) {
                *m += v;
            }
        }
        mean.iter().map(|m| (m / self.points.len() as f64).abs()).fold(0.0, f64::max)
    }

    /// Average power `sum_i p_i ||x_i||^2` under the given distribution.
    pub fn average_power(&self, d: &InputDistribution) -> Result<f64> {
        if d.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "distribution over {} symbols applied to {} points",
                d.len(),
                self.len()
            )));
        }
        Ok(self
            .norms_squared()
            .iter()
            .zip(d.probabilities())
            .map(|(n2, p)| p * n2)
            .sum())
    }

    /// Scaled copy with unit average power under `reference`.
    pub fn normalize_unit_energy(&self, reference: &InputDistribution) -> Result<Self> {
        let power = self.average_power(reference)?;
        if power <= 0.0 {
            return Err(Error::ZeroEnergy);
        }
        self.apply_gain(1.0 / power.sqrt())
    }

    /// Copy with every coordinate multiplied by `alpha` (> 0).
    pub fn apply_gain(&self, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::NonPositiveGain(alpha));
        }
        let points = self
            .points
            .iter()
            .map(|p| p.iter().map(|v| v * alpha).collect())
            .collect();
        Ok(Self {
            family: self.family,
            label: self.label.clone(),
            dimension: self.dimension,
            points,
        })
    }
}

/// Probability mass function aligned with a constellation's symbol order.
#[derive(Debug, Clone, PartialEq)]
pub struct InputDistribution {
    probabilities: Vec<f64>,
}

impl InputDistribution {
    /// Validates that the entries are nonnegative and sum to 1 within 1e-12.
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::InvalidDistribution("empty distribution".into()));
        }
        if probabilities.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution("negative or NaN probability".into()));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {sum}")));
        }
        Ok(Self { probabilities })
    }

    /// Normalizes nonnegative weights into a distribution.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution("weights must be nonnegative".into()));
        }
        let sum: f64 = weights.iter().sum();
        if !sum.is_finite() || sum <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        Ok(Self {
            probabilities: weights.into_iter().map(|w| w / sum).collect(),
        })
    }

    /// Uniform distribution over `n` symbols.
    pub fn uniform(n: usize) -> Self {
        Self {
            probabilities: vec![1.0 / n as f64; n],
        }
    }

    /// Point mass on symbol `index`.
    pub fn point_mass(n: usize, index: usize) -> Self {
        let mut p = vec![0.0; n];
        p[index] = 1.0;
        Self { probabilities: p }
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Shannon entropy in bits, with the convention 0 log 0 = 0.
    pub fn entropy_bits(&self) -> f64 {
        -self
            .probabilities
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|p| p * p.log2())
            .sum::<f64>()
    }
}

/// JSON wire format for a constellation with an optional distribution:
/// `{"dimension": m, "points": [[..], ..], "probabilities": [..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstellationFile {
    pub dimension: usize,
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<f64>>,
}

impl ConstellationFile {
    pub fn from_parts(c: &Constellation, d: Option<&InputDistribution>) -> Self {
        Self {
            dimension: c.dimension(),
            points: c.points().to_vec(),
            probabilities: d.map(|d| d.probabilities().to_vec()),
        }
    }

    pub fn into_parts(self, label: impl Into<String>) -> Result<(Constellation, Option<InputDistribution>)> {
        let c = Constellation::custom(self.points, label)?;
        if c.dimension() != self.dimension {
            return Err(Error::DimensionMismatch(format!(
                "declared dimension {} does not match the points",
                self.dimension
            )));
        }
        let d = match self.probabilities {
            Some(p) => {
                if p.len() != c.len() {
                    return Err(Error::DimensionMismatch(
                        "probabilities not aligned with points".into(),
                    ));
                }
                Some(InputDistribution::new(p)?)
            }
            None => None,
        };
        Ok((c, d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_2pam() {
        let c = Constellation::from_family(Family::Pam, 2).unwrap();
        assert_eq!(c.points(), &[vec![-1.0], vec![1.0]]);
    }

    #[test]
    fn canonical_16qam_lattice() {
        let c = Constellation::from_family(Family::Qam, 16).unwrap();
        assert_eq!(c.len(), 16);
        assert_eq!(c.point(0), &[-3.0, -3.0]);
        assert_eq!(c.point(3), &[-3.0, 3.0]);
        assert_eq!(c.point(15), &[3.0, 3.0]);
        for p in c.points() {
            assert!(p.iter().all(|v| [-3.0, -1.0, 1.0, 3.0].contains(v)));
        }
    }

    #[test]
    fn canonical_4psk() {
        let c = Constellation::from_family(Family::Psk, 4).unwrap();
        let expect = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (p, e) in c.points().iter().zip(expect.iter()) {
            assert!((p[0] - e[0]).abs() < 1e-15 && (p[1] - e[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn unsupported_sizes_rejected() {
        assert!(matches!(
            Constellation::from_family(Family::Qam, 8),
            Err(Error::UnsupportedSize { .. })
        ));
        // odd-side squares are not QAM layouts here
        assert!(matches!(
            Constellation::from_family(Family::Qam, 9),
            Err(Error::UnsupportedSize { .. })
        ));
        assert!(matches!(
            Constellation::from_family(Family::Ampm, 4),
            Err(Error::UnsupportedSize { .. })
        ));
        assert!(matches!(
            Constellation::from_family(Family::Pam, 1),
            Err(Error::UnsupportedSize { .. })
        ));
    }

    #[test]
    fn standard_families_are_zero_mean() {
        for c in [
            Constellation::from_family(Family::Pam, 8).unwrap(),
            Constellation::from_family(Family::Pam, 3).unwrap(),
            Constellation::from_family(Family::Qam, 64).unwrap(),
            Constellation::from_family(Family::Psk, 5).unwrap(),
            Constellation::from_family(Family::Ampm, 8).unwrap(),
        ] {
            assert!(c.mean_norm() < 1e-12, "{} has nonzero mean", c.label());
        }
    }

    #[test]
    fn average_power_16qam_uniform_is_10() {
        // brute-force sum over the 16 lattice points
        let c = Constellation::from_family(Family::Qam, 16).unwrap();
        let mut brute = 0.0;
        for p in c.points() {
            brute += (p[0] * p[0] + p[1] * p[1]) / 16.0;
        }
        assert_eq!(brute, 10.0);
        let power = c.average_power(&InputDistribution::uniform(16)).unwrap();
        assert!((power - 10.0).abs() < 1e-12);
    }

    #[test]
    fn average_power_weighted_2pam() {
        let c = Constellation::from_family(Family::Pam, 2).unwrap();
        let d = InputDistribution::new(vec![0.9, 0.1]).unwrap();
        assert!((c.average_power(&d).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn normalize_divides_by_sqrt_power() {
        let c = Constellation::from_family(Family::Qam, 16).unwrap();
        let u = InputDistribution::uniform(16);
        let n = c.normalize_unit_energy(&u).unwrap();
        let scale = 10.0_f64.sqrt();
        for (p, q) in c.points().iter().zip(n.points()) {
            assert!((p[0] / scale - q[0]).abs() < 1e-15);
            assert!((p[1] / scale - q[1]).abs() < 1e-15);
        }
        assert!((n.average_power(&u).unwrap() - 1.0).abs() < 1e-12);
        // idempotent
        let n2 = n.normalize_unit_energy(&u).unwrap();
        for (p, q) in n.points().iter().zip(n2.points()) {
            assert!((p[0] - q[0]).abs() < 1e-12 && (p[1] - q[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn psk_already_unit_energy() {
        let c = Constellation::from_family(Family::Psk, 8).unwrap();
        let u = InputDistribution::uniform(8);
        let n = c.normalize_unit_energy(&u).unwrap();
        for (p, q) in c.points().iter().zip(n.points()) {
            assert!((p[0] - q[0]).abs() < 1e-12 && (p[1] - q[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn gain_scales_power_quadratically() {
        let c = Constellation::from_family(Family::Pam, 8).unwrap();
        let u = InputDistribution::uniform(8);
        let base = c.average_power(&u).unwrap();
        let g = c.apply_gain(2.67).unwrap();
        let scaled = g.average_power(&u).unwrap();
        assert!((scaled - 2.67 * 2.67 * base).abs() < 1e-12 * scaled.abs());
        assert!(matches!(c.apply_gain(0.0), Err(Error::NonPositiveGain(_))));
        assert!(matches!(c.apply_gain(-1.0), Err(Error::NonPositiveGain(_))));
    }

    #[test]
    fn gain_one_is_identity() {
        let c = Constellation::from_family(Family::Pam, 2).unwrap();
        let g = c.apply_gain(1.0).unwrap();
        assert_eq!(c.points(), g.points());
        let g2 = c.apply_gain(2.0).unwrap();
        assert_eq!(g2.points(), &[vec![-2.0], vec![2.0]]);
    }

    #[test]
    fn entropy_values() {
        assert!((InputDistribution::uniform(16).entropy_bits() - 4.0).abs() < 1e-12);
        assert_eq!(InputDistribution::point_mass(5, 2).entropy_bits(), 0.0);
        let d = InputDistribution::new(vec![0.5, 0.25, 0.25]).unwrap();
        assert!((d.entropy_bits() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn distribution_validation() {
        assert!(InputDistribution::new(vec![0.5, 0.25]).is_err());
        assert!(InputDistribution::new(vec![1.5, -0.5]).is_err());
        assert!(InputDistribution::from_weights(vec![0.0, 0.0]).is_err());
        let d = InputDistribution::from_weights(vec![2.0, 6.0]).unwrap();
        assert_eq!(d.probabilities(), &[0.25, 0.75]);
    }

    #[test]
    fn duplicate_points_rejected() {
        let r = Constellation::custom(vec![vec![1.0], vec![1.0]], "dup");
        assert!(r.is_err());
    }

    #[test]
    fn ampm_beats_psk_min_distance_at_unit_energy() {
        let min_dist = |c: &Constellation| {
            let mut best = f64::INFINITY;
            for i in 0..c.len() {
                for j in (i + 1)..c.len() {
                    let d: f64 = c
                        .point(i)
                        .iter()
                        .zip(c.point(j))
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    best = best.min(d.sqrt());
                }
            }
            best
        };
        let u = InputDistribution::uniform(8);
        let ampm = Constellation::from_family(Family::Ampm, 8)
            .unwrap()
            .normalize_unit_energy(&u)
            .unwrap();
        let psk = Constellation::from_family(Family::Psk, 8).unwrap();
        assert!(min_dist(&ampm) > min_dist(&psk));
    }

    #[test]
    fn json_round_trip() {
        let c = Constellation::from_family(Family::Qam, 16).unwrap();
        let d = InputDistribution::uniform(16);
        let file = ConstellationFile::from_parts(&c, Some(&d));
        let s = serde_json::to_string(&file).unwrap();
        let back: ConstellationFile = serde_json::from_str(&s).unwrap();
        let (c2, d2) = back.into_parts("16-QAM").unwrap();
        assert_eq!(c.points(), c2.points());
        assert_eq!(d.probabilities(), d2.unwrap().probabilities());
    }
}
