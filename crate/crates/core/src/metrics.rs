//! Histogram distances.
//!
//! All functions take plain slices so they work on feature vectors, centroids
//! and hand-built test vectors alike. Larger always means less similar.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Metric {
    #[default]
    Gower,
    Bhattacharyya,
    CityBlock,
    Soergel,
    Euclidean,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::Gower,
        Metric::Bhattacharyya,
        Metric::CityBlock,
        Metric::Soergel,
        Metric::Euclidean,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Gower => "gower",
            Metric::Bhattacharyya => "bhattacharyya",
            Metric::CityBlock => "city_block",
            Metric::Soergel => "soergel",
            Metric::Euclidean => "euclidean",
        }
    }

    /// Only Gower divides by per-dimension ranges.
    pub fn uses_ranges(self) -> bool {
        self == Metric::Gower
    }

    /// Distance with `ranges` forwarded only when the metric needs them.
    pub fn measure(self, a: &[f64], b: &[f64], ranges: &RangeVector) -> Result<f64> {
        distance(self, a, b, self.uses_ranges().then_some(ranges))
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownMetric(s.to_owned()))
    }
}

impl Serialize for Metric {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Metric {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Per-dimension spread used to scale Gower differences. Entries are
/// strictly positive and finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RangeVector(Vec<f64>);

impl RangeVector {
    pub fn new(ranges: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) =
            ranges.iter().enumerate().find(|(_, r)| !(r.is_finite() && **r > 0.0))
        {
            return Err(Error::NonPositiveRange { index, value });
        }
        Ok(Self(ranges))
    }

    pub fn ones(len: usize) -> Self {
        Self(vec![1.0; len])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for RangeVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<RangeVector> for Vec<f64> {
    fn from(r: RangeVector) -> Self {
        r.0
    }
}

fn same_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    Ok(())
}

fn non_negative(v: &[f64]) -> Result<()> {
    match v.iter().enumerate().find(|(_, x)| !(x.is_finite() && **x >= 0.0)) {
        Some((index, &value)) => Err(Error::InvalidEntry { index, value }),
        None => Ok(()),
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> Result<f64> {
    same_len(a, b)?;
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
}

/// Mean of range-scaled absolute differences.
pub fn gower(a: &[f64], b: &[f64], ranges: &RangeVector) -> Result<f64> {
    same_len(a, b)?;
    same_len(a, ranges.values())?;
    if a.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = a
        .iter()
        .zip(b)
        .zip(ranges.values())
        .map(|((x, y), r)| (x - y).abs() / r)
        .sum();
    Ok(sum / a.len() as f64)
}

/// `-ln` of the Bhattacharyya coefficient after scaling each vector to unit
/// L1 mass. Disjoint supports give `f64::INFINITY`.
pub fn bhattacharyya(a: &[f64], b: &[f64]) -> Result<f64> {
    same_len(a, b)?;
    non_negative(a)?;
    non_negative(b)?;
    let (mass_a, mass_b) = (a.iter().sum::<f64>(), b.iter().sum::<f64>());
    if mass_a <= 0.0 || mass_b <= 0.0 {
        return Err(Error::ZeroMass);
    }
    // Normalizing after the sum keeps identical inputs at exactly 1:
    // sum(sqrt(x * x)) == mass and sqrt(mass * mass) == mass.
    let overlap: f64 = a.iter().zip(b).map(|(x, y)| (x * y).sqrt()).sum();
    let coefficient = overlap / (mass_a * mass_b).sqrt();
    if coefficient <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((-coefficient.ln()).max(0.0))
}

pub fn city_block(a: &[f64], b: &[f64]) -> Result<f64> {
    same_len(a, b)?;
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum())
}

pub fn soergel(a: &[f64], b: &[f64]) -> Result<f64> {
    same_len(a, b)?;
    non_negative(a)?;
    non_negative(b)?;
    let (num, den) = a.iter().zip(b).fold((0.0, 0.0), |(num, den), (x, y)| {
        (num + (x - y).abs(), den + x.max(*y))
    });
    if den == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(num / den)
}

/// Dispatches to the named metric. `ranges` must be given for Gower and
/// omitted for every other metric.
pub fn distance(metric: Metric, a: &[f64], b: &[f64], ranges: Option<&RangeVector>) -> Result<f64> {
    match (metric, ranges) {
        (Metric::Gower, Some(r)) => gower(a, b, r),
        (Metric::Gower, None) => Err(Error::MissingRanges(metric)),
        (_, Some(_)) => Err(Error::UnexpectedRanges(metric)),
        (Metric::Bhattacharyya, None) => bhattacharyya(a, b),
        (Metric::CityBlock, None) => city_block(a, b),
        (Metric::Soergel, None) => soergel(a, b),
        (Metric::Euclidean, None) => euclidean(a, b),
    }
}
