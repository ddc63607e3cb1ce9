//! Quantized color-histogram descriptors.
//!
//! A region is summarized by three 256-bin channel histograms. Adjacent bins
//! are summed in groups of `n` and divided by the region's pixel count, which
//! gives `256 / n` values per channel laid out red, green, blue.

use serde::{Deserialize, Serialize};

use crate::imaging::Region;
use crate::{Error, Result};

/// Default quantization width: 16 groups per channel, 48 dimensions.
pub const DEFAULT_QUANT_N: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Red,
    Green,
    Blue,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Red, Channel::Green, Channel::Blue];

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelHistogram {
    counts: [u64; 256],
    total: u64,
}

impl ChannelHistogram {
    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

pub fn channel_histogram(region: &Region<'_>, channel: Channel) -> ChannelHistogram {
    let c = channel.index();
    let mut counts = [0u64; 256];
    for px in region.pixels() {
        counts[px[c] as usize] += 1;
    }
    ChannelHistogram { counts, total: region.pixel_count() as u64 }
}

fn rgb_histograms(region: &Region<'_>) -> [ChannelHistogram; 3] {
    let mut counts = [[0u64; 256]; 3];
    for [r, g, b] in region.pixels() {
        counts[0][r as usize] += 1;
        counts[1][g as usize] += 1;
        counts[2][b as usize] += 1;
    }
    let total = region.pixel_count() as u64;
    counts.map(|counts| ChannelHistogram { counts, total })
}

/// Normalized, quantized histogram of one region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    values: Vec<f64>,
    quant_n: usize,
}

impl FeatureVector {
    /// Wraps precomputed values, checking length and range. Used for centroids
    /// and model files.
    pub fn from_values(values: Vec<f64>, quant_n: usize) -> Result<Self> {
        check_quant(quant_n)?;
        let expected = 3 * (256 / quant_n);
        if values.len() != expected {
            return Err(Error::LengthMismatch { left: values.len(), right: expected });
        }
        if let Some((index, &value)) =
            values.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::InvalidEntry { index, value });
        }
        Ok(Self { values, quant_n })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn quant_n(&self) -> usize {
        self.quant_n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn groups_per_channel(&self) -> usize {
        256 / self.quant_n
    }

    /// The group values of one channel.
    pub fn channel(&self, channel: Channel) -> &[f64] {
        let g = self.groups_per_channel();
        &self.values[channel.index() * g..(channel.index() + 1) * g]
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

pub(crate) fn check_quant(n: usize) -> Result<()> {
    if n == 0 || n > 256 || 256 % n != 0 {
        return Err(Error::InvalidQuantization(n));
    }
    Ok(())
}

/// Sums each run of `n` adjacent bins and divides by the pixel total.
pub fn quantize(histograms: &[ChannelHistogram; 3], n: usize) -> Result<FeatureVector> {
    check_quant(n)?;
    let total = histograms[0].total;
    if total == 0 || histograms.iter().any(|h| h.total != total) {
        return Err(Error::EmptyHistogram);
    }
    let denom = total as f64;
    let values = histograms
        .iter()
        .flat_map(|h| h.counts.chunks_exact(n).map(move |group| group.iter().sum::<u64>() as f64 / denom))
        .collect();
    Ok(FeatureVector { values, quant_n: n })
}

pub fn extract_features(region: &Region<'_>, n: usize) -> Result<FeatureVector> {
    quantize(&rgb_histograms(region), n)
}
