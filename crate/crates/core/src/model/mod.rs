//! Training skin-type models: centroid, Gower ranges and admission threshold.
//!
//! Each class is trained from pure-skin images only. Every image is tiled on
//! the detection grid, and the centroid, per-dimension ranges and threshold
//! are all computed over that same population of window features. Training
//! and detection therefore compare like with like.

mod file;

pub use file::{load_model, save_model, SCHEMA_VERSION};

use std::collections::HashSet;
use std::fmt;

use crate::features::{check_quant, extract_features, FeatureVector, DEFAULT_QUANT_N};
use crate::imaging::{tile, Image};
use crate::metrics::{Metric, RangeVector};
use crate::{Error, Result};

/// Lower bound for Gower ranges, so a dimension that never varies during
/// training does not divide by zero.
pub const DEFAULT_RANGE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub window_w: usize,
    pub window_h: usize,
    pub quant_n: usize,
    pub metric: Metric,
    /// Multiplier on the largest training distance. 1.0 admits exactly the
    /// training windows' envelope.
    pub threshold_slack: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            window_w: 16,
            window_h: 16,
            quant_n: DEFAULT_QUANT_N,
            metric: Metric::Gower,
            threshold_slack: 1.0,
        }
    }
}

/// Legal but suspicious configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigWarning {
    /// Slack below 1.0 rejects some of the training windows themselves.
    SlackBelowOne(f64),
}

impl fmt::Display for ConfigWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigWarning::SlackBelowOne(s) => write!(
                f,
                "threshold slack {s} is below 1.0; some training windows will be classified non-skin"
            ),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_w == 0 || self.window_h == 0 {
            return Err(Error::ZeroWindow(self.window_w, self.window_h));
        }
        check_quant(self.quant_n)?;
        if !(self.threshold_slack.is_finite() && self.threshold_slack >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "threshold slack must be a finite non-negative number, got {}",
                self.threshold_slack
            )));
        }
        Ok(())
    }

    pub fn warnings(&self) -> Vec<ConfigWarning> {
        let mut out = Vec::new();
        if self.threshold_slack < 1.0 {
            out.push(ConfigWarning::SlackBelowOne(self.threshold_slack));
        }
        out
    }

    pub fn feature_len(&self) -> usize {
        3 * (256 / self.quant_n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkinClassModel {
    pub name: String,
    pub centroid: FeatureVector,
    pub ranges: RangeVector,
    pub threshold: f64,
    pub train_window_count: usize,
}

/// Ordered, uniquely named skin classes sharing one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SkinModelSet {
    config: TrainConfig,
    classes: Vec<SkinClassModel>,
}

impl SkinModelSet {
    pub fn new(config: TrainConfig, classes: Vec<SkinClassModel>) -> Result<Self> {
        config.validate()?;
        if classes.is_empty() {
            return Err(Error::EmptyInput("model class list"));
        }
        let mut seen = HashSet::new();
        let len = config.feature_len();
        for class in &classes {
            if !seen.insert(class.name.as_str()) {
                return Err(Error::DuplicateClass(class.name.clone()));
            }
            if class.centroid.len() != len {
                return Err(Error::LengthMismatch { left: class.centroid.len(), right: len });
            }
            if class.ranges.len() != len {
                return Err(Error::LengthMismatch { left: class.ranges.len(), right: len });
            }
            if !(class.threshold.is_finite() && class.threshold >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "class `{}` threshold must be finite and non-negative, got {}",
                    class.name, class.threshold
                )));
            }
        }
        Ok(Self { config, classes })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn classes(&self) -> &[SkinClassModel] {
        &self.classes
    }

    pub fn class_names(&self) -> Vec<String> {
        self.classes.iter().map(|c| c.name.clone()).collect()
    }

    pub fn class(&self, name: &str) -> Option<&SkinClassModel> {
        self.classes.iter().find(|c| c.name == name)
    }
}

fn check_uniform(features: &[FeatureVector]) -> Result<&FeatureVector> {
    let first = features.first().ok_or(Error::EmptyInput("feature set"))?;
    for f in features {
        if f.len() != first.len() || f.quant_n() != first.quant_n() {
            return Err(Error::LengthMismatch { left: f.len(), right: first.len() });
        }
    }
    Ok(first)
}

/// Dimension-wise arithmetic mean.
pub fn average_vector(features: &[FeatureVector]) -> Result<FeatureVector> {
    let first = check_uniform(features)?;
    let mut sum = vec![0.0; first.len()];
    for f in features {
        for (s, v) in sum.iter_mut().zip(f.values()) {
            *s += v;
        }
    }
    let m = features.len() as f64;
    let mean = sum.into_iter().map(|s| (s / m).clamp(0.0, 1.0)).collect();
    FeatureVector::from_values(mean, first.quant_n())
}

/// Per-dimension `max - min` over `features`, floored at `floor`.
pub fn dimension_ranges(features: &[FeatureVector], floor: f64) -> Result<RangeVector> {
    let first = check_uniform(features)?;
    if !(floor.is_finite() && floor > 0.0) {
        return Err(Error::NonPositiveRange { index: 0, value: floor });
    }
    let mut lo = first.values().to_vec();
    let mut hi = lo.clone();
    for f in &features[1..] {
        for ((l, h), &v) in lo.iter_mut().zip(hi.iter_mut()).zip(f.values()) {
            *l = l.min(v);
            *h = h.max(v);
        }
    }
    RangeVector::new(lo.iter().zip(&hi).map(|(l, h)| (h - l).max(floor)).collect())
}

/// `slack` times the largest distance from any training window to the centroid.
pub fn tune_threshold(
    train_features: &[FeatureVector],
    centroid: &FeatureVector,
    metric: Metric,
    ranges: &RangeVector,
    slack: f64,
) -> Result<f64> {
    if train_features.is_empty() {
        return Err(Error::EmptyInput("feature set"));
    }
    let mut max = 0.0f64;
    for (window, f) in train_features.iter().enumerate() {
        let d = metric.measure(f.values(), centroid.values(), ranges)?;
        if !d.is_finite() {
            return Err(Error::NonFiniteDistance { class: String::new(), window });
        }
        max = max.max(d);
    }
    Ok(slack * max)
}

/// Window features of every image, in image order then row-major window order.
pub fn window_features(images: &[Image], config: &TrainConfig) -> Result<Vec<FeatureVector>> {
    let mut out = Vec::new();
    for image in images {
        let grid = tile(image, config.window_w, config.window_h)?;
        for region in grid.regions(image) {
            out.push(extract_features(&region, config.quant_n)?);
        }
    }
    Ok(out)
}

pub fn train_class(name: &str, pure_skin_images: &[Image], config: &TrainConfig) -> Result<SkinClassModel> {
    config.validate()?;
    if pure_skin_images.is_empty() {
        return Err(Error::EmptyInput("training image list"));
    }
    let features = window_features(pure_skin_images, config)?;
    let centroid = average_vector(&features)?;
    let ranges = dimension_ranges(&features, DEFAULT_RANGE_FLOOR)?;
    let threshold = tune_threshold(&features, &centroid, config.metric, &ranges, config.threshold_slack)
        .map_err(|e| match e {
            Error::NonFiniteDistance { window, .. } => {
                Error::NonFiniteDistance { class: name.to_owned(), window }
            }
            other => other,
        })?;
    Ok(SkinClassModel {
        name: name.to_owned(),
        centroid,
        ranges,
        threshold,
        train_window_count: features.len(),
    })
}

/// Trains one model per class, keeping the caller's class order.
pub fn train_multi<S: AsRef<str>>(class_images: &[(S, Vec<Image>)], config: &TrainConfig) -> Result<SkinModelSet> {
    if class_images.is_empty() {
        return Err(Error::EmptyInput("class list"));
    }
    let mut seen = HashSet::new();
    for (name, _) in class_images {
        if !seen.insert(name.as_ref()) {
            return Err(Error::DuplicateClass(name.as_ref().to_owned()));
        }
    }
    let classes = class_images
        .iter()
        .map(|(name, images)| train_class(name.as_ref(), images, config))
        .collect::<Result<Vec<_>>>()?;
    SkinModelSet::new(config.clone(), classes)
}
