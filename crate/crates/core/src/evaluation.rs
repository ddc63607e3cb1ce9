//! Window-level scoring.
//!
//! Both the detected mask and the ground truth are cut on the detection grid.
//! A window counts as skin when it holds at least one skin pixel. Predictions
//! are collapsed to skin / non-skin regardless of which class fired.

use std::fmt::Write as _;

use crate::detection::detect;
use crate::imaging::{GrayImage, Image, WindowGrid};
use crate::model::SkinModelSet;
use crate::{Error, Result};

/// Pixel-aligned binary ground truth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruth {
    width: usize,
    height: usize,
    skin: Vec<bool>,
}

impl GroundTruth {
    pub fn new(width: usize, height: usize, skin: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 || skin.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "{width}x{height} ground truth needs {} entries, got {}",
                width * height,
                skin.len()
            )));
        }
        Ok(Self { width, height, skin })
    }

    /// Any non-zero gray level is skin.
    pub fn from_gray(mask: &GrayImage) -> Result<Self> {
        Self::new(mask.width, mask.height, mask.data.iter().map(|&v| v != 0).collect())
    }

    /// 255 for skin, 0 otherwise.
    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.skin.iter().map(|&s| if s { 255 } else { 0 }).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn skin(&self) -> &[bool] {
        &self.skin
    }

    pub fn is_skin(&self, x: usize, y: usize) -> bool {
        self.skin[y * self.width + x]
    }
}

/// Skin flag per window: true when the window contains any skin pixel.
pub fn window_truth_labels(truth: &GroundTruth, grid: &WindowGrid) -> Result<Vec<bool>> {
    if (truth.width, truth.height) != (grid.image_w(), grid.image_h()) {
        return Err(Error::DimensionMismatch {
            expected_w: grid.image_w(),
            expected_h: grid.image_h(),
            actual_w: truth.width,
            actual_h: truth.height,
        });
    }
    Ok(grid
        .windows()
        .map(|w| {
            (w.y0..w.y0 + w.h).any(|y| {
                let row = y * truth.width;
                truth.skin[row + w.x0..row + w.x0 + w.w].contains(&true)
            })
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub true_pos: usize,
    pub true_neg: usize,
    pub false_pos: usize,
    pub false_neg: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.true_pos + self.true_neg + self.false_pos + self.false_neg
    }

    /// Windows that are skin in the truth.
    pub fn positives(&self) -> usize {
        self.true_pos + self.false_neg
    }

    pub fn negatives(&self) -> usize {
        self.true_neg + self.false_pos
    }
}

impl std::ops::Add for ConfusionCounts {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            true_pos: self.true_pos + o.true_pos,
            true_neg: self.true_neg + o.true_neg,
            false_pos: self.false_pos + o.false_pos,
            false_neg: self.false_neg + o.false_neg,
        }
    }
}

pub fn confusion(predicted: &[bool], truth: &[bool]) -> Result<ConfusionCounts> {
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch { left: predicted.len(), right: truth.len() });
    }
    let mut c = ConfusionCounts::default();
    for (&p, &t) in predicted.iter().zip(truth) {
        match (p, t) {
            (true, true) => c.true_pos += 1,
            (false, false) => c.true_neg += 1,
            (true, false) => c.false_pos += 1,
            (false, true) => c.false_neg += 1,
        }
    }
    Ok(c)
}

/// Percentage of windows classified correctly.
pub fn detection_rate(c: &ConfusionCounts) -> Result<f64> {
    match c.total() {
        0 => Err(Error::EmptyGrid),
        total => Ok(100.0 * (c.true_neg + c.true_pos) as f64 / total as f64),
    }
}

/// `tp / (tp + fn)`; `None` when no truth window is skin.
pub fn sensitivity(c: &ConfusionCounts) -> Option<f64> {
    ratio(c.true_pos, c.positives())
}

/// `tn / (tn + fp)`; `None` when no truth window is non-skin.
pub fn specificity(c: &ConfusionCounts) -> Option<f64> {
    ratio(c.true_neg, c.negatives())
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// How often one class fired on truth-skin and truth-non-skin windows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassTally {
    pub name: String,
    pub on_skin: usize,
    pub on_non_skin: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub counts: ConfusionCounts,
    pub detection_rate: f64,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub per_class: Vec<ClassTally>,
}

impl EvaluationReport {
    pub fn from_counts(counts: ConfusionCounts) -> Result<Self> {
        Ok(Self {
            counts,
            detection_rate: detection_rate(&counts)?,
            sensitivity: sensitivity(&counts),
            specificity: specificity(&counts),
            per_class: Vec::new(),
        })
    }
}

/// Detects skin in `image` and scores the result against `truth`.
pub fn evaluate(image: &Image, truth: &GroundTruth, set: &SkinModelSet) -> Result<EvaluationReport> {
    if (truth.width, truth.height) != (image.width(), image.height()) {
        return Err(Error::DimensionMismatch {
            expected_w: image.width(),
            expected_h: image.height(),
            actual_w: truth.width,
            actual_h: truth.height,
        });
    }
    let detection = detect(image, set)?;
    let detected = GroundTruth::new(image.width(), image.height(), detection.mask.skin_pixels())?;
    let predicted = window_truth_labels(&detected, &detection.grid)?;
    let actual = window_truth_labels(truth, &detection.grid)?;
    let mut report = EvaluationReport::from_counts(confusion(&predicted, &actual)?)?;
    report.per_class = set
        .class_names()
        .into_iter()
        .map(|name| ClassTally { name, on_skin: 0, on_non_skin: 0 })
        .collect();
    for (decision, &is_skin) in detection.decisions.iter().zip(&actual) {
        if let Some(k) = decision.label {
            let tally = &mut report.per_class[k];
            if is_skin {
                tally.on_skin += 1;
            } else {
                tally.on_non_skin += 1;
            }
        }
    }
    Ok(report)
}

fn fmt_ratio(r: Option<f64>) -> String {
    r.map_or_else(|| "undefined".to_owned(), |v| v.to_string())
}

/// Sample mean and (n - 1) standard deviation; `None` where undefined.
pub fn mean_and_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (Some(mean), None);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (Some(mean), Some(var.sqrt()))
}

/// Tab-separated report: a `#` header, one row per image, then a summary row.
///
/// Per-image columns: path, tp, tn, fp, fn, rate, sensitivity, specificity.
/// The summary row has pooled counts, then the mean of each per-image score
/// (undefined entries skipped), then the sample standard deviation of the
/// per-image rates.
pub fn report_tsv(rows: &[(String, EvaluationReport)]) -> String {
    let mut out = String::from("#path\ttp\ttn\tfp\tfn\trate\tsensitivity\tspecificity\trate_std\n");
    let mut pooled = ConfusionCounts::default();
    for (path, r) in rows {
        let c = r.counts;
        pooled = pooled + c;
        let _ = writeln!(
            out,
            "{path}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            c.true_pos,
            c.true_neg,
            c.false_pos,
            c.false_neg,
            r.detection_rate,
            fmt_ratio(r.sensitivity),
            fmt_ratio(r.specificity)
        );
    }
    let rates: Vec<f64> = rows.iter().map(|(_, r)| r.detection_rate).collect();
    let sens: Vec<f64> = rows.iter().filter_map(|(_, r)| r.sensitivity).collect();
    let spec: Vec<f64> = rows.iter().filter_map(|(_, r)| r.specificity).collect();
    let (mean_rate, std_rate) = mean_and_std(&rates);
    let _ = writeln!(
        out,
        "summary\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        pooled.true_pos,
        pooled.true_neg,
        pooled.false_pos,
        pooled.false_neg,
        fmt_ratio(mean_rate),
        fmt_ratio(mean_and_std(&sens).0),
        fmt_ratio(mean_and_std(&spec).0),
        fmt_ratio(std_rate)
    );
    out
}
