//! Per-window skin classification and mask assembly.

use std::fmt::Write as _;

use crate::features::{extract_features, FeatureVector};
use crate::imaging::{tile, GrayImage, Image, WindowGrid};
use crate::metrics::Metric;
use crate::model::{SkinClassModel, SkinModelSet};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct WindowDecision {
    pub window_index: usize,
    /// Index into the model set's classes, `None` for non-skin.
    pub label: Option<usize>,
    /// Distance to every class centroid, in model order. May be infinite.
    pub distances: Vec<f64>,
}

impl WindowDecision {
    pub fn is_skin(&self) -> bool {
        self.label.is_some()
    }
}

/// Per-pixel labels, constant within each detection window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectionMask {
    width: usize,
    height: usize,
    class_names: Vec<String>,
    labels: Vec<Option<usize>>,
}

impl DetectionMask {
    pub fn new(width: usize, height: usize, class_names: Vec<String>, labels: Vec<Option<usize>>) -> Result<Self> {
        if labels.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "{width}x{height} mask needs {} labels, got {}",
                width * height,
                labels.len()
            )));
        }
        if let Some(bad) = labels.iter().flatten().find(|&&k| k >= class_names.len()) {
            return Err(Error::InvalidImage(format!(
                "label {bad} out of range for {} classes",
                class_names.len()
            )));
        }
        Ok(Self { width, height, class_names, labels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    pub fn label_at(&self, x: usize, y: usize) -> Option<usize> {
        self.labels[y * self.width + x]
    }

    pub fn skin_pixels(&self) -> Vec<bool> {
        self.labels.iter().map(Option::is_some).collect()
    }

    /// Gray levels: 0 for non-skin, `floor(255 * k / K)` for 1-based class `k`.
    pub fn to_gray(&self) -> Result<GrayImage> {
        let k = self.class_names.len();
        if k > 255 {
            return Err(Error::TooManyClasses(k));
        }
        let data = self
            .labels
            .iter()
            .map(|l| l.map_or(0, |i| (255 * (i + 1) / k) as u8))
            .collect();
        Ok(GrayImage { width: self.width, height: self.height, data })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub grid: WindowGrid,
    pub decisions: Vec<WindowDecision>,
    pub mask: DetectionMask,
}

impl Detection {
    /// One tab-separated line per window: index, class name or `-`, then
    /// the distance to each class in model order.
    pub fn decisions_tsv(&self) -> String {
        let mut out = String::new();
        for d in &self.decisions {
            let label = d.label.map_or("-", |i| self.mask.class_names[i].as_str());
            let _ = write!(out, "{}\t{}", d.window_index, label);
            for dist in &d.distances {
                let _ = write!(out, "\t{dist}");
            }
            out.push('\n');
        }
        out
    }
}

fn check_len(f: &FeatureVector, model: &SkinClassModel) -> Result<()> {
    if f.len() != model.centroid.len() {
        return Err(Error::LengthMismatch { left: f.len(), right: model.centroid.len() });
    }
    Ok(())
}

/// Single-class rule: skin iff the distance to the centroid is within the threshold.
pub fn classify_window(f: &FeatureVector, model: &SkinClassModel, metric: Metric) -> Result<(bool, f64)> {
    check_len(f, model)?;
    let d = metric.measure(f.values(), model.centroid.values(), &model.ranges)?;
    Ok((d <= model.threshold, d))
}

/// Among classes with `d <= t`, picks the smallest `d / t`. Zero-threshold
/// qualifiers come first; remaining ties go to the earlier class.
pub fn select_label(distances: &[f64], thresholds: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, (u8, f64))> = None;
    for (i, (&d, &t)) in distances.iter().zip(thresholds).enumerate() {
        // NaN distances never qualify.
        if d.partial_cmp(&t).is_none_or(|o| o.is_gt()) {
            continue;
        }
        let key = if t == 0.0 { (0, 0.0) } else { (1, d / t) };
        if best.is_none_or(|(_, k)| key < k) {
            best = Some((i, key));
        }
    }
    best.map(|(i, _)| i)
}

pub fn classify_window_multi(f: &FeatureVector, set: &SkinModelSet) -> Result<WindowDecision> {
    let metric = set.config().metric;
    let mut distances = Vec::with_capacity(set.classes().len());
    for model in set.classes() {
        distances.push(classify_window(f, model, metric)?.1);
    }
    let thresholds: Vec<f64> = set.classes().iter().map(|c| c.threshold).collect();
    Ok(WindowDecision { window_index: 0, label: select_label(&distances, &thresholds), distances })
}

/// Tiles `image` on the model's grid, classifies every window and paints
/// each window's pixels with its label.
pub fn detect(image: &Image, set: &SkinModelSet) -> Result<Detection> {
    let cfg = set.config();
    let grid = tile(image, cfg.window_w, cfg.window_h)?;
    let mut decisions = Vec::with_capacity(grid.len());
    for (index, region) in grid.regions(image).enumerate() {
        let f = extract_features(&region, cfg.quant_n)?;
        let mut decision = classify_window_multi(&f, set)?;
        decision.window_index = index;
        decisions.push(decision);
    }
    let mut labels = vec![None; image.width() * image.height()];
    for (decision, win) in decisions.iter().zip(grid.windows()) {
        for y in win.y0..win.y0 + win.h {
            let row = y * image.width();
            labels[row + win.x0..row + win.x0 + win.w].fill(decision.label);
        }
    }
    let mask = DetectionMask::new(image.width(), image.height(), set.class_names(), labels)?;
    Ok(Detection { grid, decisions, mask })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::RangeVector;
    use crate::model::{train_class, TrainConfig};
    use crate::synth::uniform;
    use proptest::prelude::*;

    fn single(images: &[Image], cfg: &TrainConfig) -> SkinModelSet {
        SkinModelSet::new(cfg.clone(), vec![train_class("skin", images, cfg).unwrap()]).unwrap()
    }

    #[test]
    fn centroid_is_skin() {
        let img = uniform(16, 16, [210, 150, 120]);
        let set = single(std::slice::from_ref(&img), &TrainConfig::default());
        let model = &set.classes()[0];
        assert_eq!(classify_window(&model.centroid, model, Metric::Gower).unwrap(), (true, 0.0));
    }

    #[test]
    fn boundary_distance_is_skin() {
        let red = uniform(16, 16, [255, 0, 0]);
        let f = extract_features(&red.full_region(), 16).unwrap();
        let mut model = train_class("x", &[uniform(16, 16, [0, 0, 0])], &TrainConfig::default()).unwrap();
        let (_, d) = classify_window(&f, &model, Metric::CityBlock).unwrap();
        model.threshold = d;
        assert_eq!(classify_window(&f, &model, Metric::CityBlock).unwrap(), (true, d));
        model.threshold = d - 1e-9;
        assert!(!classify_window(&f, &model, Metric::CityBlock).unwrap().0);
    }

    #[test]
    fn blue_against_red_model() {
        // Red-trained centroid: red group 15, green group 0, blue group 0 all 1.0.
        // Blue window: red group 0, green group 0, blue group 15 all 1.0.
        // Four dimensions differ by 1; all ranges sit at the 1e-6 floor, so the
        // Gower distance is 4 / 1e-6 / 48.
        let red = uniform(16, 16, [255, 0, 0]);
        let model = train_class("red", &[red], &TrainConfig::default()).unwrap();
        let blue = uniform(16, 16, [0, 0, 255]);
        let f = extract_features(&blue.full_region(), 16).unwrap();
        let (skin, d) = classify_window(&f, &model, Metric::Gower).unwrap();
        let by_hand = 4.0 / 1e-6 / 48.0;
        assert!((d - by_hand).abs() / by_hand < 1e-12, "{d}");
        assert!(!skin);
        let mut loose = model.clone();
        loose.threshold = by_hand * 0.999;
        assert!(!classify_window(&f, &loose, Metric::Gower).unwrap().0);
    }

    #[test]
    fn length_mismatch() {
        let model = train_class("x", &[uniform(16, 16, [1, 1, 1])], &TrainConfig::default()).unwrap();
        let f = FeatureVector::from_values(vec![0.5; 6], 128).unwrap();
        assert_eq!(
            classify_window(&f, &model, Metric::Gower),
            Err(Error::LengthMismatch { left: 6, right: 48 })
        );
    }

    #[test]
    fn label_selection() {
        assert_eq!(select_label(&[0.5, 0.9], &[0.4, 0.8]), None);
        assert_eq!(select_label(&[0.5, 0.3], &[0.4, 0.8]), Some(1));
        assert_eq!(select_label(&[0.1, 0.2], &[0.4, 0.5]), Some(0));
        assert_eq!(select_label(&[0.2, 0.1], &[0.5, 0.4]), Some(1));
        // raw-distance argmin would pick class 0 here
        assert_eq!(select_label(&[0.1, 0.2], &[0.1, 2.0]), Some(1));
        assert_eq!(select_label(&[0.1, 0.2], &[0.2, 0.4]), Some(0));
        assert_eq!(select_label(&[0.0, 0.0], &[1.0, 0.0]), Some(1));
        assert_eq!(select_label(&[f64::INFINITY, f64::NAN], &[1.0, 1.0]), None);
    }

    #[test]
    fn multi_reports_all_distances() {
        let cfg = TrainConfig::default();
        let a = train_class("a", &[uniform(16, 16, [200, 100, 50])], &cfg).unwrap();
        let b = train_class("b", &[uniform(16, 16, [50, 100, 200])], &cfg).unwrap();
        let set = SkinModelSet::new(cfg, vec![a, b]).unwrap();
        let f = extract_features(&uniform(16, 16, [0, 255, 0]).full_region(), 16).unwrap();
        let d = classify_window_multi(&f, &set).unwrap();
        assert_eq!(d.label, None);
        assert_eq!(d.distances.len(), 2);
        let f = extract_features(&uniform(16, 16, [50, 100, 200]).full_region(), 16).unwrap();
        assert_eq!(classify_window_multi(&f, &set).unwrap().label, Some(1));
    }

    #[test]
    fn two_halves() {
        let cfg = TrainConfig::default();
        let set = single(&[uniform(32, 32, [210, 150, 120])], &cfg);
        let img = Image::from_fn(64, 32, |x, _| if x < 32 { [210, 150, 120] } else { [0, 0, 255] }).unwrap();
        let out = detect(&img, &set).unwrap();
        for y in 0..32 {
            for x in 0..64 {
                assert_eq!(out.mask.label_at(x, y), (x < 32).then_some(0));
            }
        }
    }

    #[test]
    fn partial_windows_keep_dimensions() {
        let img = uniform(40, 32, [210, 150, 120]);
        let set = single(std::slice::from_ref(&img), &TrainConfig::default());
        let out = detect(&img, &set).unwrap();
        assert_eq!((out.mask.width(), out.mask.height()), (40, 32));
        assert_eq!(out.decisions.len(), 6);
        assert!(out.mask.labels().iter().all(|l| *l == Some(0)));
    }

    #[test]
    fn gray_encoding() {
        let names = |k: usize| (0..k).map(|i| i.to_string()).collect::<Vec<_>>();
        let m = DetectionMask::new(1, 1, names(1), vec![None]).unwrap();
        assert_eq!(m.to_gray().unwrap().data, [0]);
        let m = DetectionMask::new(1, 1, names(1), vec![Some(0)]).unwrap();
        assert_eq!(m.to_gray().unwrap().data, [255]);
        let m = DetectionMask::new(2, 1, names(2), vec![Some(0), Some(1)]).unwrap();
        assert_eq!(m.to_gray().unwrap().data, [127, 255]);
        let m = DetectionMask::new(1, 1, names(256), vec![None]).unwrap();
        assert_eq!(m.to_gray(), Err(Error::TooManyClasses(256)));
        let bytes = crate::imaging::encode_pgm(&DetectionMask::new(3, 2, names(3), vec![None; 6]).unwrap()).unwrap();
        assert_eq!(bytes.len(), b"P5\n3 2\n255\n".len() + 6);
    }

    #[test]
    fn decisions_sidecar() {
        let cfg = TrainConfig { metric: Metric::CityBlock, ..TrainConfig::default() };
        let set = single(&[uniform(16, 16, [210, 150, 120])], &cfg);
        let img = Image::from_fn(32, 16, |x, _| if x < 16 { [210, 150, 120] } else { [0, 0, 255] }).unwrap();
        let tsv = detect(&img, &set).unwrap().decisions_tsv();
        assert_eq!(tsv, "0\tskin\t0\n1\t-\t6\n");
    }

    #[test]
    fn unused_range_vector_ignored_for_non_gower() {
        let model = SkinClassModel {
            name: "x".into(),
            centroid: FeatureVector::from_values(vec![0.5; 6], 128).unwrap(),
            ranges: RangeVector::ones(6),
            threshold: 0.0,
            train_window_count: 1,
        };
        let f = model.centroid.clone();
        for m in Metric::ALL {
            assert!(classify_window(&f, &model, m).unwrap().0, "{m}");
        }
    }

    proptest! {
        #[test]
        fn qualifying_set_monotone_in_thresholds(
            d in prop::collection::vec(0.0f64..2.0, 1..6),
            t in prop::collection::vec(0.0f64..2.0, 6),
            bump in prop::collection::vec(0.0f64..1.0, 6),
        ) {
            let t = &t[..d.len()];
            let raised: Vec<f64> = t.iter().zip(&bump).map(|(a, b)| a + b).collect();
            if select_label(&d, t).is_some() {
                prop_assert!(select_label(&d, &raised).is_some());
            }
        }

        #[test]
        fn scale_invariant_labels(
            d in prop::collection::vec(0.0f64..2.0, 1..6),
            t in prop::collection::vec(0.01f64..2.0, 6),
            c in 0.01f64..100.0,
        ) {
            let t = &t[..d.len()];
            let ds: Vec<f64> = d.iter().map(|x| x * c).collect();
            let ts: Vec<f64> = t.iter().map(|x| x * c).collect();
            prop_assert_eq!(select_label(&d, t), select_label(&ds, &ts));
        }
    }
}
