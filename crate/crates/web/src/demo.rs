//! Scene construction, training and analysis behind the browser bindings.

use skinseg::detection::select_label;
use skinseg::evaluation::window_truth_labels;
use skinseg::metrics::Metric;
use skinseg::synth::{generate, Patch, SynthSpec};
use skinseg::{
    confusion, detect, detection_rate, extract_features, sensitivity, specificity, train_multi, ConfusionCounts,
    Detection, GroundTruth, Image, Result, SkinModelSet, TrainConfig,
};

pub const SCENE_W: usize = 240;
pub const SCENE_H: usize = 160;
const TILE: usize = 40;
const TRAIN_SIZE: usize = 96;
const TRAIN_IMAGES: u64 = 4;

pub const CLASSES: [(&str, [u8; 3]); 2] = [("light", [214, 160, 130]), ("dark", [96, 60, 40])];

// 6x4 grid of 40px tiles; `Bg` indexes BACKGROUND, `Skin` indexes CLASSES.
const BACKGROUND: [[u8; 3]; 5] = [[40, 90, 200], [60, 140, 60], [128, 128, 128], [170, 80, 50], [205, 175, 125]];
const LAYOUT: [[Tile; 6]; 4] = {
    use Tile::{Bg, Skin};
    [
        [Bg(0), Bg(0), Skin(0), Skin(0), Bg(0), Bg(0)],
        [Bg(1), Skin(0), Skin(0), Bg(3), Skin(1), Bg(2)],
        [Bg(4), Bg(1), Bg(3), Skin(1), Skin(1), Bg(2)],
        [Bg(1), Bg(1), Bg(4), Skin(1), Bg(2), Bg(2)],
    ]
};

#[derive(Clone, Copy)]
enum Tile {
    Bg(usize),
    Skin(usize),
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub image: Image,
    pub truth: GroundTruth,
    pub training: Vec<(String, Vec<Image>)>,
}

impl Scene {
    pub fn build(seed: u64, jitter: u8) -> Result<Self> {
        let mut patches = Vec::new();
        for (row, tiles) in LAYOUT.iter().enumerate() {
            for (col, &tile) in tiles.iter().enumerate() {
                let (color, skin) = match tile {
                    Tile::Bg(i) => (BACKGROUND[i], false),
                    Tile::Skin(c) => (CLASSES[c].1, true),
                };
                patches.push(Patch { x0: col * TILE, y0: row * TILE, w: TILE, h: TILE, color, jitter, skin });
            }
        }
        let (image, truth) = generate(&SynthSpec { width: SCENE_W, height: SCENE_H, seed, patches })?;

        let mut training = Vec::with_capacity(CLASSES.len());
        for (c, (name, color)) in CLASSES.iter().enumerate() {
            let mut images = Vec::new();
            for i in 0..TRAIN_IMAGES {
                let s = seed.wrapping_add(1000 * (c as u64 + 1) + i);
                images.push(generate(&SynthSpec::solid(TRAIN_SIZE, TRAIN_SIZE, *color, jitter, true, s))?.0);
            }
            training.push((name.to_string(), images));
        }
        Ok(Self { image, truth, training })
    }

    pub fn train(&self, config: &TrainConfig) -> Result<SkinModelSet> {
        train_multi(&self.training, config)
    }

    pub fn rgba(&self) -> Vec<u8> {
        self.image.pixels().iter().flat_map(|&[r, g, b]| [r, g, b, 255]).collect()
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub counts: ConfusionCounts,
    pub rate: f64,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub thresholds: Vec<f64>,
    pub overlay: Vec<u8>,
}

const TINTS: [[u8; 3]; 2] = [[255, 0, 200], [0, 230, 255]];

/// Blends detected windows with their class tint and dims everything else.
pub fn overlay(image: &Image, detection: &Detection) -> Vec<u8> {
    let labels = detection.mask.labels();
    let mut out = Vec::with_capacity(labels.len() * 4);
    for (&[r, g, b], label) in image.pixels().iter().zip(labels) {
        let px = match label {
            Some(k) => {
                let t = TINTS[k % TINTS.len()];
                [mix(r, t[0]), mix(g, t[1]), mix(b, t[2])]
            }
            None => [r / 3, g / 3, b / 3],
        };
        out.extend_from_slice(&[px[0], px[1], px[2], 255]);
    }
    out
}

fn mix(a: u8, b: u8) -> u8 {
    ((a as u16 + b as u16) / 2) as u8
}

pub fn run(scene: &Scene, config: &TrainConfig) -> Result<(SkinModelSet, Detection, RunSummary)> {
    let set = scene.train(config)?;
    let detection = detect(&scene.image, &set)?;
    let predicted: Vec<bool> = detection.decisions.iter().map(|d| d.is_skin()).collect();
    let truth = window_truth_labels(&scene.truth, &detection.grid)?;
    let counts = confusion(&predicted, &truth)?;
    let summary = RunSummary {
        counts,
        rate: detection_rate(&counts)?,
        sensitivity: sensitivity(&counts),
        specificity: specificity(&counts),
        thresholds: set.classes().iter().map(|c| c.threshold).collect(),
        overlay: overlay(&scene.image, &detection),
    };
    Ok((set, detection, summary))
}

#[derive(Debug, Clone)]
pub struct ClassView {
    pub name: String,
    pub centroid: Vec<f64>,
    pub threshold: f64,
    /// Distance to the centroid under each metric, in `Metric::ALL` order.
    pub distances: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct WindowView {
    pub bounds: [usize; 4],
    pub feature: Vec<f64>,
    pub label: Option<usize>,
    pub classes: Vec<ClassView>,
}

pub fn inspect(scene: &Scene, set: &SkinModelSet, detection: &Detection, x: usize, y: usize) -> Result<WindowView> {
    let x = x.min(scene.image.width() - 1);
    let y = y.min(scene.image.height() - 1);
    let index = detection.grid.index_of(x, y);
    let window = detection.grid.window(index);
    let feature = extract_features(&scene.image.region(window)?, set.config().quant_n)?;
    let mut classes = Vec::with_capacity(set.classes().len());
    for model in set.classes() {
        let distances = Metric::ALL
            .iter()
            .map(|m| m.measure(feature.values(), model.centroid.values(), &model.ranges))
            .collect::<Result<Vec<_>>>()?;
        classes.push(ClassView {
            name: model.name.clone(),
            centroid: model.centroid.values().to_vec(),
            threshold: model.threshold,
            distances,
        });
    }
    Ok(WindowView {
        bounds: [window.x0, window.y0, window.w, window.h],
        feature: feature.values().to_vec(),
        label: detection.decisions[index].label,
        classes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub slack: f64,
    pub rate: f64,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
}

/// Window-level scores for `steps` evenly spaced slack values in
/// `[min_slack, max_slack]`, reusing one set of distances.
pub fn sweep(
    scene: &Scene,
    config: &TrainConfig,
    min_slack: f64,
    max_slack: f64,
    steps: usize,
) -> Result<Vec<SweepPoint>> {
    let base = TrainConfig { threshold_slack: 1.0, ..config.clone() };
    let set = scene.train(&base)?;
    let detection = detect(&scene.image, &set)?;
    let truth = window_truth_labels(&scene.truth, &detection.grid)?;
    let max_distances: Vec<f64> = set.classes().iter().map(|c| c.threshold).collect();
    let mut points = Vec::with_capacity(steps);
    for i in 0..steps {
        let slack = if steps > 1 {
            min_slack + (max_slack - min_slack) * i as f64 / (steps - 1) as f64
        } else {
            min_slack
        };
        let thresholds: Vec<f64> = max_distances.iter().map(|t| slack * t).collect();
        let predicted: Vec<bool> = detection
            .decisions
            .iter()
            .map(|d| select_label(&d.distances, &thresholds).is_some())
            .collect();
        let counts = confusion(&predicted, &truth)?;
        points.push(SweepPoint {
            slack,
            rate: detection_rate(&counts)?,
            sensitivity: sensitivity(&counts),
            specificity: specificity(&counts),
        });
    }
    Ok(points)
}
