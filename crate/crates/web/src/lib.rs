//! Browser bindings for the skinseg demo page.
//!
//! One `Demo` holds a synthetic scene. `run` trains and detects with the
//! chosen settings, `inspect` explains the decision for one window, and
//! `sweep` scores a range of threshold slack values.

pub mod demo;

use skinseg::metrics::Metric;
use skinseg::TrainConfig;
use wasm_bindgen::prelude::*;

fn js(e: skinseg::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn config(metric: &str, slack: f64, window: u32, quant: u32) -> Result<TrainConfig, JsError> {
    let config = TrainConfig {
        window_w: window as usize,
        window_h: window as usize,
        quant_n: quant as usize,
        metric: metric.parse().map_err(js)?,
        threshold_slack: slack,
    };
    config.validate().map_err(js)?;
    Ok(config)
}

fn or_nan(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

#[wasm_bindgen]
pub struct Demo {
    scene: demo::Scene,
    last: Option<(skinseg::SkinModelSet, skinseg::Detection)>,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32, jitter: u8) -> Result<Demo, JsError> {
        Ok(Demo { scene: demo::Scene::build(seed as u64, jitter).map_err(js)?, last: None })
    }

    pub fn width(&self) -> u32 {
        demo::SCENE_W as u32
    }

    pub fn height(&self) -> u32 {
        demo::SCENE_H as u32
    }

    /// RGBA bytes of the scene.
    pub fn scene_rgba(&self) -> Vec<u8> {
        self.scene.rgba()
    }

    /// RGBA bytes of the ground-truth mask, skin in white.
    pub fn truth_rgba(&self) -> Vec<u8> {
        self.scene.truth.skin().iter().flat_map(|&s| if s { [255; 4] } else { [0, 0, 0, 255] }).collect()
    }

    pub fn run(&mut self, metric: &str, slack: f64, window: u32, quant: u32) -> Result<RunResult, JsError> {
        let cfg = config(metric, slack, window, quant)?;
        let (set, detection, summary) = demo::run(&self.scene, &cfg).map_err(js)?;
        self.last = Some((set, detection));
        Ok(RunResult(summary))
    }

    /// Explains the window under pixel `(x, y)` for the last `run`.
    pub fn inspect(&self, x: u32, y: u32) -> Result<WindowInfo, JsError> {
        let (set, detection) = self.last.as_ref().ok_or_else(|| JsError::new("call run() first"))?;
        let view = demo::inspect(&self.scene, set, detection, x as usize, y as usize).map_err(js)?;
        Ok(WindowInfo(view))
    }

    /// Flat `[slack, rate, sensitivity, specificity]` quadruples; undefined
    /// ratios are NaN.
    pub fn sweep(
        &self,
        metric: &str,
        window: u32,
        quant: u32,
        min_slack: f64,
        max_slack: f64,
        steps: u32,
    ) -> Result<Vec<f64>, JsError> {
        let cfg = config(metric, 1.0, window, quant)?;
        let points = demo::sweep(&self.scene, &cfg, min_slack, max_slack, steps as usize).map_err(js)?;
        Ok(points
            .iter()
            .flat_map(|p| [p.slack, p.rate, or_nan(p.sensitivity), or_nan(p.specificity)])
            .collect())
    }
}

#[wasm_bindgen]
pub struct RunResult(demo::RunSummary);

#[wasm_bindgen]
impl RunResult {
    pub fn overlay(&self) -> Vec<u8> {
        self.0.overlay.clone()
    }

    pub fn rate(&self) -> f64 {
        self.0.rate
    }

    pub fn sensitivity(&self) -> f64 {
        or_nan(self.0.sensitivity)
    }

    pub fn specificity(&self) -> f64 {
        or_nan(self.0.specificity)
    }

    /// `[tp, tn, fp, fn]` window counts.
    pub fn counts(&self) -> Vec<u32> {
        let c = self.0.counts;
        [c.true_pos, c.true_neg, c.false_pos, c.false_neg].map(|v| v as u32).to_vec()
    }

    pub fn thresholds(&self) -> Vec<f64> {
        self.0.thresholds.clone()
    }
}

#[wasm_bindgen]
pub struct WindowInfo(demo::WindowView);

#[wasm_bindgen]
impl WindowInfo {
    /// `[x0, y0, w, h]`.
    pub fn bounds(&self) -> Vec<u32> {
        self.0.bounds.map(|v| v as u32).to_vec()
    }

    pub fn feature(&self) -> Vec<f64> {
        self.0.feature.clone()
    }

    /// Index of the assigned class, or -1 for non-skin.
    pub fn label(&self) -> i32 {
        self.0.label.map_or(-1, |k| k as i32)
    }

    pub fn class_count(&self) -> u32 {
        self.0.classes.len() as u32
    }

    pub fn class_name(&self, k: u32) -> String {
        self.0.classes[k as usize].name.clone()
    }

    pub fn centroid(&self, k: u32) -> Vec<f64> {
        self.0.classes[k as usize].centroid.clone()
    }

    pub fn threshold(&self, k: u32) -> f64 {
        self.0.classes[k as usize].threshold
    }

    /// Distances to class `k` under every metric, in `metric_names` order.
    pub fn distances(&self, k: u32) -> Vec<f64> {
        self.0.classes[k as usize].distances.clone()
    }
}

#[wasm_bindgen]
pub fn metric_names() -> Vec<String> {
    Metric::ALL.iter().map(|m| m.name().to_string()).collect()
}
