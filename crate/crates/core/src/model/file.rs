//! JSON model files.
//!
//! ```text
//! { "schema_version": 1, "window_w": 16, "window_h": 16, "quant_n": 16,
//!   "metric": "gower", "threshold_slack": 1.0,
//!   "classes": [ { "name": "skin", "train_window_count": 64,
//!                  "centroid": [...], "ranges": [...], "threshold": 0.21 } ] }
//! ```
//!
//! Floats are written in their shortest round-trip form and parsed with
//! correct rounding, so `load_model(&save_model(m))` reproduces `m` exactly.
//! Unknown fields are rejected.

use serde::{Deserialize, Serialize};

use super::{SkinClassModel, SkinModelSet, TrainConfig};
use crate::features::FeatureVector;
use crate::metrics::RangeVector;
use crate::{Error, Result};

pub const SCHEMA_VERSION: u64 = 1;

/// Allowed drift of each centroid channel's group sum away from 1.
const CHANNEL_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    schema_version: u64,
    window_w: usize,
    window_h: usize,
    quant_n: usize,
    metric: String,
    threshold_slack: f64,
    classes: Vec<ClassEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassEntry {
    name: String,
    train_window_count: usize,
    centroid: Vec<f64>,
    ranges: Vec<f64>,
    threshold: f64,
}

pub fn save_model(set: &SkinModelSet) -> Vec<u8> {
    let cfg = set.config();
    let file = ModelFile {
        schema_version: SCHEMA_VERSION,
        window_w: cfg.window_w,
        window_h: cfg.window_h,
        quant_n: cfg.quant_n,
        metric: cfg.metric.name().to_owned(),
        threshold_slack: cfg.threshold_slack,
        classes: set
            .classes()
            .iter()
            .map(|c| ClassEntry {
                name: c.name.clone(),
                train_window_count: c.train_window_count,
                centroid: c.centroid.values().to_vec(),
                ranges: c.ranges.values().to_vec(),
                threshold: c.threshold,
            })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&file).expect("model file serialization cannot fail");
    out.push(b'\n');
    out
}

fn field_err(field: impl Into<String>, reason: impl ToString) -> Error {
    Error::ModelField { field: field.into(), reason: reason.to_string() }
}

pub fn load_model(bytes: &[u8]) -> Result<SkinModelSet> {
    let value: serde_json::Value =
        serde_json::from_slice(bytes).map_err(|e| Error::ModelSyntax(e.to_string()))?;
    match value.get("schema_version").map(|v| v.as_u64()) {
        Some(Some(SCHEMA_VERSION)) => {}
        Some(Some(other)) => return Err(Error::SchemaVersion(other)),
        Some(None) => return Err(field_err("schema_version", "expected a non-negative integer")),
        None => return Err(field_err("schema_version", "missing")),
    }
    let file: ModelFile = serde_json::from_value(value).map_err(|e| field_err("model", e))?;

    let metric = file.metric.parse().map_err(|e| field_err("metric", e))?;
    let config = TrainConfig {
        window_w: file.window_w,
        window_h: file.window_h,
        quant_n: file.quant_n,
        metric,
        threshold_slack: file.threshold_slack,
    };
    config.validate().map_err(|e| field_err("config", e))?;
    if file.classes.is_empty() {
        return Err(field_err("classes", "at least one class is required"));
    }

    let mut classes = Vec::with_capacity(file.classes.len());
    for (i, entry) in file.classes.into_iter().enumerate() {
        let at = |f: &str| format!("classes[{i}].{f}");
        if entry.ranges.len() != entry.centroid.len() {
            return Err(Error::ModelField {
                field: at("ranges"),
                reason: format!(
                    "length {} does not match centroid length {}",
                    entry.ranges.len(),
                    entry.centroid.len()
                ),
            });
        }
        let centroid =
            FeatureVector::from_values(entry.centroid, config.quant_n).map_err(|e| field_err(at("centroid"), e))?;
        for ch in crate::features::Channel::ALL {
            let sum: f64 = centroid.channel(ch).iter().sum();
            if (sum - 1.0).abs() > CHANNEL_SUM_TOLERANCE {
                return Err(field_err(at("centroid"), format!("{ch:?} groups sum to {sum}, expected 1")));
            }
        }
        let ranges = RangeVector::new(entry.ranges).map_err(|e| field_err(at("ranges"), e))?;
        if !(entry.threshold.is_finite() && entry.threshold >= 0.0) {
            return Err(field_err(at("threshold"), "must be finite and non-negative"));
        }
        classes.push(SkinClassModel {
            name: entry.name,
            centroid,
            ranges,
            threshold: entry.threshold,
            train_window_count: entry.train_window_count,
        });
    }
    SkinModelSet::new(config, classes).map_err(|e| field_err("classes", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::train_multi;
    use crate::synth::{generate, Patch, SynthSpec};

    fn trained() -> SkinModelSet {
        let spec = |seed, color| SynthSpec {
            width: 48,
            height: 40,
            seed,
            patches: vec![Patch { x0: 0, y0: 0, w: 48, h: 40, color, jitter: 12, skin: true }],
        };
        let a = generate(&spec(1, [210, 150, 120])).unwrap().0;
        let b = generate(&spec(2, [120, 80, 50])).unwrap().0;
        train_multi(&[("light", vec![a]), ("dark", vec![b])], &TrainConfig::default()).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let set = trained();
        let bytes = save_model(&set);
        assert_eq!(load_model(&bytes).unwrap(), set);
        assert_eq!(save_model(&load_model(&bytes).unwrap()), bytes);
    }

    fn edit(f: impl FnOnce(&mut serde_json::Value)) -> Vec<u8> {
        let mut v: serde_json::Value = serde_json::from_slice(&save_model(&trained())).unwrap();
        f(&mut v);
        serde_json::to_vec(&v).unwrap()
    }

    #[test]
    fn unknown_metric_names_field() {
        let bytes = edit(|v| v["metric"] = "chebyshev".into());
        match load_model(&bytes) {
            Err(Error::ModelField { field, reason }) => {
                assert_eq!(field, "metric");
                assert!(reason.contains("chebyshev"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ranges_length_mismatch() {
        let bytes = edit(|v| {
            v["classes"][1]["ranges"].as_array_mut().unwrap().pop();
        });
        assert!(matches!(load_model(&bytes), Err(Error::ModelField { field, .. }) if field == "classes[1].ranges"));
    }

    #[test]
    fn strict_schema() {
        let bytes = edit(|v| v["extra"] = 1.into());
        assert!(matches!(load_model(&bytes), Err(Error::ModelField { .. })));
        let bytes = edit(|v| v["schema_version"] = 2.into());
        assert_eq!(load_model(&bytes), Err(Error::SchemaVersion(2)));
        let bytes = edit(|v| {
            v.as_object_mut().unwrap().remove("schema_version");
        });
        assert!(matches!(load_model(&bytes), Err(Error::ModelField { field, .. }) if field == "schema_version"));
        assert!(matches!(load_model(b"{not json"), Err(Error::ModelSyntax(_))));
        let bytes = edit(|v| v["classes"][0]["threshold"] = (-1.0).into());
        assert!(matches!(load_model(&bytes), Err(Error::ModelField { field, .. }) if field == "classes[0].threshold"));
        let bytes = edit(|v| v["classes"][0]["centroid"][0] = 0.5.into());
        assert!(matches!(load_model(&bytes), Err(Error::ModelField { field, .. }) if field == "classes[0].centroid"));
        let bytes = edit(|v| v["classes"][1]["name"] = "light".into());
        assert!(matches!(load_model(&bytes), Err(Error::ModelField { field, .. }) if field == "classes"));
        let bytes = edit(|v| v["quant_n"] = 7.into());
        assert!(matches!(load_model(&bytes), Err(Error::ModelField { field, .. }) if field == "config"));
    }

    #[test]
    fn deterministic_bytes() {
        assert_eq!(save_model(&trained()), save_model(&trained()));
    }
}
