//! Skin segmentation by color-histogram retrieval.
//!
//! The pipeline mirrors a retrieval system: every image is cut into
//! non-overlapping windows, each window is described by a quantized,
//! normalized RGB histogram, and a window is called skin when its
//! descriptor lies within a trained radius of a skin-type centroid.
//!
//! ```
//! use skinseg::{detect, synth, train_multi, TrainConfig};
//!
//! let skin = synth::uniform(32, 32, [210, 150, 120]);
//! let model = train_multi(&[("skin", vec![skin.clone()])], &TrainConfig::default()).unwrap();
//! let out = detect(&skin, &model).unwrap();
//! assert!(out.decisions.iter().all(|d| d.label.is_some()));
//! ```
//!
//! Modules, bottom-up:
//!
//! - [`imaging`]: RGB rasters, binary PPM/PGM codecs, window tiling.
//! - [`features`]: per-channel histograms and the quantized feature vector.
//! - [`metrics`]: Gower, Bhattacharyya, city block, Soergel and Euclidean distances.
//! - [`model`]: centroid, range and threshold training; JSON model files.
//! - [`detection`]: per-window classification and mask assembly.
//! - [`evaluation`]: window-level confusion counts, detection rate, sensitivity, specificity.
//! - [`synth`]: seeded synthetic scenes with ground truth.

pub mod detection;
mod error;
pub mod evaluation;
pub mod features;
pub mod imaging;
pub mod metrics;
pub mod model;
pub mod synth;

pub use detection::{
    classify_window, classify_window_multi, detect, Detection, DetectionMask, WindowDecision,
};
pub use error::{Error, Result};
pub use evaluation::{
    confusion, detection_rate, evaluate, report_tsv, sensitivity, specificity, window_truth_labels,
    ConfusionCounts, EvaluationReport, GroundTruth,
};
pub use features::{channel_histogram, extract_features, quantize, Channel, ChannelHistogram, FeatureVector};
pub use imaging::{decode_pgm, decode_ppm, encode_gray, encode_pgm, encode_ppm, tile, CodecError, GrayImage, Image, Region, Window, WindowGrid};
pub use metrics::{distance, Metric, RangeVector};
pub use model::{
    average_vector, dimension_ranges, load_model, save_model, train_class, train_multi, tune_threshold,
    ConfigWarning, SkinClassModel, SkinModelSet, TrainConfig, DEFAULT_RANGE_FLOOR,
};
