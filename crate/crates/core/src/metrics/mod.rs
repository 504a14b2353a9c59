//! Evaluation: detection AP/AR, inter-annotator agreement and classifier F1.

mod agreement;
mod detection;
mod f1;

pub use agreement::{krippendorff_alpha, pair_annotations};
pub use detection::{
    average_precision_101, detection_metrics, match_detections, ClassMetrics, DetectionReport, EvalPair,
    IOU_THRESHOLDS,
};
pub use f1::{classifier_f1, F1Report};
