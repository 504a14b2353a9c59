use std::cmp::Ordering;

use super::bbox::{iou, lex_cmp};
use crate::docmodel::DetectedObject;

/// Descending score, then `(y1, x1, x2, y2)` ascending.
fn score_order(a: &DetectedObject, b: &DetectedObject) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| lex_cmp(&a.bbox, &b.bbox))
}

/// Greedy class-wise non-maximum suppression.
///
/// An object is dropped when it overlaps an already kept object of the same
/// label and page with IoU strictly above `iou_threshold`. The result is
/// sorted by descending score.
pub fn nms(objects: &[DetectedObject], iou_threshold: f64) -> Vec<DetectedObject> {
    debug_assert!(iou_threshold > 0.0 && iou_threshold <= 1.0);
    let mut order: Vec<&DetectedObject> = objects.iter().collect();
    order.sort_by(|a, b| score_order(a, b));

    let mut kept: Vec<DetectedObject> = Vec::new();
    for cand in order {
        let suppressed = kept.iter().any(|k| {
            k.label == cand.label && k.page == cand.page && iou(&k.bbox, &cand.bbox) > iou_threshold
        });
        if !suppressed {
            kept.push(cand.clone());
        }
    }
    kept
}
