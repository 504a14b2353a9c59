use std::collections::BTreeMap;

use serde::Serialize;

use crate::docmodel::{DetectedObject, Label};
use crate::geometry::iou;

/// IoU thresholds 0.50, 0.55, ..., 0.95.
pub const IOU_THRESHOLDS: [f64; 10] = [0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95];

/// Ground truth and scored predictions for one evaluation unit (a page or
/// a table crop).
#[derive(Debug, Clone, Default)]
pub struct EvalPair {
    pub ground_truth: Vec<DetectedObject>,
    pub predictions: Vec<DetectedObject>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub label: String,
    pub ground_truth: usize,
    pub predictions: usize,
    pub ap50: f64,
    pub ap75: f64,
    pub ap: f64,
    pub ar: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionReport {
    pub ap50: f64,
    pub ap75: f64,
    pub ap: f64,
    pub ar: f64,
    pub per_class: Vec<ClassMetrics>,
}

/// Greedy matching within one unit: predictions in descending score order
/// each take the unmatched ground-truth box of highest IoU at or above the
/// threshold (first one on ties). Returns the TP flag per prediction in
/// the given order.
pub fn match_detections(gt: &[&DetectedObject], preds: &[&DetectedObject], threshold: f64) -> Vec<bool> {
    let mut order: Vec<usize> = (0..preds.len()).collect();
    order.sort_by(|&a, &b| preds[b].score.total_cmp(&preds[a].score));
    let mut taken = vec![false; gt.len()];
    let mut tp = vec![false; preds.len()];
    for p in order {
        let mut best: Option<(usize, f64)> = None;
        for (g, obj) in gt.iter().enumerate() {
            if taken[g] {
                continue;
            }
            let v = iou(&preds[p].bbox, &obj.bbox);
            if v >= threshold && best.is_none_or(|(_, b)| v > b) {
                best = Some((g, v));
            }
        }
        if let Some((g, _)) = best {
            taken[g] = true;
            tp[p] = true;
        }
    }
    tp
}

/// 101-point interpolated AP from TP flags sorted by descending score.
pub fn average_precision_101(tp_sorted: &[bool], n_gt: usize) -> f64 {
    if n_gt == 0 {
        return 0.0;
    }
    let mut recall = Vec::with_capacity(tp_sorted.len());
    let mut precision = Vec::with_capacity(tp_sorted.len());
    let mut tp = 0usize;
    for (i, &hit) in tp_sorted.iter().enumerate() {
        tp += hit as usize;
        recall.push(tp as f64 / n_gt as f64);
        precision.push(tp as f64 / (i + 1) as f64);
    }
    // precision envelope, non-increasing in rank
    for i in (0..precision.len().saturating_sub(1)).rev() {
        precision[i] = precision[i].max(precision[i + 1]);
    }
    let mut sum = 0.0;
    for k in 0..=100 {
        let r = k as f64 / 100.0;
        let i = recall.partition_point(|&x| x < r);
        if i < precision.len() {
            sum += precision[i];
        }
    }
    sum / 101.0
}

struct Scored {
    score: f64,
    tp: bool,
}

fn class_at(pairs: &[EvalPair], label: Label, threshold: f64) -> (f64, f64, usize) {
    let mut scored = Vec::new();
    let mut n_gt = 0;
    for pair in pairs {
        let gt: Vec<&DetectedObject> = pair.ground_truth.iter().filter(|o| o.label == label).collect();
        let preds: Vec<&DetectedObject> = pair.predictions.iter().filter(|o| o.label == label).collect();
        n_gt += gt.len();
        // matching is per page as well as per unit
        let mut pages: Vec<usize> = gt.iter().chain(&preds).map(|o| o.page).collect();
        pages.sort_unstable();
        pages.dedup();
        let mut flags = vec![false; preds.len()];
        for page in pages {
            let g: Vec<&DetectedObject> = gt.iter().copied().filter(|o| o.page == page).collect();
            let idx: Vec<usize> = (0..preds.len()).filter(|&i| preds[i].page == page).collect();
            let p: Vec<&DetectedObject> = idx.iter().map(|&i| preds[i]).collect();
            for (k, hit) in match_detections(&g, &p, threshold).into_iter().enumerate() {
                flags[idx[k]] = hit;
            }
        }
        scored.extend(preds.iter().zip(flags).map(|(p, tp)| Scored { score: p.score, tp }));
    }
    // stable: equal scores keep unit order, then input order
    scored.sort_by(|a, b| b.score.total_cmp(&a.score));
    let flags: Vec<bool> = scored.iter().map(|s| s.tp).collect();
    let tp = flags.iter().filter(|&&t| t).count();
    let recall = if n_gt == 0 { 0.0 } else { tp as f64 / n_gt as f64 };
    (average_precision_101(&flags, n_gt), recall, n_gt)
}

/// COCO-style AP50, AP75, AP (mean over 0.50:0.05:0.95) and AR, macro
/// averaged over the classes present in the ground truth. When the ground
/// truth is empty, every predicted class scores 0.
pub fn detection_metrics(pairs: &[EvalPair]) -> DetectionReport {
    let mut gt_labels: BTreeMap<Label, ()> = BTreeMap::new();
    for p in pairs {
        for o in &p.ground_truth {
            gt_labels.insert(o.label, ());
        }
    }
    let labels: Vec<Label> = if gt_labels.is_empty() {
        let mut l: Vec<Label> = pairs.iter().flat_map(|p| p.predictions.iter().map(|o| o.label)).collect();
        l.sort();
        l.dedup();
        l
    } else {
        gt_labels.into_keys().collect()
    };

    let per_class: Vec<ClassMetrics> = labels
        .iter()
        .map(|&label| {
            let runs: Vec<(f64, f64, usize)> = IOU_THRESHOLDS.iter().map(|&t| class_at(pairs, label, t)).collect();
            let n = IOU_THRESHOLDS.len() as f64;
            ClassMetrics {
                label: label.as_str().to_string(),
                ground_truth: runs[0].2,
                predictions: pairs.iter().map(|p| p.predictions.iter().filter(|o| o.label == label).count()).sum(),
                ap50: runs[0].0,
                ap75: runs[5].0,
                ap: runs.iter().map(|r| r.0).sum::<f64>() / n,
                ar: runs.iter().map(|r| r.1).sum::<f64>() / n,
            }
        })
        .collect();
    let mean = |f: fn(&ClassMetrics) -> f64| {
        if per_class.is_empty() {
            0.0
        } else {
            per_class.iter().map(f).sum::<f64>() / per_class.len() as f64
        }
    };
    DetectionReport {
        ap50: mean(|c| c.ap50),
        ap75: mean(|c| c.ap75),
        ap: mean(|c| c.ap),
        ar: mean(|c| c.ar),
        per_class,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docmodel::TsrClass;
    use crate::geometry::BBox;
    use proptest::prelude::*;

    fn row(b: BBox, score: f64) -> DetectedObject {
        DetectedObject::new(b, Label::Tsr(TsrClass::TableRow), score, 0)
    }

    #[test]
    fn exact_prediction_scores_one() {
        let g = row(BBox::new(0.0, 0.0, 10.0, 10.0), 1.0);
        let r = detection_metrics(&[EvalPair { ground_truth: vec![g.clone()], predictions: vec![g] }]);
        assert_eq!((r.ap50, r.ap75, r.ap, r.ar), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn threshold_straddle() {
        // IoU 0.6: 60x10 overlap over a union of 100x10
        let g = row(BBox::new(0.0, 0.0, 80.0, 10.0), 1.0);
        let p = row(BBox::new(20.0, 0.0, 100.0, 10.0), 0.9);
        assert!((iou(&g.bbox, &p.bbox) - 0.6).abs() < 1e-12);
        let r = detection_metrics(&[EvalPair { ground_truth: vec![g], predictions: vec![p] }]);
        assert_eq!((r.ap50, r.ap75), (1.0, 0.0));
        // matched at 0.50, 0.55, 0.60 only
        assert!((r.ar - 0.3).abs() < 1e-12);
    }

    #[test]
    fn half_recall() {
        let a = row(BBox::new(0.0, 0.0, 10.0, 10.0), 1.0);
        let b = row(BBox::new(20.0, 0.0, 30.0, 10.0), 1.0);
        let r = detection_metrics(&[EvalPair { ground_truth: vec![a.clone(), b], predictions: vec![a] }]);
        assert!(r.ar <= 0.5);
        assert!((r.ap50 - 51.0 / 101.0).abs() < 1e-12);
    }

    #[test]
    fn empty_ground_truth_scores_zero() {
        let p = row(BBox::new(0.0, 0.0, 10.0, 10.0), 0.5);
        let r = detection_metrics(&[EvalPair { ground_truth: vec![], predictions: vec![p] }]);
        assert_eq!((r.ap, r.ar, r.per_class.len()), (0.0, 0.0, 1));
    }

    #[test]
    fn pages_never_match_each_other() {
        let g = row(BBox::new(0.0, 0.0, 10.0, 10.0), 1.0);
        let mut p = g.clone();
        p.page = 1;
        let r = detection_metrics(&[EvalPair { ground_truth: vec![g], predictions: vec![p] }]);
        assert_eq!(r.ap50, 0.0);
    }

    fn arb_box() -> impl Strategy<Value = BBox> {
        (0.0..90.0f64, 0.0..90.0f64, 2.0..40.0f64, 2.0..40.0f64).prop_map(|(x, y, w, h)| BBox::new(x, y, x + w, y + h))
    }

    proptest! {
        #[test]
        fn bounded_and_monotone(gt in prop::collection::vec(arb_box(), 0..6), pr in prop::collection::vec((arb_box(), 0.0..1.0f64), 0..6)) {
            let pair = EvalPair {
                ground_truth: gt.into_iter().map(|b| row(b, 1.0)).collect(),
                predictions: pr.into_iter().map(|(b, s)| row(b, s)).collect(),
            };
            let pairs = [pair];
            let mut prev = f64::INFINITY;
            for t in IOU_THRESHOLDS {
                let (ap, recall, _) = class_at(&pairs, Label::Tsr(TsrClass::TableRow), t);
                prop_assert!((0.0..=1.0).contains(&ap) && (0.0..=1.0).contains(&recall));
                prop_assert!(ap <= prev + 1e-12);
                prev = ap;
            }
        }
    }
}
