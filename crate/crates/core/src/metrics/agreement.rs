use std::collections::BTreeMap;

use crate::docmodel::{DetectedObject, Label};
use crate::geometry::{iou, lex_cmp};

/// Units of comparison between two annotators: `(Some, Some)` for boxes
/// paired at IoU above the threshold, one-sided units for the rest.
pub fn pair_annotations(
    a: &[DetectedObject],
    b: &[DetectedObject],
    iou_threshold: f64,
) -> Vec<(Option<Label>, Option<Label>)> {
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if x.page == y.page {
                let v = iou(&x.bbox, &y.bbox);
                if v > iou_threshold {
                    candidates.push((v, i, j));
                }
            }
        }
    }
    // the tie-break only looks at box content, so swapping a and b pairs
    // the same boxes
    let key = |o: &DetectedObject| (o.page, o.bbox, o.label);
    let ord = |p: &(f64, usize, usize)| {
        let (ka, kb) = (key(&a[p.1]), key(&b[p.2]));
        let c = |x: &(usize, crate::geometry::BBox, Label), y: &(usize, crate::geometry::BBox, Label)| {
            x.0.cmp(&y.0).then(lex_cmp(&x.1, &y.1)).then(x.2.cmp(&y.2))
        };
        if c(&ka, &kb).is_le() { (ka, kb) } else { (kb, ka) }
    };
    candidates.sort_by(|p, q| {
        let (p1, p2) = ord(p);
        let (q1, q2) = ord(q);
        q.0.total_cmp(&p.0)
            .then(p1.0.cmp(&q1.0))
            .then(lex_cmp(&p1.1, &q1.1))
            .then(p1.2.cmp(&q1.2))
            .then(lex_cmp(&p2.1, &q2.1))
            .then(p2.2.cmp(&q2.2))
    });
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut units = Vec::new();
    for (_, i, j) in candidates {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            units.push((Some(a[i].label), Some(b[j].label)));
        }
    }
    units.extend((0..a.len()).filter(|&i| !used_a[i]).map(|i| (Some(a[i].label), None)));
    units.extend((0..b.len()).filter(|&j| !used_b[j]).map(|j| (None, Some(b[j].label))));
    units
}

/// Krippendorff's alpha for nominal data over the paired units, where
/// "no box" is a value of its own. Clamped to [0, 1]; 1 when both sets are
/// empty or no disagreement is possible.
pub fn krippendorff_alpha(a: &[DetectedObject], b: &[DetectedObject], iou_threshold: f64) -> f64 {
    let units = pair_annotations(a, b, iou_threshold);
    if units.is_empty() {
        return 1.0;
    }
    let mut totals: BTreeMap<Option<Label>, f64> = BTreeMap::new();
    let mut disagreeing = 0.0;
    for (x, y) in &units {
        *totals.entry(*x).or_default() += 1.0;
        *totals.entry(*y).or_default() += 1.0;
        if x != y {
            disagreeing += 2.0;
        }
    }
    let n = 2.0 * units.len() as f64;
    let observed = disagreeing / n;
    let expected = totals.values().map(|&nc| nc * (n - nc)).sum::<f64>() / (n * (n - 1.0));
    if expected == 0.0 {
        return 1.0;
    }
    (1.0 - observed / expected).clamp(0.0, 1.0)
}
