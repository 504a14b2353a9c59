use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct F1Report<T: Ord> {
    pub per_class: BTreeMap<T, f64>,
    pub macro_f1: f64,
}

/// Per-class F1 = 2TP / (2TP + FP + FN) and its macro average over every
/// class seen in the truth or the predictions.
pub fn classifier_f1<T: Ord + Clone>(pairs: &[(T, T)]) -> F1Report<T> {
    let mut counts: BTreeMap<T, (u64, u64, u64)> = BTreeMap::new();
    for (truth, pred) in pairs {
        if truth == pred {
            counts.entry(truth.clone()).or_default().0 += 1;
        } else {
            counts.entry(pred.clone()).or_default().1 += 1;
            counts.entry(truth.clone()).or_default().2 += 1;
        }
    }
    let per_class: BTreeMap<T, f64> = counts
        .into_iter()
        .map(|(c, (tp, fp, fn_))| (c, 2.0 * tp as f64 / (2 * tp + fp + fn_) as f64))
        .collect();
    let macro_f1 = if per_class.is_empty() {
        0.0
    } else {
        per_class.values().sum::<f64>() / per_class.len() as f64
    };
    F1Report { per_class, macro_f1 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures() {
        let r = classifier_f1(&[("a", "a"), ("b", "b")]);
        assert_eq!(r.macro_f1, 1.0);

        let r = classifier_f1(&[("a", "b"), ("a", "b")]);
        assert_eq!(r.per_class["a"], 0.0);

        let r = classifier_f1(&[("a", "a"), ("a", "b"), ("b", "a")]);
        assert_eq!(r.per_class["a"], 0.5);
    }
}
