//! Bipartite set-prediction loss with optimal one-to-one matching.

use serde::{Deserialize, Serialize};

use super::bbox::BBox;
use super::loss::BoxLossVariant;
use crate::error::{Error, Result};

/// Floor applied to probabilities before taking logs so that a zero score
/// yields a large finite cross-entropy instead of infinity.
const MIN_PROB: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub lambda_ce: f64,
    pub lambda_l1: f64,
    pub lambda_box: f64,
    pub variant: BoxLossVariant,
}

impl LossWeights {
    /// Detection weights: `λ_ce = 1`, `λ_l1 = 5`, `λ_giou = 2`.
    pub const DETECTION: LossWeights = LossWeights {
        lambda_ce: 1.0,
        lambda_l1: 5.0,
        lambda_box: 2.0,
        variant: BoxLossVariant::Giou,
    };

    pub fn new(lambda_ce: f64, lambda_l1: f64, lambda_box: f64, variant: BoxLossVariant) -> Result<Self> {
        if [lambda_ce, lambda_l1, lambda_box]
            .iter()
            .any(|w| !w.is_finite() || *w < 0.0)
        {
            return Err(Error::Config("loss weights must be finite and non-negative".into()));
        }
        Ok(LossWeights {
            lambda_ce,
            lambda_l1,
            lambda_box,
            variant,
        })
    }
}

/// One slot of the detector's fixed-size output set.
///
/// `class_scores` holds one probability per real class followed by the
/// no-object probability in the last position.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub bbox: BBox,
    pub class_scores: Vec<f64>,
}

impl Prediction {
    pub fn validate(&self) -> Result<()> {
        if self.class_scores.len() < 2 {
            return Err(Error::InvalidScores(
                "need at least one class plus the no-object slot".into(),
            ));
        }
        if self
            .class_scores
            .iter()
            .any(|p| !p.is_finite() || *p < 0.0)
        {
            return Err(Error::InvalidScores("scores must be finite and non-negative".into()));
        }
        let sum: f64 = self.class_scores.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidScores(format!("scores sum to {sum}, expected 1")));
        }
        Ok(())
    }

    pub fn no_object_class(&self) -> usize {
        self.class_scores.len() - 1
    }

    fn cross_entropy(&self, class: usize) -> f64 {
        -self.class_scores[class].max(MIN_PROB).ln()
    }
}

/// Sum of absolute coordinate differences.
pub fn l1_distance(a: &BBox, b: &BBox) -> f64 {
    (a.x1 - b.x1).abs() + (a.y1 - b.y1).abs() + (a.x2 - b.x2).abs() + (a.y2 - b.y2).abs()
}

/// Weighted loss of one prediction against one target.
pub fn pair_loss(pred: &Prediction, class: usize, target: &BBox, w: &LossWeights) -> Result<f64> {
    let ce = pred.cross_entropy(class);
    let l1 = l1_distance(&pred.bbox, target);
    let geo = w.variant.loss(&pred.bbox, target)?;
    Ok(w.lambda_ce * ce + w.lambda_l1 * l1 + w.lambda_box * geo)
}

/// Result of the optimal assignment: `assignment[t]` is the prediction
/// matched to target `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SetLoss {
    pub total: f64,
    pub assignment: Vec<usize>,
}

/// Matches targets to predictions at minimum total pair cost and sums the
/// weighted losses. Unmatched predictions pay cross-entropy against the
/// no-object class.
pub fn set_prediction_loss(
    preds: &[Prediction],
    targets: &[(usize, BBox)],
    w: &LossWeights,
) -> Result<SetLoss> {
    if targets.len() > preds.len() {
        return Err(Error::TooManyTargets {
            targets: targets.len(),
            predictions: preds.len(),
        });
    }
    for p in preds {
        p.validate()?;
    }
    let real_classes = preds.first().map_or(0, |p| p.no_object_class());
    if preds.iter().any(|p| p.no_object_class() != real_classes) {
        return Err(Error::InvalidScores("score vectors differ in length".into()));
    }
    for (class, _) in targets {
        if *class >= real_classes {
            return Err(Error::InvalidScores(format!(
                "target class {class} outside the {real_classes} real classes"
            )));
        }
    }

    let mut cost = Vec::with_capacity(targets.len());
    for (class, tb) in targets {
        let row = preds
            .iter()
            .map(|p| pair_loss(p, *class, tb, w))
            .collect::<Result<Vec<_>>>()?;
        cost.push(row);
    }
    let assignment = min_cost_assignment(&cost);

    let mut matched = vec![false; preds.len()];
    let mut total = 0.0;
    for (t, &p) in assignment.iter().enumerate() {
        matched[p] = true;
        total += cost[t][p];
    }
    for (p, pred) in preds.iter().enumerate() {
        if !matched[p] {
            total += w.lambda_ce * pred.cross_entropy(pred.no_object_class());
        }
    }
    Ok(SetLoss { total, assignment })
}

/// Hungarian algorithm with row/column potentials for an `n × m` cost matrix,
/// `n ≤ m`. Returns the column assigned to each row. Runs in `O(n² m)`.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let m = cost[0].len();
    assert!(n <= m, "assignment needs at least as many columns as rows");

    // 1-based indices; column 0 is the virtual start.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];

    for row in 1..=n {
        owner[0] = row;
        let mut col0 = 0usize;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[col0] = true;
            let r = owner[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let reduced = cost[r - 1][j - 1] - u[r] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = col0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    col1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            col0 = col1;
            if owner[col0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[col0];
            owner[col0] = owner[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=m {
        if owner[j] != 0 {
            assignment[owner[j] - 1] = j - 1;
        }
    }
    assignment
}
