//! IoU-family box regression losses.
//!
//! All three losses are scale invariant and require boxes with positive
//! width and height; degenerate inputs are rejected rather than producing
//! NaN.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::bbox::{iou, BBox};
use crate::error::Result;

/// Which IoU-based term a set loss uses for box regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoxLossVariant {
    #[default]
    Giou,
    Diou,
    Ciou,
}

impl BoxLossVariant {
    pub fn loss(self, pred: &BBox, target: &BBox) -> Result<f64> {
        match self {
            BoxLossVariant::Giou => giou_loss(pred, target),
            BoxLossVariant::Diou => diou_loss(pred, target),
            BoxLossVariant::Ciou => ciou_loss(pred, target),
        }
    }
}

/// `1 - IoU + |C \ (B ∪ Bgt)| / |C|` with `C` the smallest enclosing box.
pub fn giou_loss(pred: &BBox, target: &BBox) -> Result<f64> {
    pred.require_area()?;
    target.require_area()?;
    let inter = pred.intersection_area(target);
    let union = pred.area() + target.area() - inter;
    let hull = pred.enclosing(target).area();
    Ok(1.0 - inter / union + (hull - union) / hull)
}

/// Center-distance penalty `ρ²/c²`, `c` the diagonal of the enclosing box.
fn center_penalty(pred: &BBox, target: &BBox) -> f64 {
    let (px, py) = pred.center();
    let (tx, ty) = target.center();
    let dist2 = (px - tx).powi(2) + (py - ty).powi(2);
    let hull = pred.enclosing(target);
    let diag2 = hull.width().powi(2) + hull.height().powi(2);
    dist2 / diag2
}

/// `1 - IoU + ρ²(b, bgt)/c²`.
pub fn diou_loss(pred: &BBox, target: &BBox) -> Result<f64> {
    pred.require_area()?;
    target.require_area()?;
    Ok(1.0 - iou(pred, target) + center_penalty(pred, target))
}

/// Aspect-ratio consistency term `4/π² (atan(wgt/hgt) - atan(w/h))²`.
pub fn aspect_penalty(pred: &BBox, target: &BBox) -> f64 {
    let d = (target.width() / target.height()).atan() - (pred.width() / pred.height()).atan();
    4.0 / (PI * PI) * d * d
}

/// DIoU plus `α·υ`, `α = υ / ((1 - IoU) + υ)`.
pub fn ciou_loss(pred: &BBox, target: &BBox) -> Result<f64> {
    pred.require_area()?;
    target.require_area()?;
    let overlap = iou(pred, target);
    let v = aspect_penalty(pred, target);
    let denom = (1.0 - overlap) + v;
    // identical boxes: v = 0 and 1 - IoU = 0, the trade-off term vanishes
    let alpha = if denom > 0.0 { v / denom } else { 0.0 };
    Ok(1.0 - overlap + center_penalty(pred, target) + alpha * v)
}
