//! Box primitives, IoU-family losses, set-prediction matching and NMS.

mod bbox;
mod loss;
mod matching;
mod nms;

pub use bbox::{interval_iou, iou, BBox};
pub(crate) use bbox::lex_cmp;
pub use loss::{aspect_penalty, ciou_loss, diou_loss, giou_loss, BoxLossVariant};
pub use matching::{
    l1_distance, min_cost_assignment, pair_loss, set_prediction_loss, LossWeights, Prediction,
    SetLoss,
};
pub use nms::nms;
