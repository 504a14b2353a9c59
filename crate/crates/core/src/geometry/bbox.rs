use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned rectangle in page pixels, origin top-left, y growing downward.
///
/// Serialized as `[x1, y1, x2, y2]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct BBox {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl From<[f64; 4]> for BBox {
    fn from(c: [f64; 4]) -> Self {
        BBox::new(c[0], c[1], c[2], c[3])
    }
}

impl From<BBox> for [f64; 4] {
    fn from(b: BBox) -> Self {
        b.to_array()
    }
}

impl BBox {
    pub const fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        BBox { x1, y1, x2, y2 }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x1, self.y1, self.x2, self.y2]
    }

    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> f64 {
        self.y2 - self.y1
    }

    /// Area, zero for inverted or degenerate boxes.
    pub fn area(&self) -> f64 {
        self.width().max(0.0) * self.height().max(0.0)
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.x1 + self.x2) * 0.5, (self.y1 + self.y2) * 0.5)
    }

    pub fn is_ordered(&self) -> bool {
        self.x1 <= self.x2 && self.y1 <= self.y2
    }

    /// Positive width and height.
    pub fn has_area(&self) -> bool {
        self.x2 > self.x1 && self.y2 > self.y1
    }

    pub(crate) fn require_area(&self) -> Result<()> {
        if self.has_area() && self.to_array().iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::DegenerateBox(self.to_array()))
        }
    }

    pub fn intersection(&self, other: &BBox) -> Option<BBox> {
        let b = BBox::new(
            self.x1.max(other.x1),
            self.y1.max(other.y1),
            self.x2.min(other.x2),
            self.y2.min(other.y2),
        );
        b.is_ordered().then_some(b)
    }

    pub fn intersection_area(&self, other: &BBox) -> f64 {
        let w = self.x2.min(other.x2) - self.x1.max(other.x1);
        let h = self.y2.min(other.y2) - self.y1.max(other.y1);
        w.max(0.0) * h.max(0.0)
    }

    /// Smallest box covering both.
    pub fn enclosing(&self, other: &BBox) -> BBox {
        BBox::new(
            self.x1.min(other.x1),
            self.y1.min(other.y1),
            self.x2.max(other.x2),
            self.y2.max(other.y2),
        )
    }

    /// Fraction of `self`'s area lying inside `container`; 0 for zero-area `self`.
    pub fn containment_in(&self, container: &BBox) -> f64 {
        let area = self.area();
        if area <= 0.0 {
            return 0.0;
        }
        self.intersection_area(container) / area
    }

    pub fn contains_point(&self, x: f64, y: f64) -> bool {
        x >= self.x1 && x <= self.x2 && y >= self.y1 && y <= self.y2
    }

    pub fn clamp_to(&self, bounds: &BBox) -> BBox {
        BBox::new(
            self.x1.clamp(bounds.x1, bounds.x2),
            self.y1.clamp(bounds.y1, bounds.y2),
            self.x2.clamp(bounds.x1, bounds.x2),
            self.y2.clamp(bounds.y1, bounds.y2),
        )
    }

    pub fn translate(&self, dx: f64, dy: f64) -> BBox {
        BBox::new(self.x1 + dx, self.y1 + dy, self.x2 + dx, self.y2 + dy)
    }

    /// Grows the box by `pixels` on every side.
    pub fn pad(&self, pixels: f64) -> BBox {
        BBox::new(
            self.x1 - pixels,
            self.y1 - pixels,
            self.x2 + pixels,
            self.y2 + pixels,
        )
    }

    pub(crate) fn lex_key(&self) -> [f64; 4] {
        [self.y1, self.x1, self.x2, self.y2]
    }
}

/// Total order on `(y1, x1, x2, y2)`, used for deterministic tie-breaks.
pub(crate) fn lex_cmp(a: &BBox, b: &BBox) -> std::cmp::Ordering {
    let (ka, kb) = (a.lex_key(), b.lex_key());
    ka.iter()
        .zip(kb.iter())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Intersection over union; 0 when the union is empty.
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let inter = a.intersection_area(b);
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

/// One-dimensional IoU of two closed intervals.
pub fn interval_iou(a: (f64, f64), b: (f64, f64)) -> f64 {
    let inter = (a.1.min(b.1) - a.0.max(b.0)).max(0.0);
    let union = (a.1 - a.0).max(0.0) + (b.1 - b.0).max(0.0) - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Counts unit pixels covered by integer-coordinate boxes.
    fn raster_iou(a: &BBox, b: &BBox) -> f64 {
        let (mut inter, mut union) = (0u32, 0u32);
        for y in 0..40 {
            for x in 0..40 {
                let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
                let ia = a.contains_point(px, py);
                let ib = b.contains_point(px, py);
                inter += u32::from(ia && ib);
                union += u32::from(ia || ib);
            }
        }
        inter as f64 / union as f64
    }

    #[test]
    fn iou_fixtures() {
        let a = BBox::new(0.0, 0.0, 10.0, 10.0);
        assert_eq!(iou(&a, &a), 1.0);
        assert_eq!(iou(&a, &BBox::new(20.0, 20.0, 30.0, 30.0)), 0.0);
        let b = BBox::new(5.0, 0.0, 15.0, 10.0);
        assert!((iou(&a, &b) - 1.0 / 3.0).abs() < 1e-12);
        assert!((iou(&a, &b) - raster_iou(&a, &b)).abs() < 1e-12);
    }

    #[test]
    fn zero_area_union() {
        let p = BBox::new(3.0, 3.0, 3.0, 3.0);
        assert_eq!(iou(&p, &p), 0.0);
    }

    #[test]
    fn containment_and_clamp() {
        let page = BBox::new(0.0, 0.0, 100.0, 100.0);
        let b = BBox::new(-10.0, 50.0, 50.0, 120.0);
        let c = b.clamp_to(&page);
        assert_eq!(c, BBox::new(0.0, 50.0, 50.0, 100.0));
        assert!(c.area() <= b.area());
        assert!((BBox::new(0.0, 0.0, 10.0, 10.0).containment_in(&BBox::new(5.0, 0.0, 20.0, 10.0)) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn interval_iou_basic() {
        assert!((interval_iou((0.0, 10.0), (5.0, 15.0)) - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(interval_iou((0.0, 1.0), (2.0, 3.0)), 0.0);
    }
}
