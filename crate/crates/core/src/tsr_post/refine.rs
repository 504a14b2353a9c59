use serde::Serialize;

use super::separators::median_of;
use super::TsrConfig;
use crate::docmodel::{DetectedObject, TsrClass};
use crate::error::{Error, Result};
use crate::geometry::{interval_iou, iou, nms, BBox};

/// Clean, non-overlapping rows and columns for one table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinedStructure {
    pub table: BBox,
    /// Sorted top to bottom, each spanning the full table width.
    pub rows: Vec<BBox>,
    /// Sorted left to right, each spanning the full table height.
    pub columns: Vec<BBox>,
    pub header_rows: Vec<usize>,
    pub spanning_rows: Vec<usize>,
}

/// Projection of a box onto one axis, so rows and columns share code.
#[derive(Clone, Copy)]
enum Axis {
    Vertical,
    Horizontal,
}

impl Axis {
    fn lo(self, b: &BBox) -> f64 {
        match self {
            Axis::Vertical => b.y1,
            Axis::Horizontal => b.x1,
        }
    }

    fn hi(self, b: &BBox) -> f64 {
        match self {
            Axis::Vertical => b.y2,
            Axis::Horizontal => b.x2,
        }
    }

    fn set(self, b: &mut BBox, lo: f64, hi: f64) {
        match self {
            Axis::Vertical => {
                b.y1 = lo;
                b.y2 = hi;
            }
            Axis::Horizontal => {
                b.x1 = lo;
                b.x2 = hi;
            }
        }
    }

    fn mid(self, b: &BBox) -> f64 {
        (self.lo(b) + self.hi(b)) * 0.5
    }

    /// Band covering `lo..hi` along this axis and the whole table across it.
    fn band(self, table: &BBox, lo: f64, hi: f64) -> BBox {
        let mut b = *table;
        self.set(&mut b, lo, hi);
        b
    }
}

/// Clips to the table along `axis`, dropping boxes left without extent.
fn clip(boxes: impl IntoIterator<Item = BBox>, table: &BBox, axis: Axis) -> Vec<BBox> {
    boxes
        .into_iter()
        .filter_map(|mut b| {
            let lo = axis.lo(&b).max(axis.lo(table));
            let hi = axis.hi(&b).min(axis.hi(table));
            (hi > lo).then(|| {
                axis.set(&mut b, lo, hi);
                b
            })
        })
        .collect()
}

/// Sorts along `axis` and moves the shared edge of each overlapping
/// neighbour pair to the midline of their overlap. A box that would be left
/// without extent (nested in its neighbour) is dropped.
fn snap(mut boxes: Vec<BBox>, axis: Axis) -> Vec<BBox> {
    boxes.sort_by(|a, b| {
        axis.mid(a)
            .total_cmp(&axis.mid(b))
            .then(axis.lo(a).total_cmp(&axis.lo(b)))
    });
    let mut out: Vec<BBox> = Vec::with_capacity(boxes.len());
    for mut b in boxes {
        if let Some(prev) = out.last_mut() {
            let overlap_lo = axis.lo(&b);
            let overlap_hi = axis.hi(prev);
            if overlap_hi > overlap_lo {
                let m = (overlap_lo + overlap_hi) * 0.5;
                if m <= axis.lo(prev) || m >= axis.hi(&b) {
                    continue;
                }
                let prev_lo = axis.lo(prev);
                axis.set(prev, prev_lo, m);
                let b_hi = axis.hi(&b);
                axis.set(&mut b, m, b_hi);
            }
        }
        out.push(b);
    }
    out
}

/// Adds separator bands that no row covers at `min_iou`; existing rows are
/// trimmed to abut the inserted band.
fn insert_missing_rows(mut rows: Vec<BBox>, separators: &[BBox], min_iou: f64) -> Vec<BBox> {
    for s in separators {
        if rows.iter().any(|r| iou(r, s) >= min_iou) {
            continue;
        }
        let sc = s.center().1;
        rows = rows
            .into_iter()
            .filter_map(|mut r| {
                if r.y2 <= s.y1 || r.y1 >= s.y2 {
                    return Some(r);
                }
                if r.center().1 < sc {
                    r.y2 = r.y2.min(s.y1);
                } else {
                    r.y1 = r.y1.max(s.y2);
                }
                (r.y2 > r.y1).then_some(r)
            })
            .collect();
        rows.push(*s);
        rows.sort_by(|a, b| a.y1.total_cmp(&b.y1));
    }
    rows
}

/// Adds a band for every uncovered stretch wider than `factor` × median
/// extent. With no boxes at all, the whole table becomes one band.
fn fill_gaps(mut boxes: Vec<BBox>, table: &BBox, axis: Axis, factor: f64, median: Option<f64>) -> Vec<BBox> {
    boxes.sort_by(|a, b| axis.lo(a).total_cmp(&axis.lo(b)));
    let Some(median) = median else {
        return vec![*table];
    };
    let limit = factor * median;
    let mut cursor = axis.lo(table);
    let mut out = Vec::with_capacity(boxes.len());
    for b in boxes {
        if axis.lo(&b) - cursor > limit {
            out.push(axis.band(table, cursor, axis.lo(&b)));
        }
        cursor = cursor.max(axis.hi(&b));
        out.push(b);
    }
    if axis.hi(table) - cursor > limit {
        out.push(axis.band(table, cursor, axis.hi(table)));
    }
    out
}

fn of_class(objects: &[DetectedObject], class: TsrClass) -> impl Iterator<Item = BBox> + '_ {
    objects
        .iter()
        .filter(move |o| o.tsr_class() == Some(class))
        .map(|o| o.bbox)
}

/// Rows whose vertical extent overlaps one of `marks` at `min_iou` or more.
/// Rows and marks are both treated as full-width bands.
fn flagged_rows(rows: &[BBox], marks: &[BBox], min_iou: f64) -> Vec<usize> {
    rows.iter()
        .enumerate()
        .filter(|(_, r)| {
            marks
                .iter()
                .any(|m| interval_iou((r.y1, r.y2), (m.y1, m.y2)) >= min_iou)
        })
        .map(|(i, _)| i)
        .collect()
}

/// Turns raw structure detections of one table into disjoint full-span
/// rows and columns.
///
/// In order: class-wise NMS; overlap snapping; insertion of separator bands
/// no detected row covers; extension to full table width/height; gap
/// filling; header and spanning-row flags.
pub fn refine_structure(
    raw: &[DetectedObject],
    separators: &[BBox],
    table: &BBox,
    cfg: &TsrConfig,
) -> Result<RefinedStructure> {
    let kept = nms(raw, cfg.nms_iou);

    let rows = snap(clip(of_class(&kept, TsrClass::TableRow), table, Axis::Vertical), Axis::Vertical);
    let columns = snap(
        clip(of_class(&kept, TsrClass::TableColumn), table, Axis::Horizontal),
        Axis::Horizontal,
    );
    let row_median = median_of(rows.iter().map(BBox::height));
    let col_median = median_of(columns.iter().map(BBox::width));

    let separators = clip(separators.iter().copied(), table, Axis::Vertical);
    let rows = insert_missing_rows(rows, &separators, cfg.missing_row_iou);
    let row_median = row_median.or_else(|| median_of(rows.iter().map(BBox::height)));

    let rows: Vec<BBox> = rows
        .into_iter()
        .map(|r| BBox::new(table.x1, r.y1, table.x2, r.y2))
        .collect();
    let columns: Vec<BBox> = columns
        .into_iter()
        .map(|c| BBox::new(c.x1, table.y1, c.x2, table.y2))
        .collect();
    if columns.is_empty() {
        return Err(Error::Unstructurable("no columns detected".into()));
    }

    let rows = fill_gaps(rows, table, Axis::Vertical, cfg.gap_factor, row_median);
    let columns = fill_gaps(columns, table, Axis::Horizontal, cfg.gap_factor, col_median);

    let headers: Vec<BBox> = of_class(&kept, TsrClass::TableColumnHeader).collect();
    let spanning: Vec<BBox> = of_class(&kept, TsrClass::TableSpanningRow).collect();
    Ok(RefinedStructure {
        table: *table,
        header_rows: flagged_rows(&rows, &headers, cfg.header_iou),
        spanning_rows: flagged_rows(&rows, &spanning, cfg.header_iou),
        rows,
        columns,
    })
}
