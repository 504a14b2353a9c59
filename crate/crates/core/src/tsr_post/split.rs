//! Horizontal splitting of long tables and re-merging of per-part detections.

use std::ops::Range;

use crate::docmodel::{DetectedObject, TsrClass};
use crate::error::{Error, Result};
use crate::geometry::{interval_iou, lex_cmp, nms, BBox};

/// Partition of one table into horizontally stacked, overlapping sub-images.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPlan {
    pub original: BBox,
    /// Sub-image boxes in page coordinates, top to bottom.
    pub parts: Vec<BBox>,
    /// Split lines between consecutive parts; `parts[i]` and `parts[i + 1]`
    /// overlap by `margin` centred on `cuts[i]`.
    pub cuts: Vec<f64>,
    /// Indices into the row candidates (sorted by vertical center) owned by
    /// each part.
    pub row_ranges: Vec<Range<usize>>,
    pub margin: f64,
}

impl SplitPlan {
    pub fn identity(table: &BBox, rows: usize) -> SplitPlan {
        SplitPlan {
            original: *table,
            parts: vec![*table],
            cuts: Vec::new(),
            row_ranges: std::iter::once(0..rows).collect(),
            margin: 0.0,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.parts.len() == 1
    }

    /// Vertical span owned exclusively by part `i` (between its cut lines).
    fn core(&self, i: usize) -> (f64, f64) {
        let top = if i == 0 { self.original.y1 } else { self.cuts[i - 1] };
        let bottom = if i + 1 == self.parts.len() {
            self.original.y2
        } else {
            self.cuts[i]
        };
        (top, bottom)
    }

    /// Crops page-coordinate detections into part-local coordinates, as a
    /// detector run on each sub-image would report them.
    ///
    /// Row-like objects go to every part that fully contains them, or are
    /// clipped into the part owning their center. Column-like objects are
    /// clipped to each part they cross.
    pub fn crop(&self, detections: &[DetectedObject]) -> Vec<Vec<DetectedObject>> {
        let mut out = vec![Vec::new(); self.parts.len()];
        for d in detections {
            for (i, part) in self.parts.iter().enumerate() {
                let local = |b: BBox| {
                    let mut o = d.clone();
                    o.bbox = b.translate(-part.x1, -part.y1);
                    o
                };
                if is_row_like(d) {
                    let inside = d.bbox.y1 >= part.y1 && d.bbox.y2 <= part.y2;
                    let (top, bottom) = self.core(i);
                    let cy = d.bbox.center().1;
                    let owned = cy >= top && (cy < bottom || i + 1 == self.parts.len());
                    if inside {
                        out[i].push(local(d.bbox));
                    } else if owned {
                        if let Some(c) = d.bbox.intersection(part) {
                            out[i].push(local(c));
                        }
                    }
                } else if let Some(c) = d.bbox.intersection(part) {
                    if c.height() > 0.0 {
                        out[i].push(local(c));
                    }
                }
            }
        }
        out
    }
}

fn is_row_like(d: &DetectedObject) -> bool {
    matches!(
        d.tsr_class(),
        Some(TsrClass::TableRow | TsrClass::TableColumnHeader | TsrClass::TableSpanningRow)
    )
}

/// Splits a table with more than `max_rows` row candidates at the row gap
/// closest to the vertical midpoint, recursively, until every part holds at
/// most `max_rows` rows. Cut lines are floored to whole pixels.
pub fn split_long_table_with(
    table: &BBox,
    row_candidates: &[BBox],
    margin: f64,
    max_rows: usize,
) -> SplitPlan {
    let max_rows = max_rows.max(1);
    let mut rows: Vec<BBox> = row_candidates.to_vec();
    rows.sort_by(|a, b| a.center().1.total_cmp(&b.center().1).then(lex_cmp(a, b)));
    if rows.len() <= max_rows {
        return SplitPlan::identity(table, rows.len());
    }

    let mut cuts = Vec::new();
    let mut ranges = Vec::new();
    split_range(&rows, 0..rows.len(), table.y1, table.y2, max_rows, &mut cuts, &mut ranges);

    let half = margin * 0.5;
    let parts = (0..ranges.len())
        .map(|i| {
            let top = if i == 0 { table.y1 } else { (cuts[i - 1] - half).max(table.y1) };
            let bottom = if i + 1 == ranges.len() {
                table.y2
            } else {
                (cuts[i] + half).min(table.y2)
            };
            BBox::new(table.x1, top, table.x2, bottom)
        })
        .collect();
    SplitPlan {
        original: *table,
        parts,
        cuts,
        row_ranges: ranges,
        margin,
    }
}

fn split_range(
    rows: &[BBox],
    range: Range<usize>,
    top: f64,
    bottom: f64,
    max_rows: usize,
    cuts: &mut Vec<f64>,
    ranges: &mut Vec<Range<usize>>,
) {
    if range.len() <= max_rows {
        ranges.push(range);
        return;
    }
    let mid = (top + bottom) * 0.5;
    let (k, line) = (range.start + 1..range.end)
        .map(|k| (k, ((rows[k - 1].y2 + rows[k].y1) * 0.5).floor()))
        .min_by(|a, b| (a.1 - mid).abs().total_cmp(&(b.1 - mid).abs()).then(a.0.cmp(&b.0)))
        .expect("range holds more than one row");
    split_range(rows, range.start..k, top, line, max_rows, cuts, ranges);
    cuts.push(line);
    split_range(rows, k..range.end, line, bottom, max_rows, cuts, ranges);
}

/// Default split: more than 20 rows, 10 px overlap.
pub fn split_long_table(table: &BBox, row_candidates: &[BBox], margin: f64) -> SplitPlan {
    split_long_table_with(table, row_candidates, margin, super::MAX_ROWS_PER_PART)
}

/// Translates per-part detections back to page coordinates and reconciles
/// the overlap margins: duplicated row-like objects are removed by NMS and
/// column-like fragments whose horizontal extents overlap at
/// `column_iou` or more are unioned.
pub fn merge_split_outputs(
    plan: &SplitPlan,
    per_part: &[Vec<DetectedObject>],
    nms_iou: f64,
    column_iou: f64,
) -> Result<Vec<DetectedObject>> {
    if per_part.len() != plan.parts.len() {
        return Err(Error::PartCountMismatch {
            expected: plan.parts.len(),
            actual: per_part.len(),
        });
    }
    let mut global: Vec<DetectedObject> = Vec::new();
    for (part, dets) in plan.parts.iter().zip(per_part) {
        global.extend(dets.iter().map(|d| {
            let mut g = d.clone();
            g.bbox = d.bbox.translate(part.x1, part.y1);
            g
        }));
    }
    if plan.is_identity() {
        return Ok(global);
    }

    let (row_like, col_like): (Vec<_>, Vec<_>) = global.into_iter().partition(is_row_like);
    let mut merged = nms(&row_like, nms_iou);

    let mut cols = col_like;
    cols.sort_by(|a, b| {
        a.label
            .cmp(&b.label)
            .then(a.bbox.x1.total_cmp(&b.bbox.x1))
            .then(lex_cmp(&a.bbox, &b.bbox))
    });
    let mut groups: Vec<DetectedObject> = Vec::new();
    for c in cols {
        let hit = groups.iter_mut().find(|g| {
            g.label == c.label
                && g.page == c.page
                && interval_iou((g.bbox.x1, g.bbox.x2), (c.bbox.x1, c.bbox.x2)) >= column_iou
        });
        match hit {
            Some(g) => {
                g.bbox = g.bbox.enclosing(&c.bbox);
                g.score = g.score.max(c.score);
            }
            None => groups.push(c),
        }
    }
    merged.extend(groups);
    merged.sort_by(|a, b| a.label.cmp(&b.label).then(lex_cmp(&a.bbox, &b.bbox)));
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docmodel::Label;

    fn rows(n: usize, top: f64, h: f64) -> Vec<BBox> {
        (0..n)
            .map(|i| BBox::new(0.0, top + i as f64 * h, 500.0, top + (i + 1) as f64 * h))
            .collect()
    }

    fn det(b: BBox, c: TsrClass) -> DetectedObject {
        DetectedObject::new(b, Label::Tsr(c), 0.9, 0)
    }

    #[test]
    fn short_table_identity() {
        let t = BBox::new(0.0, 100.0, 500.0, 430.0);
        let plan = split_long_table(&t, &rows(15, 100.0, 22.0), 10.0);
        assert!(plan.is_identity());
        assert_eq!(plan.parts, vec![t]);
    }

    #[test]
    fn thirty_rows_split_in_half() {
        let t = BBox::new(0.0, 100.0, 500.0, 760.0);
        let plan = split_long_table(&t, &rows(30, 100.0, 22.0), 10.0);
        assert_eq!(plan.row_ranges, vec![0..15, 15..30]);
        assert_eq!(plan.cuts, vec![430.0]);
        assert_eq!(plan.parts[0], BBox::new(0.0, 100.0, 500.0, 435.0));
        assert_eq!(plan.parts[1], BBox::new(0.0, 425.0, 500.0, 760.0));
    }

    #[test]
    fn forty_five_rows_bounded_and_covering() {
        let t = BBox::new(0.0, 0.0, 500.0, 45.0 * 22.0);
        let plan = split_long_table(&t, &rows(45, 0.0, 22.0), 10.0);
        assert!(plan.row_ranges.iter().all(|r| r.len() <= 20));
        assert_eq!(plan.row_ranges.iter().map(Range::len).sum::<usize>(), 45);
        assert_eq!(plan.parts.first().unwrap().y1, t.y1);
        assert_eq!(plan.parts.last().unwrap().y2, t.y2);
        for w in plan.parts.windows(2) {
            assert_eq!(w[0].y2 - w[1].y1, 10.0);
        }
    }

    #[test]
    fn identity_merge_is_passthrough() {
        let t = BBox::new(10.0, 100.0, 510.0, 430.0);
        let whole: Vec<_> = rows(15, 100.0, 22.0)
            .into_iter()
            .map(|b| det(b.translate(10.0, 0.0), TsrClass::TableRow))
            .collect();
        let plan = split_long_table(&t, &whole.iter().map(|d| d.bbox).collect::<Vec<_>>(), 10.0);
        let parts = plan.crop(&whole);
        assert_eq!(merge_split_outputs(&plan, &parts, 0.5, 0.7).unwrap(), whole);
    }

    #[test]
    fn duplicate_boundary_row_removed() {
        let t = BBox::new(0.0, 0.0, 500.0, 100.0);
        let plan = SplitPlan {
            original: t,
            parts: vec![BBox::new(0.0, 0.0, 500.0, 60.0), BBox::new(0.0, 40.0, 500.0, 100.0)],
            cuts: vec![50.0],
            row_ranges: vec![0..3, 3..5],
            margin: 20.0,
        };
        let a = vec![
            det(BBox::new(0.0, 0.0, 500.0, 20.0), TsrClass::TableRow),
            det(BBox::new(0.0, 20.0, 500.0, 40.0), TsrClass::TableRow),
            det(BBox::new(0.0, 40.0, 500.0, 60.0), TsrClass::TableRow),
        ];
        // part 1 sees the 40..60 row again, local origin y = 40
        let b = vec![
            det(BBox::new(0.0, 0.0, 500.0, 20.0), TsrClass::TableRow),
            det(BBox::new(0.0, 20.0, 500.0, 40.0), TsrClass::TableRow),
            det(BBox::new(0.0, 40.0, 500.0, 60.0), TsrClass::TableRow),
        ];
        let merged = merge_split_outputs(&plan, &[a, b], 0.5, 0.7).unwrap();
        assert_eq!(merged.len(), 5);
        let ys: Vec<f64> = merged.iter().map(|d| d.bbox.y1).collect();
        assert_eq!(ys, [0.0, 20.0, 40.0, 60.0, 80.0]);
    }

    #[test]
    fn column_fragments_unioned() {
        let t = BBox::new(0.0, 0.0, 500.0, 100.0);
        let plan = SplitPlan {
            original: t,
            parts: vec![BBox::new(0.0, 0.0, 500.0, 60.0), BBox::new(0.0, 40.0, 500.0, 100.0)],
            cuts: vec![50.0],
            row_ranges: vec![0..1, 1..2],
            margin: 20.0,
        };
        let a = vec![det(BBox::new(100.0, 0.0, 200.0, 60.0), TsrClass::TableColumn)];
        let b = vec![det(BBox::new(102.0, 0.0, 201.0, 60.0), TsrClass::TableColumn)];
        let merged = merge_split_outputs(&plan, &[a, b], 0.5, 0.7).unwrap();
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].bbox, BBox::new(100.0, 0.0, 201.0, 100.0));
    }

    #[test]
    fn part_count_mismatch() {
        let t = BBox::new(0.0, 0.0, 500.0, 100.0);
        let plan = SplitPlan::identity(&t, 3);
        assert!(matches!(
            merge_split_outputs(&plan, &[vec![], vec![]], 0.5, 0.7),
            Err(Error::PartCountMismatch { expected: 1, actual: 2 })
        ));
    }
}
