use crate::docmodel::OcrWord;
use crate::geometry::BBox;

fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    Some(if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) * 0.5
    })
}

pub(crate) fn median_of(xs: impl IntoIterator<Item = f64>) -> Option<f64> {
    median(xs.into_iter().collect())
}

/// Row bands derived from the top-aligned words of the leftmost (date)
/// column.
///
/// Words of the column are clustered by vertical center; a new cluster
/// starts when the center gap exceeds `gap_factor` times the median word
/// height. Each cluster's top edge opens a full-width band that runs to the
/// next cluster's top, the last one to the table bottom.
pub fn infer_row_separators(
    table: &BBox,
    words: &[OcrWord],
    date_column: Option<&BBox>,
    gap_factor: f64,
) -> Vec<BBox> {
    let in_table: Vec<&OcrWord> = words
        .iter()
        .filter(|w| {
            let (cx, cy) = w.bbox.center();
            table.contains_point(cx, cy)
        })
        .collect();

    let (left, right) = match date_column {
        Some(c) => (c.x1, c.x2),
        None => match in_table.iter().min_by(|a, b| a.bbox.x1.total_cmp(&b.bbox.x1)) {
            Some(w) => (w.bbox.x1, w.bbox.x2),
            None => return Vec::new(),
        },
    };
    let mut column: Vec<&OcrWord> = in_table
        .into_iter()
        .filter(|w| {
            let cx = w.bbox.center().0;
            cx >= left && cx <= right
        })
        .collect();
    let Some(med_h) = median_of(column.iter().map(|w| w.bbox.height())) else {
        return Vec::new();
    };
    let gap = gap_factor * med_h;

    column.sort_by(|a, b| a.bbox.center().1.total_cmp(&b.bbox.center().1));
    let mut tops: Vec<f64> = Vec::new();
    let mut last_center = f64::NEG_INFINITY;
    for w in column {
        let cy = w.bbox.center().1;
        if cy - last_center > gap {
            tops.push(w.bbox.y1);
        } else if let Some(t) = tops.last_mut() {
            *t = t.min(w.bbox.y1);
        }
        last_center = cy;
    }

    let mut bands = Vec::with_capacity(tops.len());
    for (i, &top) in tops.iter().enumerate() {
        let bottom = tops.get(i + 1).copied().unwrap_or(table.y2);
        let top = top.max(table.y1);
        if bottom > top {
            bands.push(BBox::new(table.x1, top, table.x2, bottom));
        }
    }
    bands
}
