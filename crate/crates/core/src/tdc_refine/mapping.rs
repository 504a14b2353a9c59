use crate::docmodel::DetectedObject;

/// Minimum share of a header's area inside a table for the two to be linked.
pub const HEADER_CONTAINMENT: f64 = 0.9;

/// Maps each caption to the table on its page whose top edge is vertically
/// closest; ties go to the smaller `|x1|` offset, then the earlier table.
pub fn map_captions_to_tables(captions: &[DetectedObject], tables: &[DetectedObject]) -> Vec<Option<usize>> {
    captions
        .iter()
        .map(|c| {
            tables
                .iter()
                .enumerate()
                .filter(|(_, t)| t.page == c.page)
                .min_by(|(ia, a), (ib, b)| {
                    let da = (c.bbox.y1 - a.bbox.y1).abs();
                    let db = (c.bbox.y1 - b.bbox.y1).abs();
                    da.total_cmp(&db)
                        .then((c.bbox.x1 - a.bbox.x1).abs().total_cmp(&(c.bbox.x1 - b.bbox.x1).abs()))
                        .then(ia.cmp(ib))
                })
                .map(|(i, _)| i)
        })
        .collect()
}

/// Maps each header to the table containing the largest share of its area,
/// provided that share is at least [`HEADER_CONTAINMENT`]. Among equally
/// containing (nested) tables the smallest wins.
pub fn map_headers_to_tables(headers: &[DetectedObject], tables: &[DetectedObject]) -> Vec<Option<usize>> {
    headers
        .iter()
        .map(|h| {
            tables
                .iter()
                .enumerate()
                .filter(|(_, t)| t.page == h.page)
                .map(|(i, t)| (i, h.bbox.containment_in(&t.bbox), t.bbox.area()))
                .filter(|(_, ratio, _)| *ratio >= HEADER_CONTAINMENT)
                .max_by(|a, b| a.1.total_cmp(&b.1).then(b.2.total_cmp(&a.2)).then(b.0.cmp(&a.0)))
                .map(|(i, _, _)| i)
        })
        .collect()
}
