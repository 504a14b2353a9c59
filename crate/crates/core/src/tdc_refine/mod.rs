//! Text side of table categorization: captions and headers are linked to
//! tables, read from OCR, and classified with naive Bayes models that split
//! the merged credit/debit label.

mod corpus;
mod mapping;
mod nb;
mod refine;
mod text;

pub use corpus::{
    read_corpus, read_corpus_from, samples_for, shipped_corpus, split_corpus, write_corpus, TextSample,
    SAMPLES_PER_CLASS,
};
pub use mapping::{map_captions_to_tables, map_headers_to_tables, HEADER_CONTAINMENT};
pub use nb::{NbModel, NbPrediction, NbVariant, TextCategory};
pub use refine::{refine_category, NbModels, Refinement};
pub use text::{extract_region_text, tokenize, RegionText, REGION_IOU, WORD_CONTAINMENT};

use crate::docmodel::{DetectedObject, OcrWord, TableCategory};

/// Caption and header text gathered for one table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TableText {
    pub caption: Option<RegionText>,
    pub header: Option<RegionText>,
}

fn merge(into: &mut Option<RegionText>, next: RegionText) {
    *into = Some(match into.take() {
        None => next,
        Some(prev) => {
            let mut joined = RegionText::concat(&prev, &next);
            joined.region = prev.region.enclosing(&next.region);
            joined
        }
    });
}

/// Reads caption and header text for every table in `tables`. Captions and
/// headers are taken from `detections` (any page); several captions mapped
/// to one table are joined top to bottom.
pub fn table_texts(tables: &[DetectedObject], detections: &[DetectedObject], words: &[OcrWord]) -> Vec<TableText> {
    let of = |cat: TableCategory| {
        let mut v: Vec<&DetectedObject> = detections.iter().filter(|d| d.category() == Some(cat)).collect();
        v.sort_by(|a, b| (a.page, a.bbox.y1, a.bbox.x1).partial_cmp(&(b.page, b.bbox.y1, b.bbox.x1)).unwrap());
        v.into_iter().cloned().collect::<Vec<_>>()
    };
    let captions = of(TableCategory::TableCaption);
    let headers = of(TableCategory::TableHeader);
    let mut out = vec![TableText::default(); tables.len()];

    let read = |d: &DetectedObject| extract_region_text(&d.bbox, words.iter().filter(|w| w.page == d.page));
    for (c, t) in captions.iter().zip(map_captions_to_tables(&captions, tables)) {
        if let Some(t) = t {
            merge(&mut out[t].caption, read(c));
        }
    }
    for (h, t) in headers.iter().zip(map_headers_to_tables(&headers, tables)) {
        if let Some(t) = t {
            merge(&mut out[t].header, read(h));
        }
    }
    out
}
