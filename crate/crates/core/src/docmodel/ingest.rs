//! JSON ingestion format.
//!
//! ```json
//! {
//!   "pages":   [{"index": 0, "width": 1700, "height": 2200}],
//!   "tdc":     [{"page": 0, "label": "credit_debit", "score": 0.97, "box": [x1, y1, x2, y2]}],
//!   "tsr":     [{"page": 0, "label": "table_row", "score": 0.91, "box": [x1, y1, x2, y2]}],
//!   "ocr":     [{"page": 0, "text": "01/05", "box": [x1, y1, x2, y2], "confidence": 0.99}],
//!   "summary": {"opening_cents": 100000, "closing_cents": 85000, "currency": "USD"}
//! }
//! ```
//!
//! Unknown fields are ignored and reported as warnings.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::types::{
    DetectedObject, Label, OcrWord, PageImage, StatementDocument, Summary, Taxonomy,
};
use super::validate::{Warning, WarningKind};
use crate::error::{Error, Result};
use crate::geometry::BBox;

#[derive(Deserialize)]
struct RawDocument {
    pages: Vec<Value>,
    #[serde(default)]
    tdc: Vec<Value>,
    #[serde(default)]
    tsr: Vec<Value>,
    #[serde(default)]
    ocr: Vec<Value>,
    #[serde(default)]
    summary: Option<Value>,
    #[serde(flatten)]
    extra: BTreeMap<String, Value>,
}

#[derive(Deserialize)]
struct RawPage {
    index: usize,
    width: u32,
    height: u32,
    #[serde(default)]
    dpi: Option<u32>,
    #[serde(flatten)]
    extra: BTreeMap<String, Value>,
}

#[derive(Deserialize)]
struct RawDetection {
    page: usize,
    label: String,
    score: f64,
    #[serde(rename = "box")]
    bbox: [f64; 4],
    #[serde(flatten)]
    extra: BTreeMap<String, Value>,
}

#[derive(Deserialize)]
struct RawWord {
    page: usize,
    text: String,
    #[serde(rename = "box")]
    bbox: [f64; 4],
    #[serde(default)]
    confidence: Option<f64>,
    #[serde(flatten)]
    extra: BTreeMap<String, Value>,
}

#[derive(Deserialize)]
struct RawSummary {
    opening_cents: i64,
    closing_cents: i64,
    #[serde(default)]
    currency: String,
    #[serde(flatten)]
    extra: BTreeMap<String, Value>,
}

#[derive(Serialize)]
struct OutDetection<'a> {
    page: usize,
    label: &'a str,
    score: f64,
    #[serde(rename = "box")]
    bbox: [f64; 4],
}

#[derive(Serialize)]
struct OutWord<'a> {
    page: usize,
    text: &'a str,
    #[serde(rename = "box")]
    bbox: [f64; 4],
    #[serde(skip_serializing_if = "Option::is_none")]
    confidence: Option<f64>,
}

#[derive(Serialize)]
struct OutDocument<'a> {
    pages: &'a [PageImage],
    tdc: Vec<OutDetection<'a>>,
    tsr: Vec<OutDetection<'a>>,
    ocr: Vec<OutWord<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    summary: Option<&'a Summary>,
}

fn record_err(section: &'static str, index: usize, message: impl Into<String>) -> Error {
    Error::Record {
        section,
        index,
        message: message.into(),
    }
}

fn note_extra(
    warnings: &mut Vec<Warning>,
    location: &str,
    extra: &BTreeMap<String, Value>,
) {
    for key in extra.keys() {
        warnings.push(Warning::new(
            WarningKind::UnknownField,
            format!("{location}: unknown field `{key}` ignored"),
        ));
    }
}

fn check_box(section: &'static str, index: usize, c: [f64; 4]) -> Result<BBox> {
    if c.iter().any(|v| !v.is_finite()) {
        return Err(record_err(section, index, "non-finite coordinate"));
    }
    let b = BBox::from(c);
    if b.x2 < b.x1 {
        return Err(record_err(section, index, "x2 < x1"));
    }
    if b.y2 < b.y1 {
        return Err(record_err(section, index, "y2 < y1"));
    }
    Ok(b)
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_raw(text: &str) -> Result<RawDocument> {
    serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
}

fn parse_pages(raw: &[Value], warnings: &mut Vec<Warning>) -> Result<Vec<PageImage>> {
    let mut pages = Vec::with_capacity(raw.len());
    for (i, v) in raw.iter().enumerate() {
        let p: RawPage =
            serde_json::from_value(v.clone()).map_err(|e| record_err("pages", i, e.to_string()))?;
        if p.width == 0 || p.height == 0 {
            return Err(record_err("pages", i, "width and height must be positive"));
        }
        if p.dpi == Some(0) {
            return Err(record_err("pages", i, "dpi must be positive"));
        }
        note_extra(warnings, &format!("pages record {i}"), &p.extra);
        pages.push(PageImage {
            page_index: p.index,
            width: p.width,
            height: p.height,
            dpi: p.dpi,
        });
    }
    let mut indices: Vec<usize> = pages.iter().map(|p| p.page_index).collect();
    indices.sort_unstable();
    if indices.iter().enumerate().any(|(i, &p)| i != p) {
        return Err(Error::Document(
            "page indices must be unique and contiguous from 0".into(),
        ));
    }
    Ok(pages)
}

fn parse_detection_section(
    raw: &[Value],
    taxonomy: Taxonomy,
    pages: &[PageImage],
    warnings: &mut Vec<Warning>,
) -> Result<Vec<DetectedObject>> {
    let section = taxonomy.section();
    let mut out = Vec::with_capacity(raw.len());
    for (i, v) in raw.iter().enumerate() {
        let d: RawDetection =
            serde_json::from_value(v.clone()).map_err(|e| record_err(section, i, e.to_string()))?;
        let label = Label::parse(taxonomy, &d.label)
            .ok_or_else(|| record_err(section, i, format!("unknown label `{}`", d.label)))?;
        if !(0.0..=1.0).contains(&d.score) {
            return Err(record_err(
                section,
                i,
                format!("score {} outside [0, 1]", d.score),
            ));
        }
        let bbox = check_box(section, i, d.bbox)?;
        let page = pages
            .iter()
            .find(|p| p.page_index == d.page)
            .ok_or_else(|| record_err(section, i, format!("page {} does not exist", d.page)))?;
        note_extra(warnings, &format!("{section} record {i}"), &d.extra);
        out.push(DetectedObject::new(
            bbox.clamp_to(&page.bounds()),
            label,
            d.score,
            d.page,
        ));
    }
    Ok(out)
}

fn parse_ocr_section(
    raw: &[Value],
    pages: &[PageImage],
    warnings: &mut Vec<Warning>,
) -> Result<Vec<OcrWord>> {
    let mut out = Vec::with_capacity(raw.len());
    for (i, v) in raw.iter().enumerate() {
        let w: RawWord =
            serde_json::from_value(v.clone()).map_err(|e| record_err("ocr", i, e.to_string()))?;
        if w.text.trim().is_empty() {
            return Err(record_err("ocr", i, "empty text"));
        }
        if let Some(c) = w.confidence {
            if !(0.0..=1.0).contains(&c) {
                return Err(record_err("ocr", i, format!("confidence {c} outside [0, 1]")));
            }
        }
        let bbox = check_box("ocr", i, w.bbox)?;
        let page = pages
            .iter()
            .find(|p| p.page_index == w.page)
            .ok_or_else(|| record_err("ocr", i, format!("page {} does not exist", w.page)))?;
        note_extra(warnings, &format!("ocr record {i}"), &w.extra);
        out.push(OcrWord {
            text: w.text,
            bbox: bbox.clamp_to(&page.bounds()),
            page: w.page,
            confidence: w.confidence,
        });
    }
    Ok(out)
}

impl StatementDocument {
    /// Parses an ingestion document, returning it with any unknown-field
    /// warnings.
    pub fn from_json_str(text: &str) -> Result<(StatementDocument, Vec<Warning>)> {
        let raw = parse_raw(text)?;
        let mut warnings = Vec::new();
        note_extra(&mut warnings, "document", &raw.extra);
        let pages = parse_pages(&raw.pages, &mut warnings)?;
        let tdc = parse_detection_section(&raw.tdc, Taxonomy::Tdc, &pages, &mut warnings)?;
        let tsr = parse_detection_section(&raw.tsr, Taxonomy::Tsr, &pages, &mut warnings)?;
        let ocr = parse_ocr_section(&raw.ocr, &pages, &mut warnings)?;
        let summary = match raw.summary {
            None | Some(Value::Null) => None,
            Some(v) => {
                let s: RawSummary = serde_json::from_value(v)
                    .map_err(|e| Error::Document(format!("summary: {e}")))?;
                note_extra(&mut warnings, "summary", &s.extra);
                Some(Summary {
                    opening_cents: s.opening_cents,
                    closing_cents: s.closing_cents,
                    currency: s.currency,
                })
            }
        };
        Ok((
            StatementDocument {
                pages,
                tdc,
                tsr,
                ocr,
                summary,
            },
            warnings,
        ))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<(StatementDocument, Vec<Warning>)> {
        Self::from_json_str(&read_file(path.as_ref())?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let det = |d: &'_ DetectedObject| OutDetection {
            page: d.page,
            label: d.label.as_str(),
            score: d.score,
            bbox: d.bbox.to_array(),
        };
        let doc = OutDocument {
            pages: &self.pages,
            tdc: self.tdc.iter().map(det).collect(),
            tsr: self.tsr.iter().map(det).collect(),
            ocr: self
                .ocr
                .iter()
                .map(|w| OutWord {
                    page: w.page,
                    text: &w.text,
                    bbox: w.bbox.to_array(),
                    confidence: w.confidence,
                })
                .collect(),
            summary: self.summary.as_ref(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json_string()? + "\n").map_err(|e| Error::io(path, e))
    }

    /// Balances, or an error naming the missing `summary` field.
    pub fn require_summary(&self) -> Result<&Summary> {
        self.summary.as_ref().ok_or(Error::MissingField("summary"))
    }
}

/// Reads one detection section of an ingestion file.
pub fn parse_detections(path: impl AsRef<Path>, taxonomy: Taxonomy) -> Result<Vec<DetectedObject>> {
    let raw = parse_raw(&read_file(path.as_ref())?)?;
    let mut warnings = Vec::new();
    let pages = parse_pages(&raw.pages, &mut warnings)?;
    let section = match taxonomy {
        Taxonomy::Tdc => &raw.tdc,
        Taxonomy::Tsr => &raw.tsr,
    };
    parse_detection_section(section, taxonomy, &pages, &mut warnings)
}

/// Reads the OCR section of an ingestion file.
pub fn parse_ocr(path: impl AsRef<Path>) -> Result<Vec<OcrWord>> {
    let raw = parse_raw(&read_file(path.as_ref())?)?;
    let mut warnings = Vec::new();
    let pages = parse_pages(&raw.pages, &mut warnings)?;
    parse_ocr_section(&raw.ocr, &pages, &mut warnings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::docmodel::{TableCategory, TsrClass};
    use proptest::prelude::*;
    use serde_json::json;

    fn base() -> Value {
        json!({
            "pages": [{"index": 0, "width": 1000, "height": 1000},
                      {"index": 1, "width": 1000, "height": 1000},
                      {"index": 2, "width": 1000, "height": 1000}],
            "tdc": [{"page": 0, "label": "credit_debit", "score": 0.9, "box": [10, 10, 500, 400]}],
            "tsr": [
                {"page": 0, "label": "table", "score": 0.9, "box": [10, 10, 500, 400]},
                {"page": 0, "label": "table_row", "score": 0.8, "box": [10, 10, 500, 40]},
                {"page": 0, "label": "table_column", "score": 0.7, "box": [10, 10, 100, 400]}
            ],
            "ocr": [{"page": 0, "text": "Date", "box": [12, 12, 44, 26], "confidence": 0.99}],
            "summary": {"opening_cents": 100, "closing_cents": 100, "currency": "USD"}
        })
    }

    fn parse(v: &Value) -> Result<(StatementDocument, Vec<Warning>)> {
        StatementDocument::from_json_str(&v.to_string())
    }

    #[test]
    fn valid_document_keeps_order() {
        let (doc, warnings) = parse(&base()).unwrap();
        assert!(warnings.is_empty());
        let classes: Vec<_> = doc.tsr.iter().map(|d| d.tsr_class().unwrap()).collect();
        assert_eq!(classes, [TsrClass::Table, TsrClass::TableRow, TsrClass::TableColumn]);
        assert_eq!(doc.tdc[0].category(), Some(TableCategory::CreditDebit));
        assert_eq!(doc.summary.unwrap().opening_cents, 100);
    }

    #[test]
    fn bad_label_names_label_and_index() {
        let mut v = base();
        v["tsr"][2]["label"] = json!("table_rw");
        let msg = parse(&v).unwrap_err().to_string();
        assert!(msg.contains("table_rw") && msg.contains("record 2"), "{msg}");
    }

    #[test]
    fn inverted_box_rejected() {
        let mut v = base();
        v["tsr"][1]["box"] = json!([50, 10, 40, 20]);
        let msg = parse(&v).unwrap_err().to_string();
        assert_eq!(msg, "tsr record 1: x2 < x1");
    }

    #[test]
    fn score_and_page_checks() {
        let mut v = base();
        v["tdc"][0]["score"] = json!(1.5);
        assert!(parse(&v).unwrap_err().to_string().contains("score"));
        let mut v = base();
        v["ocr"][0]["page"] = json!(7);
        assert!(parse(&v).unwrap_err().to_string().contains("page 7"));
        let mut v = base();
        v["ocr"][0]["text"] = json!("  ");
        assert!(parse(&v).unwrap_err().to_string().contains("empty text"));
    }

    #[test]
    fn boxes_clamped_to_page() {
        let mut v = base();
        v["tsr"][1]["box"] = json!([-5, 990, 1200, 1010]);
        let (doc, _) = parse(&v).unwrap();
        assert_eq!(doc.tsr[1].bbox, BBox::new(0.0, 990.0, 1000.0, 1000.0));
    }

    #[test]
    fn unknown_fields_warn() {
        let mut v = base();
        v["tdc"][0]["model"] = json!("detr");
        v["producer"] = json!("adapter");
        let (_, warnings) = parse(&v).unwrap();
        assert_eq!(warnings.len(), 2);
        assert!(warnings.iter().all(|w| w.kind == WarningKind::UnknownField));
    }

    #[test]
    fn missing_summary_is_reported_when_required() {
        let mut v = base();
        v.as_object_mut().unwrap().remove("summary");
        let (doc, _) = parse(&v).unwrap();
        assert_eq!(doc.require_summary().unwrap_err().to_string(), "missing field `summary`");
    }

    #[test]
    fn file_level_parsers() {
        let dir = std::env::temp_dir().join(format!("bankspread-ingest-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("doc.json");
        let mut v = base();
        let words: Vec<Value> = (0..100)
            .map(|i| json!({"page": i % 3, "text": format!("w{i}"), "box": [0, i, 10, i + 5]}))
            .collect();
        v["ocr"] = Value::Array(words);
        std::fs::write(&path, v.to_string()).unwrap();
        assert_eq!(parse_detections(&path, Taxonomy::Tsr).unwrap().len(), 3);
        assert_eq!(parse_detections(&path, Taxonomy::Tdc).unwrap().len(), 1);
        assert_eq!(parse_ocr(&path).unwrap().len(), 100);
        std::fs::remove_dir_all(&dir).ok();
    }

    fn arb_doc() -> impl Strategy<Value = StatementDocument> {
        let det = (0usize..2, 0usize..5, 0.0f64..1.0, 0.0f64..400.0, 0.0f64..400.0, 0.0f64..400.0, 0.0f64..400.0);
        (
            proptest::collection::vec(det.clone(), 0..6),
            proptest::collection::vec((0usize..2, "[a-z0-9]{1,8}", 0.0f64..500.0, 0.0f64..500.0), 0..6),
            proptest::option::of((any::<i32>(), any::<i32>())),
        )
            .prop_map(|(dets, words, summary)| {
                let pages = (0..2)
                    .map(|i| PageImage { page_index: i, width: 800, height: 900, dpi: Some(200) })
                    .collect();
                let tsr = dets
                    .into_iter()
                    .map(|(page, c, score, x, y, w, h)| {
                        DetectedObject::new(
                            BBox::new(x, y, x + w, y + h).clamp_to(&BBox::new(0.0, 0.0, 800.0, 900.0)),
                            Label::Tsr(TsrClass::ALL[c]),
                            score,
                            page,
                        )
                    })
                    .collect();
                let ocr = words
                    .into_iter()
                    .map(|(page, text, x, y)| OcrWord {
                        text,
                        bbox: BBox::new(x, y, x + 24.0, y + 14.0),
                        page,
                        confidence: Some(0.5),
                    })
                    .collect();
                StatementDocument {
                    pages,
                    tdc: Vec::new(),
                    tsr,
                    ocr,
                    summary: summary.map(|(o, c)| Summary {
                        opening_cents: i64::from(o),
                        closing_cents: i64::from(c),
                        currency: "USD".into(),
                    }),
                }
            })
    }

    proptest! {
        #[test]
        fn serialize_parse_round_trip(doc in arb_doc()) {
            let text = doc.to_json_string().unwrap();
            let (back, warnings) = StatementDocument::from_json_str(&text).unwrap();
            prop_assert!(warnings.is_empty());
            prop_assert_eq!(back, doc);
        }
    }
}
