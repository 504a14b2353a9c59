//! Statement document model and the JSON ingestion format.

mod ingest;
mod types;
mod validate;

pub use ingest::{parse_detections, parse_ocr};
pub use types::{
    join_text, reading_order, DetectedObject, Label, OcrWord, PageImage, StatementDocument,
    Summary, TableCategory, Taxonomy, TsrClass,
};
pub use validate::{validate_document, Warning, WarningKind};
