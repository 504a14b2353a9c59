use std::fmt;

use serde::Serialize;

use super::types::{DetectedObject, StatementDocument, TsrClass};
use crate::tsr_post::{objects_in_table, split_long_table, TsrConfig, MAX_QUERIES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WarningKind {
    UnknownField,
    NoOcrOnTablePage,
    TableWithoutRows,
    DuplicateDetection,
    OrphanStructure,
    QueryBudget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Warning {
    pub kind: WarningKind,
    pub message: String,
}

impl Warning {
    pub fn new(kind: WarningKind, message: impl Into<String>) -> Self {
        Warning {
            kind,
            message: message.into(),
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn duplicates(section: &str, objects: &[DetectedObject], out: &mut Vec<Warning>) {
    for (i, a) in objects.iter().enumerate() {
        if let Some(j) = objects[..i]
            .iter()
            .position(|b| b.page == a.page && b.label == a.label && b.bbox == a.bbox)
        {
            out.push(Warning::new(
                WarningKind::DuplicateDetection,
                format!("{section} record {i} duplicates record {j}"),
            ));
        }
    }
}

/// Non-fatal consistency checks. Never mutates the document.
pub fn validate_document(doc: &StatementDocument) -> Vec<Warning> {
    let mut out = Vec::new();
    duplicates("tdc", &doc.tdc, &mut out);
    duplicates("tsr", &doc.tsr, &mut out);

    let tables: Vec<(usize, &DetectedObject)> = doc
        .tdc
        .iter()
        .enumerate()
        .filter(|(_, d)| d.category().is_some_and(|c| c.is_table()))
        .collect();

    for page in &doc.pages {
        let has_tables = tables.iter().any(|(_, t)| t.page == page.page_index);
        if has_tables && doc.words_on_page(page.page_index).next().is_none() {
            out.push(Warning::new(
                WarningKind::NoOcrOnTablePage,
                format!("page {} has tables but no OCR words", page.page_index),
            ));
        }
    }

    let cfg = TsrConfig::default();
    for (i, table) in &tables {
        let members = objects_in_table(&table.bbox, table.page, &doc.tsr, cfg.membership);
        let rows: Vec<_> = members
            .iter()
            .filter(|o| o.tsr_class() == Some(TsrClass::TableRow))
            .map(|o| o.bbox)
            .collect();
        if rows.is_empty() {
            out.push(Warning::new(
                WarningKind::TableWithoutRows,
                format!("tdc record {i}: no structure rows overlap the table"),
            ));
            continue;
        }
        let plan = split_long_table(&table.bbox, &rows, cfg.split_margin);
        for (k, part) in plan.parts.iter().enumerate() {
            let n = members
                .iter()
                .filter(|o| o.bbox.intersection_area(part) > 0.0)
                .count();
            if n > MAX_QUERIES {
                out.push(Warning::new(
                    WarningKind::QueryBudget,
                    format!("tdc record {i}: part {k} holds {n} objects, above the {MAX_QUERIES}-query budget"),
                ));
            }
        }
    }

    for (i, o) in doc.tsr.iter().enumerate() {
        let owned = tables
            .iter()
            .any(|(_, t)| t.page == o.page && o.bbox.containment_in(&t.bbox) >= cfg.membership);
        if !owned {
            out.push(Warning::new(
                WarningKind::OrphanStructure,
                format!("tsr record {i} lies outside every detected table"),
            ));
        }
    }
    out
}
