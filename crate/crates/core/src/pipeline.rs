//! End-to-end run over one statement document: category refinement, per
//! table structure post-processing, then spreading.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::docmodel::{OcrWord, StatementDocument, TableCategory};
use crate::error::Result;
use crate::geometry::{nms, BBox};
use crate::spreading::{extract_transactions, order_tables, SpreadConfig, SpreadReport, SpreadTable};
use crate::tdc_refine::{refine_category, table_texts, NbModels, NbVariant, TextCategory};
use crate::tsr_post::{objects_in_table, process_table, TsrConfig};

/// Everything the pipeline needs besides the document.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub models: NbModels,
    pub spread: SpreadConfig,
    pub tsr: TsrConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            models: NbModels::shipped(),
            spread: SpreadConfig::default(),
            tsr: TsrConfig::default(),
        }
    }
}

/// What happened to one detected table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReport {
    pub page: usize,
    pub bbox: BBox,
    pub vision: TableCategory,
    pub category: TableCategory,
    pub text_model: Option<NbVariant>,
    pub text_prediction: Option<TextCategory>,
    /// Position in the spreading order; `None` when structuring failed.
    pub table: Option<usize>,
    pub rows: usize,
    pub columns: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// The spread report plus per-table diagnostics, as written to JSON.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    #[serde(flatten)]
    pub spread: SpreadReport,
    pub tables: Vec<TableReport>,
}

impl PipelineReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub report: PipelineReport,
    /// Structured tables in spreading order.
    pub tables: Vec<SpreadTable>,
    /// Inferred row separators, aligned with `tables`.
    pub separators: Vec<Vec<BBox>>,
}

/// Runs the whole pipeline. Fails only on document-level problems such as
/// missing balances; table-level failures are reported per table.
pub fn run_pipeline(doc: &StatementDocument, cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let summary = doc.require_summary()?;

    let candidates: Vec<_> = doc
        .tdc
        .iter()
        .filter(|d| d.category().is_some_and(TableCategory::is_table))
        .cloned()
        .collect();
    let mut tables = nms(&candidates, cfg.tsr.nms_iou);
    tables.sort_by(|a, b| {
        a.page
            .cmp(&b.page)
            .then(a.bbox.y1.total_cmp(&b.bbox.y1))
            .then(a.bbox.x1.total_cmp(&b.bbox.x1))
    });
    let texts = table_texts(&tables, &doc.tdc, &doc.ocr);

    let mut words_by_page: BTreeMap<usize, Vec<OcrWord>> = BTreeMap::new();
    for w in &doc.ocr {
        words_by_page.entry(w.page).or_default().push(w.clone());
    }

    let mut reports = Vec::with_capacity(tables.len());
    let mut structured: Vec<(SpreadTable, Vec<BBox>)> = Vec::new();
    for (table, text) in tables.iter().zip(&texts) {
        let refined = refine_category(table, text.caption.as_ref(), text.header.as_ref(), &cfg.models);
        let structure = objects_in_table(&table.bbox, table.page, &doc.tsr, cfg.tsr.membership);
        let words = words_by_page.get(&table.page).map_or(&[][..], Vec::as_slice);
        let mut report = TableReport {
            page: table.page,
            bbox: table.bbox,
            vision: refined.vision,
            category: refined.category,
            text_model: refined.variant,
            text_prediction: refined.predicted,
            table: None,
            rows: 0,
            columns: 0,
            error: None,
        };
        match process_table(&table.bbox, &structure, words, &cfg.tsr) {
            Ok(p) => {
                report.rows = p.grid.rows.len();
                report.columns = p.grid.columns.len();
                report.table = Some(structured.len());
                structured.push((
                    SpreadTable {
                        page: table.page,
                        bbox: table.bbox,
                        category: refined.category,
                        grid: p.grid,
                    },
                    p.separators,
                ));
            }
            Err(e) => report.error = Some(e.to_string()),
        }
        reports.push(report);
    }

    // already in reading order; the sort keeps spreading order explicit
    let (spread_tables, separators): (Vec<_>, Vec<_>) = structured.into_iter().unzip();
    let ordered = order_tables(spread_tables);
    let extraction = extract_transactions(&ordered, &cfg.spread);
    Ok(PipelineOutput {
        report: PipelineReport {
            spread: SpreadReport::new(extraction, summary.opening_cents, summary.closing_cents),
            tables: reports,
        },
        tables: ordered,
        separators,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spreading::Transaction;
    use crate::synthgen::{generate_statement, GenConfig};

    fn content(t: &Transaction) -> (String, String, &'static str, i64, Option<String>, Option<i64>, usize) {
        (
            t.iso_date.clone(),
            t.description.clone(),
            t.category.as_str(),
            t.amount_cents,
            t.check_number.clone(),
            t.balance_cents,
            t.page,
        )
    }

    fn cfg(year: i32) -> PipelineConfig {
        let mut c = PipelineConfig::default();
        c.spread.year = Some(year);
        c
    }

    #[test]
    fn recovers_generated_statements() {
        for seed in 0..6 {
            let g = generate_statement(&GenConfig { seed, pages: 1 + seed as usize % 3, ..GenConfig::default() }).unwrap();
            let out = run_pipeline(&g.statement, &cfg(2024)).unwrap();
            let got: Vec<_> = out.report.spread.transactions.iter().map(content).collect();
            let want: Vec<_> = g.expected.iter().map(content).collect();
            assert_eq!(got, want, "seed {seed}");
            assert!(out.report.spread.balanced);
            assert!(out.report.tables.iter().all(|t| t.error.is_none()));
        }
    }

    #[test]
    fn missing_summary_is_an_error() {
        let mut g = generate_statement(&GenConfig::default()).unwrap();
        g.statement.summary = None;
        let e = run_pipeline(&g.statement, &cfg(2024)).unwrap_err();
        assert!(e.to_string().contains("summary"));
    }
}
