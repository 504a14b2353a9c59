use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::BBox;

/// Table-level categories produced by detection and refined by text.
///
/// `CreditDebit` is the merged vision class; after refinement only `Credit`
/// or `Debit` remain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableCategory {
    Credit,
    Debit,
    CreditDebit,
    Check,
    TxnBal,
    TxnAmtBal,
    TxnCheckBal,
    Other,
    CheckImage,
    TableCaption,
    TableHeader,
}

impl TableCategory {
    pub const ALL: [TableCategory; 11] = [
        TableCategory::Credit,
        TableCategory::Debit,
        TableCategory::CreditDebit,
        TableCategory::Check,
        TableCategory::TxnBal,
        TableCategory::TxnAmtBal,
        TableCategory::TxnCheckBal,
        TableCategory::Other,
        TableCategory::CheckImage,
        TableCategory::TableCaption,
        TableCategory::TableHeader,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TableCategory::Credit => "credit",
            TableCategory::Debit => "debit",
            TableCategory::CreditDebit => "credit_debit",
            TableCategory::Check => "check",
            TableCategory::TxnBal => "txn_bal",
            TableCategory::TxnAmtBal => "txn_amt_bal",
            TableCategory::TxnCheckBal => "txn_check_bal",
            TableCategory::Other => "other",
            TableCategory::CheckImage => "check_image",
            TableCategory::TableCaption => "table_caption",
            TableCategory::TableHeader => "table_header",
        }
    }

    /// Whether this label denotes a table region (as opposed to captions,
    /// headers or check images).
    pub fn is_table(self) -> bool {
        !matches!(
            self,
            TableCategory::CheckImage | TableCategory::TableCaption | TableCategory::TableHeader
        )
    }
}

impl FromStr for TableCategory {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        TableCategory::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or(())
    }
}

impl fmt::Display for TableCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Explicit structure-recognition classes. Grid cells are derived, never
/// ingested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TsrClass {
    Table,
    TableRow,
    TableColumn,
    TableColumnHeader,
    TableSpanningRow,
}

impl TsrClass {
    pub const ALL: [TsrClass; 5] = [
        TsrClass::Table,
        TsrClass::TableRow,
        TsrClass::TableColumn,
        TsrClass::TableColumnHeader,
        TsrClass::TableSpanningRow,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TsrClass::Table => "table",
            TsrClass::TableRow => "table_row",
            TsrClass::TableColumn => "table_column",
            TsrClass::TableColumnHeader => "table_column_header",
            TsrClass::TableSpanningRow => "table_spanning_row",
        }
    }
}

impl FromStr for TsrClass {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        TsrClass::ALL.into_iter().find(|c| c.as_str() == s).ok_or(())
    }
}

impl fmt::Display for TsrClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Taxonomy {
    Tdc,
    Tsr,
}

impl Taxonomy {
    pub fn section(self) -> &'static str {
        match self {
            Taxonomy::Tdc => "tdc",
            Taxonomy::Tsr => "tsr",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Tdc(TableCategory),
    Tsr(TsrClass),
}

impl Label {
    pub fn parse(taxonomy: Taxonomy, s: &str) -> Option<Label> {
        match taxonomy {
            Taxonomy::Tdc => s.parse().ok().map(Label::Tdc),
            Taxonomy::Tsr => s.parse().ok().map(Label::Tsr),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Tdc(c) => c.as_str(),
            Label::Tsr(c) => c.as_str(),
        }
    }

    pub fn taxonomy(self) -> Taxonomy {
        match self {
            Label::Tdc(_) => Taxonomy::Tdc,
            Label::Tsr(_) => Taxonomy::Tsr,
        }
    }

    pub fn tdc(self) -> Option<TableCategory> {
        match self {
            Label::Tdc(c) => Some(c),
            Label::Tsr(_) => None,
        }
    }

    pub fn tsr(self) -> Option<TsrClass> {
        match self {
            Label::Tsr(c) => Some(c),
            Label::Tdc(_) => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageImage {
    #[serde(rename = "index")]
    pub page_index: usize,
    pub width: u32,
    pub height: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dpi: Option<u32>,
}

impl PageImage {
    pub fn bounds(&self) -> BBox {
        BBox::new(0.0, 0.0, f64::from(self.width), f64::from(self.height))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectedObject {
    pub bbox: BBox,
    pub label: Label,
    pub score: f64,
    pub page: usize,
}

impl DetectedObject {
    pub fn new(bbox: BBox, label: Label, score: f64, page: usize) -> Self {
        DetectedObject {
            bbox,
            label,
            score,
            page,
        }
    }

    pub fn tsr_class(&self) -> Option<TsrClass> {
        self.label.tsr()
    }

    pub fn category(&self) -> Option<TableCategory> {
        self.label.tdc()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OcrWord {
    pub text: String,
    pub bbox: BBox,
    pub page: usize,
    pub confidence: Option<f64>,
}

impl OcrWord {
    pub fn new(text: impl Into<String>, bbox: BBox, page: usize) -> Self {
        OcrWord {
            text: text.into(),
            bbox,
            page,
            confidence: None,
        }
    }
}

/// Opening and closing balances in integer cents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub opening_cents: i64,
    pub closing_cents: i64,
    #[serde(default)]
    pub currency: String,
}

/// One statement: pages, detector output, OCR words and balances.
/// Immutable once built.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StatementDocument {
    pub pages: Vec<PageImage>,
    pub tdc: Vec<DetectedObject>,
    pub tsr: Vec<DetectedObject>,
    pub ocr: Vec<OcrWord>,
    pub summary: Option<Summary>,
}

impl StatementDocument {
    pub fn page(&self, index: usize) -> Option<&PageImage> {
        self.pages.iter().find(|p| p.page_index == index)
    }

    pub fn words_on_page(&self, page: usize) -> impl Iterator<Item = &OcrWord> {
        self.ocr.iter().filter(move |w| w.page == page)
    }
}

/// Sorts words top-to-bottom by line, then left-to-right within a line.
///
/// Words are grouped into a line while their vertical center stays within
/// half the line's first-word height of that word's center.
pub fn reading_order<'a>(words: impl IntoIterator<Item = &'a OcrWord>) -> Vec<&'a OcrWord> {
    let mut ws: Vec<&OcrWord> = words.into_iter().collect();
    ws.sort_by(|a, b| {
        a.bbox
            .center()
            .1
            .total_cmp(&b.bbox.center().1)
            .then(a.bbox.x1.total_cmp(&b.bbox.x1))
    });
    let mut lines: Vec<Vec<&OcrWord>> = Vec::new();
    for w in ws {
        let yc = w.bbox.center().1;
        match lines.last_mut() {
            Some(line)
                if (yc - line[0].bbox.center().1).abs()
                    <= 0.5 * line[0].bbox.height().max(w.bbox.height()) =>
            {
                line.push(w)
            }
            _ => lines.push(vec![w]),
        }
    }
    lines
        .into_iter()
        .flat_map(|mut line| {
            line.sort_by(|a, b| a.bbox.x1.total_cmp(&b.bbox.x1).then(a.bbox.y1.total_cmp(&b.bbox.y1)));
            line
        })
        .collect()
}

/// Joins words in reading order with single spaces.
pub fn join_text<'a>(words: impl IntoIterator<Item = &'a OcrWord>) -> String {
    reading_order(words)
        .into_iter()
        .map(|w| w.text.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}
