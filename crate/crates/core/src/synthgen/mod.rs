//! Deterministic synthetic bank statements with known transactions.
//!
//! Pages use a fixed monospace metric (8 px per character, 14 px text
//! height), so word boxes follow directly from the text. Detections are
//! copies of the ground truth, optionally jittered.

mod text;

use std::path::Path;

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::docmodel::{DetectedObject, Label, OcrWord, PageImage, StatementDocument, Summary, TableCategory, TsrClass};
use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::spreading::{write_transactions_csv, Transaction, TxnCategory};
use text::DateStyle;

pub const PAGE_WIDTH: u32 = 1700;
pub const PAGE_HEIGHT: u32 = 2200;
pub const CHAR_WIDTH: f64 = 8.0;
pub const TEXT_HEIGHT: f64 = 14.0;
pub const ROW_HEIGHT: f64 = 22.0;
pub const LINE_STEP: f64 = 16.0;
const CELL_PAD: f64 = 6.0;
const CAPTION_PAD: f64 = 4.0;
const CAPTION_OFFSET: f64 = 30.0;
const LEFT: f64 = 100.0;
const TOP: f64 = 120.0;
const BOTTOM: f64 = 2100.0;
const DETECTION_SCORE: f64 = 0.99;

/// Table categories the generator can lay out.
pub const RUNTIME_CATEGORIES: [TableCategory; 7] = [
    TableCategory::Credit,
    TableCategory::Debit,
    TableCategory::Check,
    TableCategory::TxnBal,
    TableCategory::TxnAmtBal,
    TableCategory::TxnCheckBal,
    TableCategory::Other,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub seed: u64,
    pub pages: usize,
    pub categories: Vec<TableCategory>,
    pub min_rows: usize,
    pub max_rows: usize,
    pub long_min_rows: usize,
    pub long_max_rows: usize,
    pub long_table_prob: f64,
    pub multiline_prob: f64,
    pub spanning_prob: f64,
    pub total_row_prob: f64,
    pub headerless_check_prob: f64,
    /// Uniform ± amplitude in pixels applied to every detection box.
    pub jitter: f64,
    pub year: i32,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            pages: 1,
            categories: RUNTIME_CATEGORIES.to_vec(),
            min_rows: 2,
            max_rows: 6,
            long_min_rows: 21,
            long_max_rows: 45,
            long_table_prob: 0.25,
            multiline_prob: 0.2,
            spanning_prob: 0.1,
            total_row_prob: 0.3,
            headerless_check_prob: 0.3,
            jitter: 0.0,
            year: 2024,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.pages == 0 {
            return bad("pages must be at least 1");
        }
        if self.categories.is_empty() {
            return bad("at least one table category is required");
        }
        if let Some(c) = self.categories.iter().find(|c| !RUNTIME_CATEGORIES.contains(c)) {
            return Err(Error::Config(format!("category {c} cannot be generated")));
        }
        if self.min_rows == 0 || self.min_rows > self.max_rows || self.long_min_rows > self.long_max_rows {
            return bad("row ranges must be non-empty and start at 1 or more");
        }
        if !(self.jitter >= 0.0 && self.jitter.is_finite()) {
            return bad("jitter must be a finite non-negative number");
        }
        let probs = [
            self.long_table_prob,
            self.multiline_prob,
            self.spanning_prob,
            self.total_row_prob,
            self.headerless_check_prob,
        ];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return bad("probabilities must lie in [0, 1]");
        }
        if !(1..=9999).contains(&self.year) {
            return bad("year out of range");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Col {
    Date,
    Description,
    Amount,
    Debit,
    Credit,
    Balance,
    CheckNo,
    Label,
}

#[derive(Debug, Clone, Copy)]
struct ColSpec {
    kind: Col,
    title: &'static str,
    chars: usize,
    right: bool,
}

const fn col(kind: Col, title: &'static str, chars: usize, right: bool) -> ColSpec {
    ColSpec { kind, title, chars, right }
}

impl ColSpec {
    fn width(&self) -> f64 {
        self.chars as f64 * CHAR_WIDTH + 2.0 * CELL_PAD
    }
}

#[derive(Debug, Clone, Copy)]
enum SummaryLine {
    Opening,
    Credits,
    Debits,
    Closing,
}

#[derive(Debug, Clone)]
struct TxnPlan {
    month: u32,
    day: u32,
    lines: Vec<String>,
    cents: i64,
    credit: bool,
    check: Option<u32>,
    bracket_negative: bool,
}

#[derive(Debug, Clone)]
enum RowPlan {
    Header,
    Txn(TxnPlan),
    Spanning(String),
    Total,
    Summary(SummaryLine),
}

impl RowPlan {
    fn height(&self) -> f64 {
        match self {
            RowPlan::Txn(t) => ROW_HEIGHT + LINE_STEP * (t.lines.len().max(1) - 1) as f64,
            _ => ROW_HEIGHT,
        }
    }
}

#[derive(Debug, Clone)]
struct TablePlan {
    category: TableCategory,
    caption: String,
    cols: Vec<ColSpec>,
    rows: Vec<RowPlan>,
    date_style: DateStyle,
    check_image: bool,
}

impl TablePlan {
    fn vision_label(&self) -> TableCategory {
        match self.category {
            TableCategory::Credit | TableCategory::Debit => TableCategory::CreditDebit,
            c => c,
        }
    }

    fn block_height(&self) -> f64 {
        CAPTION_OFFSET
            + self.rows.iter().map(RowPlan::height).sum::<f64>()
            + if self.check_image { 20.0 + CHECK_IMAGE_HEIGHT } else { 0.0 }
    }

    fn has(&self, kind: Col) -> bool {
        self.cols.iter().any(|c| c.kind == kind)
    }
}

const CHECK_IMAGE_HEIGHT: f64 = 250.0;

fn columns_for(category: TableCategory, service_fee: bool) -> Vec<ColSpec> {
    use Col::*;
    let date = col(Date, "Date", 10, false);
    let desc = col(Description, "Description", 40, false);
    match category {
        TableCategory::Credit | TableCategory::Debit => vec![date, desc, col(Amount, "Amount", 14, true)],
        TableCategory::Check => vec![
            col(CheckNo, "Check No.", 10, false),
            col(Date, "Date Paid", 10, false),
            col(Amount, "Amount", 14, true),
        ],
        TableCategory::TxnBal => vec![
            date,
            desc,
            col(Debit, "Withdrawals", 14, true),
            col(Credit, "Deposits", 14, true),
            col(Balance, "Balance", 14, true),
        ],
        TableCategory::TxnAmtBal => vec![date, desc, col(Amount, "Amount", 14, true), col(Balance, "Balance", 14, true)],
        TableCategory::TxnCheckBal => vec![
            date,
            col(CheckNo, "Check No.", 10, false),
            col(Description, "Description", 38, false),
            col(Debit, "Debits", 14, true),
            col(Credit, "Credits", 14, true),
            col(Balance, "Balance", 14, true),
        ],
        _ if service_fee => vec![date, desc, col(Amount, "Amount", 14, true)],
        _ => vec![col(Label, "Description", 36, false), col(Amount, "Amount", 16, true)],
    }
}

struct Planner<'a> {
    cfg: &'a GenConfig,
    rng: ChaCha8Rng,
    month: u32,
    next_check: u32,
}

impl Planner<'_> {
    fn days(&mut self, n: usize) -> Vec<u32> {
        let last = NaiveDate::from_ymd_opt(self.cfg.year, self.month % 12 + 1, 1)
            .or_else(|| NaiveDate::from_ymd_opt(self.cfg.year + 1, 1, 1))
            .and_then(|d| d.pred_opt())
            .map_or(28, |d| chrono::Datelike::day(&d));
        let mut d: Vec<u32> = (0..n).map(|_| self.rng.gen_range(1..=last)).collect();
        d.sort_unstable();
        d
    }

    fn txn(&mut self, day: u32, credit: bool, desc: Option<String>, check: Option<u32>) -> TxnPlan {
        let cents = if self.rng.gen_bool(0.7) {
            self.rng.gen_range(100..150_000)
        } else {
            self.rng.gen_range(150_000..900_000)
        };
        let lines = match desc {
            None => vec![],
            Some(d) if self.rng.gen_bool(self.cfg.multiline_prob) => vec![d, text::continuation(&mut self.rng)],
            Some(d) => vec![d],
        };
        TxnPlan {
            month: self.month,
            day,
            lines,
            cents,
            credit,
            check,
            bracket_negative: self.rng.gen_bool(0.5),
        }
    }

    fn plan(&mut self, category: TableCategory, service_fee: bool, long: bool) -> TablePlan {
        let (lo, hi) = if long {
            (self.cfg.long_min_rows, self.cfg.long_max_rows)
        } else {
            (self.cfg.min_rows, self.cfg.max_rows)
        };
        let n = self.rng.gen_range(lo..=hi);
        let cols = columns_for(category, service_fee);
        let caption = text::caption(&mut self.rng, category, service_fee);
        let headerless = category == TableCategory::Check && self.rng.gen_bool(self.cfg.headerless_check_prob);
        let mut rows = if headerless { vec![] } else { vec![RowPlan::Header] };

        if category == TableCategory::Other && !service_fee {
            rows.extend(
                [SummaryLine::Opening, SummaryLine::Credits, SummaryLine::Debits, SummaryLine::Closing]
                    .map(RowPlan::Summary),
            );
        } else {
            let has_desc = cols.iter().any(|c| c.kind == Col::Description);
            for day in self.days(n) {
                let credit = match category {
                    TableCategory::Credit => true,
                    TableCategory::TxnBal | TableCategory::TxnAmtBal | TableCategory::TxnCheckBal => self.rng.gen_bool(0.4),
                    _ => false,
                };
                let is_check = match category {
                    TableCategory::Check => true,
                    TableCategory::TxnCheckBal => !credit && self.rng.gen_bool(0.4),
                    _ => false,
                };
                let check = is_check.then(|| {
                    self.next_check += 1 + self.rng.gen_range(0..3);
                    self.next_check
                });
                let desc = if !has_desc {
                    None
                } else if service_fee {
                    Some(text::fee(&mut self.rng))
                } else if check.is_some() {
                    Some("CHECK PAID".to_string())
                } else {
                    Some(text::description(&mut self.rng, credit))
                };
                rows.push(RowPlan::Txn(self.txn(day, credit, desc, check)));
                if has_desc && self.rng.gen_bool(self.cfg.spanning_prob) {
                    rows.push(RowPlan::Spanning(text::continuation(&mut self.rng)));
                }
            }
            if matches!(category, TableCategory::Credit | TableCategory::Debit) && self.rng.gen_bool(self.cfg.total_row_prob) {
                rows.push(RowPlan::Total);
            }
        }
        TablePlan {
            category,
            caption,
            cols,
            rows,
            date_style: DateStyle::pick(&mut self.rng),
            check_image: category == TableCategory::Check && self.rng.gen_bool(0.5),
        }
    }
}

/// A generated statement: detector-side document, clean ground truth and
/// the transactions the pipeline should recover.
#[derive(Debug, Clone)]
pub struct Generated {
    pub statement: StatementDocument,
    pub ground_truth: StatementDocument,
    pub expected: Vec<Transaction>,
}

struct Placed {
    plan: TablePlan,
    page: usize,
    y: f64,
}

fn layout(plans: Vec<TablePlan>, required: usize, pages: usize) -> Vec<Placed> {
    let mut out = Vec::new();
    let mut page = 0;
    let mut y = TOP;
    for (i, plan) in plans.into_iter().enumerate() {
        let h = plan.block_height();
        if y + h > BOTTOM {
            if page + 1 >= pages || h > BOTTOM - TOP {
                if i < required {
                    continue;
                }
                break;
            }
            page += 1;
            y = TOP;
        }
        out.push(Placed { plan, page, y });
        y += h + 40.0;
    }
    out
}

struct Writer {
    page: usize,
    words: Vec<OcrWord>,
}

impl Writer {
    /// Writes `line` starting at `x`; returns the covered box.
    fn line(&mut self, line: &str, x: f64, y: f64) -> Option<BBox> {
        let mut cover: Option<BBox> = None;
        let mut offset = 0usize;
        for (i, part) in line.split(' ').enumerate() {
            if i > 0 {
                offset += 1;
            }
            if !part.is_empty() {
                let x1 = x + offset as f64 * CHAR_WIDTH;
                let b = BBox::new(x1, y, x1 + part.chars().count() as f64 * CHAR_WIDTH, y + TEXT_HEIGHT);
                self.words.push(OcrWord::new(part, b, self.page));
                cover = Some(cover.map_or(b, |c| c.enclosing(&b)));
            }
            offset += part.chars().count();
        }
        cover
    }

    fn cell(&mut self, lines: &[String], x1: f64, x2: f64, y: f64, right: bool) {
        for (k, l) in lines.iter().enumerate() {
            let w = l.chars().count() as f64 * CHAR_WIDTH;
            let x = if right { x2 - CELL_PAD - w } else { x1 + CELL_PAD };
            self.line(l, x, y + 4.0 + LINE_STEP * k as f64);
        }
    }
}

fn det(bbox: BBox, label: Label, page: usize) -> DetectedObject {
    DetectedObject::new(bbox, label, DETECTION_SCORE, page)
}

/// Generates one statement from `cfg`. The same config always yields the
/// same output.
pub fn generate_statement(cfg: &GenConfig) -> Result<Generated> {
    cfg.validate()?;
    let mut planner = Planner {
        cfg,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        month: 1,
        next_check: 1000,
    };
    planner.month = planner.rng.gen_range(1..=12);
    planner.next_check = planner.rng.gen_range(1000..9000);
    let opening: i64 = planner.rng.gen_range(500_000..5_000_000);

    // required tables first (short), then fillers until the pages run out
    let mut required: Vec<(TableCategory, bool)> = Vec::new();
    if cfg.categories.contains(&TableCategory::Other) {
        required.push((TableCategory::Other, false));
    }
    let mut rest: Vec<(TableCategory, bool)> = cfg
        .categories
        .iter()
        .map(|&c| (c, c == TableCategory::Other))
        .collect();
    rest.shuffle(&mut planner.rng);
    required.extend(rest);
    let mut plans: Vec<TablePlan> = required.iter().map(|&(c, fee)| planner.plan(c, fee, false)).collect();
    let n_required = plans.len();
    let fillers: Vec<TableCategory> = cfg.categories.iter().copied().filter(|c| *c != TableCategory::Other).collect();
    if !fillers.is_empty() {
        for _ in 0..(cfg.pages * 8) {
            let c = *fillers.choose(&mut planner.rng).expect("non-empty");
            let long = planner.rng.gen_bool(cfg.long_table_prob);
            plans.push(planner.plan(c, false, long));
        }
    }
    let placed = layout(plans, n_required, cfg.pages);

    // running balance in document order
    let mut balance = opening;
    let mut credits = 0i64;
    let mut debits = 0i64;
    let mut balances: Vec<Vec<Option<i64>>> = Vec::new();
    for p in &placed {
        balances.push(
            p.plan
                .rows
                .iter()
                .map(|r| match r {
                    RowPlan::Txn(t) => {
                        if t.credit {
                            balance += t.cents;
                            credits += t.cents;
                        } else {
                            balance -= t.cents;
                            debits += t.cents;
                        }
                        Some(balance)
                    }
                    _ => None,
                })
                .collect(),
        );
    }
    let closing = balance;

    let mut gt = StatementDocument {
        pages: (0..cfg.pages)
            .map(|i| PageImage { page_index: i, width: PAGE_WIDTH, height: PAGE_HEIGHT, dpi: Some(200) })
            .collect(),
        summary: Some(Summary { opening_cents: opening, closing_cents: closing, currency: "USD".into() }),
        ..StatementDocument::default()
    };
    for page in 0..cfg.pages {
        let mut w = Writer { page, words: Vec::new() };
        if page == 0 {
            w.line("STATEMENT OF ACCOUNT", LEFT, 50.0);
        }
        w.line(&format!("Page {} of {}", page + 1, cfg.pages), PAGE_WIDTH as f64 - 200.0, 50.0);
        gt.ocr.extend(w.words);
    }

    let mut expected = Vec::new();
    for (t, (p, bals)) in placed.iter().zip(&balances).enumerate() {
        let plan = &p.plan;
        let mut w = Writer { page: p.page, words: Vec::new() };
        let caption_words = w.line(&plan.caption, LEFT, p.y).expect("caption has words");
        let table_top = p.y + CAPTION_OFFSET;
        gt.tdc.push(det(caption_words.pad(CAPTION_PAD), Label::Tdc(TableCategory::TableCaption), p.page));

        let width: f64 = plan.cols.iter().map(ColSpec::width).sum();
        let mut xs = vec![LEFT];
        for c in &plan.cols {
            xs.push(xs.last().unwrap() + c.width());
        }
        let height: f64 = plan.rows.iter().map(RowPlan::height).sum();
        let table = BBox::new(LEFT, table_top, LEFT + width, table_top + height);
        gt.tdc.push(det(table, Label::Tdc(plan.vision_label()), p.page));
        gt.tsr.push(det(table, Label::Tsr(TsrClass::Table), p.page));
        for (c, _) in plan.cols.iter().enumerate() {
            gt.tsr.push(det(BBox::new(xs[c], table.y1, xs[c + 1], table.y2), Label::Tsr(TsrClass::TableColumn), p.page));
        }

        let table_total: i64 = plan
            .rows
            .iter()
            .filter_map(|r| if let RowPlan::Txn(t) = r { Some(t.cents) } else { None })
            .sum();
        let mut y = table_top;
        let mut last_txn: Option<usize> = None;
        for (r, row) in plan.rows.iter().enumerate() {
            let rb = BBox::new(table.x1, y, table.x2, y + row.height());
            gt.tsr.push(det(rb, Label::Tsr(TsrClass::TableRow), p.page));
            match row {
                RowPlan::Header => {
                    gt.tsr.push(det(rb, Label::Tsr(TsrClass::TableColumnHeader), p.page));
                    gt.tdc.push(det(rb, Label::Tdc(TableCategory::TableHeader), p.page));
                    for (c, spec) in plan.cols.iter().enumerate() {
                        w.cell(&[spec.title.to_string()], xs[c], xs[c + 1], y, spec.right);
                    }
                }
                RowPlan::Spanning(s) => {
                    gt.tsr.push(det(rb, Label::Tsr(TsrClass::TableSpanningRow), p.page));
                    let c = plan.cols.iter().position(|c| c.kind == Col::Description).unwrap_or(0);
                    w.cell(std::slice::from_ref(s), xs[c], table.x2, y, false);
                    if let Some(i) = last_txn {
                        let tx: &mut Transaction = &mut expected[i];
                        tx.description = format!("{} {s}", tx.description).trim().to_string();
                    }
                }
                RowPlan::Total => {
                    for (c, spec) in plan.cols.iter().enumerate() {
                        let text = match spec.kind {
                            Col::Description => "Total".to_string(),
                            Col::Amount => text::money(table_total),
                            _ => continue,
                        };
                        w.cell(&[text], xs[c], xs[c + 1], y, spec.right);
                    }
                }
                RowPlan::Summary(line) => {
                    let (label, value) = match line {
                        SummaryLine::Opening => ("Beginning Balance", opening),
                        SummaryLine::Credits => ("Deposits and Additions", credits),
                        SummaryLine::Debits => ("Withdrawals and Subtractions", -debits),
                        SummaryLine::Closing => ("Ending Balance", closing),
                    };
                    w.cell(&[label.to_string()], xs[0], xs[1], y, false);
                    w.cell(&[format!("${}", text::money(value))], xs[1], xs[2], y, true);
                }
                RowPlan::Txn(tx) => {
                    let bal = bals[r].expect("transaction rows carry a balance");
                    let date = plan.date_style.format(cfg.year, tx.month, tx.day);
                    for (c, spec) in plan.cols.iter().enumerate() {
                        let lines: Vec<String> = match spec.kind {
                            Col::Date => vec![date.clone()],
                            Col::Description => tx.lines.clone(),
                            Col::CheckNo => tx.check.map(|n| n.to_string()).into_iter().collect(),
                            Col::Balance => vec![text::money(bal)],
                            Col::Debit if !tx.credit => vec![text::money(tx.cents)],
                            Col::Credit if tx.credit => vec![text::money(tx.cents)],
                            Col::Debit | Col::Credit | Col::Label => vec![],
                            Col::Amount if plan.category == TableCategory::TxnAmtBal => {
                                let m = text::money(tx.cents);
                                vec![match (tx.credit, tx.bracket_negative) {
                                    (true, _) => format!("+{m}"),
                                    (false, true) => format!("({m})"),
                                    (false, false) => format!("-{m}"),
                                }]
                            }
                            Col::Amount => vec![text::money(tx.cents)],
                        };
                        w.cell(&lines, xs[c], xs[c + 1], y, spec.right);
                    }
                    let iso = NaiveDate::from_ymd_opt(cfg.year, tx.month, tx.day)
                        .expect("generated dates are valid")
                        .format("%Y-%m-%d")
                        .to_string();
                    let category = if tx.credit { TxnCategory::Credit } else { TxnCategory::Debit };
                    expected.push(Transaction {
                        date,
                        iso_date: iso,
                        description: tx.lines.join(" "),
                        amount_cents: tx.cents,
                        category,
                        check_number: tx.check.map(|n| n.to_string()),
                        balance_cents: plan.has(Col::Balance).then_some(bal),
                        page: p.page,
                        table: t,
                        row: r,
                    });
                    last_txn = Some(expected.len() - 1);
                }
            }
            y += row.height();
        }
        if plan.check_image {
            let b = BBox::new(LEFT, table.y2 + 20.0, LEFT + 600.0, table.y2 + 20.0 + CHECK_IMAGE_HEIGHT);
            gt.tdc.push(det(b, Label::Tdc(TableCategory::CheckImage), p.page));
        }
        gt.ocr.extend(w.words);
    }

    let statement = jitter_detections(&gt, cfg.jitter, cfg.seed);
    Ok(Generated {
        statement,
        ground_truth: gt,
        expected,
    })
}

/// Copy of `doc` with every detection coordinate moved by an independent
/// uniform offset in `[-amplitude, amplitude]`, clamped to the page. Uses
/// its own random stream, so the layout does not depend on the amplitude.
pub fn jitter_detections(doc: &StatementDocument, amplitude: f64, seed: u64) -> StatementDocument {
    let mut out = doc.clone();
    if amplitude <= 0.0 {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let pages: Vec<BBox> = doc.pages.iter().map(PageImage::bounds).collect();
    for o in out.tdc.iter_mut().chain(out.tsr.iter_mut()) {
        let mut d = || rng.gen_range(-amplitude..=amplitude);
        let b = o.bbox;
        let moved = BBox::new(b.x1 + d(), b.y1 + d(), b.x2 + d(), b.y2 + d());
        let moved = match pages.get(o.page) {
            Some(p) => moved.clamp_to(p),
            None => moved,
        };
        if moved.has_area() {
            o.bbox = moved;
        }
    }
    out
}

/// Writes `statement.json`, `ground_truth.json` and `expected.csv`.
pub fn write_outputs(generated: &Generated, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    generated.statement.save(dir.join("statement.json"))?;
    generated.ground_truth.save(dir.join("ground_truth.json"))?;
    let path = dir.join("expected.csv");
    let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    write_transactions_csv(std::io::BufWriter::new(file), &generated.expected)
}
