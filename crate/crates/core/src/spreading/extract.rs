use serde::Serialize;

use super::amount::parse_amount;
use super::date::parse_date;
use super::header::{resolve_header_indices, HeaderIndexMap, Role, SynonymTable};
use crate::docmodel::TableCategory;
use crate::geometry::BBox;
use crate::tsr_post::TableGrid;

/// Direction of a transaction relative to the account.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TxnCategory {
    Credit,
    Debit,
}

impl TxnCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            TxnCategory::Credit => "credit",
            TxnCategory::Debit => "debit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transaction {
    /// Date as printed.
    pub date: String,
    pub iso_date: String,
    pub description: String,
    /// Always positive; the direction lives in `category`.
    pub amount_cents: i64,
    pub category: TxnCategory,
    pub check_number: Option<String>,
    pub balance_cents: Option<i64>,
    pub page: usize,
    pub table: usize,
    pub row: usize,
}

/// A grid row that produced no transaction, with the reason.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discard {
    pub page: usize,
    pub table: usize,
    pub row: usize,
    pub reason: String,
    pub text: String,
}

/// One table ready for spreading.
#[derive(Debug, Clone)]
pub struct SpreadTable {
    pub page: usize,
    pub bbox: BBox,
    pub category: TableCategory,
    pub grid: TableGrid,
}

/// Sorts tables by page, then top edge, then left edge. Stable.
pub fn order_tables(mut tables: Vec<SpreadTable>) -> Vec<SpreadTable> {
    tables.sort_by(|a, b| {
        a.page
            .cmp(&b.page)
            .then(a.bbox.y1.total_cmp(&b.bbox.y1))
            .then(a.bbox.x1.total_cmp(&b.bbox.x1))
    });
    tables
}

/// Spreading options.
#[derive(Debug, Clone, Default)]
pub struct SpreadConfig {
    pub synonyms: SynonymTable,
    /// Year for dates printed without one.
    pub year: Option<i32>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Extraction {
    pub transactions: Vec<Transaction>,
    pub discards: Vec<Discard>,
}

struct RowCtx<'a> {
    grid: &'a TableGrid,
    map: &'a HeaderIndexMap,
    row: usize,
}

impl RowCtx<'_> {
    fn cell(&self, role: Role) -> &str {
        self.map.get(role).map_or("", |c| self.grid.text(self.row, c).trim())
    }
}

/// Amount and direction for one row, or the discard reason.
fn amount_of(ctx: &RowCtx, category: TableCategory) -> Result<(i64, TxnCategory), String> {
    let parse = |role: Role| -> Result<i64, String> {
        let text = ctx.cell(role);
        if text.is_empty() {
            return Err(format!("missing {}", role_name(role)));
        }
        parse_amount(text).map_err(|e| e.to_string())
    };
    let by_columns = ctx.map.get(Role::Credit).is_some() || ctx.map.get(Role::Debit).is_some();
    let (cents, dir) = match category {
        TableCategory::Credit => (parse(Role::Amount)?.abs(), TxnCategory::Credit),
        TableCategory::Debit | TableCategory::Check => (parse(Role::Amount)?.abs(), TxnCategory::Debit),
        TableCategory::TxnBal | TableCategory::TxnCheckBal | TableCategory::TxnAmtBal if by_columns => {
            let credit = ctx.cell(Role::Credit);
            let debit = ctx.cell(Role::Debit);
            match (credit.is_empty(), debit.is_empty()) {
                (false, false) => return Err("both credit and debit cells are filled".into()),
                (true, true) => return Err("missing amount".into()),
                (false, true) => (parse(Role::Credit)?.abs(), TxnCategory::Credit),
                (true, false) => (parse(Role::Debit)?.abs(), TxnCategory::Debit),
            }
        }
        TableCategory::TxnBal | TableCategory::TxnCheckBal | TableCategory::TxnAmtBal => {
            let v = parse(Role::Amount)?;
            (v.abs(), if v < 0 { TxnCategory::Debit } else { TxnCategory::Credit })
        }
        other => return Err(format!("{other} tables hold no transactions")),
    };
    if cents == 0 {
        return Err("zero amount".into());
    }
    Ok((cents, dir))
}

fn role_name(r: Role) -> &'static str {
    match r {
        Role::Date => "date",
        Role::Description => "description",
        Role::Amount => "amount",
        Role::CheckNumber => "check number",
        Role::Credit => "credit",
        Role::Debit => "debit",
        Role::Balance => "balance",
    }
}

/// Extracts transactions from tables already in document order. Every
/// non-header row either yields a transaction, extends the previous one
/// (spanning rows) or lands in the discard log.
pub fn extract_transactions(tables: &[SpreadTable], cfg: &SpreadConfig) -> Extraction {
    let mut out = Extraction::default();
    for (t, table) in tables.iter().enumerate() {
        let grid = &table.grid;
        let discard = |out: &mut Extraction, row: usize, reason: String| {
            out.discards.push(Discard {
                page: table.page,
                table: t,
                row,
                reason,
                text: grid.row_text(row),
            })
        };
        let data_rows = (0..grid.rows.len()).filter(|&r| !grid.is_header(r));
        let map = if matches!(table.category, TableCategory::Other) {
            for r in data_rows {
                discard(&mut out, r, "other tables hold no transactions".into());
            }
            continue;
        } else {
            match resolve_header_indices(grid, table.category, &cfg.synonyms) {
                Ok(m) => m,
                Err(e) => {
                    for r in data_rows {
                        discard(&mut out, r, e.to_string());
                    }
                    continue;
                }
            }
        };

        let first_in_table = out.transactions.len();
        for row in data_rows {
            if grid.is_spanning(row) {
                let text = grid.row_text(row);
                if text.is_empty() {
                    discard(&mut out, row, "empty row".into());
                } else if out.transactions.len() > first_in_table {
                    let last = out.transactions.last_mut().expect("non-empty");
                    if !last.description.is_empty() {
                        last.description.push(' ');
                    }
                    last.description.push_str(&text);
                } else {
                    discard(&mut out, row, "continuation text before the first transaction".into());
                }
                continue;
            }
            let ctx = RowCtx { grid, map: &map, row };
            if grid.row_text(row).is_empty() {
                discard(&mut out, row, "empty row".into());
                continue;
            }
            let date_text = ctx.cell(Role::Date);
            if date_text.is_empty() {
                discard(&mut out, row, "missing date".into());
                continue;
            }
            let date = match parse_date(date_text, cfg.year) {
                Ok(d) => d,
                Err(e) => {
                    discard(&mut out, row, e.to_string());
                    continue;
                }
            };
            let (amount_cents, category) = match amount_of(&ctx, table.category) {
                Ok(v) => v,
                Err(reason) => {
                    discard(&mut out, row, reason);
                    continue;
                }
            };
            let check = ctx.cell(Role::CheckNumber);
            let balance = ctx.cell(Role::Balance);
            out.transactions.push(Transaction {
                date: date.printed,
                iso_date: date.iso,
                description: ctx.cell(Role::Description).to_string(),
                amount_cents,
                category,
                check_number: (!check.is_empty()).then(|| check.to_string()),
                balance_cents: (!balance.is_empty()).then(|| parse_amount(balance).ok()).flatten(),
                page: table.page,
                table: t,
                row,
            });
        }
    }
    out
}
