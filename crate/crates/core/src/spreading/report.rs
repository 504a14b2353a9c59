use std::io::Write;

use serde::Serialize;

use super::extract::{Discard, Extraction, Transaction, TxnCategory};
use crate::error::Result;

/// `opening − Σ debits + Σ credits − closing`, exact in cents. Zero means
/// the extracted transactions explain the balance change.
pub fn compute_checksum(transactions: &[Transaction], opening_cents: i64, closing_cents: i64) -> i64 {
    let flow: i128 = transactions
        .iter()
        .map(|t| match t.category {
            TxnCategory::Credit => t.amount_cents as i128,
            TxnCategory::Debit => -(t.amount_cents as i128),
        })
        .sum();
    let total = opening_cents as i128 + flow - closing_cents as i128;
    total.clamp(i64::MIN as i128, i64::MAX as i128) as i64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpreadReport {
    pub transactions: Vec<Transaction>,
    pub discards: Vec<Discard>,
    pub checksum_cents: i64,
    pub balanced: bool,
}

impl SpreadReport {
    pub fn new(extraction: Extraction, opening_cents: i64, closing_cents: i64) -> SpreadReport {
        let checksum_cents = compute_checksum(&extraction.transactions, opening_cents, closing_cents);
        SpreadReport {
            transactions: extraction.transactions,
            discards: extraction.discards,
            checksum_cents,
            balanced: checksum_cents == 0,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

pub const CSV_COLUMNS: [&str; 9] = [
    "date",
    "description",
    "category",
    "amount_cents",
    "check_number",
    "balance_cents",
    "page",
    "table",
    "row",
];

/// Transactions as CSV with the ISO date in the `date` column.
pub fn write_transactions_csv(out: impl Write, transactions: &[Transaction]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for t in transactions {
        w.write_record([
            t.iso_date.clone(),
            t.description.clone(),
            t.category.as_str().to_string(),
            t.amount_cents.to_string(),
            t.check_number.clone().unwrap_or_default(),
            t.balance_cents.map(|b| b.to_string()).unwrap_or_default(),
            t.page.to_string(),
            t.table.to_string(),
            t.row.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
