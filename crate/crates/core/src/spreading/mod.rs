//! Post-processing: ordered tables in, categorized transactions and a
//! balance reconciliation out.

mod amount;
mod date;
mod extract;
mod header;
mod report;

pub use amount::parse_amount;
pub use date::{parse_date, TxnDate};
pub use extract::{
    extract_transactions, order_tables, Discard, Extraction, SpreadConfig, SpreadTable, Transaction, TxnCategory,
};
pub use header::{default_schema, header_texts, resolve_header_indices, HeaderIndexMap, Role, SchemaSource, SynonymTable};
pub use report::{compute_checksum, write_transactions_csv, SpreadReport, CSV_COLUMNS};

#[cfg(test)]
mod tests;
