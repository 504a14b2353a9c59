use proptest::prelude::*;

use super::*;
use crate::docmodel::TableCategory;
use crate::geometry::BBox;
use crate::tsr_post::{build_grid, RefinedStructure, TableGrid};

/// Grid whose row `r` holds `rows[r]`; a one-element row is spanning.
fn grid_of(header: Option<&[&str]>, rows: &[Vec<&str>]) -> TableGrid {
    let ncols = header.map_or_else(|| rows.iter().map(Vec::len).max().unwrap_or(1), <[&str]>::len);
    let mut all: Vec<Vec<&str>> = header.map(|h| vec![h.to_vec()]).unwrap_or_default();
    all.extend(rows.iter().cloned());
    let (w, h) = (100.0, 20.0);
    let width = w * ncols as f64;
    let s = RefinedStructure {
        table: BBox::new(0.0, 0.0, width, h * all.len() as f64),
        rows: (0..all.len()).map(|r| BBox::new(0.0, h * r as f64, width, h * (r + 1) as f64)).collect(),
        columns: (0..ncols).map(|c| BBox::new(w * c as f64, 0.0, w * (c + 1) as f64, h * all.len() as f64)).collect(),
        header_rows: if header.is_some() { vec![0] } else { vec![] },
        spanning_rows: (0..all.len()).filter(|&r| all[r].len() == 1 && ncols > 1).collect(),
    };
    let mut g = build_grid(&s).unwrap();
    for (r, cells) in all.iter().enumerate() {
        for (c, t) in cells.iter().enumerate() {
            g.cells[r][c].text = t.to_string();
        }
    }
    g
}

fn table(category: TableCategory, page: usize, y: f64, grid: TableGrid) -> SpreadTable {
    SpreadTable {
        page,
        bbox: BBox::new(0.0, y, 10.0, y + 10.0),
        category,
        grid,
    }
}

fn cfg() -> SpreadConfig {
    SpreadConfig {
        year: Some(2024),
        ..SpreadConfig::default()
    }
}

fn txn(category: TxnCategory, amount_cents: i64) -> Transaction {
    Transaction {
        date: "01/01".into(),
        iso_date: "2024-01-01".into(),
        description: String::new(),
        amount_cents,
        category,
        check_number: None,
        balance_cents: None,
        page: 0,
        table: 0,
        row: 0,
    }
}

#[test]
fn tables_sorted_by_page_then_position() {
    let g = grid_of(None, &[vec!["x"]]);
    let mk = |page, y1, x1| SpreadTable {
        page,
        bbox: BBox::new(x1, y1, x1 + 10.0, y1 + 10.0),
        category: TableCategory::Debit,
        grid: g.clone(),
    };
    let order = |v: Vec<SpreadTable>| order_tables(v).iter().map(|t| (t.page, t.bbox.y1, t.bbox.x1)).collect::<Vec<_>>();
    assert_eq!(
        order(vec![mk(2, 50.0, 0.0), mk(1, 300.0, 0.0), mk(1, 100.0, 0.0)]),
        [(1, 100.0, 0.0), (1, 300.0, 0.0), (2, 50.0, 0.0)]
    );
    assert_eq!(order(vec![mk(0, 10.0, 900.0), mk(0, 10.0, 50.0)]), [(0, 10.0, 50.0), (0, 10.0, 900.0)]);
    assert_eq!(order(vec![mk(3, 1.0, 1.0)]), [(3, 1.0, 1.0)]);
}

#[test]
fn checksum_fixtures() {
    let t = [
        txn(TxnCategory::Debit, 20000),
        txn(TxnCategory::Debit, 5025),
        txn(TxnCategory::Credit, 10025),
    ];
    assert_eq!(compute_checksum(&t, 100000, 85000), 0);
    assert_eq!(compute_checksum(&t, 100000, 80000), 5000);
    assert_eq!(compute_checksum(&[], 4242, 4242), 0);
}

#[test]
fn txn_bal_column_rule() {
    let g = grid_of(
        Some(&["Date", "Description", "Credit", "Debit", "Balance"]),
        &[
            vec!["01/05", "ACH PAYROLL", "2,000.00", "", "2,500.00"],
            vec!["01/06", "RENT", "", "1,200.00", "1,300.00"],
            vec!["01/07", "ODD", "1.00", "2.00", "1,301.00"],
        ],
    );
    let ex = extract_transactions(&[table(TableCategory::TxnBal, 0, 0.0, g)], &cfg());
    assert_eq!(ex.transactions.len(), 2);
    let t = &ex.transactions[0];
    assert_eq!((t.category, t.amount_cents, t.balance_cents), (TxnCategory::Credit, 200000, Some(250000)));
    assert_eq!((t.iso_date.as_str(), t.description.as_str(), t.row), ("2024-01-05", "ACH PAYROLL", 1));
    assert_eq!(ex.transactions[1].category, TxnCategory::Debit);
    assert_eq!(ex.discards.len(), 1);
    assert_eq!(ex.discards[0].row, 3);
    assert!(ex.discards[0].reason.contains("both"));
}

#[test]
fn txn_amt_bal_sign_rule() {
    let g = grid_of(
        Some(&["Date", "Description", "Amount", "Balance"]),
        &[vec!["01/05", "FEE", "(20.00)", "80.00"], vec!["01/06", "REFUND", "+5.00", "85.00"]],
    );
    let ex = extract_transactions(&[table(TableCategory::TxnAmtBal, 0, 0.0, g)], &cfg());
    let got: Vec<_> = ex.transactions.iter().map(|t| (t.category, t.amount_cents)).collect();
    assert_eq!(got, [(TxnCategory::Debit, 2000), (TxnCategory::Credit, 500)]);
}

#[test]
fn rows_without_date_discarded() {
    let g = grid_of(
        Some(&["Date", "Description", "Amount"]),
        &[vec!["", "NO DATE", "5.00"], vec!["13/45", "BAD DATE", "5.00"], vec!["01/02", "NO AMOUNT", ""]],
    );
    let ex = extract_transactions(&[table(TableCategory::Credit, 0, 0.0, g)], &cfg());
    assert!(ex.transactions.is_empty());
    let reasons: Vec<_> = ex.discards.iter().map(|d| d.reason.as_str()).collect();
    assert_eq!(reasons, ["missing date", "cannot parse date `13/45`", "missing amount"]);
}

#[test]
fn check_tables_are_debits_with_numbers() {
    let g = grid_of(None, &[vec!["1042", "01/09", "150.00"]]);
    let ex = extract_transactions(&[table(TableCategory::Check, 0, 0.0, g)], &cfg());
    let t = &ex.transactions[0];
    assert_eq!((t.category, t.amount_cents, t.check_number.as_deref()), (TxnCategory::Debit, 15000, Some("1042")));
}

#[test]
fn spanning_rows_extend_previous_description() {
    let g = grid_of(
        Some(&["Date", "Description", "Amount"]),
        &[vec!["LEADING NOTE"], vec!["01/05", "WIRE FROM", "10.00"], vec!["ACME CORP"]],
    );
    let ex = extract_transactions(&[table(TableCategory::Debit, 0, 0.0, g)], &cfg());
    assert_eq!(ex.transactions[0].description, "WIRE FROM ACME CORP");
    assert_eq!(ex.discards.len(), 1);
    assert_eq!(ex.discards[0].row, 1);
}

#[test]
fn other_tables_log_every_row() {
    let g = grid_of(Some(&["Description", "Amount"]), &[vec!["Opening", "1.00"], vec!["Closing", "2.00"]]);
    let ex = extract_transactions(&[table(TableCategory::Other, 0, 0.0, g)], &cfg());
    assert!(ex.transactions.is_empty());
    assert_eq!(ex.discards.len(), 2);
}

#[test]
fn csv_layout() {
    let mut t = txn(TxnCategory::Credit, 123);
    t.description = "A, B".into();
    t.check_number = Some("7".into());
    let mut buf = Vec::new();
    write_transactions_csv(&mut buf, &[t]).unwrap();
    assert_eq!(
        String::from_utf8(buf).unwrap(),
        "date,description,category,amount_cents,check_number,balance_cents,page,table,row\n\
         2024-01-01,\"A, B\",credit,123,7,,0,0,0\n"
    );
}

fn arb_txn() -> impl Strategy<Value = Transaction> {
    (any::<bool>(), 1i64..1_000_000_000).prop_map(|(credit, c)| {
        txn(if credit { TxnCategory::Credit } else { TxnCategory::Debit }, c)
    })
}

fn cell_text() -> impl Strategy<Value = String> {
    prop_oneof![
        Just(String::new()),
        Just("01/05".to_string()),
        Just("Feb 30".to_string()),
        Just("(12.50)".to_string()),
        Just("1,000.00".to_string()),
        Just("-3".to_string()),
        Just("PAYROLL".to_string()),
        Just("x.y".to_string()),
    ]
}

proptest! {
    #[test]
    fn checksum_permutation_invariant(mut ts in prop::collection::vec(arb_txn(), 0..20), open in -1_000_000i64..1_000_000, close in -1_000_000i64..1_000_000, seed: u64) {
        let before = compute_checksum(&ts, open, close);
        let n = ts.len();
        if n > 1 {
            ts.swap((seed % n as u64) as usize, ((seed / 7) % n as u64) as usize);
            ts.reverse();
        }
        prop_assert_eq!(compute_checksum(&ts, open, close), before);
    }

    #[test]
    fn checksum_linear(ts in prop::collection::vec(arb_txn(), 0..20), c in 1i64..1_000_000) {
        let before = compute_checksum(&ts, 5, 7);
        let mut more = ts.clone();
        more.push(txn(TxnCategory::Credit, c));
        more.push(txn(TxnCategory::Debit, c));
        prop_assert_eq!(compute_checksum(&more, 5, 7), before);
    }

    #[test]
    fn every_row_accounted_for(
        cells in prop::collection::vec(prop::collection::vec(cell_text(), 5), 1..12),
        spanning in prop::collection::vec(any::<bool>(), 12),
        cat in prop::sample::select(vec![TableCategory::TxnBal, TableCategory::TxnAmtBal, TableCategory::Credit, TableCategory::Check, TableCategory::Other]),
    ) {
        let rows: Vec<Vec<&str>> = cells
            .iter()
            .enumerate()
            .map(|(i, r)| if spanning[i] { vec![r[1].as_str()] } else { r.iter().map(String::as_str).collect() })
            .collect();
        let g = grid_of(Some(&["Date", "Description", "Debit", "Credit", "Balance"]), &rows);
        let n_rows = rows.len();
        let n_spanning_kept = rows.iter().filter(|r| r.len() == 1 && !r[0].is_empty()).count();
        let ex = extract_transactions(&[table(cat, 0, 0.0, g)], &cfg());
        for t in &ex.transactions {
            prop_assert!(t.amount_cents > 0 && !t.date.is_empty());
        }
        // spanning rows that extended a transaction are neither emitted nor discarded
        let absorbed = n_rows - ex.transactions.len() - ex.discards.len();
        prop_assert!(absorbed <= n_spanning_kept);
        let mut seen: Vec<usize> = ex.transactions.iter().map(|t| t.row).chain(ex.discards.iter().map(|d| d.row)).collect();
        seen.sort();
        seen.dedup();
        prop_assert_eq!(seen.len(), n_rows - absorbed);
    }
}
