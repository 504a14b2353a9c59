//! Vocabulary for generated statements.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::docmodel::TableCategory;

pub(super) fn caption(rng: &mut ChaCha8Rng, category: TableCategory, service_fee: bool) -> String {
    let pool: &[&str] = match category {
        TableCategory::Credit => &[
            "Deposits and Additions",
            "Deposits and Other Credits",
            "Incoming Credits",
            "Credits Received",
            "Total Deposits and Other Credits",
        ],
        TableCategory::Debit => &[
            "Withdrawals and Subtractions",
            "Other Debits",
            "Charges and Deductions",
            "Outgoing Withdrawals",
            "Debits and Charges",
        ],
        TableCategory::Check => &["Checks Paid", "Cleared Checks", "Checks Cleared", "Numbered Checks"],
        TableCategory::TxnBal => &["Account Activity", "Daily Transactions", "Transaction History", "Daily Ledger"],
        TableCategory::TxnAmtBal => &["Itemized Postings", "Account Movements", "Journal Entries"],
        TableCategory::TxnCheckBal => &["Checking Account Log", "Detailed Checking Log", "Combined Checking Detail"],
        _ if service_fee => &["Monthly Service Fee Summary", "Service Fees", "Service Fee Detail"],
        _ => &["Account Summary", "Summary of Your Account", "Account Overview"],
    };
    pool.choose(rng).expect("non-empty").to_string()
}

const PREFIX: &[&str] = &["ACH", "POS", "ONLINE", "WIRE", "ATM", "MOBILE", "CARD"];
const ACTION_CREDIT: &[&str] = &["PAYROLL", "DEPOSIT", "TRANSFER IN", "REFUND", "CREDIT"];
const ACTION_DEBIT: &[&str] = &["PURCHASE", "PAYMENT", "TRANSFER OUT", "WITHDRAWAL", "BILL PAY"];
const PARTY: &[&str] = &[
    "ACME CORP",
    "CITY UTILITIES",
    "GROCERY MART",
    "NORTHWIND TRADERS",
    "CONTOSO LLC",
    "FABRIKAM INC",
    "BLUE RIVER CAFE",
    "METRO TRANSIT",
    "HARBOR INSURANCE",
];
const FEES: &[&str] = &["MONTHLY MAINTENANCE FEE", "OVERDRAFT FEE", "WIRE TRANSFER FEE", "PAPER STATEMENT FEE"];

pub(super) fn description(rng: &mut ChaCha8Rng, credit: bool) -> String {
    let action = if credit { ACTION_CREDIT } else { ACTION_DEBIT };
    format!(
        "{} {} {}",
        PREFIX.choose(rng).expect("non-empty"),
        action.choose(rng).expect("non-empty"),
        PARTY.choose(rng).expect("non-empty")
    )
}

pub(super) fn continuation(rng: &mut ChaCha8Rng) -> String {
    let kind = ["REF", "MEMO INVOICE", "TRACE", "CONF"].choose(rng).expect("non-empty");
    format!("{kind} {}", rng.gen_range(10000..99999))
}

pub(super) fn fee(rng: &mut ChaCha8Rng) -> String {
    FEES.choose(rng).expect("non-empty").to_string()
}

const MONTHS: [&str; 12] = ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"];

#[derive(Debug, Clone, Copy)]
pub(super) enum DateStyle {
    MonthDay,
    Short,
    Long,
    Named,
}

impl DateStyle {
    pub(super) fn pick(rng: &mut ChaCha8Rng) -> DateStyle {
        *[DateStyle::MonthDay, DateStyle::Short, DateStyle::Long, DateStyle::Named]
            .choose(rng)
            .expect("non-empty")
    }

    pub(super) fn format(self, year: i32, month: u32, day: u32) -> String {
        match self {
            DateStyle::MonthDay => format!("{month:02}/{day:02}"),
            DateStyle::Short => format!("{month:02}/{day:02}/{:02}", year.rem_euclid(100)),
            DateStyle::Long => format!("{month:02}/{day:02}/{year}"),
            DateStyle::Named => format!("{} {day:02}", MONTHS[month as usize - 1]),
        }
    }
}

/// `1,234.56`, with a leading minus for negatives.
pub(super) fn money(cents: i64) -> String {
    let abs = cents.unsigned_abs();
    let units = (abs / 100).to_string();
    let mut grouped = String::new();
    for (i, ch) in units.chars().enumerate() {
        if i > 0 && (units.len() - i).is_multiple_of(3) {
            grouped.push(',');
        }
        grouped.push(ch);
    }
    format!("{}{grouped}.{:02}", if cents < 0 { "-" } else { "" }, abs % 100)
}
