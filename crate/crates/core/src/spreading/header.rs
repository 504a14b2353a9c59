use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::docmodel::TableCategory;
use crate::error::{Error, Result};
use crate::tdc_refine::tokenize;
use crate::tsr_post::TableGrid;

/// Semantic column roles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Date,
    Description,
    Amount,
    CheckNumber,
    Credit,
    Debit,
    Balance,
}

impl Role {
    pub const ALL: [Role; 7] = [
        Role::Date,
        Role::Description,
        Role::Amount,
        Role::CheckNumber,
        Role::Credit,
        Role::Debit,
        Role::Balance,
    ];

    fn is_money_column(self) -> bool {
        matches!(self, Role::Credit | Role::Debit | Role::Balance)
    }
}

/// Header words per role. Synonyms may span several tokens.
#[derive(Debug, Clone, PartialEq)]
pub struct SynonymTable {
    entries: Vec<(Role, Vec<String>)>,
}

const SHIPPED: &[(Role, &[&str])] = &[
    (Role::Date, &["date", "posted", "posting"]),
    (Role::Description, &["description", "details", "transaction", "activity"]),
    (Role::Amount, &["amount", "amt"]),
    (Role::CheckNumber, &["check", "cheque", "chk", "number", "no"]),
    (Role::Credit, &["credit", "credits", "deposit", "deposits", "additions"]),
    (Role::Debit, &["debit", "debits", "withdrawal", "withdrawals", "deductions", "subtractions", "payments"]),
    (Role::Balance, &["balance", "bal"]),
];

impl Default for SynonymTable {
    fn default() -> Self {
        let mut t = SynonymTable { entries: Vec::new() };
        for (role, words) in SHIPPED {
            for w in *words {
                t.add(*role, w);
            }
        }
        t
    }
}

impl SynonymTable {
    pub fn add(&mut self, role: Role, phrase: &str) {
        let tokens = tokenize(phrase);
        if !tokens.is_empty() && !self.entries.iter().any(|(r, t)| *r == role && *t == tokens) {
            self.entries.push((role, tokens));
        }
    }

    /// Shipped table extended with `{"role": ["phrase", ...]}` from JSON.
    pub fn from_json_str(s: &str) -> Result<SynonymTable> {
        let extra: BTreeMap<Role, Vec<String>> = serde_json::from_str(s)?;
        let mut t = SynonymTable::default();
        for (role, phrases) in extra {
            for p in phrases {
                t.add(role, &p);
            }
        }
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<SynonymTable> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SynonymTable::from_json_str(&s)
    }

    /// Role named by one header cell. The match ending last wins (the head
    /// word of "Posting Date" is "date"), longer synonyms beat shorter
    /// ones, and `Amount` yields to credit/debit/balance words in the same
    /// cell ("Debit Amount").
    pub fn role_of(&self, tokens: &[String]) -> Option<Role> {
        let mut matches: Vec<(usize, usize, Role)> = Vec::new();
        for (role, syn) in &self.entries {
            for (start, w) in tokens.windows(syn.len()).enumerate() {
                if w == syn.as_slice() {
                    matches.push((start + syn.len(), syn.len(), *role));
                }
            }
        }
        let best = |ms: &mut dyn Iterator<Item = &(usize, usize, Role)>| {
            ms.max_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)).then(b.2.cmp(&a.2)))
                .map(|m| m.2)
        };
        match best(&mut matches.iter())? {
            Role::Amount => best(&mut matches.iter().filter(|m| m.2.is_money_column())).or(Some(Role::Amount)),
            r => Some(r),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemaSource {
    Header,
    Default,
}

/// Column index per role.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeaderIndexMap {
    pub columns: BTreeMap<Role, usize>,
    pub source: SchemaSource,
}

impl HeaderIndexMap {
    pub fn get(&self, role: Role) -> Option<usize> {
        self.columns.get(&role).copied()
    }

    fn width(&self) -> usize {
        self.columns.values().max().map_or(0, |m| m + 1)
    }

    /// Enough to build a transaction: a date and some amount column.
    pub fn is_usable(&self) -> bool {
        self.columns.contains_key(&Role::Date)
            && [Role::Amount, Role::Credit, Role::Debit].iter().any(|r| self.columns.contains_key(r))
    }
}

/// Column layout assumed for a table without a usable header.
pub fn default_schema(category: TableCategory) -> Option<HeaderIndexMap> {
    use Role::*;
    let roles: &[Role] = match category {
        TableCategory::Credit | TableCategory::Debit | TableCategory::CreditDebit => &[Date, Description, Amount],
        TableCategory::Check => &[CheckNumber, Date, Amount],
        TableCategory::TxnBal => &[Date, Description, Debit, Credit, Balance],
        TableCategory::TxnAmtBal => &[Date, Description, Amount, Balance],
        TableCategory::TxnCheckBal => &[Date, CheckNumber, Description, Debit, Credit, Balance],
        _ => return None,
    };
    Some(HeaderIndexMap {
        columns: roles.iter().enumerate().map(|(i, r)| (*r, i)).collect(),
        source: SchemaSource::Default,
    })
}

/// Header text of each column, joined over all non-spanning header rows.
pub fn header_texts(grid: &TableGrid) -> Vec<String> {
    (0..grid.columns.len())
        .map(|c| {
            grid.header_rows
                .iter()
                .filter(|&&r| !grid.is_spanning(r))
                .map(|&r| grid.text(r, c))
                .filter(|t| !t.is_empty())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

/// Maps header cells to roles; the leftmost column naming a role keeps it.
/// Falls back to the category's default layout when there is no header or
/// the header lacks a date or amount column.
pub fn resolve_header_indices(
    grid: &TableGrid,
    category: TableCategory,
    synonyms: &SynonymTable,
) -> Result<HeaderIndexMap> {
    let texts = header_texts(grid);
    let mut columns = BTreeMap::new();
    for (c, text) in texts.iter().enumerate() {
        if let Some(role) = synonyms.role_of(&tokenize(text)) {
            columns.entry(role).or_insert(c);
        }
    }
    let resolved = HeaderIndexMap {
        columns,
        source: SchemaSource::Header,
    };
    if resolved.is_usable() {
        return Ok(resolved);
    }
    match default_schema(category) {
        Some(d) if d.width() <= grid.columns.len() => Ok(d),
        _ => Err(Error::UnmappableHeader(if texts.iter().all(String::is_empty) {
            format!("no header on a {category} table with {} columns", grid.columns.len())
        } else {
            texts.join(" | ")
        })),
    }
}
