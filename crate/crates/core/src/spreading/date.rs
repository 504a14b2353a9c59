use chrono::{Datelike, NaiveDate};
use serde::Serialize;

use crate::error::{Error, Result};

/// A transaction date as printed and in ISO form. Without a known year the
/// ISO form is the truncated `--MM-DD`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TxnDate {
    pub printed: String,
    pub iso: String,
}

const MONTHS: [&str; 12] = ["jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"];

fn month_name(s: &str) -> Option<u32> {
    let s = s.trim_end_matches('.').to_ascii_lowercase();
    if s.len() < 3 {
        return None;
    }
    let full = [
        "january", "february", "march", "april", "may", "june", "july", "august", "september", "october",
        "november", "december",
    ];
    (0..12)
        .find(|&i| s == MONTHS[i] || s == full[i] || (s == "sept" && i == 8))
        .map(|i| i as u32 + 1)
}

fn number(s: &str, max_len: usize) -> Option<u32> {
    (!s.is_empty() && s.len() <= max_len && s.bytes().all(|b| b.is_ascii_digit()))
        .then(|| s.parse().ok())
        .flatten()
}

/// Parses one of `MM/DD`, `MM/DD/YY`, `MM/DD/YYYY`, `Mon DD`, `DD Mon YYYY`.
/// `year` fills in year-less dates; when it is `None` such dates are checked
/// against a leap year and reported as `--MM-DD`.
pub fn parse_date(text: &str, year: Option<i32>) -> Result<TxnDate> {
    let err = || Error::Date(text.to_string());
    let printed = text.trim();
    let (month, day, explicit_year) = {
        let parts: Vec<&str> = printed.split('/').collect();
        if parts.len() >= 2 {
            let m = number(parts[0], 2).ok_or_else(err)?;
            let d = number(parts[1], 2).ok_or_else(err)?;
            let y = match parts.get(2) {
                None => None,
                Some(p) if p.len() == 2 => Some(2000 + number(p, 2).ok_or_else(err)? as i32),
                Some(p) if p.len() == 4 => Some(number(p, 4).ok_or_else(err)? as i32),
                Some(_) => return Err(err()),
            };
            if parts.len() > 3 {
                return Err(err());
            }
            (m, d, y)
        } else {
            let words: Vec<&str> = printed.split_whitespace().collect();
            match words.as_slice() {
                [mon, d] => (month_name(mon).ok_or_else(err)?, number(d, 2).ok_or_else(err)?, None),
                [d, mon, y] => (
                    month_name(mon).ok_or_else(err)?,
                    number(d, 2).ok_or_else(err)?,
                    Some(number(y, 4).filter(|_| y.len() == 4).ok_or_else(err)? as i32),
                ),
                _ => return Err(err()),
            }
        }
    };
    let resolved = explicit_year.or(year);
    let check_year = resolved.unwrap_or(2000);
    let date = NaiveDate::from_ymd_opt(check_year, month, day).ok_or_else(err)?;
    let iso = match resolved {
        Some(_) => date.format("%Y-%m-%d").to_string(),
        None => format!("--{:02}-{:02}", date.month(), date.day()),
    };
    Ok(TxnDate {
        printed: printed.to_string(),
        iso,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iso(s: &str, y: Option<i32>) -> String {
        parse_date(s, y).unwrap().iso
    }

    #[test]
    fn shipped_formats() {
        assert_eq!(iso("01/05", Some(2024)), "2024-01-05");
        assert_eq!(iso("1/5/24", None), "2024-01-05");
        assert_eq!(iso("12/31/2023", Some(2024)), "2023-12-31");
        assert_eq!(iso("Jan 05", Some(2024)), "2024-01-05");
        assert_eq!(iso("sept 9", Some(2024)), "2024-09-09");
        assert_eq!(iso("05 Mar 2022", None), "2022-03-05");
        assert_eq!(iso("02/29", None), "--02-29");
    }

    #[test]
    fn invalid_dates() {
        for bad in ["", "13/01", "02/30", "02/29/2023", "Foo 5", "01/05/024", "1/2/3/4", "ACH PAYROLL", "5 Jan"] {
            assert!(parse_date(bad, Some(2023)).is_err(), "{bad:?}");
        }
    }
}
