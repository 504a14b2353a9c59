use crate::error::{Error, Result};

const CURRENCY: &[char] = &['$', '€', '£', '¥', '₹'];

/// Parses a printed amount into signed cents.
///
/// Currency symbols, spaces and thousands separators are ignored. Brackets,
/// a leading or trailing minus and a trailing `DR` make the value negative;
/// `CR` and `+` are accepted as positive markers. With a decimal point the
/// fraction gives the cents (one or two digits); without one the number is
/// whole currency units.
pub fn parse_amount(text: &str) -> Result<i64> {
    let err = || Error::Amount(text.to_string());
    let mut s: String = text
        .chars()
        .filter(|c| !c.is_whitespace() && *c != ',' && !CURRENCY.contains(c))
        .collect();
    let mut negative = false;

    let upper = s.to_ascii_uppercase();
    if upper.ends_with("DR") {
        negative = true;
        s.truncate(s.len() - 2);
    } else if upper.ends_with("CR") {
        s.truncate(s.len() - 2);
    }
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        negative = true;
        s = inner.to_string();
    }
    if let Some(r) = s.strip_prefix('-') {
        negative = true;
        s = r.to_string();
    } else if let Some(r) = s.strip_prefix('+') {
        s = r.to_string();
    } else if let Some(r) = s.strip_suffix('-') {
        negative = true;
        s = r.to_string();
    }

    let (whole, frac) = match s.split_once('.') {
        Some((w, f)) => (w, Some(f)),
        None => (s.as_str(), None),
    };
    let digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
    let cents_part = match frac {
        None => 0,
        Some(f) if digits(f) && f.len() <= 2 => {
            let v: i64 = f.parse().map_err(|_| err())?;
            if f.len() == 1 { v * 10 } else { v }
        }
        Some(_) => return Err(err()),
    };
    let units: i64 = if whole.is_empty() && frac.is_some() {
        0
    } else if digits(whole) {
        whole.parse().map_err(|_| err())?
    } else {
        return Err(err());
    };
    let cents = units.checked_mul(100).and_then(|u| u.checked_add(cents_part)).ok_or_else(err)?;
    Ok(if negative { -cents } else { cents })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fixtures() {
        assert_eq!(parse_amount("1,234.56").unwrap(), 123456);
        assert_eq!(parse_amount("(45.00)").unwrap(), -4500);
        assert_eq!(parse_amount("$-45").unwrap(), -4500);
        assert_eq!(parse_amount("-$45.5").unwrap(), -4550);
        assert_eq!(parse_amount("45.00-").unwrap(), -4500);
        assert_eq!(parse_amount("12.34 DR").unwrap(), -1234);
        assert_eq!(parse_amount("12.34CR").unwrap(), 1234);
        assert_eq!(parse_amount("+ 7").unwrap(), 700);
        assert_eq!(parse_amount(".99").unwrap(), 99);
        assert_eq!(parse_amount("€ 1 000.00").unwrap(), 100000);
    }

    #[test]
    fn rejects() {
        for bad in ["", "$", "abc", "1.234", "1.2.3", "12a", "()", "--5", "1.", "(5"] {
            assert!(parse_amount(bad).is_err(), "{bad:?}");
        }
    }

    fn printed(cents: u64, dollar: bool, commas: bool) -> String {
        let units = (cents / 100).to_string();
        let units = if commas {
            let b = units.as_bytes();
            let mut out = String::new();
            for (i, ch) in b.iter().enumerate() {
                if i > 0 && (b.len() - i).is_multiple_of(3) {
                    out.push(',');
                }
                out.push(*ch as char);
            }
            out
        } else {
            units
        };
        format!("{}{}.{:02}", if dollar { "$" } else { "" }, units, cents % 100)
    }

    proptest! {
        #[test]
        fn brackets_negate(cents in 1u64..10_000_000_000, dollar: bool, commas: bool) {
            let x = printed(cents, dollar, commas);
            prop_assert_eq!(parse_amount(&x).unwrap(), cents as i64);
            prop_assert_eq!(parse_amount(&format!("({x})")).unwrap(), -(cents as i64));
            prop_assert_eq!(parse_amount(&format!("-{x}")).unwrap(), -(cents as i64));
        }
    }
}
