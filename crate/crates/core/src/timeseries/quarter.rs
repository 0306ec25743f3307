use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A calendar quarter. Ordering is chronological.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuarterIndex {
    year: i32,
    quarter: u8,
}

impl QuarterIndex {
    pub fn new(year: i32, quarter: u8) -> Result<Self> {
        if !(1..=4).contains(&quarter) {
            return Err(Error::InvalidArgument(format!(
                "quarter must be in 1..=4, got {quarter}"
            )));
        }
        Ok(Self { year, quarter })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn quarter(self) -> u8 {
        self.quarter
    }

    /// Quarters elapsed since 0000Q1; used for index arithmetic.
    fn ordinal(self) -> i64 {
        self.year as i64 * 4 + (self.quarter as i64 - 1)
    }

    fn from_ordinal(ordinal: i64) -> Self {
        Self {
            year: ordinal.div_euclid(4) as i32,
            quarter: (ordinal.rem_euclid(4) + 1) as u8,
        }
    }

    pub fn succ(self) -> Self {
        self.offset(1)
    }

    pub fn pred(self) -> Self {
        self.offset(-1)
    }

    pub fn offset(self, quarters: i64) -> Self {
        Self::from_ordinal(self.ordinal() + quarters)
    }

    /// Signed number of quarters from `self` to `other`.
    pub fn quarters_until(self, other: QuarterIndex) -> i64 {
        other.ordinal() - self.ordinal()
    }
}

/// Parses `YYYYQn` or `YYYY-Qn`.
pub fn parse_quarter(text: &str) -> Result<QuarterIndex> {
    let err = || Error::ParseQuarter(text.to_string());
    let trimmed = text.trim();
    let (year, quarter) = trimmed.split_once(['Q', 'q']).ok_or_else(err)?;
    let year = year.strip_suffix('-').unwrap_or(year);
    if year.is_empty() || !year.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    if quarter.len() != 1 {
        return Err(err());
    }
    let year: i32 = year.parse().map_err(|_| err())?;
    let quarter: u8 = quarter.parse().map_err(|_| err())?;
    if !(1..=4).contains(&quarter) {
        return Err(err());
    }
    Ok(QuarterIndex { year, quarter })
}

impl FromStr for QuarterIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_quarter(s)
    }
}

impl fmt::Display for QuarterIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}Q{}", self.year, self.quarter)
    }
}

impl Serialize for QuarterIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuarterIndex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_quarter(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(y: i32, n: u8) -> QuarterIndex {
        QuarterIndex::new(y, n).unwrap()
    }

    #[test]
    fn parses_both_forms() {
        assert_eq!(parse_quarter("1995Q1").unwrap(), q(1995, 1));
        assert_eq!(parse_quarter("2008-Q2").unwrap(), q(2008, 2));
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["2008Q5", "2008Q0", "2008", "Q1", "2008Q12", "20x8Q1", "2008--Q1", ""] {
            let err = parse_quarter(bad).unwrap_err();
            assert!(err.to_string().contains(&format!("`{bad}`")), "{err}");
        }
    }

    #[test]
    fn successor_wraps_year() {
        assert_eq!(q(1999, 4).succ(), q(2000, 1));
        assert_eq!(q(2000, 1).pred(), q(1999, 4));
        assert_eq!(q(1995, 1).offset(91), q(2017, 4));
        assert_eq!(q(1995, 1).quarters_until(q(2008, 2)), 53);
    }

    #[test]
    fn ordering_is_chronological() {
        assert!(q(1999, 4) < q(2000, 1));
        assert!(q(2000, 1) < q(2000, 2));
        assert!(q(2001, 1) > q(2000, 4));
    }

    #[test]
    fn display_round_trips() {
        let idx = q(2011, 3);
        assert_eq!(idx.to_string(), "2011Q3");
        assert_eq!(idx.to_string().parse::<QuarterIndex>().unwrap(), idx);
    }
}
