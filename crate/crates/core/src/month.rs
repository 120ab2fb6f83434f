//! Calendar months with pure month arithmetic (no days, no time zones).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A calendar month. Ordering is chronological.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct YearMonth {
    year: i32,
    month: u8,
}

impl YearMonth {
    pub fn new(year: i32, month: u8) -> Option<Self> {
        (1..=12).contains(&month).then_some(YearMonth { year, month })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn month(self) -> u8 {
        self.month
    }

    /// Months since year 0, January.
    pub fn ordinal(self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    pub fn from_ordinal(ordinal: i64) -> Self {
        YearMonth { year: ordinal.div_euclid(12) as i32, month: (ordinal.rem_euclid(12) + 1) as u8 }
    }

    pub fn add_months(self, delta: i64) -> Self {
        Self::from_ordinal(self.ordinal() + delta)
    }

    /// Inclusive count of months from `self` through `end`; zero when `end < self`.
    pub fn span_len(self, end: YearMonth) -> u64 {
        (end.ordinal() - self.ordinal() + 1).max(0) as u64
    }

    /// Iterate `self..=end`.
    pub fn through(self, end: YearMonth) -> impl Iterator<Item = YearMonth> {
        (self.ordinal()..=end.ordinal()).map(YearMonth::from_ordinal)
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = Error;

    /// Accepts `YYYY-MM`, or any longer ISO-like date (`YYYY-MM-DD...`) which is
    /// truncated to the month.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || Error::InvalidMonth(s.to_string());
        let bytes = t.as_bytes();
        if bytes.len() < 7 || bytes[4] != b'-' {
            return Err(bad());
        }
        if bytes.len() > 7 && bytes[7] != b'-' && bytes[7] != b'T' && bytes[7] != b' ' {
            return Err(bad());
        }
        if !bytes[..4].iter().all(u8::is_ascii_digit) || !bytes[5..7].iter().all(u8::is_ascii_digit) {
            return Err(bad());
        }
        let year: i32 = t[..4].parse().map_err(|_| bad())?;
        let month: u8 = t[5..7].parse().map_err(|_| bad())?;
        YearMonth::new(year, month).ok_or_else(bad)
    }
}

impl Serialize for YearMonth {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for YearMonth {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_truncates_days() {
        let m: YearMonth = "2024-03".parse().unwrap();
        assert_eq!(m, YearMonth::new(2024, 3).unwrap());
        let d: YearMonth = "2024-03-17".parse().unwrap();
        assert_eq!(d, m);
        let t: YearMonth = "2024-03-17T10:00:00Z".parse().unwrap();
        assert_eq!(t, m);
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "2024", "2024-13", "2024-00", "24-03", "2024/03", "2024-3x", "abcd-ef"] {
            assert!(s.parse::<YearMonth>().is_err(), "{s}");
        }
    }

    #[test]
    fn arithmetic_crosses_years() {
        let m = YearMonth::new(2016, 1).unwrap();
        assert_eq!(m.add_months(-2).to_string(), "2015-11");
        assert_eq!(m.add_months(12).to_string(), "2017-01");
        let end = YearMonth::new(2016, 7).unwrap();
        assert_eq!(m.span_len(end), 7);
        assert_eq!(end.span_len(m), 0);
        assert_eq!(m.through(end).count(), 7);
    }
}
