//! Civil dates and the dormant-season day index.
//!
//! A season runs from Sep 7 of year Y through May 15 of Y+1 and is labelled
//! `"Y-(Y+1)"`. Its day index starts at 250 on Sep 7 and advances by one per
//! calendar day, so May 15 lands on 500, or 501 when Feb 29 intervenes.

use alloc::format;
use alloc::string::String;
use core::fmt;

/// Season day index of Sep 7.
pub const SEASON_FIRST_JDAY: u16 = 250;
/// Season day index of May 15 in a season without Feb 29.
pub const SEASON_LAST_JDAY: u16 = 500;
/// Season day index of May 15 in a leap-spanning season.
pub const SEASON_MAX_JDAY: u16 = 501;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Date {
    year: i32,
    month: u8,
    day: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DateError {
    Malformed(String),
    OutOfRange { year: i32, month: u8, day: u8 },
}

impl fmt::Display for DateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DateError::Malformed(s) => write!(f, "malformed date {s:?}, expected YYYY-MM-DD"),
            DateError::OutOfRange { year, month, day } => {
                write!(f, "no such calendar day {year:04}-{month:02}-{day:02}")
            }
        }
    }
}

impl core::error::Error for DateError {}

pub fn is_leap_year(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

fn days_in_month(year: i32, month: u8) -> u8 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap_year(year) => 29,
        2 => 28,
        _ => 0,
    }
}

impl Date {
    pub fn new(year: i32, month: u8, day: u8) -> Result<Self, DateError> {
        if !(1..=12).contains(&month) || day == 0 || day > days_in_month(year, month) {
            return Err(DateError::OutOfRange { year, month, day });
        }
        Ok(Date { year, month, day })
    }

    /// Parses strict ISO-8601 `YYYY-MM-DD`.
    pub fn parse_iso(s: &str) -> Result<Self, DateError> {
        let bytes = s.as_bytes();
        let malformed = || DateError::Malformed(String::from(s));
        if bytes.len() != 10 || bytes[4] != b'-' || bytes[7] != b'-' {
            return Err(malformed());
        }
        let digits = |range: core::ops::Range<usize>| -> Result<u32, DateError> {
            let part = &s[range];
            if !part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(malformed());
            }
            part.parse::<u32>().map_err(|_| malformed())
        };
        let year = digits(0..4)? as i32;
        let month = digits(5..7)? as u8;
        let day = digits(8..10)? as u8;
        Date::new(year, month, day)
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn month(&self) -> u8 {
        self.month
    }

    pub fn day(&self) -> u8 {
        self.day
    }

    /// Days since 1970-01-01 in the proleptic Gregorian calendar.
    pub fn days_since_epoch(&self) -> i64 {
        // Hinnant's days_from_civil.
        let y = i64::from(self.year) - i64::from(self.month <= 2);
        let era = if y >= 0 { y } else { y - 399 } / 400;
        let yoe = y - era * 400;
        let m = i64::from(self.month);
        let doy = (153 * (if m > 2 { m - 3 } else { m + 9 }) + 2) / 5 + i64::from(self.day) - 1;
        let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        era * 146_097 + doe - 719_468
    }

    /// Inverse of [`Date::days_since_epoch`].
    pub fn from_days_since_epoch(days: i64) -> Date {
        // Hinnant's civil_from_days.
        let z = days + 719_468;
        let era = if z >= 0 { z } else { z - 146_096 } / 146_097;
        let doe = z - era * 146_097;
        let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
        let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        let mp = (5 * doy + 2) / 153;
        let day = (doy - (153 * mp + 2) / 5 + 1) as u8;
        let month = if mp < 10 { mp + 3 } else { mp - 9 } as u8;
        let year = (yoe + era * 400 + i64::from(month <= 2)) as i32;
        Date { year, month, day }
    }

    /// The calendar day of `jday` in the season starting in `start_year`.
    pub fn from_season_jday(start_year: i32, jday: u16) -> Date {
        let sep7 = Date { year: start_year, month: 9, day: 7 };
        Date::from_days_since_epoch(sep7.days_since_epoch() + i64::from(jday) - i64::from(SEASON_FIRST_JDAY))
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

/// Label of the season starting in `start_year`, e.g. `"2017-2018"`.
pub fn season_label(start_year: i32) -> String {
    format!("{:04}-{:04}", start_year, start_year + 1)
}

/// Start year of a well-formed `"YYYY-YYYY"` label with consecutive years.
pub fn season_start_year(label: &str) -> Option<i32> {
    let (a, b) = label.split_once('-')?;
    if a.len() != 4 || b.len() != 4 {
        return None;
    }
    let start: i32 = a.parse().ok()?;
    let end: i32 = b.parse().ok()?;
    (end == start + 1).then_some(start)
}

/// Whether Feb 29 falls inside the season starting in `start_year`.
pub fn season_spans_leap_day(start_year: i32) -> bool {
    is_leap_year(start_year + 1)
}

/// Maps a date to its dormant season and day index, or `None` when the date
/// falls between May 16 and Sep 6.
pub fn season_jday(date: Date) -> Option<(String, u16)> {
    let md = (date.month, date.day);
    let start_year = if md >= (9, 7) {
        date.year
    } else if md <= (5, 15) {
        date.year - 1
    } else {
        return None;
    };
    let sep7 = Date { year: start_year, month: 9, day: 7 };
    let offset = date.days_since_epoch() - sep7.days_since_epoch();
    Some((season_label(start_year), SEASON_FIRST_JDAY + offset as u16))
}
