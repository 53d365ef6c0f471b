//! Calendar arithmetic, half-open time windows and sliding-window schedules.
//!
//! All timestamps are day resolution. Month arithmetic keeps the day of month
//! and clamps to the last day of the target month (Jan 31 + 1 month = Feb 28).

use std::fmt;

use chrono::{Datelike, Months, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Days since 0001-01-01 (CE day 1). Used as the compact on-store time key.
pub type Day = i32;

pub fn to_day(date: NaiveDate) -> Day {
    date.num_days_from_ce()
}

pub fn from_day(day: Day) -> NaiveDate {
    NaiveDate::from_num_days_from_ce_opt(day).expect("day out of range")
}

/// `date` shifted forward by `months` calendar months, clamped to month end.
pub fn add_months(date: NaiveDate, months: u32) -> NaiveDate {
    date.checked_add_months(Months::new(months))
        .expect("date overflow")
}

pub fn sub_months(date: NaiveDate, months: u32) -> NaiveDate {
    date.checked_sub_months(Months::new(months))
        .expect("date underflow")
}

/// Half-open interval `[start, end)` of calendar dates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TimeWindow {
    start: NaiveDate,
    end: NaiveDate,
}

impl TimeWindow {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if start < end {
            Ok(Self { start, end })
        } else {
            Err(Error::InvalidWindow { start, end })
        }
    }

    pub fn start(&self) -> NaiveDate {
        self.start
    }

    pub fn end(&self) -> NaiveDate {
        self.end
    }

    pub fn start_day(&self) -> Day {
        to_day(self.start)
    }

    pub fn end_day(&self) -> Day {
        to_day(self.end)
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date < self.end
    }

    /// Does this window lie entirely inside `[start, end)` (`end = None` is unbounded)?
    pub fn within(&self, start: NaiveDate, end: Option<NaiveDate>) -> bool {
        start <= self.start && end.is_none_or(|e| self.end <= e)
    }

    pub fn overlaps(&self, start: NaiveDate, end: Option<NaiveDate>) -> bool {
        start < self.end && end.is_none_or(|e| e > self.start)
    }

    /// Number of whole calendar months from start to end, if the window is
    /// month aligned under the clamping rule.
    pub fn whole_months(&self) -> Option<u32> {
        let approx = (self.end.year() - self.start.year()) * 12 + self.end.month() as i32
            - self.start.month() as i32;
        if approx <= 0 {
            return None;
        }
        let months = approx as u32;
        (add_months(self.start, months) == self.end).then_some(months)
    }

    /// Calendar midpoint: start plus half the month count when the window
    /// spans an even number of whole months, otherwise the day midpoint.
    pub fn midpoint(&self) -> NaiveDate {
        match self.whole_months() {
            Some(m) if m % 2 == 0 => add_months(self.start, m / 2),
            _ => {
                let half = (to_day(self.end) - to_day(self.start)) / 2;
                from_day(to_day(self.start) + half)
            }
        }
    }

    /// Split into two adjoining halves at the calendar midpoint.
    pub fn split(&self) -> Result<(TimeWindow, TimeWindow)> {
        match self.whole_months() {
            Some(m) if m % 2 == 0 => {
                let mid = add_months(self.start, m / 2);
                Ok((
                    TimeWindow::new(self.start, mid)?,
                    TimeWindow::new(mid, self.end)?,
                ))
            }
            _ => Err(Error::UnevenSplit(*self)),
        }
    }
}

impl fmt::Display for TimeWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

pub fn split_window(w: TimeWindow) -> Result<(TimeWindow, TimeWindow)> {
    w.split()
}

/// Sliding-window schedule over a span.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowPlan {
    pub span_start: NaiveDate,
    pub span_end: NaiveDate,
    pub length_months: u32,
    pub stride_months: u32,
}

impl WindowPlan {
    pub const DEFAULT_LENGTH_MONTHS: u32 = 12;
    pub const DEFAULT_STRIDE_MONTHS: u32 = 1;

    pub fn new(
        span_start: NaiveDate,
        span_end: NaiveDate,
        length_months: u32,
        stride_months: u32,
    ) -> Result<Self> {
        if length_months == 0 || stride_months == 0 {
            return Err(Error::InvalidPlan(
                "window length and stride must be at least one month".into(),
            ));
        }
        if span_start >= span_end {
            return Err(Error::InvalidPlan(format!(
                "span start {span_start} is not before span end {span_end}"
            )));
        }
        Ok(Self {
            span_start,
            span_end,
            length_months,
            stride_months,
        })
    }

    /// Twelve-month windows sliding by one month.
    pub fn yearly(span_start: NaiveDate, span_end: NaiveDate) -> Result<Self> {
        Self::new(
            span_start,
            span_end,
            Self::DEFAULT_LENGTH_MONTHS,
            Self::DEFAULT_STRIDE_MONTHS,
        )
    }

    /// Window `k` is `[span_start + k*stride, span_start + k*stride + length)`,
    /// both ends measured from `span_start` so clamping never accumulates.
    pub fn windows(&self) -> Vec<TimeWindow> {
        let mut out = Vec::new();
        for k in 0u32.. {
            let offset = k * self.stride_months;
            let start = add_months(self.span_start, offset);
            let end = add_months(self.span_start, offset + self.length_months);
            if end > self.span_end {
                break;
            }
            out.push(TimeWindow { start, end });
        }
        out
    }
}

pub fn windows(plan: &WindowPlan) -> Vec<TimeWindow> {
    plan.windows()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    #[test]
    fn two_year_span_gives_thirteen_yearly_windows() {
        let plan = WindowPlan::yearly(d("2013-01-01"), d("2015-01-01")).unwrap();
        let ws = plan.windows();
        assert_eq!(ws.len(), 13);
        assert_eq!(ws[0].start(), d("2013-01-01"));
        assert_eq!(ws[0].end(), d("2014-01-01"));
        assert_eq!(ws[12].end(), d("2015-01-01"));
    }

    #[test]
    fn short_span_gives_no_windows() {
        let plan = WindowPlan::yearly(d("2013-01-01"), d("2013-06-01")).unwrap();
        assert!(plan.windows().is_empty());
    }

    #[test]
    fn month_end_clamps() {
        let plan = WindowPlan::new(d("2013-01-31"), d("2014-01-01"), 1, 1).unwrap();
        let ws = plan.windows();
        assert_eq!(ws[0].end(), d("2013-02-28"));
        // anchored at span start, so the next window end is Mar 31 not Mar 28
        assert_eq!(ws[1].start(), d("2013-02-28"));
        assert_eq!(ws[1].end(), d("2013-03-31"));
    }

    #[test]
    fn zero_stride_is_rejected() {
        assert!(WindowPlan::new(d("2013-01-01"), d("2014-01-01"), 12, 0).is_err());
        assert!(WindowPlan::new(d("2013-01-01"), d("2014-01-01"), 0, 1).is_err());
    }

    #[test]
    fn split_year_at_july() {
        let w = TimeWindow::new(d("2014-01-01"), d("2015-01-01")).unwrap();
        let (a, b) = w.split().unwrap();
        assert_eq!(a, TimeWindow::new(d("2014-01-01"), d("2014-07-01")).unwrap());
        assert_eq!(b, TimeWindow::new(d("2014-07-01"), d("2015-01-01")).unwrap());
        assert_eq!(w.midpoint(), d("2014-07-01"));
    }

    #[test]
    fn thirteen_months_cannot_split() {
        let w = TimeWindow::new(d("2014-01-01"), d("2015-02-01")).unwrap();
        assert!(matches!(w.split(), Err(Error::UnevenSplit(_))));
        let ragged = TimeWindow::new(d("2014-01-01"), d("2014-12-15")).unwrap();
        assert!(ragged.split().is_err());
    }

    #[test]
    fn empty_window_rejected() {
        assert!(TimeWindow::new(d("2014-01-01"), d("2014-01-01")).is_err());
    }

    #[test]
    fn windows_stay_inside_span() {
        let plan = WindowPlan::new(d("2012-06-21"), d("2021-04-07"), 12, 1).unwrap();
        for w in plan.windows() {
            assert!(w.start() < w.end());
            assert!(w.start() >= plan.span_start && w.end() <= plan.span_end);
        }
    }
}
