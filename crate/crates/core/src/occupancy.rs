//! Whether a train is in the workshop on a given day.
//!
//! A train's occupancy over `[0, T]` is the union of up to three closed day
//! intervals: the tail of a carryover maintenance, the maintenance starting on
//! the planned delivery day, and a possible next maintenance that begins at
//! its mileage expiry when the current one is delivered early in the horizon.

use crate::error::{Error, Result};
use crate::fleet_model::{MaintenanceLevel, RegulationTable, TrainRecord};

/// Last occupied day of a maintenance starting on `start` and lasting
/// `duration` days. Intervals are closed on both ends.
#[inline]
pub const fn service_end(start: i64, duration: u32) -> i64 {
    start + duration as i64
}

/// Closed interval of days.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DayInterval {
    pub begin: i64,
    pub end: i64,
}

impl DayInterval {
    pub const fn new(begin: i64, end: i64) -> Self {
        Self { begin, end }
    }

    #[inline]
    pub fn contains(&self, day: i64) -> bool {
        self.begin <= day && day <= self.end
    }

    /// Inclusive day count.
    #[inline]
    pub fn len(&self) -> u64 {
        (self.end - self.begin + 1).max(0) as u64
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.end < self.begin
    }

    /// Intersection with `[lo, hi]`, or `None` when disjoint.
    pub fn clip(self, lo: i64, hi: i64) -> Option<Self> {
        let c = Self::new(self.begin.max(lo), self.end.min(hi));
        (!c.is_empty()).then_some(c)
    }
}

/// Occupied interval tagged with the level of the maintenance performed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OccupiedSpan {
    pub days: DayInterval,
    pub level: MaintenanceLevel,
}

/// Clipped maintenance intervals of one train for one delivery day.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OccupancyIntervals {
    pub carryover: Option<OccupiedSpan>,
    pub current: OccupiedSpan,
    pub next: Option<OccupiedSpan>,
}

impl OccupancyIntervals {
    /// Carryover, current and next spans, in that order.
    pub fn spans(&self) -> impl Iterator<Item = OccupiedSpan> + '_ {
        self.carryover
            .into_iter()
            .chain(core::iter::once(self.current))
            .chain(self.next)
    }

    pub fn contains(&self, day: i64) -> bool {
        self.spans().any(|s| s.days.contains(day))
    }

    /// Level of the maintenance occupying `day`. On overlap the current
    /// maintenance wins over the carryover and the next one over both.
    pub fn level_on(&self, day: i64) -> Option<MaintenanceLevel> {
        self.spans()
            .filter(|s| s.days.contains(day))
            .last()
            .map(|s| s.level)
    }
}

/// Real-valued expiry day of the maintenance after one delivered on
/// `delivery_day`.
pub fn next_expiry(
    delivery_day: i64,
    service_days: u32,
    cycle_interval_km: f64,
    daily_mileage_km: f64,
) -> Result<f64> {
    if !(daily_mileage_km > 0.0) || !daily_mileage_km.is_finite() {
        return Err(Error::InvalidDailyMileage(daily_mileage_km));
    }
    Ok(delivery_day as f64 + service_days as f64 + cycle_interval_km / daily_mileage_km)
}

/// Carryover interval clipped to `[0, horizon]`; independent of the delivery.
pub fn carryover_span(train: &TrainRecord, horizon: i64) -> Option<OccupiedSpan> {
    let c = train.carryover.as_ref()?;
    let end = service_end(c.start_day, c.duration_days);
    if end <= 0 {
        return None;
    }
    DayInterval::new(c.start_day.max(0), end)
        .clip(0, horizon)
        .map(|days| OccupiedSpan {
            days,
            level: c.level,
        })
}

/// Current and next intervals for `delivery_day`, which is the part of the
/// occupancy that moves with the decision.
pub fn delivery_spans(
    train: &TrainRecord,
    delivery_day: i64,
    regs: &RegulationTable,
    horizon: i64,
) -> (OccupiedSpan, Option<OccupiedSpan>) {
    let service = regs.service_days(train.level);
    let current_days = DayInterval::new(
        delivery_day,
        service_end(delivery_day, service).min(horizon),
    );
    let current = OccupiedSpan {
        days: current_days,
        level: train.level,
    };
    // daily mileage is validated positive before any schedule is evaluated
    let expiry =
        delivery_day as f64 + service as f64 + regs.cycle_interval_km() / train.daily_mileage_km;
    let next_start = libm::floor(expiry) as i64;
    let next = (next_start <= horizon).then(|| OccupiedSpan {
        days: DayInterval::new(
            next_start,
            service_end(next_start, regs.service_days(train.next_level)).min(horizon),
        ),
        level: train.next_level,
    });
    (current, next)
}

pub fn occupancy_intervals(
    train: &TrainRecord,
    delivery_day: i64,
    regs: &RegulationTable,
    horizon: i64,
) -> OccupancyIntervals {
    debug_assert!(delivery_day <= horizon);
    let (current, next) = delivery_spans(train, delivery_day, regs, horizon);
    OccupancyIntervals {
        carryover: carryover_span(train, horizon),
        current,
        next,
    }
}

/// State function: `true` when the train is under maintenance on `day`.
pub fn state(
    train: &TrainRecord,
    delivery_day: i64,
    day: i64,
    regs: &RegulationTable,
    horizon: i64,
) -> bool {
    occupancy_intervals(train, delivery_day, regs, horizon).contains(day)
}
