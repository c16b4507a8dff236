//! Maintenance regulations, per-train fleet data and delivery windows.
//!
//! A train may be delivered to the workshop on any integer day inside its
//! window. The window is derived from the train's mileage expiry day and the
//! regulation allowance on either side of the target mileage, converted to
//! days with the train's daily running mileage. Fractional bounds are rounded
//! toward the window center: the begin day is the ceiling of the real lower
//! bound, the end day the floor of the real upper bound.
//!
//! Days are integer indices with day 1 the first day of the planning horizon.
//! Day 0 and negative days belong to the previous horizon.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// High-level maintenance levels, ordered `III < IV < V`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MaintenanceLevel {
    III,
    IV,
    V,
}

impl MaintenanceLevel {
    pub const ALL: [MaintenanceLevel; 3] = [
        MaintenanceLevel::III,
        MaintenanceLevel::IV,
        MaintenanceLevel::V,
    ];

    /// Position in [`MaintenanceLevel::ALL`].
    #[inline]
    pub const fn index(self) -> usize {
        match self {
            MaintenanceLevel::III => 0,
            MaintenanceLevel::IV => 1,
            MaintenanceLevel::V => 2,
        }
    }

    pub const fn as_str(self) -> &'static str {
        match self {
            MaintenanceLevel::III => "III",
            MaintenanceLevel::IV => "IV",
            MaintenanceLevel::V => "V",
        }
    }

    /// Parses a roman numeral or the numeric level (`"3"`, `"4"`, `"5"`).
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "III" | "3" => Some(MaintenanceLevel::III),
            "IV" | "4" => Some(MaintenanceLevel::IV),
            "V" | "5" => Some(MaintenanceLevel::V),
            _ => None,
        }
    }
}

impl fmt::Display for MaintenanceLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Regulation data for one maintenance level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelRule {
    pub level: MaintenanceLevel,
    pub target_mileage_km: f64,
    /// Allowance before the target mileage.
    pub left_offset_km: f64,
    /// Allowance after the target mileage.
    pub right_offset_km: f64,
    pub service_days: u32,
    /// Trains of this level the workshop can hold at once.
    pub capacity: u32,
}

impl LevelRule {
    fn check(&self) -> Result<()> {
        let fail = |reason| {
            Err(Error::InvalidRule {
                level: self.level,
                reason,
            })
        };
        if !(self.target_mileage_km > 0.0) || !self.target_mileage_km.is_finite() {
            return fail("target mileage must be positive");
        }
        if !(self.left_offset_km >= 0.0) || !self.left_offset_km.is_finite() {
            return fail("left offset must be non-negative");
        }
        if !(self.right_offset_km >= 0.0) || !self.right_offset_km.is_finite() {
            return fail("right offset must be non-negative");
        }
        if self.left_offset_km >= self.target_mileage_km {
            return fail("left offset must be smaller than the target mileage");
        }
        if self.service_days < 1 {
            return fail("service days must be at least 1");
        }
        if self.capacity < 1 {
            return fail("capacity must be at least 1");
        }
        Ok(())
    }
}

/// One rule per maintenance level plus the mileage between adjacent
/// high-level maintenances.
#[derive(Debug, Clone, PartialEq)]
pub struct RegulationTable {
    rules: [LevelRule; 3],
    cycle_interval_km: f64,
}

impl RegulationTable {
    pub fn new(rules: Vec<LevelRule>, cycle_interval_km: f64) -> Result<Self> {
        if !(cycle_interval_km > 0.0) || !cycle_interval_km.is_finite() {
            return Err(Error::InvalidCycleInterval(cycle_interval_km));
        }
        let mut slots: [Option<LevelRule>; 3] = [None, None, None];
        for rule in rules {
            rule.check()?;
            let slot = &mut slots[rule.level.index()];
            if slot.is_some() {
                return Err(Error::DuplicateLevelRule(rule.level));
            }
            *slot = Some(rule);
        }
        let [a, b, c] = slots;
        let take = |r: Option<LevelRule>, level| r.ok_or(Error::MissingLevelRule(level));
        Ok(Self {
            rules: [
                take(a, MaintenanceLevel::III)?,
                take(b, MaintenanceLevel::IV)?,
                take(c, MaintenanceLevel::V)?,
            ],
            cycle_interval_km,
        })
    }

    /// Mileage intervals of the CRH2 regulation (600/1200/2400 thousand km
    /// targets) with the given service durations and per-level capacities.
    pub fn crh2(service_days: [u32; 3], capacity: [u32; 3]) -> Result<Self> {
        let targets = [600_000.0, 1_200_000.0, 2_400_000.0];
        let left = [50_000.0, 100_000.0, 100_000.0];
        let right = [20_000.0, 50_000.0, 100_000.0];
        let rules = MaintenanceLevel::ALL
            .iter()
            .map(|&level| {
                let i = level.index();
                LevelRule {
                    level,
                    target_mileage_km: targets[i],
                    left_offset_km: left[i],
                    right_offset_km: right[i],
                    service_days: service_days[i],
                    capacity: capacity[i],
                }
            })
            .collect();
        Self::new(rules, 600_000.0)
    }

    #[inline]
    pub fn rule(&self, level: MaintenanceLevel) -> &LevelRule {
        &self.rules[level.index()]
    }

    pub fn rules(&self) -> &[LevelRule; 3] {
        &self.rules
    }

    #[inline]
    pub fn cycle_interval_km(&self) -> f64 {
        self.cycle_interval_km
    }

    #[inline]
    pub fn service_days(&self, level: MaintenanceLevel) -> u32 {
        self.rule(level).service_days
    }
}

/// A maintenance that started before the horizon, or at least before this
/// plan was made, and may still occupy workshop days.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Carryover {
    pub start_day: i64,
    pub duration_days: u32,
    pub level: MaintenanceLevel,
}

/// One train of the fleet.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainRecord {
    pub id: String,
    /// Number of eight-car units grouped in the train.
    pub unit_count: u32,
    pub daily_mileage_km: f64,
    /// Day on which the accumulated mileage reaches the target.
    pub expired_day: i64,
    pub level: MaintenanceLevel,
    /// Level of the maintenance following this one.
    pub next_level: MaintenanceLevel,
    pub carryover: Option<Carryover>,
}

/// Inclusive range of admissible delivery days.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimeWindow {
    pub begin_day: i64,
    pub end_day: i64,
}

impl TimeWindow {
    pub fn new(begin_day: i64, end_day: i64) -> Self {
        debug_assert!(begin_day <= end_day);
        Self { begin_day, end_day }
    }

    /// Number of admissible days.
    #[inline]
    pub fn width(&self) -> u64 {
        (self.end_day - self.begin_day + 1) as u64
    }

    #[inline]
    pub fn contains(&self, day: i64) -> bool {
        self.begin_day <= day && day <= self.end_day
    }

    #[inline]
    pub fn clamp(&self, day: i64) -> i64 {
        day.clamp(self.begin_day, self.end_day)
    }

    pub fn days(&self) -> core::ops::RangeInclusive<i64> {
        self.begin_day..=self.end_day
    }
}

impl fmt::Display for TimeWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.begin_day, self.end_day)
    }
}

/// Real-valued window bounds before rounding.
pub fn exact_window_bounds(train: &TrainRecord, regs: &RegulationTable) -> (f64, f64) {
    let rule = regs.rule(train.level);
    let expired = train.expired_day as f64;
    (
        expired - rule.left_offset_km / train.daily_mileage_km,
        expired + rule.right_offset_km / train.daily_mileage_km,
    )
}

/// Delivery window of `train` under `regs`.
///
/// The begin day never precedes day 1: days before the horizon are already
/// past when the plan is made.
pub fn compute_window(train: &TrainRecord, regs: &RegulationTable) -> Result<TimeWindow> {
    if !(train.daily_mileage_km > 0.0) || !train.daily_mileage_km.is_finite() {
        return Err(Error::NonPositiveMileage {
            train: train.id.clone(),
        });
    }
    let (lo, hi) = exact_window_bounds(train, regs);
    let begin = (libm::ceil(lo) as i64).max(1);
    let end = libm::floor(hi) as i64;
    if begin > end {
        return Err(Error::EmptyWindow {
            train: train.id.clone(),
            begin,
            end,
        });
    }
    Ok(TimeWindow::new(begin, end))
}

/// Length `T` of the planning horizon: the latest window end over the fleet.
pub fn planning_horizon(trains: &[TrainRecord], regs: &RegulationTable) -> Result<i64> {
    if trains.is_empty() {
        return Err(Error::EmptyFleet);
    }
    trains.iter().try_fold(i64::MIN, |acc, train| {
        Ok(acc.max(compute_window(train, regs)?.end_day))
    })
}
