use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::fleet_model::MaintenanceLevel;

/// Errors raised by the planning core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("regulation table has no rule for level {0}")]
    MissingLevelRule(MaintenanceLevel),
    #[error("regulation table has more than one rule for level {0}")]
    DuplicateLevelRule(MaintenanceLevel),
    #[error("invalid rule for level {level}: {reason}")]
    InvalidRule {
        level: MaintenanceLevel,
        reason: &'static str,
    },
    #[error("cycle interval must be positive, got {0} km")]
    InvalidCycleInterval(f64),
    #[error("train {train} has an empty delivery window (begin {begin} > end {end})")]
    EmptyWindow { train: String, begin: i64, end: i64 },
    #[error("train {train} has non-positive daily mileage")]
    NonPositiveMileage { train: String },
    #[error("daily mileage must be positive, got {0} km/day")]
    InvalidDailyMileage(f64),
    #[error("fleet is empty")]
    EmptyFleet,
    #[error("{0}")]
    Validation(ValidationErrors),
    #[error("search space of {product} schedules exceeds the node limit of {limit}")]
    SearchTooLarge { product: u128, limit: u128 },
    #[error("invalid annealing parameters: {0}")]
    InvalidParams(&'static str),
}

impl From<ValidationErrors> for Error {
    fn from(value: ValidationErrors) -> Self {
        Error::Validation(value)
    }
}

/// One semantic problem found while validating an instance or schedule.
#[derive(Debug, Clone, PartialEq)]
pub enum Issue {
    EmptyFleet,
    DuplicateTrainId(String),
    InvalidTrain {
        train: String,
        reason: &'static str,
    },
    EmptyWindow {
        train: String,
        begin: i64,
        end: i64,
    },
    WindowOutsideHorizon {
        train: String,
        end: i64,
        horizon: i64,
    },
    NoRatePeriods,
    InvalidRatePeriod {
        index: usize,
        reason: &'static str,
    },
    PeriodGap {
        after: i64,
        next_begin: i64,
    },
    PeriodOverlap {
        index: usize,
        begin: i64,
        previous_end: i64,
    },
    PeriodsDoNotStartAtZero {
        begin: i64,
    },
    PeriodsDoNotReachHorizon {
        end: i64,
        horizon: i64,
    },
    ZeroDailyAcceptance,
    ZeroCapacity,
    InvalidCost(&'static str),
    MissingDelivery(String),
    UnknownTrain(String),
    DeliveryOutsideWindow {
        train: String,
        day: i64,
        begin: i64,
        end: i64,
    },
    ScheduleLength {
        expected: usize,
        found: usize,
    },
    Custom(String),
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::EmptyFleet => write!(f, "fleet is empty"),
            Issue::DuplicateTrainId(id) => write!(f, "duplicate train id {id}"),
            Issue::InvalidTrain { train, reason } => write!(f, "train {train}: {reason}"),
            Issue::EmptyWindow { train, begin, end } => {
                write!(f, "train {train}: empty window [{begin},{end}]")
            }
            Issue::WindowOutsideHorizon {
                train,
                end,
                horizon,
            } => write!(
                f,
                "train {train}: window end {end} lies past the horizon {horizon}"
            ),
            Issue::NoRatePeriods => write!(f, "no rate periods given"),
            Issue::InvalidRatePeriod { index, reason } => {
                write!(f, "rate period #{index}: {reason}")
            }
            Issue::PeriodGap { after, next_begin } => write!(
                f,
                "rate periods leave a gap between day {after} and day {next_begin}"
            ),
            Issue::PeriodOverlap {
                index,
                begin,
                previous_end,
            } => write!(
                f,
                "rate period #{index} begins on day {begin} but the previous one ends on day {previous_end}"
            ),
            Issue::PeriodsDoNotStartAtZero { begin } => {
                write!(f, "rate periods start on day {begin}, expected day 0")
            }
            Issue::PeriodsDoNotReachHorizon { end, horizon } => write!(
                f,
                "rate periods end on day {end}, expected the horizon day {horizon}"
            ),
            Issue::ZeroDailyAcceptance => write!(f, "daily acceptance must be at least 1"),
            Issue::ZeroCapacity => write!(f, "workshop capacity must be at least 1"),
            Issue::InvalidCost(reason) => write!(f, "cost: {reason}"),
            Issue::MissingDelivery(id) => write!(f, "schedule has no delivery for train {id}"),
            Issue::UnknownTrain(id) => write!(f, "schedule names unknown train {id}"),
            Issue::DeliveryOutsideWindow {
                train,
                day,
                begin,
                end,
            } => write!(
                f,
                "train {train}: delivery day {day} outside window [{begin},{end}]"
            ),
            Issue::ScheduleLength { expected, found } => write!(
                f,
                "schedule has {found} deliveries, instance has {expected} trains"
            ),
            Issue::Custom(msg) => f.write_str(msg),
        }
    }
}

/// Every issue found by a validation pass, not just the first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationErrors(pub Vec<Issue>);

impl ValidationErrors {
    pub fn push(&mut self, issue: Issue) {
        self.0.push(issue);
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn issues(&self) -> &[Issue] {
        &self.0
    }

    pub fn into_result<T>(self, value: T) -> Result<T, ValidationErrors> {
        if self.0.is_empty() {
            Ok(value)
        } else {
            Err(self)
        }
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} validation issue(s)", self.0.len())?;
        for issue in &self.0 {
            write!(f, "\n  - {issue}")?;
        }
        Ok(())
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
