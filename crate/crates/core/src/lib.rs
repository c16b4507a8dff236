//! Planning core for fleet high-level maintenance.
//!
//! Each train must be delivered to the workshop once, on a day inside a
//! window derived from its mileage expiry and the maintenance regulation.
//! Delivering early forfeits remaining mileage; the fleet maintenance rate,
//! the number of daily deliveries and the workshop capacity are limited.
//!
//! - [`fleet_model`]: regulations, trains, delivery windows, horizon.
//! - [`occupancy`]: the days a train spends in the workshop.
//! - [`evaluation`]: instances, schedules, objective and constraint checks.
//! - [`annealer`]: penalty-based simulated annealing.
//! - [`exact_oracle`]: exhaustive enumeration for small instances.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod annealer;
pub mod error;
pub mod evaluation;
pub mod exact_oracle;
pub mod fleet_model;
pub mod occupancy;

pub use annealer::{solve, solve_restarts, SaParams, SaResult, StopReason};
pub use error::{Error, Issue, Result, ValidationErrors};
pub use evaluation::{
    evaluate, CapacityMode, CostRates, Evaluation, Instance, InstanceData, PenaltyWeights,
    RatePeriod, Schedule,
};
pub use exact_oracle::{solve_exact, OracleLimits, OracleResult};
pub use fleet_model::{
    compute_window, planning_horizon, Carryover, LevelRule, MaintenanceLevel, RegulationTable,
    TimeWindow, TrainRecord,
};
