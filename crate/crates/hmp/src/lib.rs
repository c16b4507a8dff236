//! Files, instance generation and the command-line front end for the
//! `hmp-core` maintenance planner.
//!
//! Instances are TOML documents (`*.instance`) and solved schedules are JSON
//! reports; see [`instance_io`] and [`schedule_io`] for the layouts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod generator;
pub mod instance_io;
pub mod parallel;
pub mod params;
pub mod schedule_io;

pub use error::{Error, Result};
pub use generator::{generate, GeneratorConfig, RushTemplate};
pub use instance_io::{parse_instance, parse_instance_data, serialize_instance};
pub use parallel::{solve_exact_parallel, solve_parallel};
pub use schedule_io::{parse_schedule, serialize_schedule, ScheduleReport};

/// Current instance and schedule schema version.
pub const SCHEMA_VERSION: i64 = 1;
