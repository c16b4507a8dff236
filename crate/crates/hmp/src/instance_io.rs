//! Instance files.
//!
//! An instance is a TOML document. Every quantity carries its unit in the
//! field name and all days are integers:
//!
//! ```toml
//! schema_version = 1
//! horizon_day = 208            # optional, defaults to the latest window end
//!
//! [limits]
//! daily_acceptance = 3
//! capacity_mode = "per-level"  # or "aggregate" with aggregate_capacity = n
//!
//! [cost]
//! maintain_per_km = 1.0
//! income_per_km = 0.0
//! profit_rate = 0.0
//!
//! [regulation]
//! cycle_interval_km = 600000.0
//!
//! [[regulation.levels]]
//! level = "III"
//! target_mileage_km = 600000.0
//! left_offset_km = 50000.0
//! right_offset_km = 20000.0
//! service_days = 40
//! capacity = 2
//!
//! [[rate_periods]]
//! label = "normal"
//! begin_day = 0
//! end_day = 208
//! max_rate = 1.0
//!
//! [[trains]]
//! id = "EMU_001"
//! unit_count = 1
//! daily_mileage_km = 1600.0
//! expired_day = 127
//! level = "III"
//! next_level = "IV"
//! carryover = { start_day = -10, duration_days = 30, level = "V" }
//! ```

use hmp_core::{
    CapacityMode, Carryover, CostRates, Instance, InstanceData, Issue, LevelRule, MaintenanceLevel,
    RatePeriod, RegulationTable, TrainRecord, ValidationErrors,
};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, SCHEMA_VERSION};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    schema_version: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    horizon_day: Option<i64>,
    limits: LimitsFile,
    #[serde(default)]
    cost: CostFile,
    regulation: RegulationFile,
    rate_periods: Vec<RatePeriodFile>,
    trains: Vec<TrainFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LimitsFile {
    daily_acceptance: u32,
    capacity_mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    aggregate_capacity: Option<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CostFile {
    maintain_per_km: f64,
    #[serde(default)]
    income_per_km: f64,
    #[serde(default)]
    profit_rate: f64,
}

impl Default for CostFile {
    fn default() -> Self {
        CostRates::default().into()
    }
}

impl From<CostRates> for CostFile {
    fn from(c: CostRates) -> Self {
        Self {
            maintain_per_km: c.maintain_per_km,
            income_per_km: c.income_per_km,
            profit_rate: c.profit_rate,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegulationFile {
    cycle_interval_km: f64,
    levels: Vec<LevelFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct LevelFile {
    pub level: String,
    pub target_mileage_km: f64,
    pub left_offset_km: f64,
    pub right_offset_km: f64,
    pub service_days: u32,
    pub capacity: u32,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RatePeriodFile {
    #[serde(default)]
    label: String,
    begin_day: i64,
    end_day: i64,
    max_rate: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrainFile {
    id: String,
    unit_count: u32,
    daily_mileage_km: f64,
    expired_day: i64,
    level: String,
    next_level: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    carryover: Option<CarryoverFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CarryoverFile {
    start_day: i64,
    duration_days: u32,
    level: String,
}

/// Resolves a level name, recording an issue and falling back to level III
/// so that the remaining checks still run.
fn level(name: &str, what: &str, issues: &mut ValidationErrors) -> MaintenanceLevel {
    MaintenanceLevel::parse(name).unwrap_or_else(|| {
        issues.push(Issue::Custom(format!(
            "{what}: unknown maintenance level \"{name}\""
        )));
        MaintenanceLevel::III
    })
}

pub(crate) fn level_rules(levels: &[LevelFile], issues: &mut ValidationErrors) -> Vec<LevelRule> {
    levels
        .iter()
        .enumerate()
        .map(|(i, l)| LevelRule {
            level: level(&l.level, &format!("regulation level #{i}"), issues),
            target_mileage_km: l.target_mileage_km,
            left_offset_km: l.left_offset_km,
            right_offset_km: l.right_offset_km,
            service_days: l.service_days,
            capacity: l.capacity,
        })
        .collect()
}

fn check_schema(text: &str) -> Result<()> {
    let table: toml::Table = toml::from_str(text).map_err(|e| Error::from_toml(text, e))?;
    match table.get("schema_version") {
        None => Err(Error::at_offset(text, 0, "missing field `schema_version`")),
        Some(toml::Value::Integer(v)) if *v == SCHEMA_VERSION => Ok(()),
        Some(toml::Value::Integer(v)) => Err(Error::SchemaVersion {
            found: *v,
            expected: SCHEMA_VERSION,
        }),
        Some(_) => Err(Error::at_offset(
            text,
            0,
            "`schema_version` must be an integer",
        )),
    }
}

/// Converts a parsed file into instance data. Name-level problems are
/// collected in the returned list with fallbacks in place; `None` only when
/// the regulation table itself is unusable.
fn convert(file: InstanceFile) -> (Option<InstanceData>, ValidationErrors) {
    let mut issues = ValidationErrors::default();

    let rules = level_rules(&file.regulation.levels, &mut issues);
    let regs = RegulationTable::new(rules, file.regulation.cycle_interval_km);

    let limits = &file.limits;
    let capacity_mode = match (limits.capacity_mode.as_str(), limits.aggregate_capacity) {
        ("per-level", None) => CapacityMode::PerLevel,
        ("aggregate", Some(total)) => CapacityMode::Aggregate { total },
        ("per-level", Some(_)) => {
            issues.push(Issue::Custom(
                "limits: aggregate_capacity is only allowed with capacity_mode = \"aggregate\""
                    .into(),
            ));
            CapacityMode::PerLevel
        }
        ("aggregate", None) => {
            issues.push(Issue::Custom(
                "limits: capacity_mode = \"aggregate\" needs aggregate_capacity".into(),
            ));
            CapacityMode::PerLevel
        }
        (other, _) => {
            issues.push(Issue::Custom(format!(
                "limits: unknown capacity_mode \"{other}\", expected \"per-level\" or \"aggregate\""
            )));
            CapacityMode::PerLevel
        }
    };

    let trains = file
        .trains
        .iter()
        .map(|t| {
            let what = format!("train {}", t.id);
            TrainRecord {
                id: t.id.clone(),
                unit_count: t.unit_count,
                daily_mileage_km: t.daily_mileage_km,
                expired_day: t.expired_day,
                level: level(&t.level, &what, &mut issues),
                next_level: level(&t.next_level, &what, &mut issues),
                carryover: t.carryover.as_ref().map(|c| Carryover {
                    start_day: c.start_day,
                    duration_days: c.duration_days,
                    level: level(&c.level, &format!("{what} carryover"), &mut issues),
                }),
            }
        })
        .collect();

    let regs = match regs {
        Ok(r) => r,
        Err(e) => {
            issues.push(Issue::Custom(format!("regulation: {e}")));
            return (None, issues);
        }
    };
    let data = InstanceData {
        trains,
        regs,
        rate_periods: file
            .rate_periods
            .into_iter()
            .map(|p| RatePeriod {
                begin_day: p.begin_day,
                end_day: p.end_day,
                max_rate: p.max_rate,
                label: p.label,
            })
            .collect(),
        daily_acceptance: file.limits.daily_acceptance,
        capacity_mode,
        horizon: file.horizon_day,
        cost: CostRates {
            maintain_per_km: file.cost.maintain_per_km,
            income_per_km: file.cost.income_per_km,
            profit_rate: file.cost.profit_rate,
        },
    };
    (Some(data), issues)
}

fn read_file(text: &str) -> Result<InstanceFile> {
    check_schema(text)?;
    toml::from_str(text).map_err(|e| Error::from_toml(text, e))
}

/// Parses an instance document without the cross-field checks done by
/// [`Instance::new`]. Unknown level names and capacity modes are reported
/// together.
pub fn parse_instance_data(text: &str) -> Result<InstanceData> {
    match convert(read_file(text)?) {
        (Some(data), issues) => issues.into_result(data).map_err(Error::from),
        (None, issues) => Err(issues.into()),
    }
}

/// Parses and validates an instance document, reporting every semantic
/// problem found.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let (data, mut issues) = convert(read_file(text)?);
    let Some(data) = data else {
        return Err(issues.into());
    };
    match Instance::new(data) {
        Ok(inst) if issues.is_empty() => Ok(inst),
        Ok(_) => Err(issues.into()),
        Err(more) => {
            issues.0.extend(more.0);
            Err(issues.into())
        }
    }
}

/// Writes `data` in the instance format; [`parse_instance_data`] reads it
/// back unchanged.
pub fn serialize_instance(data: &InstanceData) -> String {
    let (capacity_mode, aggregate_capacity) = match data.capacity_mode {
        CapacityMode::PerLevel => ("per-level", None),
        CapacityMode::Aggregate { total } => ("aggregate", Some(total)),
    };
    let file = InstanceFile {
        schema_version: SCHEMA_VERSION,
        horizon_day: data.horizon,
        limits: LimitsFile {
            daily_acceptance: data.daily_acceptance,
            capacity_mode: capacity_mode.to_string(),
            aggregate_capacity,
        },
        cost: data.cost.into(),
        regulation: RegulationFile {
            cycle_interval_km: data.regs.cycle_interval_km(),
            levels: data
                .regs
                .rules()
                .iter()
                .map(|r| LevelFile {
                    level: r.level.to_string(),
                    target_mileage_km: r.target_mileage_km,
                    left_offset_km: r.left_offset_km,
                    right_offset_km: r.right_offset_km,
                    service_days: r.service_days,
                    capacity: r.capacity,
                })
                .collect(),
        },
        rate_periods: data
            .rate_periods
            .iter()
            .map(|p| RatePeriodFile {
                label: p.label.clone(),
                begin_day: p.begin_day,
                end_day: p.end_day,
                max_rate: p.max_rate,
            })
            .collect(),
        trains: data
            .trains
            .iter()
            .map(|t| TrainFile {
                id: t.id.clone(),
                unit_count: t.unit_count,
                daily_mileage_km: t.daily_mileage_km,
                expired_day: t.expired_day,
                level: t.level.to_string(),
                next_level: t.next_level.to_string(),
                carryover: t.carryover.as_ref().map(|c| CarryoverFile {
                    start_day: c.start_day,
                    duration_days: c.duration_days,
                    level: c.level.to_string(),
                }),
            })
            .collect(),
    };
    toml::to_string(&file).expect("instance fields are plain TOML values")
}
