//! Solved-schedule reports.
//!
//! A report has a fixed-width text table for people and a JSON document for
//! tools. Both list one row per train in instance order followed by a
//! summary; the JSON field order is fixed.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use hmp_core::{Evaluation, Instance, Schedule};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainRow {
    pub id: String,
    pub level: String,
    pub window: [i64; 2],
    pub delivery_day: i64,
    /// `expired_day - delivery_day`; negative when delivered after expiry.
    pub days_early: i64,
    pub loss_train_km: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mileage_loss_train_km: f64,
    pub cost: f64,
    pub feasible: bool,
    pub rate_violation: f64,
    pub acceptance_violation: u64,
    pub capacity_violation: u64,
    /// Trains in maintenance on each day `0..=horizon`.
    pub occupancy: Vec<u32>,
}

/// Machine-readable schedule report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleReport {
    pub schema_version: i64,
    pub trains: Vec<TrainRow>,
    pub summary: Summary,
}

impl ScheduleReport {
    /// Builds the report; `evaluation` must belong to `schedule`.
    pub fn new(instance: &Instance, schedule: &Schedule, evaluation: &Evaluation) -> Result<Self> {
        instance.check_schedule(schedule)?;
        let trains: Vec<TrainRow> = instance
            .trains()
            .iter()
            .zip(instance.windows())
            .zip(&schedule.days)
            .map(|((t, w), &d)| TrainRow {
                id: t.id.clone(),
                level: t.level.to_string(),
                window: [w.begin_day, w.end_day],
                delivery_day: d,
                days_early: t.expired_day - d,
                loss_train_km: (t.expired_day - d) as f64
                    * (t.daily_mileage_km * t.unit_count as f64),
            })
            .collect();
        let loss: f64 = trains.iter().map(|r| r.loss_train_km).sum();
        if loss != evaluation.mileage_loss
            || evaluation.in_maintenance.len() != instance.horizon() as usize + 1
        {
            return Err(Error::Report(
                "evaluation does not belong to this schedule".into(),
            ));
        }
        let deliveries = evaluation
            .deliveries
            .iter()
            .map(|&x| x as usize)
            .sum::<usize>();
        if deliveries != schedule.days.len() {
            return Err(Error::Report(
                "evaluation does not belong to this schedule".into(),
            ));
        }
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            trains,
            summary: Summary {
                mileage_loss_train_km: evaluation.mileage_loss,
                cost: evaluation.cost_value,
                feasible: evaluation.feasible,
                rate_violation: evaluation.rate_total(),
                acceptance_violation: evaluation.acceptance_total(),
                capacity_violation: evaluation.capacity_total(),
                occupancy: evaluation.in_maintenance.clone(),
            },
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is plain data");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let id_w = self
            .trains
            .iter()
            .map(|r| r.id.len())
            .max()
            .unwrap_or(2)
            .max(2);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<id_w$}  {:<5}  {:>11}  {:>8}  {:>10}  {:>14}",
            "id", "level", "window", "delivery", "days_early", "loss_train_km"
        );
        for r in &self.trains {
            let window = format!("[{},{}]", r.window[0], r.window[1]);
            let _ = writeln!(
                out,
                "{:<id_w$}  {:<5}  {:>11}  {:>8}  {:>10}  {:>14.1}",
                r.id, r.level, window, r.delivery_day, r.days_early, r.loss_train_km
            );
        }
        let s = &self.summary;
        let _ = writeln!(out, "total loss: {:.1} train-km", s.mileage_loss_train_km);
        let _ = writeln!(out, "cost: {:.2}", s.cost);
        let _ = writeln!(out, "feasible: {}", if s.feasible { "yes" } else { "no" });
        let _ = writeln!(
            out,
            "violations: rate {:.6}, acceptance {}, capacity {}",
            s.rate_violation, s.acceptance_violation, s.capacity_violation
        );
        let occupancy: Vec<String> = s.occupancy.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "occupancy: {}", occupancy.join(" "));
        out
    }
}

/// Table and JSON forms of a solved schedule.
pub fn serialize_schedule(
    instance: &Instance,
    schedule: &Schedule,
    evaluation: &Evaluation,
) -> Result<(String, String)> {
    let report = ScheduleReport::new(instance, schedule, evaluation)?;
    Ok((report.to_table(), report.to_json()))
}

#[derive(Deserialize)]
struct DeliveryFile {
    trains: Vec<DeliveryRow>,
}

#[derive(Deserialize)]
struct DeliveryRow {
    id: String,
    delivery_day: i64,
}

/// Reads the deliveries of a JSON report against `instance`. Only `id` and
/// `delivery_day` of each row are used, so hand-written files may omit the
/// rest.
pub fn parse_schedule(text: &str, instance: &Instance) -> Result<Schedule> {
    let file: DeliveryFile =
        serde_json::from_str(text).map_err(|e| Error::Report(e.to_string()))?;
    let mut map = BTreeMap::new();
    let mut issues = hmp_core::ValidationErrors::default();
    for row in file.trains {
        if map.insert(row.id.clone(), row.delivery_day).is_some() {
            issues.push(hmp_core::Issue::Custom(format!(
                "train {} is listed more than once",
                row.id
            )));
        }
    }
    if !issues.is_empty() {
        return Err(issues.into());
    }
    Ok(Schedule::from_map(instance, &map)?)
}
