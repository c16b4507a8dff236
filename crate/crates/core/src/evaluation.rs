//! Problem instances, schedules and their scoring.
//!
//! The objective is the remaining mileage forfeited by delivering trains
//! before their expiry day, in train-km. Three constraint families are scored
//! per day over `[0, T]`: the fleet maintenance rate against the limit of the
//! rate period containing the day, the number of deliveries against the daily
//! acceptance limit, and workshop occupancy against capacity (per level or in
//! aggregate). A limit reached exactly is satisfied.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Issue, Result, ValidationErrors};
use crate::fleet_model::{
    compute_window, MaintenanceLevel, RegulationTable, TimeWindow, TrainRecord,
};
use crate::occupancy::{carryover_span, delivery_spans, OccupiedSpan};

/// A horizon segment with its own maximum maintenance rate.
#[derive(Debug, Clone, PartialEq)]
pub struct RatePeriod {
    pub begin_day: i64,
    pub end_day: i64,
    /// Maximum fraction of the fleet in maintenance on any day of the period.
    pub max_rate: f64,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacityMode {
    /// One capacity per maintenance level, taken from the regulation table.
    PerLevel,
    /// A single capacity shared by all levels.
    Aggregate { total: u32 },
}

/// Cost parameters; the cost per train-km is constant across trains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostRates {
    pub maintain_per_km: f64,
    pub income_per_km: f64,
    pub profit_rate: f64,
}

impl CostRates {
    #[inline]
    pub fn per_train_km(&self) -> f64 {
        self.maintain_per_km + self.profit_rate * self.income_per_km
    }
}

impl Default for CostRates {
    fn default() -> Self {
        Self {
            maintain_per_km: 1.0,
            income_per_km: 0.0,
            profit_rate: 0.0,
        }
    }
}

/// Unvalidated instance contents.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceData {
    pub trains: Vec<TrainRecord>,
    pub regs: RegulationTable,
    pub rate_periods: Vec<RatePeriod>,
    pub daily_acceptance: u32,
    pub capacity_mode: CapacityMode,
    /// Latest window end over the fleet when absent.
    pub horizon: Option<i64>,
    pub cost: CostRates,
}

/// A validated planning problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    trains: Vec<TrainRecord>,
    windows: Vec<TimeWindow>,
    regs: RegulationTable,
    rate_periods: Vec<RatePeriod>,
    daily_acceptance: u32,
    capacity_mode: CapacityMode,
    horizon: i64,
    cost: CostRates,
    rate_limit: Vec<f64>,
}

impl Instance {
    /// Validates `data`, reporting every issue found.
    pub fn new(data: InstanceData) -> core::result::Result<Self, ValidationErrors> {
        let mut errs = ValidationErrors::default();
        let InstanceData {
            trains,
            regs,
            rate_periods,
            daily_acceptance,
            capacity_mode,
            horizon,
            cost,
        } = data;

        if trains.is_empty() {
            errs.push(Issue::EmptyFleet);
        }
        let mut seen = BTreeMap::new();
        for t in &trains {
            if seen.insert(t.id.as_str(), ()).is_some() {
                errs.push(Issue::DuplicateTrainId(t.id.clone()));
            }
        }

        let mut windows = Vec::with_capacity(trains.len());
        for t in &trains {
            let bad = |reason| Issue::InvalidTrain {
                train: t.id.clone(),
                reason,
            };
            if t.unit_count < 1 {
                errs.push(bad("unit count must be at least 1"));
            }
            if t.expired_day < 1 {
                errs.push(bad("expired day must be at least 1"));
            }
            if let Some(c) = &t.carryover {
                if c.duration_days < 1 {
                    errs.push(bad("carryover duration must be at least 1 day"));
                }
            }
            match compute_window(t, &regs) {
                Ok(w) => windows.push(w),
                Err(Error::EmptyWindow { train, begin, end }) => {
                    errs.push(Issue::EmptyWindow { train, begin, end });
                    windows.push(TimeWindow {
                        begin_day: begin,
                        end_day: end,
                    });
                }
                Err(_) => {
                    errs.push(bad("daily mileage must be positive"));
                    windows.push(TimeWindow {
                        begin_day: 1,
                        end_day: 1,
                    });
                }
            }
        }

        let max_end = windows.iter().map(|w| w.end_day).max().unwrap_or(1);
        let horizon = horizon.unwrap_or(max_end);
        for (t, w) in trains.iter().zip(&windows) {
            if w.end_day > horizon {
                errs.push(Issue::WindowOutsideHorizon {
                    train: t.id.clone(),
                    end: w.end_day,
                    horizon,
                });
            }
        }

        if daily_acceptance < 1 {
            errs.push(Issue::ZeroDailyAcceptance);
        }
        if let CapacityMode::Aggregate { total: 0 } = capacity_mode {
            errs.push(Issue::ZeroCapacity);
        }
        for (v, name) in [
            (
                cost.maintain_per_km,
                "maintenance cost per km must be finite and non-negative",
            ),
            (
                cost.income_per_km,
                "income per km must be finite and non-negative",
            ),
            (
                cost.profit_rate,
                "profit rate must be finite and non-negative",
            ),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                errs.push(Issue::InvalidCost(name));
            }
        }

        check_partition(&rate_periods, horizon, &mut errs);

        if !errs.is_empty() {
            return Err(errs);
        }

        let mut rate_limit = vec![0.0; (horizon + 1) as usize];
        for p in &rate_periods {
            for d in p.begin_day..=p.end_day {
                rate_limit[d as usize] = p.max_rate;
            }
        }

        Ok(Self {
            trains,
            windows,
            regs,
            rate_periods,
            daily_acceptance,
            capacity_mode,
            horizon,
            cost,
            rate_limit,
        })
    }

    pub fn trains(&self) -> &[TrainRecord] {
        &self.trains
    }

    pub fn windows(&self) -> &[TimeWindow] {
        &self.windows
    }

    pub fn regs(&self) -> &RegulationTable {
        &self.regs
    }

    pub fn rate_periods(&self) -> &[RatePeriod] {
        &self.rate_periods
    }

    pub fn daily_acceptance(&self) -> u32 {
        self.daily_acceptance
    }

    pub fn capacity_mode(&self) -> CapacityMode {
        self.capacity_mode
    }

    /// Last day `T` of the horizon `[0, T]`.
    pub fn horizon(&self) -> i64 {
        self.horizon
    }

    pub fn cost(&self) -> CostRates {
        self.cost
    }

    pub fn fleet_size(&self) -> usize {
        self.trains.len()
    }

    /// Rate limit in force on `day`.
    #[inline]
    pub fn rate_limit(&self, day: i64) -> f64 {
        self.rate_limit[day as usize]
    }

    pub fn train_index(&self, id: &str) -> Option<usize> {
        self.trains.iter().position(|t| t.id == id)
    }

    /// Decision-variable and constraint counts of the 0-1 model.
    pub fn model_size(&self) -> ModelSize {
        let variables = self.windows.iter().map(TimeWindow::width).sum();
        let t = self.horizon as u64;
        let per_day = match self.capacity_mode {
            CapacityMode::PerLevel => 2 + MaintenanceLevel::ALL.len() as u64,
            CapacityMode::Aggregate { .. } => 3,
        };
        ModelSize {
            variables,
            constraints: self.trains.len() as u64 + per_day * t,
        }
    }

    /// Range of `mileage_loss` over all window-respecting schedules.
    pub fn loss_range(&self) -> f64 {
        self.trains
            .iter()
            .zip(&self.windows)
            .map(|(t, w)| (w.end_day - w.begin_day) as f64 * train_km_per_day(t))
            .sum()
    }

    /// Checks that `schedule` gives every train a day inside its window.
    pub fn check_schedule(
        &self,
        schedule: &Schedule,
    ) -> core::result::Result<(), ValidationErrors> {
        let mut errs = ValidationErrors::default();
        if schedule.days.len() != self.trains.len() {
            errs.push(Issue::ScheduleLength {
                expected: self.trains.len(),
                found: schedule.days.len(),
            });
            return Err(errs);
        }
        for ((t, w), &day) in self.trains.iter().zip(&self.windows).zip(&schedule.days) {
            if !w.contains(day) {
                errs.push(Issue::DeliveryOutsideWindow {
                    train: t.id.clone(),
                    day,
                    begin: w.begin_day,
                    end: w.end_day,
                });
            }
        }
        errs.into_result(())
    }
}

fn check_partition(periods: &[RatePeriod], horizon: i64, errs: &mut ValidationErrors) {
    if periods.is_empty() {
        errs.push(Issue::NoRatePeriods);
        return;
    }
    for (index, p) in periods.iter().enumerate() {
        if p.begin_day > p.end_day {
            errs.push(Issue::InvalidRatePeriod {
                index,
                reason: "begin day after end day",
            });
        }
        if !(0.0..=1.0).contains(&p.max_rate) {
            errs.push(Issue::InvalidRatePeriod {
                index,
                reason: "max rate must lie in [0, 1]",
            });
        }
        if p.begin_day < 0 || p.end_day > horizon {
            errs.push(Issue::InvalidRatePeriod {
                index,
                reason: "period extends outside [0, horizon]",
            });
        }
    }
    if periods[0].begin_day != 0 {
        errs.push(Issue::PeriodsDoNotStartAtZero {
            begin: periods[0].begin_day,
        });
    }
    for (i, pair) in periods.windows(2).enumerate() {
        let (prev, next) = (&pair[0], &pair[1]);
        if next.begin_day > prev.end_day + 1 {
            errs.push(Issue::PeriodGap {
                after: prev.end_day,
                next_begin: next.begin_day,
            });
        } else if next.begin_day <= prev.end_day {
            errs.push(Issue::PeriodOverlap {
                index: i + 1,
                begin: next.begin_day,
                previous_end: prev.end_day,
            });
        }
    }
    let last = periods.last().map(|p| p.end_day).unwrap_or(0);
    if last != horizon {
        errs.push(Issue::PeriodsDoNotReachHorizon { end: last, horizon });
    }
}

#[inline]
pub(crate) fn train_km_per_day(t: &TrainRecord) -> f64 {
    t.daily_mileage_km * t.unit_count as f64
}

/// Size of the 0-1 model: `Σ|window|` variables and `|fleet| + 5T`
/// (per-level capacity) or `|fleet| + 3T` (aggregate) constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelSize {
    pub variables: u64,
    pub constraints: u64,
}

/// Delivery day of every train, in instance order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Schedule {
    pub days: Vec<i64>,
}

impl Schedule {
    pub fn new(days: Vec<i64>) -> Self {
        Self { days }
    }

    /// Every train delivered on its expiry day, clamped into its window.
    pub fn at_expiry(instance: &Instance) -> Self {
        Self::new(
            instance
                .trains
                .iter()
                .zip(&instance.windows)
                .map(|(t, w)| w.clamp(t.expired_day))
                .collect(),
        )
    }

    /// Builds a schedule from `train id -> day`, reporting missing and
    /// unknown ids as well as out-of-window days.
    pub fn from_map(
        instance: &Instance,
        map: &BTreeMap<String, i64>,
    ) -> core::result::Result<Self, ValidationErrors> {
        let mut errs = ValidationErrors::default();
        for id in map.keys() {
            if instance.train_index(id).is_none() {
                errs.push(Issue::UnknownTrain(id.clone()));
            }
        }
        let mut days = Vec::with_capacity(instance.trains.len());
        for t in &instance.trains {
            match map.get(&t.id) {
                Some(&d) => days.push(d),
                None => {
                    errs.push(Issue::MissingDelivery(t.id.clone()));
                    days.push(0);
                }
            }
        }
        if !errs.is_empty() {
            return Err(errs);
        }
        let s = Self::new(days);
        instance.check_schedule(&s)?;
        Ok(s)
    }

    pub fn to_map(&self, instance: &Instance) -> BTreeMap<String, i64> {
        instance
            .trains
            .iter()
            .zip(&self.days)
            .map(|(t, &d)| (t.id.clone(), d))
            .collect()
    }

    #[inline]
    pub fn day(&self, train: usize) -> i64 {
        self.days[train]
    }
}

/// Penalty weights of the energy function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyWeights {
    pub rate: f64,
    pub acceptance: f64,
    pub capacity: f64,
}

impl PenaltyWeights {
    pub const ZERO: PenaltyWeights = PenaltyWeights {
        rate: 0.0,
        acceptance: 0.0,
        capacity: 0.0,
    };

    /// Each weight is `max(loss_range, 1) * |fleet|`, so that one unit of
    /// any violation outweighs every achievable objective gain.
    pub fn dominant(instance: &Instance) -> Self {
        let w = instance.loss_range().max(1.0) * instance.fleet_size() as f64;
        Self {
            rate: w,
            acceptance: w,
            capacity: w,
        }
    }
}

/// Per-day capacity excess.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CapacityViolation {
    /// Indexed by day.
    Aggregate(Vec<u32>),
    /// Indexed by day, then by [`MaintenanceLevel::index`].
    PerLevel(Vec<[u32; 3]>),
}

impl CapacityViolation {
    pub fn total(&self) -> u64 {
        match self {
            CapacityViolation::Aggregate(v) => v.iter().map(|&x| x as u64).sum(),
            CapacityViolation::PerLevel(v) => v.iter().flatten().map(|&x| x as u64).sum(),
        }
    }

    /// Excess on `day` summed over levels.
    pub fn on_day(&self, day: usize) -> u32 {
        match self {
            CapacityViolation::Aggregate(v) => v[day],
            CapacityViolation::PerLevel(v) => v[day].iter().sum(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.total() == 0
    }
}

/// Score of one schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// Forfeited remaining mileage, train-km. Negative when late deliveries
    /// outweigh early ones.
    pub mileage_loss: f64,
    pub cost_value: f64,
    /// Rate excess per day `0..=T`.
    pub rate_violation: Vec<f64>,
    /// Delivery excess per day `0..=T`.
    pub acceptance_violation: Vec<u32>,
    pub capacity_violation: CapacityViolation,
    /// Trains in maintenance per day.
    pub in_maintenance: Vec<u32>,
    /// Deliveries per day.
    pub deliveries: Vec<u32>,
    pub feasible: bool,
}

impl Evaluation {
    pub fn rate_total(&self) -> f64 {
        self.rate_violation.iter().sum()
    }

    pub fn acceptance_total(&self) -> u64 {
        self.acceptance_violation.iter().map(|&x| x as u64).sum()
    }

    pub fn capacity_total(&self) -> u64 {
        self.capacity_violation.total()
    }

    /// Penalised energy under `weights`.
    pub fn energy(&self, weights: &PenaltyWeights) -> f64 {
        self.mileage_loss
            + weights.rate * self.rate_total()
            + weights.acceptance * self.acceptance_total() as f64
            + weights.capacity * self.capacity_total() as f64
    }
}

/// Per-day counts of trains in maintenance and deliveries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DayLoad {
    pub in_maintenance: Vec<u32>,
    pub by_level: Vec<[u32; 3]>,
    pub deliveries: Vec<u32>,
}

/// Visits each occupied day of `spans` exactly once with the level active
/// on that day (later entries win on overlap).
fn for_each_occupied_day(
    spans: &[Option<OccupiedSpan>; 3],
    mut f: impl FnMut(i64, MaintenanceLevel),
) {
    for (i, span) in spans.iter().enumerate() {
        let Some(span) = span else { continue };
        for day in span.days.begin..=span.days.end {
            let shadowed = spans[i + 1..]
                .iter()
                .flatten()
                .any(|later| later.days.contains(day));
            if !shadowed {
                f(day, span.level);
            }
        }
    }
}

pub(crate) fn train_spans(
    instance: &Instance,
    train: usize,
    day: i64,
) -> [Option<OccupiedSpan>; 3] {
    let t = &instance.trains[train];
    let (current, next) = delivery_spans(t, day, &instance.regs, instance.horizon);
    [carryover_span(t, instance.horizon), Some(current), next]
}

impl DayLoad {
    pub fn empty(horizon: i64) -> Self {
        let n = (horizon + 1) as usize;
        Self {
            in_maintenance: vec![0; n],
            by_level: vec![[0; 3]; n],
            deliveries: vec![0; n],
        }
    }

    pub fn from_schedule(instance: &Instance, schedule: &Schedule) -> Self {
        let mut load = Self::empty(instance.horizon);
        for (i, &d) in schedule.days.iter().enumerate() {
            load.add(instance, i, d);
        }
        load
    }

    /// Adds the full occupancy and the delivery of `train` on `day`.
    pub fn add(&mut self, instance: &Instance, train: usize, day: i64) {
        self.deliveries[day as usize] += 1;
        for_each_occupied_day(&train_spans(instance, train, day), |d, level| {
            self.in_maintenance[d as usize] += 1;
            self.by_level[d as usize][level.index()] += 1;
        });
    }

    /// Inverse of [`DayLoad::add`].
    pub fn remove(&mut self, instance: &Instance, train: usize, day: i64) {
        self.deliveries[day as usize] -= 1;
        for_each_occupied_day(&train_spans(instance, train, day), |d, level| {
            self.in_maintenance[d as usize] -= 1;
            self.by_level[d as usize][level.index()] -= 1;
        });
    }

    /// Days whose counts change when `train` is added on `day`.
    pub(crate) fn touched_days(instance: &Instance, train: usize, day: i64, out: &mut Vec<i64>) {
        out.push(day);
        for_each_occupied_day(&train_spans(instance, train, day), |d, _| out.push(d));
    }

    #[inline]
    pub fn rate_excess(&self, instance: &Instance, day: i64) -> f64 {
        let rate = self.in_maintenance[day as usize] as f64 / instance.fleet_size() as f64;
        (rate - instance.rate_limit(day)).max(0.0)
    }

    #[inline]
    pub fn acceptance_excess(&self, instance: &Instance, day: i64) -> u32 {
        self.deliveries[day as usize].saturating_sub(instance.daily_acceptance)
    }

    #[inline]
    pub fn capacity_excess(&self, instance: &Instance, day: i64) -> u32 {
        let d = day as usize;
        match instance.capacity_mode {
            CapacityMode::Aggregate { total } => self.in_maintenance[d].saturating_sub(total),
            CapacityMode::PerLevel => MaintenanceLevel::ALL
                .iter()
                .map(|&l| {
                    self.by_level[d][l.index()].saturating_sub(instance.regs.rule(l).capacity)
                })
                .sum(),
        }
    }

    /// Whether any of the three limits is exceeded on `day`.
    #[inline]
    pub fn violated(&self, instance: &Instance, day: i64) -> bool {
        self.rate_excess(instance, day) > 0.0
            || self.acceptance_excess(instance, day) > 0
            || self.capacity_excess(instance, day) > 0
    }

    /// Weighted penalty contributed by `day`.
    #[inline]
    pub fn day_penalty(&self, instance: &Instance, day: i64, w: &PenaltyWeights) -> f64 {
        w.rate * self.rate_excess(instance, day)
            + w.acceptance * self.acceptance_excess(instance, day) as f64
            + w.capacity * self.capacity_excess(instance, day) as f64
    }
}

/// Mileage loss of an already validated schedule, summed in instance order.
pub(crate) fn loss_unchecked(instance: &Instance, schedule: &Schedule) -> f64 {
    instance
        .trains
        .iter()
        .zip(&schedule.days)
        .map(|(t, &d)| (t.expired_day - d) as f64 * train_km_per_day(t))
        .sum()
}

/// Remaining mileage forfeited by `schedule`, in train-km.
pub fn mileage_loss(instance: &Instance, schedule: &Schedule) -> Result<f64> {
    instance.check_schedule(schedule)?;
    Ok(loss_unchecked(instance, schedule))
}

/// Per-day excess of the fleet maintenance rate over the period limit.
pub fn rate_check(instance: &Instance, schedule: &Schedule) -> Result<Vec<f64>> {
    instance.check_schedule(schedule)?;
    let load = DayLoad::from_schedule(instance, schedule);
    Ok((0..=instance.horizon)
        .map(|d| load.rate_excess(instance, d))
        .collect())
}

/// Per-day excess of deliveries over the daily acceptance limit.
pub fn acceptance_check(instance: &Instance, schedule: &Schedule) -> Result<Vec<u32>> {
    instance.check_schedule(schedule)?;
    let load = DayLoad::from_schedule(instance, schedule);
    Ok((0..=instance.horizon)
        .map(|d| load.acceptance_excess(instance, d))
        .collect())
}

/// Per-day (and per-level in [`CapacityMode::PerLevel`]) excess of workshop
/// occupancy over capacity.
pub fn capacity_check(instance: &Instance, schedule: &Schedule) -> Result<CapacityViolation> {
    instance.check_schedule(schedule)?;
    let load = DayLoad::from_schedule(instance, schedule);
    Ok(capacity_vector(instance, &load))
}

fn capacity_vector(instance: &Instance, load: &DayLoad) -> CapacityViolation {
    match instance.capacity_mode {
        CapacityMode::Aggregate { total } => CapacityViolation::Aggregate(
            load.in_maintenance
                .iter()
                .map(|&c| c.saturating_sub(total))
                .collect(),
        ),
        CapacityMode::PerLevel => {
            let caps = instance.regs.rules().each_ref().map(|r| r.capacity);
            CapacityViolation::PerLevel(
                load.by_level
                    .iter()
                    .map(|row| [0, 1, 2].map(|k| row[k].saturating_sub(caps[k])))
                    .collect(),
            )
        }
    }
}

pub(crate) fn evaluate_unchecked(instance: &Instance, schedule: &Schedule) -> Evaluation {
    let load = DayLoad::from_schedule(instance, schedule);
    let mileage_loss = loss_unchecked(instance, schedule);
    let rate_violation: Vec<f64> = (0..=instance.horizon)
        .map(|d| load.rate_excess(instance, d))
        .collect();
    let acceptance_violation: Vec<u32> = (0..=instance.horizon)
        .map(|d| load.acceptance_excess(instance, d))
        .collect();
    let capacity_violation = capacity_vector(instance, &load);
    let feasible = rate_violation.iter().all(|&v| v == 0.0)
        && acceptance_violation.iter().all(|&v| v == 0)
        && capacity_violation.is_zero();
    Evaluation {
        mileage_loss,
        cost_value: mileage_loss * instance.cost.per_train_km(),
        rate_violation,
        acceptance_violation,
        capacity_violation,
        in_maintenance: load.in_maintenance,
        deliveries: load.deliveries,
        feasible,
    }
}

/// Scores `schedule` against every objective and constraint term.
pub fn evaluate(instance: &Instance, schedule: &Schedule) -> Result<Evaluation> {
    instance.check_schedule(schedule)?;
    Ok(evaluate_unchecked(instance, schedule))
}

/// Penalised energy of `schedule`.
pub fn energy(instance: &Instance, schedule: &Schedule, weights: &PenaltyWeights) -> Result<f64> {
    Ok(evaluate(instance, schedule)?.energy(weights))
}
