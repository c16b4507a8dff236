//! Exhaustive enumeration of all window-respecting schedules.
//!
//! Trains are assigned in ascending id order and days in ascending order, so
//! the first minimum found is the lexicographically smallest delivery vector
//! (ordered by train id) among all optimal schedules. With pruning enabled a
//! partial assignment is abandoned as soon as a day exceeds any limit; all
//! per-day counts only grow as trains are added, so no feasible completion
//! is ever discarded. Without pruning every leaf is scored with
//! [`evaluate`](crate::evaluation::evaluate).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::evaluation::{evaluate_unchecked, loss_unchecked, DayLoad, Instance, Schedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_nodes: u128,
    pub prune: bool,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_nodes: 10_000_000,
            prune: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub optimum: Option<Schedule>,
    /// Mileage loss of `optimum`, train-km.
    pub optimum_loss: Option<f64>,
    pub feasible_count: u64,
    /// Size of the enumerated space, `Π |window|`.
    pub searched_count: u128,
    /// Complete schedules actually scored; smaller than `searched_count`
    /// when pruning cut subtrees.
    pub leaves_evaluated: u64,
}

impl OracleResult {
    fn empty(searched_count: u128) -> Self {
        Self {
            optimum: None,
            optimum_loss: None,
            feasible_count: 0,
            searched_count,
            leaves_evaluated: 0,
        }
    }

    /// Combines results of two branches; `later` must come after `self` in
    /// enumeration order so ties keep `self`'s optimum.
    pub fn merge(mut self, later: OracleResult) -> OracleResult {
        self.feasible_count += later.feasible_count;
        self.leaves_evaluated += later.leaves_evaluated;
        if let (Some(loss), Some(s)) = (later.optimum_loss, later.optimum) {
            if self.optimum_loss.is_none_or(|best| loss < best) {
                self.optimum_loss = Some(loss);
                self.optimum = Some(s);
            }
        }
        self
    }
}

/// `Π |window|`, saturating.
pub fn search_space_size(instance: &Instance) -> u128 {
    instance
        .windows()
        .iter()
        .fold(1u128, |acc, w| acc.saturating_mul(w.width() as u128))
}

/// Train indices in ascending id order.
pub fn enumeration_order(instance: &Instance) -> Vec<usize> {
    let mut order: Vec<usize> = (0..instance.fleet_size()).collect();
    order.sort_by(|&a, &b| instance.trains()[a].id.cmp(&instance.trains()[b].id));
    order
}

fn check_size(instance: &Instance, limits: &OracleLimits) -> Result<u128> {
    let product = search_space_size(instance);
    if product > limits.max_nodes {
        return Err(Error::SearchTooLarge {
            product,
            limit: limits.max_nodes,
        });
    }
    Ok(product)
}

/// Exact minimum-loss feasible schedule.
pub fn solve_exact(instance: &Instance, limits: &OracleLimits) -> Result<OracleResult> {
    let product = check_size(instance, limits)?;
    let first = enumeration_order(instance)[0];
    let mut result = OracleResult::empty(product);
    for day in instance.windows()[first].days() {
        result = result.merge(solve_exact_branch(instance, limits, day)?);
    }
    Ok(result)
}

/// Enumerates only the schedules whose first train (in id order) is
/// delivered on `first_day`. Branches merged in ascending `first_day` order
/// with [`OracleResult::merge`] reproduce [`solve_exact`].
pub fn solve_exact_branch(
    instance: &Instance,
    limits: &OracleLimits,
    first_day: i64,
) -> Result<OracleResult> {
    let product = check_size(instance, limits)?;
    let order = enumeration_order(instance);
    let mut search = Search {
        instance,
        order: &order,
        schedule: Schedule::new(vec![0; instance.fleet_size()]),
        load: DayLoad::empty(instance.horizon()),
        touched: Vec::new(),
        result: OracleResult::empty(product),
    };
    if !instance.windows()[order[0]].contains(first_day) {
        return Ok(search.result);
    }
    if limits.prune {
        search.assign_pruned(0, first_day);
    } else {
        search.schedule.days[order[0]] = first_day;
        search.full(1);
    }
    Ok(search.result)
}

struct Search<'a> {
    instance: &'a Instance,
    order: &'a [usize],
    schedule: Schedule,
    load: DayLoad,
    touched: Vec<i64>,
    result: OracleResult,
}

impl Search<'_> {
    fn record(&mut self, feasible: bool) {
        self.result.leaves_evaluated += 1;
        if !feasible {
            return;
        }
        self.result.feasible_count += 1;
        let loss = loss_unchecked(self.instance, &self.schedule);
        if self.result.optimum_loss.is_none_or(|best| loss < best) {
            self.result.optimum_loss = Some(loss);
            self.result.optimum = Some(self.schedule.clone());
        }
    }

    fn full(&mut self, depth: usize) {
        if depth == self.order.len() {
            let feasible = evaluate_unchecked(self.instance, &self.schedule).feasible;
            self.record(feasible);
            return;
        }
        let train = self.order[depth];
        for day in self.instance.windows()[train].days() {
            self.schedule.days[train] = day;
            self.full(depth + 1);
        }
    }

    fn assign_pruned(&mut self, depth: usize, day: i64) {
        let train = self.order[depth];
        self.schedule.days[train] = day;
        self.load.add(self.instance, train, day);
        self.touched.clear();
        DayLoad::touched_days(self.instance, train, day, &mut self.touched);
        let violated = self
            .touched
            .iter()
            .any(|&d| self.load.violated(self.instance, d));
        if !violated {
            if depth + 1 == self.order.len() {
                self.record(true);
            } else {
                let next = self.order[depth + 1];
                for d in self.instance.windows()[next].days() {
                    self.assign_pruned(depth + 1, d);
                }
            }
        }
        self.load.remove(self.instance, train, day);
    }
}
