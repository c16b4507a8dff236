#![allow(dead_code)]

use hmp_core::{
    CapacityMode, Carryover, CostRates, Instance, InstanceData, LevelRule, MaintenanceLevel,
    RatePeriod, RegulationTable, Schedule, TrainRecord,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn level(rng: &mut impl Rng) -> MaintenanceLevel {
    MaintenanceLevel::ALL[rng.random_range(0..3)]
}

/// Random desk-size instance: at most `max_trains` trains, windows of at
/// most 8 days, integer kilometre values throughout.
pub fn small_instance(
    rng: &mut ChaCha8Rng,
    max_trains: usize,
    mode_aggregate: Option<bool>,
) -> Instance {
    loop {
        if let Ok(inst) = Instance::new(small_data(rng, max_trains, mode_aggregate)) {
            return inst;
        }
    }
}

pub fn small_data(
    rng: &mut ChaCha8Rng,
    max_trains: usize,
    mode_aggregate: Option<bool>,
) -> InstanceData {
    let horizon = rng.random_range(24..=36);
    let rules = MaintenanceLevel::ALL
        .iter()
        .map(|&level| LevelRule {
            level,
            target_mileage_km: 600_000.0,
            left_offset_km: (rng.random_range(0..=4) * 1_000) as f64,
            right_offset_km: (rng.random_range(0..=3) * 1_000) as f64,
            service_days: rng.random_range(1..=4),
            capacity: rng.random_range(1..=3),
        })
        .collect();
    // short cycles so that second maintenances land inside the horizon
    let cycle_km = (rng.random_range(8..=40) * 1_000) as f64;
    let n = rng.random_range(2..=max_trains);
    let trains = (0..n)
        .map(|i| TrainRecord {
            id: format!("EMU_{:03}", rng.random_range(0..1000) * 10 + i),
            unit_count: rng.random_range(1..=2),
            daily_mileage_km: (rng.random_range(10..=19) * 100) as f64,
            expired_day: rng.random_range(5..=horizon - 6),
            level: level(rng),
            next_level: level(rng),
            carryover: rng.random_bool(0.3).then(|| Carryover {
                start_day: rng.random_range(-6..=2),
                duration_days: rng.random_range(1..=6),
                level: level(rng),
            }),
        })
        .collect();
    let cut1 = rng.random_range(1..horizon - 1);
    let cut2 = rng.random_range(cut1 + 1..horizon);
    let rate = |rng: &mut ChaCha8Rng| [0.34, 0.5, 0.67, 1.0][rng.random_range(0..4)];
    let rate_periods = vec![
        RatePeriod {
            begin_day: 0,
            end_day: cut1,
            max_rate: rate(rng),
            label: "a".into(),
        },
        RatePeriod {
            begin_day: cut1 + 1,
            end_day: cut2,
            max_rate: rate(rng),
            label: "rush".into(),
        },
        RatePeriod {
            begin_day: cut2 + 1,
            end_day: horizon,
            max_rate: rate(rng),
            label: "b".into(),
        },
    ];
    let aggregate = mode_aggregate.unwrap_or_else(|| rng.random_bool(0.5));
    InstanceData {
        trains,
        regs: RegulationTable::new(rules, cycle_km).unwrap(),
        rate_periods,
        daily_acceptance: rng.random_range(1..=2),
        capacity_mode: if aggregate {
            CapacityMode::Aggregate {
                total: rng.random_range(1..=4),
            }
        } else {
            CapacityMode::PerLevel
        },
        horizon: Some(horizon),
        cost: CostRates::default(),
    }
}

pub fn random_schedule(inst: &Instance, rng: &mut impl Rng) -> Schedule {
    Schedule::new(
        inst.windows()
            .iter()
            .map(|w| rng.random_range(w.begin_day..=w.end_day))
            .collect(),
    )
}

/// All schedules in odometer order (last train fastest).
pub fn all_schedules(inst: &Instance) -> Vec<Schedule> {
    let mut out = vec![];
    let mut cur: Vec<i64> = inst.windows().iter().map(|w| w.begin_day).collect();
    loop {
        out.push(Schedule::new(cur.clone()));
        let mut i = cur.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < inst.windows()[i].end_day {
                cur[i] += 1;
                break;
            }
            cur[i] = inst.windows()[i].begin_day;
        }
    }
}

/// Day-stepping simulator: walks the days of each maintenance one by one
/// and, for the next maintenance, runs the train kilometre by kilometre-day
/// until the cycle mileage is used up. Returns the level occupying each day
/// of `[0, horizon]` (later maintenances overwrite earlier ones).
pub fn simulate_days(
    train: &TrainRecord,
    delivery: i64,
    regs: &RegulationTable,
    horizon: i64,
) -> Vec<Option<MaintenanceLevel>> {
    let mut days = vec![None; (horizon + 1) as usize];
    let mut mark = |from: i64, len: u32, lvl: MaintenanceLevel| {
        for d in from..=from + len as i64 {
            if (0..=horizon).contains(&d) {
                days[d as usize] = Some(lvl);
            }
        }
    };
    if let Some(c) = &train.carryover {
        // a maintenance whose last day is day 0 or earlier is already over
        if c.start_day + c.duration_days as i64 > 0 {
            mark(c.start_day, c.duration_days, c.level);
        }
    }
    let service = regs.rule(train.level).service_days;
    mark(delivery, service, train.level);

    // back in service the day the maintenance ends; count whole days of running
    let mut day = delivery + service as i64;
    let mut run_km = 0.0;
    while run_km + train.daily_mileage_km <= regs.cycle_interval_km() {
        run_km += train.daily_mileage_km;
        day += 1;
        if day > horizon {
            break;
        }
    }
    if day <= horizon {
        mark(
            day,
            regs.rule(train.next_level).service_days,
            train.next_level,
        );
    }
    days
}

/// Direct feasibility check from the simulator, counting on integers.
pub fn brute_feasible(inst: &Instance, s: &Schedule) -> bool {
    let t = inst.horizon();
    let n = inst.fleet_size();
    let mut total = vec![0u32; (t + 1) as usize];
    let mut by_level = vec![[0u32; 3]; (t + 1) as usize];
    let mut deliveries = vec![0u32; (t + 1) as usize];
    for (m, train) in inst.trains().iter().enumerate() {
        deliveries[s.days[m] as usize] += 1;
        for (d, lvl) in simulate_days(train, s.days[m], inst.regs(), t)
            .iter()
            .enumerate()
        {
            if let Some(l) = lvl {
                total[d] += 1;
                by_level[d][l.index()] += 1;
            }
        }
    }
    for d in 0..=t as usize {
        let limit = inst.rate_limit(d as i64);
        if total[d] as f64 > limit * n as f64 + 1e-9 {
            return false;
        }
        if deliveries[d] > inst.daily_acceptance() {
            return false;
        }
        match inst.capacity_mode() {
            CapacityMode::Aggregate { total: c } => {
                if total[d] > c {
                    return false;
                }
            }
            CapacityMode::PerLevel => {
                for l in MaintenanceLevel::ALL {
                    if by_level[d][l.index()] > inst.regs().rule(l).capacity {
                        return false;
                    }
                }
            }
        }
    }
    true
}
