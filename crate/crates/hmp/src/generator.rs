//! Seeded random instances.

use hmp_core::{
    compute_window, CapacityMode, Carryover, CostRates, InstanceData, LevelRule, MaintenanceLevel,
    RatePeriod, RegulationTable, TrainRecord,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A rush period with a tighter maintenance-rate cap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RushTemplate {
    pub label: String,
    pub begin_day: i64,
    pub length_days: i64,
    pub max_rate: f64,
}

/// One regulation level as written in generator config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelConfig {
    pub target_mileage_km: f64,
    pub left_offset_km: f64,
    pub right_offset_km: f64,
    pub service_days: u32,
    pub capacity: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    pub fleet_size: usize,
    pub horizon_day: i64,
    /// Expiry days are drawn uniformly from this range, shortened at the top
    /// where a train's window would end past the horizon.
    pub expiry_day_range: [i64; 2],
    /// Proportions of levels III, IV and V.
    pub level_mix: [f64; 3],
    pub daily_mileage_km_range: [f64; 2],
    pub unit_count_range: [u32; 2],
    pub carryover_probability: f64,
    /// Levels III, IV and V.
    pub levels: [LevelConfig; 3],
    pub cycle_interval_km: f64,
    pub normal_max_rate: f64,
    pub rushes: Vec<RushTemplate>,
    pub daily_acceptance: u32,
    /// Shared workshop capacity; per-level capacities when absent.
    pub aggregate_capacity: Option<u32>,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    /// A year-long plan for a 40-train fleet under the CRH2 mileage rules,
    /// with a 40-day spring rush and a 62-day summer rush.
    fn default() -> Self {
        let regs = RegulationTable::crh2([40, 50, 60], [3, 2, 2]).expect("valid preset");
        let levels = regs.rules().clone().map(|r| LevelConfig {
            target_mileage_km: r.target_mileage_km,
            left_offset_km: r.left_offset_km,
            right_offset_km: r.right_offset_km,
            service_days: r.service_days,
            capacity: r.capacity,
        });
        Self {
            fleet_size: 40,
            horizon_day: 365,
            expiry_day_range: [1, 365],
            level_mix: [0.5, 0.3, 0.2],
            daily_mileage_km_range: [1_400.0, 1_900.0],
            unit_count_range: [1, 1],
            carryover_probability: 0.1,
            levels,
            cycle_interval_km: regs.cycle_interval_km(),
            normal_max_rate: 0.2,
            rushes: vec![
                RushTemplate {
                    label: "spring".into(),
                    begin_day: 20,
                    length_days: 40,
                    max_rate: 0.1,
                },
                RushTemplate {
                    label: "summer".into(),
                    begin_day: 181,
                    length_days: 62,
                    max_rate: 0.15,
                },
            ],
            daily_acceptance: 1,
            aggregate_capacity: None,
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    /// Six trains with windows of at most eight days on a 40-day horizon;
    /// small enough for exhaustive enumeration.
    pub fn small(seed: u64) -> Self {
        let level = |service_days| LevelConfig {
            target_mileage_km: 600_000.0,
            left_offset_km: 4_000.0,
            right_offset_km: 3_000.0,
            service_days,
            capacity: 1,
        };
        Self {
            fleet_size: 6,
            horizon_day: 40,
            expiry_day_range: [3, 40],
            level_mix: [0.5, 0.3, 0.2],
            levels: [level(2), level(3), level(4)],
            cycle_interval_km: 600_000.0,
            carryover_probability: 0.2,
            normal_max_rate: 0.5,
            rushes: vec![RushTemplate {
                label: "rush".into(),
                begin_day: 12,
                length_days: 10,
                max_rate: 0.34,
            }],
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Generator(m));
        if self.fleet_size == 0 {
            return bad("fleet_size must be at least 1".into());
        }
        if self.horizon_day < 1 {
            return bad("horizon_day must be at least 1".into());
        }
        let [lo, hi] = self.expiry_day_range;
        if lo < 1 || lo > hi {
            return bad(format!(
                "expiry_day_range [{lo},{hi}] must be a nonempty range of days >= 1"
            ));
        }
        if self.level_mix.iter().any(|p| !(*p >= 0.0))
            || (self.level_mix.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return bad("level_mix must be non-negative and sum to 1".into());
        }
        let [mlo, mhi] = self.daily_mileage_km_range;
        if !(mlo > 0.0 && mlo <= mhi && mhi.is_finite()) {
            return bad("daily_mileage_km_range must be a nonempty positive range".into());
        }
        let [ulo, uhi] = self.unit_count_range;
        if ulo < 1 || ulo > uhi {
            return bad("unit_count_range must be a nonempty range of counts >= 1".into());
        }
        if !(0.0..=1.0).contains(&self.carryover_probability) {
            return bad("carryover_probability must lie in [0, 1]".into());
        }
        Ok(())
    }

    fn regulation(&self) -> Result<RegulationTable> {
        let rules = MaintenanceLevel::ALL
            .iter()
            .zip(&self.levels)
            .map(|(&level, c)| LevelRule {
                level,
                target_mileage_km: c.target_mileage_km,
                left_offset_km: c.left_offset_km,
                right_offset_km: c.right_offset_km,
                service_days: c.service_days,
                capacity: c.capacity,
            })
            .collect();
        Ok(RegulationTable::new(rules, self.cycle_interval_km)?)
    }

    /// Rush periods clipped to the horizon with normal periods in the gaps.
    fn rate_periods(&self) -> Result<Vec<RatePeriod>> {
        let t = self.horizon_day;
        let mut rushes: Vec<&RushTemplate> = self.rushes.iter().collect();
        rushes.sort_by_key(|r| r.begin_day);
        let mut periods = Vec::new();
        let mut next = 0;
        for r in rushes {
            if r.length_days < 1 || r.begin_day < 0 {
                return Err(Error::Generator(format!(
                    "rush {} needs begin_day >= 0 and length_days >= 1",
                    r.label
                )));
            }
            if r.begin_day > t {
                continue;
            }
            if r.begin_day < next {
                return Err(Error::Generator(format!(
                    "rush {} overlaps an earlier rush",
                    r.label
                )));
            }
            if r.begin_day > next {
                periods.push(normal(next, r.begin_day - 1, self.normal_max_rate));
            }
            let end = (r.begin_day + r.length_days - 1).min(t);
            periods.push(RatePeriod {
                begin_day: r.begin_day,
                end_day: end,
                max_rate: r.max_rate,
                label: r.label.clone(),
            });
            next = end + 1;
        }
        if next <= t {
            periods.push(normal(next, t, self.normal_max_rate));
        }
        Ok(periods)
    }
}

fn normal(begin_day: i64, end_day: i64, max_rate: f64) -> RatePeriod {
    RatePeriod {
        begin_day,
        end_day,
        max_rate,
        label: "normal".into(),
    }
}

/// Level sequence of one full maintenance cycle.
const CYCLE: [MaintenanceLevel; 4] = [
    MaintenanceLevel::III,
    MaintenanceLevel::IV,
    MaintenanceLevel::III,
    MaintenanceLevel::V,
];

fn pick_level(rng: &mut ChaCha8Rng, mix: &[f64; 3]) -> MaintenanceLevel {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (level, p) in MaintenanceLevel::ALL.iter().zip(mix) {
        acc += p;
        if u < acc {
            return *level;
        }
    }
    // rounding left u above the cumulative sum
    *MaintenanceLevel::ALL
        .iter()
        .zip(mix)
        .rev()
        .find(|(_, p)| **p > 0.0)
        .map(|(l, _)| l)
        .expect("mix sums to 1")
}

/// Builds a random instance. The result always passes instance validation;
/// it may still have no feasible schedule.
pub fn generate(config: &GeneratorConfig) -> Result<InstanceData> {
    config.validate()?;
    let regs = config.regulation()?;
    let rate_periods = config.rate_periods()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let [elo, ehi] = config.expiry_day_range;
    let ehi = ehi.min(config.horizon_day);
    if elo > ehi {
        return Err(Error::Generator(format!(
            "expiry_day_range starts after the horizon day {}",
            config.horizon_day
        )));
    }

    let mut trains = Vec::with_capacity(config.fleet_size);
    for i in 0..config.fleet_size {
        let level = pick_level(&mut rng, &config.level_mix);
        let positions: Vec<usize> = (0..4).filter(|&p| CYCLE[p] == level).collect();
        let pos = positions[rng.random_range(0..positions.len())];
        let [mlo, mhi] = config.daily_mileage_km_range;
        let daily = if mlo == mhi {
            mlo
        } else {
            rng.random_range(mlo..mhi)
        };
        // whole kilometres keep instance files readable
        let daily = daily.round().max(1.0);
        let [ulo, uhi] = config.unit_count_range;
        let unit_count = rng.random_range(ulo..=uhi);
        let mut train = TrainRecord {
            id: format!("EMU_{:03}", i + 1),
            unit_count,
            daily_mileage_km: daily,
            expired_day: elo,
            level,
            next_level: CYCLE[(pos + 1) % 4],
            carryover: None,
        };

        // latest expiry whose window still ends inside the horizon
        let fits = |t: &TrainRecord, e: i64| {
            let probe = TrainRecord {
                expired_day: e,
                ..t.clone()
            };
            compute_window(&probe, &regs).is_ok_and(|w| w.end_day <= config.horizon_day)
        };
        if !fits(&train, elo) {
            return Err(Error::Generator(format!(
                "train {}: no expiry day in [{elo},{ehi}] keeps its window inside the horizon {}",
                train.id, config.horizon_day
            )));
        }
        let (mut ok, mut over) = (elo, ehi + 1);
        if fits(&train, ehi) {
            ok = ehi;
        } else {
            while over - ok > 1 {
                let mid = ok + (over - ok) / 2;
                if fits(&train, mid) {
                    ok = mid;
                } else {
                    over = mid;
                }
            }
        }
        train.expired_day = rng.random_range(elo..=ok);

        if rng.random_bool(config.carryover_probability) {
            let prev = CYCLE[(pos + 3) % 4];
            let duration = regs.service_days(prev);
            let start = rng.random_range(1 - duration as i64..=0);
            train.carryover = Some(Carryover {
                start_day: start,
                duration_days: duration,
                level: prev,
            });
        }
        trains.push(train);
    }

    Ok(InstanceData {
        trains,
        regs,
        rate_periods,
        daily_acceptance: config.daily_acceptance,
        capacity_mode: match config.aggregate_capacity {
            Some(total) => CapacityMode::Aggregate { total },
            None => CapacityMode::PerLevel,
        },
        horizon: Some(config.horizon_day),
        cost: CostRates::default(),
    })
}
