use hmp_core::fleet_model::exact_window_bounds;
use hmp_core::{
    compute_window, planning_horizon, LevelRule, MaintenanceLevel, RegulationTable, TrainRecord,
};
use proptest::prelude::*;

fn regs(left: f64, right: f64) -> RegulationTable {
    let rules = MaintenanceLevel::ALL
        .iter()
        .map(|&level| LevelRule {
            level,
            target_mileage_km: 600_000.0,
            left_offset_km: left,
            right_offset_km: right,
            service_days: 10,
            capacity: 1,
        })
        .collect();
    RegulationTable::new(rules, 600_000.0).unwrap()
}

fn train(expired: i64, daily: f64) -> TrainRecord {
    TrainRecord {
        id: "t".into(),
        unit_count: 1,
        daily_mileage_km: daily,
        expired_day: expired,
        level: MaintenanceLevel::IV,
        next_level: MaintenanceLevel::III,
        carryover: None,
    }
}

#[test]
fn horizon_matches_linear_scan_on_random_fleets() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20);
    let table = RegulationTable::crh2([30, 40, 50], [1, 1, 1]).unwrap();
    for _ in 0..20 {
        let fleet: Vec<TrainRecord> = (0..20)
            .map(|i| TrainRecord {
                id: format!("t{i}"),
                unit_count: 1,
                daily_mileage_km: rng.random_range(1_400.0..1_900.0),
                expired_day: rng.random_range(80..300),
                level: MaintenanceLevel::ALL[rng.random_range(0..3)],
                next_level: MaintenanceLevel::III,
                carryover: None,
            })
            .collect();
        let mut scan = i64::MIN;
        for t in &fleet {
            let rule = table.rule(t.level);
            let end =
                (t.expired_day as f64 + rule.right_offset_km / t.daily_mileage_km).floor() as i64;
            if end > scan {
                scan = end;
            }
        }
        assert_eq!(planning_horizon(&fleet, &table).unwrap(), scan);
    }
}

proptest! {
    #[test]
    fn rounding_stays_inside_allowance(
        expired in 1i64..400,
        left in 0u32..200_000,
        right in 0u32..200_000,
        daily in 800u32..3_000,
    ) {
        let regs = regs(left as f64, right as f64);
        let t = train(expired, daily as f64);
        let (lo, hi) = exact_window_bounds(&t, &regs);
        if let Ok(w) = compute_window(&t, &regs) {
            prop_assert!(w.begin_day as f64 >= lo);
            prop_assert!(w.end_day as f64 <= hi);
            prop_assert!(w.begin_day >= 1);
            prop_assert!(w.begin_day <= w.end_day);
            prop_assert!(w.begin_day <= expired);
            prop_assert!(w.contains(expired));
        }
    }

    #[test]
    fn offsets_are_monotone(
        expired in 100i64..400,
        left in 0u32..100_000,
        right in 0u32..100_000,
        extra in 0u32..50_000,
        daily in 800u32..3_000,
    ) {
        let t = train(expired, daily as f64);
        let base = compute_window(&t, &regs(left as f64, right as f64)).unwrap();
        let wider_right = compute_window(&t, &regs(left as f64, (right + extra) as f64)).unwrap();
        let wider_left = compute_window(&t, &regs((left + extra) as f64, right as f64)).unwrap();
        prop_assert!(wider_right.end_day >= base.end_day);
        prop_assert!(wider_left.begin_day <= base.begin_day);
    }

    #[test]
    fn horizon_is_permutation_invariant(
        expiries in proptest::collection::vec(1i64..300, 1..12),
        rot in 0usize..12,
    ) {
        let regs = RegulationTable::crh2([30, 40, 50], [1, 1, 1]).unwrap();
        let fleet: Vec<TrainRecord> = expiries.iter().map(|&e| train(e + 60, 1_600.0)).collect();
        let mut rotated = fleet.clone();
        rotated.rotate_left(rot % fleet.len());
        rotated.reverse();
        prop_assert_eq!(planning_horizon(&fleet, &regs).unwrap(), planning_horizon(&rotated, &regs).unwrap());
    }
}
