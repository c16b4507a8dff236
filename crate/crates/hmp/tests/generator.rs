use hmp::generator::{generate, GeneratorConfig};
use hmp_core::exact_oracle::search_space_size;
use hmp_core::{Instance, MaintenanceLevel};

#[test]
fn same_seed_same_instance() {
    let a = generate(&GeneratorConfig {
        seed: 42,
        ..Default::default()
    })
    .unwrap();
    let b = generate(&GeneratorConfig {
        seed: 42,
        ..Default::default()
    })
    .unwrap();
    assert_eq!(a, b);
    let c = generate(&GeneratorConfig {
        seed: 43,
        ..Default::default()
    })
    .unwrap();
    assert_ne!(a, c);
}

#[test]
fn generated_instances_pass_validation() {
    for seed in 0..50 {
        for config in [
            GeneratorConfig::small(seed),
            GeneratorConfig {
                seed,
                ..Default::default()
            },
        ] {
            let inst = Instance::new(generate(&config).unwrap()).unwrap();
            assert_eq!(inst.horizon(), config.horizon_day);
            for w in inst.windows() {
                assert!(w.begin_day >= 1 && w.end_day <= config.horizon_day);
            }
        }
    }
}

#[test]
fn small_preset_is_enumerable() {
    for seed in 0..100 {
        let inst = Instance::new(generate(&GeneratorConfig::small(seed)).unwrap()).unwrap();
        assert_eq!(inst.fleet_size(), 6);
        assert!(inst.windows().iter().all(|w| w.width() <= 8));
        assert!(search_space_size(&inst) <= 8u128.pow(6));
    }
}

#[test]
fn degenerate_level_mix() {
    let config = GeneratorConfig {
        level_mix: [1.0, 0.0, 0.0],
        seed: 9,
        ..Default::default()
    };
    let data = generate(&config).unwrap();
    assert!(data.trains.iter().all(|t| t.level == MaintenanceLevel::III));
}

#[test]
fn next_level_follows_the_cycle() {
    let data = generate(&GeneratorConfig {
        fleet_size: 200,
        seed: 1,
        ..Default::default()
    })
    .unwrap();
    let mut after_iii = [0; 3];
    for t in &data.trains {
        match t.level {
            MaintenanceLevel::III => after_iii[t.next_level.index()] += 1,
            _ => assert_eq!(t.next_level, MaintenanceLevel::III),
        }
    }
    assert_eq!(after_iii[0], 0);
    assert!(after_iii[1] > 0 && after_iii[2] > 0);
}

#[test]
fn rush_template_shapes_the_rate_periods() {
    let data = generate(&GeneratorConfig::default()).unwrap();
    let labels: Vec<(&str, i64, i64)> = data
        .rate_periods
        .iter()
        .map(|p| (p.label.as_str(), p.begin_day, p.end_day))
        .collect();
    assert_eq!(
        labels,
        [
            ("normal", 0, 19),
            ("spring", 20, 59),
            ("normal", 60, 180),
            ("summer", 181, 242),
            ("normal", 243, 365)
        ]
    );
}

#[test]
fn windows_that_cannot_fit_are_an_error() {
    let mut config = GeneratorConfig {
        horizon_day: 20,
        expiry_day_range: [1, 20],
        ..Default::default()
    };
    // right offsets of 20,000 km and more push every window past day 20
    config.daily_mileage_km_range = [100.0, 100.0];
    assert!(matches!(generate(&config), Err(hmp::Error::Generator(_))));

    let bad_mix = GeneratorConfig {
        level_mix: [0.5, 0.2, 0.2],
        ..Default::default()
    };
    assert!(generate(&bad_mix).is_err());
}
