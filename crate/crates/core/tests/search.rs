mod common;

use common::{rng, small_data, small_instance};
use hmp_core::annealer::{
    calibrate_initial_temperature, metropolis_accept, neighbor, propose_move, SearchState,
};
use hmp_core::exact_oracle::{enumeration_order, solve_exact_branch};
use hmp_core::{
    evaluate, solve, solve_exact, solve_restarts, Instance, OracleLimits, PenaltyWeights, SaParams,
    Schedule, StopReason,
};
use rand::Rng;

#[test]
fn pruned_and_unpruned_oracles_agree() {
    let mut rng = rng(30);
    let mut with_optimum = 0;
    for i in 0..30 {
        let inst = small_instance(&mut rng, 6, None);
        let pruned = solve_exact(&inst, &OracleLimits::default()).unwrap();
        let full = solve_exact(
            &inst,
            &OracleLimits {
                prune: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(pruned.optimum, full.optimum, "instance {i}");
        assert_eq!(pruned.optimum_loss, full.optimum_loss, "instance {i}");
        assert_eq!(pruned.feasible_count, full.feasible_count, "instance {i}");
        assert_eq!(pruned.searched_count, full.searched_count);
        assert!(pruned.leaves_evaluated <= full.leaves_evaluated);
        if let Some(s) = &pruned.optimum {
            with_optimum += 1;
            assert!(evaluate(&inst, s).unwrap().feasible);
        }
    }
    assert!(with_optimum >= 10, "{with_optimum}");
}

#[test]
fn branches_merge_to_the_full_search() {
    let mut rng = rng(31);
    for _ in 0..10 {
        let inst = small_instance(&mut rng, 5, None);
        let limits = OracleLimits::default();
        let first = enumeration_order(&inst)[0];
        let merged = inst.windows()[first]
            .days()
            .map(|d| solve_exact_branch(&inst, &limits, d).unwrap())
            .reduce(|a, b| a.merge(b))
            .unwrap();
        assert_eq!(merged, solve_exact(&inst, &limits).unwrap());
    }
}

#[test]
fn no_feasible_schedule_beats_the_optimum() {
    let mut rng = rng(32);
    let mut checked = 0;
    for _ in 0..40 {
        let data = small_data(&mut rng, 5, None);
        let Ok(inst) = Instance::new(data.clone()) else {
            continue;
        };
        let r = solve_exact(&inst, &OracleLimits::default()).unwrap();
        let Some(opt) = r.optimum else { continue };
        // restricting one train to its optimal day cannot do better
        let m = rng.random_range(0..inst.fleet_size());
        for s in common::all_schedules(&inst) {
            if s.days[m] == opt.days[m] && evaluate(&inst, &s).unwrap().feasible {
                assert!(evaluate(&inst, &s).unwrap().mileage_loss >= r.optimum_loss.unwrap());
            }
        }
        checked += 1;
    }
    assert!(checked > 5);
}

#[test]
fn oracle_bounds_every_annealed_feasible_result() {
    let mut rng = rng(33);
    for i in 0..15 {
        let inst = small_instance(&mut rng, 6, None);
        let exact = solve_exact(&inst, &OracleLimits::default()).unwrap();
        let sa = solve(&inst, &SaParams::default().with_seed(i)).unwrap();
        if sa.best_evaluation.feasible {
            assert!(sa.best_evaluation.mileage_loss >= exact.optimum_loss.unwrap());
        }
        if exact.optimum.is_none() {
            assert!(!sa.best_evaluation.feasible);
        }
    }
}

#[test]
fn neighbor_is_uniform_over_train_day_pairs() {
    let inst = {
        let mut rng = rng(34);
        loop {
            let inst = small_instance(&mut rng, 3, None);
            if inst.fleet_size() == 3 && inst.windows().iter().all(|w| w.width() >= 3) {
                break inst;
            }
        }
    };
    let start = Schedule::at_expiry(&inst);
    let mut counts = std::collections::BTreeMap::new();
    let mut rng = rng(35);
    let draws = 10_000;
    for _ in 0..draws {
        let next = neighbor(&start, &inst, &mut rng);
        let changed: Vec<usize> = (0..3).filter(|&m| next.days[m] != start.days[m]).collect();
        assert_eq!(changed.len(), 1);
        let m = changed[0];
        assert!(inst.windows()[m].contains(next.days[m]));
        *counts.entry((m, next.days[m])).or_insert(0u32) += 1;
    }
    for m in 0..3 {
        let w = inst.windows()[m];
        for day in w.days().filter(|&d| d != start.days[m]) {
            let p = 1.0 / 3.0 / (w.width() - 1) as f64;
            let mean = draws as f64 * p;
            let sd = (draws as f64 * p * (1.0 - p)).sqrt();
            let obs = *counts.get(&(m, day)).unwrap_or(&0) as f64;
            assert!(
                (obs - mean).abs() <= 5.0 * sd,
                "train {m} day {day}: {obs} vs {mean}"
            );
        }
    }
}

#[test]
fn metropolis_matches_boltzmann_factor() {
    let mut rng = rng(36);
    let sigma = 250.0;
    for delta in [25.0, 250.0, 600.0] {
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| metropolis_accept(delta, sigma, &mut rng))
            .count() as f64;
        let p = (-delta / sigma).exp();
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        assert!(
            (hits - n as f64 * p).abs() <= 5.0 * sd,
            "delta {delta}: {hits}"
        );
    }
    assert!(metropolis_accept(-1.0, 1e-9, &mut rng));
    assert!(metropolis_accept(0.0, 1e-9, &mut rng));
}

#[test]
fn calibrated_temperature_accepts_most_moves() {
    let mut rng = rng(37);
    for i in 0..10 {
        let inst = small_instance(&mut rng, 6, None);
        let params = SaParams::default().with_seed(i);
        let start = Schedule::at_expiry(&inst);
        let mut r = params.rng();
        let sigma0 = calibrate_initial_temperature(&inst, &start, &params, &mut r).unwrap();
        assert!(sigma0 > 0.0);
        let weights = PenaltyWeights::dominant(&inst);
        let mut state = SearchState::new(&inst, start, weights);
        let (mut acc, mut gen) = (0, 0);
        for _ in 0..2_000 {
            let mv = propose_move(&inst, state.schedule(), &mut r);
            let d = state.try_move(mv);
            gen += 1;
            if metropolis_accept(d, sigma0, &mut r) {
                acc += 1;
                state.commit();
            } else {
                state.undo(mv);
            }
        }
        let rate = acc as f64 / gen as f64;
        assert!(rate >= 0.90, "instance {i}: {rate}");
    }
}

#[test]
fn trace_follows_the_cooling_and_inner_loop_rules() {
    let mut rng = rng(38);
    for i in 0..10 {
        let inst = small_instance(&mut rng, 6, None);
        let r = solve(&inst, &SaParams::default().with_seed(i)).unwrap();
        let vars = inst.model_size().variables;
        assert_eq!(r.model_size.variables, vars);
        for (k, step) in r.trace.iter().enumerate() {
            let expected = r.initial_temperature * 0.97f64.powi(k as i32);
            assert!(((step.temperature - expected) / expected).abs() <= 1e-12);
            assert!(step.generated == 3 * vars || step.accepted == 6 * vars);
            if k > 0 {
                assert!(step.best_energy <= r.trace[k - 1].best_energy);
            }
        }
        let last = r.trace.last().unwrap();
        match r.stop_reason {
            StopReason::AcceptanceBelowEpsilon => assert!(last.acceptance_rate < 0.001),
            StopReason::EnergyStable => {
                assert!(r.trace.len() > 30);
                let tail = &r.trace[r.trace.len() - 31..];
                for p in tail.windows(2) {
                    let scale = p[0].mean_energy.abs().max(1.0);
                    assert!((p[1].mean_energy - p[0].mean_energy).abs() <= 1e-4 * scale);
                }
            }
            StopReason::IterationCap => panic!("cap hit on a desk-size instance"),
        }
        let recomputed = evaluate(&inst, &r.best_schedule).unwrap();
        assert_eq!(recomputed, r.best_evaluation);
        assert_eq!(r.best_energy, recomputed.energy(&r.weights));
    }
}

#[test]
fn accepted_limit_can_end_a_temperature() {
    let mut rng = rng(39);
    let inst = small_instance(&mut rng, 6, None);
    let params = SaParams {
        inner_accepted_coeff: 1.0,
        seed: 5,
        ..Default::default()
    };
    let r = solve(&inst, &params).unwrap();
    let vars = inst.model_size().variables;
    assert_eq!(r.trace[0].accepted, vars);
    assert!(r.trace[0].generated < 3 * vars);
    for step in &r.trace {
        assert!(step.generated == 3 * vars || step.accepted == vars);
    }
}

#[test]
fn iteration_cap_is_reported() {
    let mut rng = rng(40);
    let inst = small_instance(&mut rng, 6, None);
    let params = SaParams {
        max_evaluations: 500,
        ..Default::default()
    };
    let r = solve(&inst, &params).unwrap();
    assert_eq!(r.stop_reason, StopReason::IterationCap);
    assert_eq!(r.evaluations, 500);
}

#[test]
fn same_seed_same_result() {
    let mut rng = rng(41);
    let inst = small_instance(&mut rng, 6, None);
    let params = SaParams::default().with_seed(77);
    assert_eq!(
        solve(&inst, &params).unwrap(),
        solve(&inst, &params).unwrap()
    );
    assert_eq!(
        solve_restarts(&inst, &params, 3).unwrap(),
        solve_restarts(&inst, &params, 3).unwrap()
    );
}

#[test]
fn incremental_energy_cross_check_mode() {
    let mut rng = rng(42);
    let inst = small_instance(&mut rng, 6, None);
    let params = SaParams {
        cross_check: true,
        seed: 1,
        ..Default::default()
    };
    let r = solve(&inst, &params).unwrap();
    let drift = r.incremental_drift.unwrap();
    assert!(
        drift <= 1e-6 * PenaltyWeights::dominant(&inst).rate.max(1.0),
        "{drift}"
    );
}

#[test]
fn dominant_penalties_reach_feasibility() {
    let mut rng = rng(43);
    let mut feasible_instances = 0;
    for i in 0..20 {
        let inst = small_instance(&mut rng, 6, Some(i % 2 == 0));
        let exact = solve_exact(&inst, &OracleLimits::default()).unwrap();
        if exact.optimum.is_none() {
            continue;
        }
        feasible_instances += 1;
        let r = solve_restarts(&inst, &SaParams::default().with_seed(i as u64), 3).unwrap();
        assert!(r.best_evaluation.feasible, "instance {i}");
    }
    assert!(feasible_instances >= 5);
}
