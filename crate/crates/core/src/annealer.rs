//! Simulated annealing over delivery schedules.
//!
//! The search state is one delivery day per train, so the "exactly one
//! delivery inside the window" constraint holds by construction. The
//! remaining constraints enter the energy as weighted penalties. A neighbour
//! moves one uniformly chosen train to a different, uniformly chosen day of
//! its window. Moves are scored incrementally: only the days whose counts
//! change are re-penalised.
//!
//! Each temperature runs until `h1 * |X|` moves were generated or `h2 * |X|`
//! were accepted, where `|X|` is the number of binary delivery variables
//! (the summed window widths). Temperatures follow `sigma_i = sigma_0 * h3^i`.
//! The search stops when the acceptance rate at a temperature falls below
//! `epsilon`, when the mean energy has stayed put for `stability_count`
//! consecutive temperatures, or when the evaluation cap is hit.
//!
//! Randomness comes from ChaCha8 seeded with `seed`; restart `k` uses stream
//! `k` of that seed, so restarts are independent and reproducible regardless
//! of how they are scheduled.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::evaluation::{
    evaluate_unchecked, loss_unchecked, train_km_per_day, DayLoad, Evaluation, Instance, ModelSize,
    PenaltyWeights, Schedule,
};

/// Where the search starts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum InitialSolution {
    /// Every train on its expiry day, clamped into its window.
    #[default]
    ExpiredDates,
    /// A given schedule, e.g. a dispatcher's manual plan.
    Provided(Schedule),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaParams {
    /// Penalty weights; [`PenaltyWeights::dominant`] when absent.
    pub penalty: Option<PenaltyWeights>,
    /// Geometric cooling factor `h3`.
    pub cooling_rate: f64,
    /// `h1`: generated moves per temperature, per decision variable.
    pub inner_generated_coeff: f64,
    /// `h2`: accepted moves per temperature, per decision variable.
    pub inner_accepted_coeff: f64,
    /// `epsilon`: stop once a temperature accepts a smaller fraction of moves.
    pub min_accept_rate: f64,
    pub stability_count: u32,
    /// Relative change of the mean energy below which a temperature counts
    /// as stable.
    pub stability_rel_tol: f64,
    /// Calibrated from sampled moves when absent.
    pub initial_temp: Option<f64>,
    pub calibration_samples: u32,
    /// Probability with which the mean uphill move is accepted at the
    /// calibrated initial temperature.
    pub calibration_acceptance: f64,
    pub max_evaluations: u64,
    pub seed: u64,
    /// ChaCha stream; restarts use their index.
    pub stream: u64,
    pub initial_solution: InitialSolution,
    /// Recompute the energy from scratch after each accepted move and record
    /// the largest deviation from the incremental value.
    pub cross_check: bool,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            penalty: None,
            cooling_rate: 0.97,
            inner_generated_coeff: 3.0,
            inner_accepted_coeff: 6.0,
            min_accept_rate: 0.001,
            stability_count: 30,
            stability_rel_tol: 1e-4,
            initial_temp: None,
            calibration_samples: 200,
            calibration_acceptance: 0.95,
            max_evaluations: 1_000_000,
            seed: 0,
            stream: 0,
            initial_solution: InitialSolution::ExpiredDates,
            cross_check: false,
        }
    }
}

impl SaParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m| Err(Error::InvalidParams(m));
        if !(self.cooling_rate > 0.0 && self.cooling_rate < 1.0) {
            return bad("cooling rate must lie in (0, 1)");
        }
        if !(self.inner_generated_coeff >= 1.0) || !(self.inner_accepted_coeff >= 1.0) {
            return bad("inner-loop coefficients must be at least 1");
        }
        if !(self.min_accept_rate > 0.0 && self.min_accept_rate < 1.0) {
            return bad("minimum acceptance rate must lie in (0, 1)");
        }
        if self.stability_count < 1 {
            return bad("stability count must be at least 1");
        }
        if !(self.stability_rel_tol >= 0.0) {
            return bad("stability tolerance must be non-negative");
        }
        if let Some(t) = self.initial_temp {
            if !(t > 0.0) || !t.is_finite() {
                return bad("initial temperature must be positive");
            }
        }
        if !(self.calibration_acceptance > 0.0 && self.calibration_acceptance < 1.0) {
            return bad("calibration acceptance must lie in (0, 1)");
        }
        if let Some(w) = self.penalty {
            if [w.rate, w.acceptance, w.capacity]
                .iter()
                .any(|v| !(*v >= 0.0) || !v.is_finite())
            {
                return bad("penalty weights must be finite and non-negative");
            }
        }
        if self.max_evaluations < 1 {
            return bad("evaluation cap must be positive");
        }
        Ok(())
    }

    /// Generator for this run.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    AcceptanceBelowEpsilon,
    EnergyStable,
    IterationCap,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::AcceptanceBelowEpsilon => "acceptance-below-epsilon",
            StopReason::EnergyStable => "energy-stable",
            StopReason::IterationCap => "iteration-cap",
        }
    }
}

/// Statistics of one temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemperatureStep {
    pub temperature: f64,
    pub mean_energy: f64,
    pub acceptance_rate: f64,
    pub generated: u64,
    pub accepted: u64,
    /// Best energy seen up to the end of this temperature.
    pub best_energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaResult {
    pub best_schedule: Schedule,
    /// Recomputed from scratch for `best_schedule`.
    pub best_evaluation: Evaluation,
    pub best_energy: f64,
    pub weights: PenaltyWeights,
    pub initial_temperature: f64,
    pub trace: Vec<TemperatureStep>,
    pub stop_reason: StopReason,
    pub evaluations: u64,
    pub model_size: ModelSize,
    pub seed: u64,
    pub stream: u64,
    /// Largest |incremental - recomputed| energy, when cross-checking.
    pub incremental_drift: Option<f64>,
}

/// One train moved from one delivery day to another.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub train: usize,
    pub from: i64,
    pub to: i64,
}

impl Move {
    pub fn is_noop(&self) -> bool {
        self.from == self.to
    }
}

/// Draws a random single-train move. Width-1 windows give a no-op move.
pub fn propose_move<R: Rng + ?Sized>(
    instance: &Instance,
    schedule: &Schedule,
    rng: &mut R,
) -> Move {
    let train = rng.random_range(0..instance.fleet_size());
    let window = instance.windows()[train];
    let from = schedule.day(train);
    let width = window.width();
    if width <= 1 {
        return Move {
            train,
            from,
            to: from,
        };
    }
    let mut to = window.begin_day + rng.random_range(0..width - 1) as i64;
    if to >= from {
        to += 1;
    }
    Move { train, from, to }
}

/// Neighbouring schedule differing in at most one train's delivery.
pub fn neighbor<R: Rng + ?Sized>(
    schedule: &Schedule,
    instance: &Instance,
    rng: &mut R,
) -> Schedule {
    let mv = propose_move(instance, schedule, rng);
    let mut next = schedule.clone();
    next.days[mv.train] = mv.to;
    next
}

/// Metropolis rule: always accept non-increasing moves, otherwise accept
/// with probability `exp(-delta / temperature)`.
#[inline]
pub fn metropolis_accept<R: Rng + ?Sized>(delta: f64, temperature: f64, rng: &mut R) -> bool {
    delta <= 0.0 || rng.random::<f64>() < libm::exp(-delta / temperature)
}

/// Starting schedule for `params`.
pub fn initial_solution(instance: &Instance, params: &SaParams) -> Result<Schedule> {
    match &params.initial_solution {
        InitialSolution::ExpiredDates => Ok(Schedule::at_expiry(instance)),
        InitialSolution::Provided(s) => {
            instance.check_schedule(s)?;
            Ok(s.clone())
        }
    }
}

/// Incrementally scored search state.
pub struct SearchState<'a> {
    instance: &'a Instance,
    weights: PenaltyWeights,
    schedule: Schedule,
    load: DayLoad,
    loss: f64,
    penalty: f64,
    touched: Vec<i64>,
    pending: Option<(f64, f64)>,
}

impl<'a> SearchState<'a> {
    /// `schedule` must already be validated against `instance`.
    pub fn new(instance: &'a Instance, schedule: Schedule, weights: PenaltyWeights) -> Self {
        let load = DayLoad::from_schedule(instance, &schedule);
        let loss = loss_unchecked(instance, &schedule);
        let penalty = (0..=instance.horizon())
            .map(|d| load.day_penalty(instance, d, &weights))
            .sum();
        Self {
            instance,
            weights,
            schedule,
            load,
            loss,
            penalty,
            touched: Vec::new(),
            pending: None,
        }
    }

    #[inline]
    pub fn energy(&self) -> f64 {
        self.loss + self.penalty
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    /// Applies `mv` and returns the energy change. Must be followed by
    /// [`SearchState::commit`] or [`SearchState::undo`].
    pub fn try_move(&mut self, mv: Move) -> f64 {
        debug_assert_eq!(self.schedule.day(mv.train), mv.from);
        if mv.is_noop() {
            self.pending = Some((0.0, 0.0));
            return 0.0;
        }
        let inst = self.instance;
        self.touched.clear();
        DayLoad::touched_days(inst, mv.train, mv.from, &mut self.touched);
        DayLoad::touched_days(inst, mv.train, mv.to, &mut self.touched);
        self.touched.sort_unstable();
        self.touched.dedup();

        let before: f64 = self
            .touched
            .iter()
            .map(|&d| self.load.day_penalty(inst, d, &self.weights))
            .sum();
        self.load.remove(inst, mv.train, mv.from);
        self.load.add(inst, mv.train, mv.to);
        self.schedule.days[mv.train] = mv.to;
        let after: f64 = self
            .touched
            .iter()
            .map(|&d| self.load.day_penalty(inst, d, &self.weights))
            .sum();

        let d_loss = (mv.from - mv.to) as f64 * train_km_per_day(&inst.trains()[mv.train]);
        let d_pen = after - before;
        self.pending = Some((d_loss, d_pen));
        d_loss + d_pen
    }

    pub fn commit(&mut self) {
        let (d_loss, d_pen) = self.pending.take().expect("no pending move");
        self.loss += d_loss;
        self.penalty += d_pen;
    }

    pub fn undo(&mut self, mv: Move) {
        self.pending = None;
        if mv.is_noop() {
            return;
        }
        self.load.remove(self.instance, mv.train, mv.to);
        self.load.add(self.instance, mv.train, mv.from);
        self.schedule.days[mv.train] = mv.from;
    }

    /// Energy recomputed from scratch.
    pub fn full_energy(&self) -> f64 {
        evaluate_unchecked(self.instance, &self.schedule).energy(&self.weights)
    }
}

/// Initial temperature at which the mean uphill move is accepted with
/// probability `params.calibration_acceptance`. Moves are sampled along an
/// unconditional random walk from `schedule`; `1.0` when no sampled move goes
/// uphill.
pub fn calibrate_initial_temperature<R: Rng + ?Sized>(
    instance: &Instance,
    schedule: &Schedule,
    params: &SaParams,
    rng: &mut R,
) -> Result<f64> {
    instance.check_schedule(schedule)?;
    let weights = params
        .penalty
        .unwrap_or_else(|| PenaltyWeights::dominant(instance));
    let mut state = SearchState::new(instance, schedule.clone(), weights);
    let (mut sum, mut count) = (0.0, 0u32);
    for _ in 0..params.calibration_samples {
        let mv = propose_move(instance, state.schedule(), rng);
        let delta = state.try_move(mv);
        state.commit();
        if delta > 0.0 {
            sum += delta;
            count += 1;
        }
    }
    Ok(temperature_for_mean_uphill(
        if count == 0 {
            None
        } else {
            Some(sum / count as f64)
        },
        params.calibration_acceptance,
    ))
}

/// `mean / ln(1 / p)`, or `1.0` without uphill samples.
pub fn temperature_for_mean_uphill(mean_uphill: Option<f64>, acceptance: f64) -> f64 {
    match mean_uphill {
        Some(m) if m > 0.0 => m / libm::log(1.0 / acceptance),
        _ => 1.0,
    }
}

/// Runs one annealing search.
pub fn solve(instance: &Instance, params: &SaParams) -> Result<SaResult> {
    params.validate()?;
    let start = initial_solution(instance, params)?;
    let weights = params
        .penalty
        .unwrap_or_else(|| PenaltyWeights::dominant(instance));
    let mut rng = params.rng();

    let sigma0 = match params.initial_temp {
        Some(t) => t,
        None => calibrate_initial_temperature(instance, &start, params, &mut rng)?,
    };

    let model_size = instance.model_size();
    let vars = model_size.variables as f64;
    let gen_limit = libm::ceil(params.inner_generated_coeff * vars) as u64;
    let acc_limit = libm::ceil(params.inner_accepted_coeff * vars) as u64;

    let mut state = SearchState::new(instance, start, weights);
    let mut best_schedule = state.schedule().clone();
    let mut best_energy = state.energy();
    let mut trace = Vec::new();
    let mut evaluations = 0u64;
    let mut stable_run = 0u32;
    let mut prev_mean: Option<f64> = None;
    let mut drift: Option<f64> = params.cross_check.then_some(0.0);

    let stop_reason = 'outer: loop {
        let sigma = sigma0 * libm::pow(params.cooling_rate, trace.len() as f64);
        let (mut generated, mut accepted) = (0u64, 0u64);
        let mut energy_sum = 0.0;
        let mut capped = false;
        while generated < gen_limit && accepted < acc_limit {
            if evaluations >= params.max_evaluations {
                capped = true;
                break;
            }
            let mv = propose_move(instance, state.schedule(), &mut rng);
            generated += 1;
            evaluations += 1;
            let delta = state.try_move(mv);
            if metropolis_accept(delta, sigma, &mut rng) {
                state.commit();
                accepted += 1;
                if let Some(d) = drift.as_mut() {
                    *d = d.max(libm::fabs(state.energy() - state.full_energy()));
                }
                if state.energy() < best_energy {
                    best_energy = state.energy();
                    best_schedule.clone_from(state.schedule());
                }
            } else {
                state.undo(mv);
            }
            energy_sum += state.energy();
        }

        if generated > 0 {
            let mean = energy_sum / generated as f64;
            let rate = accepted as f64 / generated as f64;
            trace.push(TemperatureStep {
                temperature: sigma,
                mean_energy: mean,
                acceptance_rate: rate,
                generated,
                accepted,
                best_energy,
            });
            if capped {
                break 'outer StopReason::IterationCap;
            }
            if rate < params.min_accept_rate {
                break 'outer StopReason::AcceptanceBelowEpsilon;
            }
            if let Some(prev) = prev_mean {
                let scale = libm::fabs(prev).max(1.0);
                if libm::fabs(mean - prev) <= params.stability_rel_tol * scale {
                    stable_run += 1;
                } else {
                    stable_run = 0;
                }
            }
            prev_mean = Some(mean);
            if stable_run >= params.stability_count {
                break 'outer StopReason::EnergyStable;
            }
        } else {
            break 'outer StopReason::IterationCap;
        }
    };

    let best_evaluation = evaluate_unchecked(instance, &best_schedule);
    let best_energy = best_evaluation.energy(&weights);
    Ok(SaResult {
        best_schedule,
        best_evaluation,
        best_energy,
        weights,
        initial_temperature: sigma0,
        trace,
        stop_reason,
        evaluations,
        model_size,
        seed: params.seed,
        stream: params.stream,
        incremental_drift: drift,
    })
}

/// Picks the lowest-energy result; ties go to the lower stream index.
pub fn select_best(results: Vec<SaResult>) -> Option<SaResult> {
    results.into_iter().reduce(|best, r| {
        if r.best_energy < best.best_energy
            || (r.best_energy == best.best_energy && r.stream < best.stream)
        {
            r
        } else {
            best
        }
    })
}

/// Runs `restarts` independent searches (streams `0..restarts`) one after
/// another and returns the best.
pub fn solve_restarts(instance: &Instance, params: &SaParams, restarts: u32) -> Result<SaResult> {
    let mut results = Vec::with_capacity(restarts.max(1) as usize);
    for k in 0..restarts.max(1) {
        let p = SaParams {
            stream: k as u64,
            ..params.clone()
        };
        results.push(solve(instance, &p)?);
    }
    Ok(select_best(results).expect("at least one restart"))
}
