use super::{
    check_measurement, explore_step, resolve_start, uniform_point, Clock, RunTrace, SaConfig,
    SolverKind,
};
use crate::error::Result;
use crate::problems::Problem;
use crate::rng::{substream, Stream};
use rand::Rng;

/// `budget` independent uniform lattice points; the first one is the shared
/// initial point of the seed.
pub fn run_random_search<P: Problem + ?Sized>(
    problem: &P,
    budget: usize,
    seed: u64,
    clock: &dyn Clock,
) -> Result<RunTrace> {
    super::check_budget(budget)?;
    let bounds = problem.bounds();
    let mut rng = substream(seed, Stream::Solver);
    let mut noise_rng = substream(seed, Stream::Noise);
    let mut trace = RunTrace::new(SolverKind::RandomSearch.id(), problem.id(), seed);
    let mut x = resolve_start(bounds, None, seed)?;
    for n in 1..=budget {
        let started = clock.now_ms();
        if n > 1 {
            x = uniform_point(bounds, &mut rng);
        }
        let y = check_measurement(problem.evaluate(&x, &mut noise_rng)?)?;
        let elapsed = clock.now_ms() - started;
        trace.push(x.clone(), y, None, elapsed);
    }
    Ok(trace)
}

/// Probability of moving from a state with value `y_current` to a candidate
/// with value `y_candidate` at temperature `t`.
pub fn acceptance_probability(y_current: f64, y_candidate: f64, t: f64) -> f64 {
    if y_candidate < y_current {
        1.0
    } else {
        libm::exp((y_current - y_candidate) / t)
    }
}

/// Simulated annealing with the exploration step as proposal (`p = 1/d`) and
/// geometric cooling `T <- tf * T` after every proposal.
pub fn run_simulated_annealing<P: Problem + ?Sized>(
    problem: &P,
    config: &SaConfig,
    clock: &dyn Clock,
) -> Result<RunTrace> {
    config.validate()?;
    let bounds = problem.bounds();
    let p = 1.0 / bounds.dim() as f64;
    let mut rng = substream(config.seed, Stream::Solver);
    let mut noise_rng = substream(config.seed, Stream::Noise);
    let mut trace = RunTrace::new(
        SolverKind::SimulatedAnnealing.id(),
        problem.id(),
        config.seed,
    );

    let started = clock.now_ms();
    let mut current = resolve_start(bounds, config.initial_point.as_ref(), config.seed)?;
    let mut current_y = check_measurement(problem.evaluate(&current, &mut noise_rng)?)?;
    trace.push(current.clone(), current_y, None, clock.now_ms() - started);

    let mut temperature = config.t0;
    for _ in 1..config.budget {
        let started = clock.now_ms();
        let candidate = explore_step(&current, bounds, p, &mut rng);
        let y = check_measurement(problem.evaluate(&candidate, &mut noise_rng)?)?;
        let accept =
            y < current_y || rng.gen::<f64>() < acceptance_probability(current_y, y, temperature);
        temperature *= config.tf;
        let elapsed = clock.now_ms() - started;
        trace.push(candidate.clone(), y, None, elapsed);
        if accept {
            current = candidate;
            current_y = y;
        }
    }
    Ok(trace)
}
