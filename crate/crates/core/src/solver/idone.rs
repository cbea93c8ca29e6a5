use alloc::vec::Vec;

use super::{check_measurement, explore_step, resolve_start, Clock, RunTrace, SolverConfig};
use crate::error::Result;
use crate::fitting::RlsState;
use crate::model_min::minimize_model;
use crate::problems::Problem;
use crate::rng::{substream, Stream};
use crate::surrogate::{default_weights, SurrogateModel};

/// Surrogate loop: measure, refit by one RLS step, minimize the model from
/// the point just measured, perturb the rounded minimizer, repeat. Spends
/// exactly `config.budget` evaluations.
pub fn run_idone<P: Problem + ?Sized>(
    problem: &P,
    config: &SolverConfig,
    clock: &dyn Clock,
) -> Result<RunTrace> {
    config.validate()?;
    let bounds = problem.bounds().clone();
    let p = config.p_explore.unwrap_or(1.0 / bounds.dim() as f64);

    let mut x = resolve_start(&bounds, config.initial_point.as_ref(), config.seed)?;
    let mut explore_rng = substream(config.seed, Stream::Solver);
    let mut noise_rng = substream(config.seed, Stream::Noise);

    let mut model = SurrogateModel::new(config.variant, bounds.clone());
    let mut rls = RlsState::new(default_weights(model.len()), config.lambda)?;
    let mut trace = RunTrace::new(config.kind().id(), problem.id(), config.seed);
    trace.records.reserve(config.budget);

    for n in 1..=config.budget {
        let started = clock.now_ms();
        let y = check_measurement(problem.evaluate(&x, &mut noise_rng)?)?;

        rls.update(&model.activations_at(&x)?, y)?;
        model.set_weights(rls.weights())?;

        let start: Vec<f64> = x.iter().map(|&v| v as f64).collect();
        let result = minimize_model(&model, &start, &config.minimize)?;

        let next = if n < config.budget {
            Some(explore_step(&result.x_star, &bounds, p, &mut explore_rng))
        } else {
            None
        };
        let elapsed = clock.now_ms() - started;
        let measured = match next {
            Some(next) => core::mem::replace(&mut x, next),
            None => core::mem::take(&mut x),
        };
        trace.push(measured, y, Some(result.g_rounded), elapsed);
    }
    Ok(trace)
}
