//! Outer optimization loops and the per-run trace they produce.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::fitting::DEFAULT_LAMBDA;
use crate::model_min::MinimizeOptions;
use crate::rng::{substream, Stream};
use crate::surrogate::ModelVariant;

mod baselines;
mod idone;

pub use baselines::{acceptance_probability, run_random_search, run_simulated_annealing};
pub use idone::run_idone;

/// Cooling parameters used for the TSP study.
pub const TSP_SA_T0: f64 = 4.48;
pub const TSP_SA_TF: f64 = 0.996;
/// Cooling parameters used for the convex binary study.
pub const BINARY_SA_T0: f64 = 1.0;
pub const BINARY_SA_TF: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    IdoneBasic,
    IdoneAdvanced,
    RandomSearch,
    SimulatedAnnealing,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [
        SolverKind::IdoneAdvanced,
        SolverKind::IdoneBasic,
        SolverKind::RandomSearch,
        SolverKind::SimulatedAnnealing,
    ];

    pub fn id(self) -> &'static str {
        match self {
            SolverKind::IdoneBasic => "idone-basic",
            SolverKind::IdoneAdvanced => "idone-advanced",
            SolverKind::RandomSearch => "rs",
            SolverKind::SimulatedAnnealing => "sa",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.id() == id)
    }
}

/// Source of wall-clock time for per-iteration timings.
pub trait Clock {
    fn now_ms(&self) -> f64;
}

/// Always reads zero; traces produced with it carry no timing.
#[derive(Debug, Clone, Copy, Default)]
pub struct NullClock;

impl Clock for NullClock {
    fn now_ms(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub variant: ModelVariant,
    /// Number of objective evaluations.
    pub budget: usize,
    /// Per-coordinate exploration probability; `None` means `1 / d`.
    pub p_explore: Option<f64>,
    pub lambda: f64,
    pub seed: u64,
    pub minimize: MinimizeOptions,
    /// Starting point; drawn from the seed's initial-point stream if absent.
    pub initial_point: Option<Vec<i64>>,
}

impl SolverConfig {
    pub fn new(variant: ModelVariant, budget: usize, seed: u64) -> Self {
        Self {
            variant,
            budget,
            p_explore: None,
            lambda: DEFAULT_LAMBDA,
            seed,
            minimize: MinimizeOptions::default(),
            initial_point: None,
        }
    }

    pub fn kind(&self) -> SolverKind {
        match self.variant {
            ModelVariant::Basic => SolverKind::IdoneBasic,
            ModelVariant::Advanced => SolverKind::IdoneAdvanced,
        }
    }

    fn validate(&self) -> Result<()> {
        check_budget(self.budget)?;
        if let Some(p) = self.p_explore {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidConfig(format!(
                    "exploration probability must lie in [0, 1], got {p}"
                )));
            }
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidLambda(self.lambda));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaConfig {
    /// Starting temperature.
    pub t0: f64,
    /// Cooling factor applied every iteration.
    pub tf: f64,
    pub budget: usize,
    pub seed: u64,
    pub initial_point: Option<Vec<i64>>,
}

impl SaConfig {
    pub fn new(t0: f64, tf: f64, budget: usize, seed: u64) -> Self {
        Self {
            t0,
            tf,
            budget,
            seed,
            initial_point: None,
        }
    }

    fn validate(&self) -> Result<()> {
        check_budget(self.budget)?;
        if !(self.t0 > 0.0) || !self.t0.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "starting temperature must be positive, got {}",
                self.t0
            )));
        }
        if !(self.tf > 0.0 && self.tf < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "cooling factor must lie in (0, 1), got {}",
                self.tf
            )));
        }
        Ok(())
    }
}

fn check_budget(budget: usize) -> Result<()> {
    if budget == 0 {
        return Err(Error::InvalidConfig("budget must be at least 1".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// 1-based evaluation index.
    pub iter: usize,
    pub x: Vec<i64>,
    pub y: f64,
    pub best_y: f64,
    pub best_x: Vec<i64>,
    /// Surrogate value at the rounded model minimizer (IDONE only).
    pub surrogate_min: Option<f64>,
    pub time_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub solver: String,
    pub problem: String,
    pub seed: u64,
    pub records: Vec<IterationRecord>,
}

impl RunTrace {
    pub fn new(solver: impl Into<String>, problem: impl Into<String>, seed: u64) -> Self {
        Self {
            solver: solver.into(),
            problem: problem.into(),
            seed,
            records: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Lowest measured value and where it was measured.
    pub fn best(&self) -> Option<(&[i64], f64)> {
        self.records.last().map(|r| (r.best_x.as_slice(), r.best_y))
    }

    pub fn best_curve(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.best_y)
    }

    pub fn total_time_ms(&self) -> f64 {
        self.records.iter().map(|r| r.time_ms).sum()
    }

    /// Appends a measurement, carrying the best-so-far forward.
    pub(crate) fn push(&mut self, x: Vec<i64>, y: f64, surrogate_min: Option<f64>, time_ms: f64) {
        let (best_x, best_y) = match self.records.last() {
            Some(prev) if prev.best_y <= y => (prev.best_x.clone(), prev.best_y),
            _ => (x.clone(), y),
        };
        self.records.push(IterationRecord {
            iter: self.records.len() + 1,
            x,
            y,
            best_y,
            best_x,
            surrogate_min,
            time_ms,
        });
    }
}

/// Uniform lattice point drawn from the seed's initial-point stream. Every
/// solver run with the same seed starts here.
pub fn initial_point(bounds: &Bounds, seed: u64) -> Vec<i64> {
    let mut rng = substream(seed, Stream::InitialPoint);
    uniform_point(bounds, &mut rng)
}

pub(crate) fn uniform_point<R: Rng + ?Sized>(bounds: &Bounds, rng: &mut R) -> Vec<i64> {
    bounds
        .lower()
        .iter()
        .zip(bounds.upper())
        .map(|(&l, &u)| rng.gen_range(l..=u))
        .collect()
}

pub(crate) fn resolve_start(
    bounds: &Bounds,
    given: Option<&Vec<i64>>,
    seed: u64,
) -> Result<Vec<i64>> {
    match given {
        Some(x) if bounds.contains(x) => Ok(x.clone()),
        Some(x) => Err(Error::InvalidConfig(format!(
            "initial point {x:?} lies outside the bounds"
        ))),
        None => Ok(initial_point(bounds, seed)),
    }
}

pub(crate) fn check_measurement(y: f64) -> Result<f64> {
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFinite("measurement"))
    }
}

/// Random `{-1, 0, +1}` perturbation of a lattice point. Each coordinate stays
/// put with probability `1 - p`; otherwise it moves inward from a bound, or
/// up or down with probability `p / 2` each in the interior.
pub fn explore_step<R: Rng + ?Sized>(
    x_star: &[i64],
    bounds: &Bounds,
    p: f64,
    rng: &mut R,
) -> Vec<i64> {
    x_star
        .iter()
        .zip(bounds.lower().iter().zip(bounds.upper()))
        .map(|(&x, (&l, &u))| {
            let r: f64 = rng.gen();
            if r >= p {
                x
            } else if x <= l {
                l + 1
            } else if x >= u {
                u - 1
            } else if r < p / 2.0 {
                x + 1
            } else {
                x - 1
            }
        })
        .collect()
}
