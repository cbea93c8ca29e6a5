//! Black-box optimization over bounded integer lattices with a piecewise-linear
//! ReLU surrogate whose local minima sit on integer points.
//!
//! The crate is `no_std` (it needs `alloc`). Everything that touches files,
//! clocks or threads lives in the companion `idone` crate; here a run only
//! sees a [`Problem`](problems::Problem), an RNG and an optional [`Clock`].
//!
//! The pieces, bottom-up:
//!
//! * [`surrogate`] builds the fixed ReLU basis (basic or advanced) and evaluates
//!   the model and its gradient.
//! * [`fitting`] keeps the weights up to date with recursive least squares.
//! * [`model_min`] minimizes the relaxed model inside the box and rounds.
//! * [`solver`] holds the outer loops: IDONE, random search, simulated annealing.
//! * [`problems`] provides the noisy TSP and convex binary benchmarks.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod bounds;
mod error;
pub mod fitting;
pub mod linalg;
pub mod model_min;
pub mod problems;
pub mod rng;
pub mod solver;
pub mod surrogate;

pub use bounds::Bounds;
pub use error::{Error, Result};
pub use fitting::RlsState;
pub use model_min::{minimize_model, round_feasible, MinimizeOptions, MinimizeResult, Termination};
pub use problems::Problem;
pub use solver::{
    explore_step, run_idone, run_random_search, run_simulated_annealing, Clock, IterationRecord,
    NullClock, RunTrace, SaConfig, SolverConfig, SolverKind,
};
pub use surrogate::{BasisFunction, ModelVariant, SurrogateModel};
