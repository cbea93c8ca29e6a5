//! Benchmark objectives behind a common black-box interface.

use rand::RngCore;

use crate::bounds::Bounds;
use crate::error::Result;

pub mod binary;
pub mod tsp;

pub use binary::{
    convex_binary_objective, generate_convex_binary, ConvexBinaryProblem, QuadraticInstance,
};
pub use tsp::{
    decode_route, four_city_matrix, make_br17_problem, noisy_tsp_objective, route_bounds,
    DistanceMatrix, TspProblem,
};

/// A noisy objective over an integer box. One call to [`evaluate`] is one
/// unit of budget, however much work it does internally.
///
/// [`evaluate`]: Problem::evaluate
pub trait Problem {
    fn id(&self) -> &str;

    fn bounds(&self) -> &Bounds;

    fn dim(&self) -> usize {
        self.bounds().dim()
    }

    /// Measures `f(x) + noise`. `x` must lie inside [`bounds`](Problem::bounds);
    /// all randomness comes from `noise`.
    fn evaluate(&self, x: &[i64], noise: &mut dyn RngCore) -> Result<f64>;
}

impl<P: Problem + ?Sized> Problem for &P {
    fn id(&self) -> &str {
        (**self).id()
    }

    fn bounds(&self) -> &Bounds {
        (**self).bounds()
    }

    fn evaluate(&self, x: &[i64], noise: &mut dyn RngCore) -> Result<f64> {
        (**self).evaluate(x, noise)
    }
}
