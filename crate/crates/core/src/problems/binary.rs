//! Convex quadratic objective over binary vectors,
//! `f(x) = (x - x*)^T A (x - x*)` with `A = (U + U^T) / d + I`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore};

use super::Problem;
use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticInstance {
    d: usize,
    /// Row-major, symmetric positive definite.
    a: Vec<f64>,
    x_opt: Vec<i64>,
}

impl QuadraticInstance {
    /// Validates shape, symmetry and positive definiteness.
    pub fn new(a: Vec<f64>, x_opt: Vec<i64>) -> Result<Self> {
        let d = x_opt.len();
        if d == 0 {
            return Err(Error::Empty);
        }
        if a.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                actual: a.len(),
            });
        }
        if x_opt.iter().any(|&v| v != 0 && v != 1) {
            return Err(Error::InvalidConfig("optimum must be binary".into()));
        }
        for i in 0..d {
            for j in 0..i {
                if a[i * d + j] != a[j * d + i] {
                    return Err(Error::InvalidConfig("matrix is not symmetric".into()));
                }
            }
        }
        linalg::cholesky(&a, d)?;
        Ok(Self { d, a, x_opt })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &[f64] {
        &self.a
    }

    pub fn optimum(&self) -> &[i64] {
        &self.x_opt
    }

    /// Noiseless `(x - x*)^T A (x - x*)`.
    pub fn value(&self, x: &[i64]) -> f64 {
        let diff: Vec<f64> = x
            .iter()
            .zip(&self.x_opt)
            .map(|(a, b)| (a - b) as f64)
            .collect();
        let mut total = 0.0;
        for (i, &di) in diff.iter().enumerate() {
            if di == 0.0 {
                continue;
            }
            total += di * linalg::dot(&self.a[i * self.d..(i + 1) * self.d], &diff);
        }
        total
    }
}

/// Draws `U` with iid `Uniform[0, 1)` entries, sets `A = (U + U^T) / d + I` and
/// picks `x*` with iid fair bits. A draw whose `A` fails the Cholesky check is
/// discarded and the generator continues with fresh values.
pub fn generate_convex_binary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<QuadraticInstance> {
    if d == 0 {
        return Err(Error::Empty);
    }
    loop {
        let u: Vec<f64> = (0..d * d).map(|_| rng.gen::<f64>()).collect();
        let mut a = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                a[i * d + j] = (u[i * d + j] + u[j * d + i]) / d as f64;
            }
            a[i * d + i] += 1.0;
        }
        let x_opt: Vec<i64> = (0..d).map(|_| i64::from(rng.gen::<bool>())).collect();
        match QuadraticInstance::new(a, x_opt) {
            Ok(instance) => return Ok(instance),
            Err(Error::NotPositiveDefinite) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Quadratic form plus one `Uniform[0, 1)` draw when `noise` is given.
pub fn convex_binary_objective(
    instance: &QuadraticInstance,
    x: &[i64],
    noise: Option<&mut dyn RngCore>,
) -> f64 {
    let value = instance.value(x);
    match noise {
        Some(rng) => value + rng.gen::<f64>(),
        None => value,
    }
}

#[derive(Debug, Clone)]
pub struct ConvexBinaryProblem {
    id: String,
    instance: QuadraticInstance,
    bounds: Bounds,
    noisy: bool,
}

impl ConvexBinaryProblem {
    pub fn new(id: impl Into<String>, instance: QuadraticInstance, noisy: bool) -> Self {
        let bounds = Bounds::uniform(instance.dim(), 0, 1).expect("non-empty instance");
        Self {
            id: id.into(),
            instance,
            bounds,
            noisy,
        }
    }

    pub fn instance(&self) -> &QuadraticInstance {
        &self.instance
    }
}

impl Problem for ConvexBinaryProblem {
    fn id(&self) -> &str {
        &self.id
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &[i64], noise: &mut dyn RngCore) -> Result<f64> {
        self.bounds.check_dim(x.len())?;
        Ok(convex_binary_objective(
            &self.instance,
            x,
            if self.noisy { Some(noise) } else { None },
        ))
    }
}
