//! Recursive least squares for the surrogate weights.
//!
//! After `N` updates the weights equal the minimizer of
//! `sum_n (y_n - a_n . c)^2 + lambda * |c - c0|^2`, with `P` holding the
//! inverse of `A^T A + lambda I`. Each update costs `O(D^2)` regardless of `N`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg;

/// Default regularization strength.
pub const DEFAULT_LAMBDA: f64 = 0.001;

#[derive(Debug, Clone)]
pub struct RlsState {
    weights: Vec<f64>,
    /// Row-major `D x D`, kept exactly symmetric.
    cov: Vec<f64>,
    lambda: f64,
    count: usize,
    scratch: Vec<f64>,
    support: Vec<usize>,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidLambda(lambda));
    }
    Ok(())
}

impl RlsState {
    /// `P = I / lambda`, weights `c0`, no updates yet.
    pub fn new(c0: Vec<f64>, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        if c0.is_empty() {
            return Err(Error::Empty);
        }
        if c0.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("initial weights"));
        }
        let n = c0.len();
        let mut cov = vec![0.0; n * n];
        for i in 0..n {
            cov[i * n + i] = 1.0 / lambda;
        }
        Ok(Self {
            weights: c0,
            cov,
            lambda,
            count: 0,
            scratch: vec![0.0; n],
            support: Vec::with_capacity(n),
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn covariance(&self) -> &[f64] {
        &self.cov
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Number of measurements absorbed so far.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Absorbs one measurement `y` with regressor row `a`.
    pub fn update(&mut self, a: &[f64], y: f64) -> Result<()> {
        let n = self.weights.len();
        if a.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: a.len(),
            });
        }
        if !y.is_finite() {
            return Err(Error::NonFinite("measurement"));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("activation vector"));
        }

        // Activation rows are sparse (about half the hinges are inactive).
        self.support.clear();
        self.support.extend(
            a.iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, _)| i),
        );

        // pa = P a
        let pa = &mut self.scratch;
        for (i, out) in pa.iter_mut().enumerate() {
            let row = &self.cov[i * n..(i + 1) * n];
            *out = self.support.iter().map(|&k| row[k] * a[k]).sum();
        }
        let denom = 1.0 + self.support.iter().map(|&k| a[k] * pa[k]).sum::<f64>();
        let innovation = y - linalg::dot(a, &self.weights);

        for (c, p) in self.weights.iter_mut().zip(pa.iter()) {
            *c += p / denom * innovation;
        }

        // P <- P - (P a)(P a)^T / denom, computed on the upper triangle and
        // mirrored so P stays exactly symmetric.
        for i in 0..n {
            let scaled = pa[i] / denom;
            if scaled == 0.0 {
                continue;
            }
            for j in i..n {
                let v = self.cov[i * n + j] - scaled * pa[j];
                self.cov[i * n + j] = v;
                self.cov[j * n + i] = v;
            }
        }

        self.count += 1;
        Ok(())
    }
}

/// Direct solution of the regularized normal equations
/// `(A^T A + lambda I)(c - c0) = A^T (y - A c0)`.
///
/// `O(N D^2 + D^3)`: this is the reference the recursive update is checked
/// against, not something to call inside an optimization loop.
pub fn batch_solve(pairs: &[(Vec<f64>, f64)], c0: &[f64], lambda: f64) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    if pairs.is_empty() || c0.is_empty() {
        return Err(Error::Empty);
    }
    let n = c0.len();
    let mut gram = vec![0.0; n * n];
    let mut rhs = vec![0.0; n];
    for (a, y) in pairs {
        if a.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: a.len(),
            });
        }
        let residual = y - linalg::dot(a, c0);
        for i in 0..n {
            if a[i] == 0.0 {
                continue;
            }
            rhs[i] += a[i] * residual;
            for j in 0..n {
                gram[i * n + j] += a[i] * a[j];
            }
        }
    }
    for i in 0..n {
        gram[i * n + i] += lambda;
    }
    let l = linalg::cholesky(&gram, n)?;
    let delta = linalg::cholesky_solve(&l, n, &rhs);
    Ok(c0.iter().zip(delta).map(|(c, d)| c + d).collect())
}
