//! Piecewise-linear surrogate `g(x) = sum_k c_k * max(0, w_k . x + b_k)`.
//!
//! The directions `w_k` and offsets `b_k` are fixed at construction so that
//! every zero-set `z_k(x) = 0` passes through integer points only. The basic
//! model uses the axis hyperplanes `x_i = j`; the advanced model adds the
//! diagonals `x_i - x_{i-1} = j` between neighbouring variables. Only the
//! weights `c_k` are learned.

use alloc::vec;
use alloc::vec::Vec;

use crate::bounds::Bounds;
use crate::error::{Error, Result};

/// Which basis to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelVariant {
    /// Axis-aligned hyperplanes only.
    Basic,
    /// Axis-aligned plus adjacent-pair diagonals.
    Advanced,
}

impl ModelVariant {
    pub fn name(self) -> &'static str {
        match self {
            ModelVariant::Basic => "basic",
            ModelVariant::Advanced => "advanced",
        }
    }
}

/// One ReLU term. The direction has at most two nonzero entries, each `+1` or
/// `-1`; it is stored sparsely as `(dimension, sign)` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisFunction {
    pub first: Option<(usize, i8)>,
    pub second: Option<(usize, i8)>,
    pub offset: i64,
}

impl BasisFunction {
    /// The constant term: `w = 0`, `b = 1`.
    pub const fn bias() -> Self {
        Self {
            first: None,
            second: None,
            offset: 1,
        }
    }

    /// `sign * x_dim + offset`.
    pub const fn axis(dim: usize, sign: i8, offset: i64) -> Self {
        Self {
            first: Some((dim, sign)),
            second: None,
            offset,
        }
    }

    /// `sign * (x_dim - x_{dim-1}) + offset`; `dim` must be at least 1.
    pub const fn diagonal(dim: usize, sign: i8, offset: i64) -> Self {
        Self {
            first: Some((dim, sign)),
            second: Some((dim - 1, -sign)),
            offset,
        }
    }

    pub fn is_bias(&self) -> bool {
        self.first.is_none() && self.second.is_none()
    }

    /// `z(x) = w . x + b`.
    #[inline]
    pub fn z(&self, x: &[f64]) -> f64 {
        let mut z = self.offset as f64;
        if let Some((i, s)) = self.first {
            z += f64::from(s) * x[i];
        }
        if let Some((i, s)) = self.second {
            z += f64::from(s) * x[i];
        }
        z
    }

    /// `w . d`, the rate of change of `z` along `d`.
    #[inline]
    pub fn rate(&self, d: &[f64]) -> f64 {
        let mut r = 0.0;
        if let Some((i, s)) = self.first {
            r += f64::from(s) * d[i];
        }
        if let Some((i, s)) = self.second {
            r += f64::from(s) * d[i];
        }
        r
    }

    /// Integer evaluation of `z` at a lattice point.
    #[inline]
    pub fn z_int(&self, x: &[i64]) -> i64 {
        let mut z = self.offset;
        if let Some((i, s)) = self.first {
            z += i64::from(s) * x[i];
        }
        if let Some((i, s)) = self.second {
            z += i64::from(s) * x[i];
        }
        z
    }

    /// Dense direction vector, mostly for tests and dumps.
    pub fn direction(&self, dim: usize) -> Vec<i64> {
        let mut w = vec![0; dim];
        for (i, s) in self.first.iter().chain(self.second.iter()) {
            w[*i] += i64::from(*s);
        }
        w
    }

    /// Euclidean norm of the direction: 0, 1 or sqrt(2).
    pub fn direction_norm(&self) -> f64 {
        match (self.first, self.second) {
            (None, None) => 0.0,
            (Some(_), None) | (None, Some(_)) => 1.0,
            (Some(_), Some(_)) => core::f64::consts::SQRT_2,
        }
    }
}

/// Emits the one or two functions for a single `j` of the bound/interior
/// branching shared by both basis algorithms. `make(sign, offset)` builds the
/// function for direction `sign * w`.
fn emit_branch(
    out: &mut Vec<BasisFunction>,
    j: i64,
    lo: i64,
    hi: i64,
    make: impl Fn(i8, i64) -> BasisFunction,
) {
    let b = -j;
    if j == lo {
        out.push(make(1, b));
    } else if j == hi {
        out.push(make(-1, -b));
    } else {
        out.push(make(1, b));
        out.push(make(-1, -b));
    }
}

/// Basis of the basic model: the bias, then for each dimension and each
/// integer level in its range the hinge(s) on `x_i = j`.
pub fn build_basic_basis(bounds: &Bounds) -> Vec<BasisFunction> {
    let mut out = Vec::with_capacity(basis_count(ModelVariant::Basic, bounds));
    out.push(BasisFunction::bias());
    for (i, (&l, &u)) in bounds.lower().iter().zip(bounds.upper()).enumerate() {
        for j in l..=u {
            emit_branch(&mut out, j, l, u, |s, b| BasisFunction::axis(i, s, b));
        }
    }
    out
}

/// Basis of the advanced model: the basic basis followed by hinges on the
/// diagonals `x_i - x_{i-1} = j` for every adjacent pair.
pub fn build_advanced_basis(bounds: &Bounds) -> Vec<BasisFunction> {
    let mut out = build_basic_basis(bounds);
    out.reserve(basis_count(ModelVariant::Advanced, bounds) - out.len());
    let (lower, upper) = (bounds.lower(), bounds.upper());
    for i in 1..bounds.dim() {
        let lo = lower[i] - upper[i - 1];
        let hi = upper[i] - lower[i - 1];
        for j in lo..=hi {
            emit_branch(&mut out, j, lo, hi, |s, b| BasisFunction::diagonal(i, s, b));
        }
    }
    out
}

pub fn build_basis(variant: ModelVariant, bounds: &Bounds) -> Vec<BasisFunction> {
    match variant {
        ModelVariant::Basic => build_basic_basis(bounds),
        ModelVariant::Advanced => build_advanced_basis(bounds),
    }
}

/// Closed-form number of basis functions.
pub fn basis_count(variant: ModelVariant, bounds: &Bounds) -> usize {
    let widths: Vec<i64> = bounds.widths().collect();
    let basic = 1 + 2 * widths.iter().sum::<i64>();
    let extra = match variant {
        ModelVariant::Basic => 0,
        ModelVariant::Advanced => 2 * widths.windows(2).map(|w| w[0] + w[1]).sum::<i64>(),
    };
    (basic + extra) as usize
}

/// Initial weights `[0, 1, ..., 1]`: zero on the bias, one on every hinge,
/// which makes the untrained model convex.
pub fn default_weights(count: usize) -> Vec<f64> {
    let mut c = vec![1.0; count];
    if let Some(first) = c.first_mut() {
        *first = 0.0;
    }
    c
}

/// ReLU derivative with the value 0.5 at the kink.
#[inline]
fn relu_slope(z: f64) -> f64 {
    if z > 0.0 {
        1.0
    } else if z < 0.0 {
        0.0
    } else {
        0.5
    }
}

#[derive(Debug, Clone)]
pub struct SurrogateModel {
    variant: ModelVariant,
    bounds: Bounds,
    basis: Vec<BasisFunction>,
    weights: Vec<f64>,
}

impl SurrogateModel {
    /// Builds the basis for `variant` and starts from the default weights.
    pub fn new(variant: ModelVariant, bounds: Bounds) -> Self {
        let basis = build_basis(variant, &bounds);
        let weights = default_weights(basis.len());
        Self {
            variant,
            bounds,
            basis,
            weights,
        }
    }

    pub fn variant(&self) -> ModelVariant {
        self.variant
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    pub fn basis(&self) -> &[BasisFunction] {
        &self.basis
    }

    /// Number of basis functions `D`.
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn set_weights(&mut self, weights: &[f64]) -> Result<()> {
        if weights.len() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                actual: weights.len(),
            });
        }
        self.weights.copy_from_slice(weights);
        Ok(())
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.bounds.check_dim(x.len())?;
        Ok(self.evaluate_unchecked(x))
    }

    pub(crate) fn evaluate_unchecked(&self, x: &[f64]) -> f64 {
        self.basis
            .iter()
            .zip(&self.weights)
            .map(|(f, c)| c * f.z(x).max(0.0))
            .sum()
    }

    /// Gradient with ReLU slope 0.5 wherever some `z_k` is exactly zero.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.bounds.check_dim(x.len())?;
        let mut grad = vec![0.0; self.dim()];
        self.gradient_into(x, &mut grad);
        Ok(grad)
    }

    pub(crate) fn gradient_into(&self, x: &[f64], grad: &mut [f64]) {
        grad.iter_mut().for_each(|g| *g = 0.0);
        for (f, &c) in self.basis.iter().zip(&self.weights) {
            let slope = c * relu_slope(f.z(x));
            if slope == 0.0 {
                continue;
            }
            if let Some((i, s)) = f.first {
                grad[i] += slope * f64::from(s);
            }
            if let Some((i, s)) = f.second {
                grad[i] += slope * f64::from(s);
            }
        }
    }

    /// Activation vector `a_k = max(0, z_k(x))`, the regressor row for fitting.
    pub fn activations(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.bounds.check_dim(x.len())?;
        Ok(self.basis.iter().map(|f| f.z(x).max(0.0)).collect())
    }

    /// Activations at a lattice point, computed in integer arithmetic.
    pub fn activations_at(&self, x: &[i64]) -> Result<Vec<f64>> {
        self.bounds.check_dim(x.len())?;
        Ok(self
            .basis
            .iter()
            .map(|f| f.z_int(x).max(0) as f64)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bounds(l: &[i64], u: &[i64]) -> Bounds {
        Bounds::new(l.to_vec(), u.to_vec()).unwrap()
    }

    #[test]
    fn basic_single_unit_interval() {
        let b = build_basic_basis(&bounds(&[0], &[1]));
        assert_eq!(
            b,
            vec![
                BasisFunction::bias(),
                BasisFunction::axis(0, 1, 0),
                BasisFunction::axis(0, -1, 1),
            ]
        );
    }

    #[test]
    fn figure_box_counts() {
        let bx = bounds(&[0, 0], &[5, 3]);
        assert_eq!(build_basic_basis(&bx).len(), 17);
        assert_eq!(build_advanced_basis(&bx).len(), 33);
        assert_eq!(basis_count(ModelVariant::Advanced, &bx), 33);
    }

    #[test]
    fn advanced_equals_basic_in_one_dimension() {
        let bx = bounds(&[0], &[5]);
        assert_eq!(build_advanced_basis(&bx), build_basic_basis(&bx));
    }

    #[test]
    fn advanced_unit_cube() {
        let bx = bounds(&[0, 0, 0], &[1, 1, 1]);
        assert_eq!(build_basic_basis(&bx).len(), 7);
        assert_eq!(build_advanced_basis(&bx).len(), 15);
    }

    #[test]
    fn advanced_diagonals_cover_difference_range() {
        let bx = bounds(&[0, 0], &[5, 3]);
        let adv = build_advanced_basis(&bx);
        // x_2 - x_1 ranges over [-5, 3]; each level appears as a zero-set.
        for j in -5..=3i64 {
            assert!(adv[17..]
                .iter()
                .any(|f| f.z_int(&[0, j]) == 0 || f.z_int(&[-j, 0]) == 0));
        }
        assert!(adv[17..].iter().all(|f| f.second.is_some()));
    }

    fn three_level_model() -> SurrogateModel {
        SurrogateModel::new(ModelVariant::Basic, bounds(&[0], &[2]))
    }

    #[test]
    fn evaluate_default_weights() {
        let m = three_level_model();
        assert_eq!(m.weights(), &[0.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(m.evaluate(&[0.0]).unwrap(), 3.0);
        assert_eq!(m.evaluate(&[1.0]).unwrap(), 2.0);
        assert_eq!(m.evaluate(&[2.0]).unwrap(), 3.0);
    }

    #[test]
    fn zero_and_bias_weights() {
        let mut m = three_level_model();
        m.set_weights(&[0.0; 5]).unwrap();
        assert_eq!(m.evaluate(&[1.3]).unwrap(), 0.0);
        assert_eq!(m.gradient(&[1.3]).unwrap(), vec![0.0]);
        m.set_weights(&[5.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(m.evaluate(&[0.7]).unwrap(), 5.0);
    }

    #[test]
    fn gradient_hand_values() {
        let m = three_level_model();
        assert_eq!(m.gradient(&[0.5]).unwrap(), vec![-1.0]);
        assert_eq!(m.gradient(&[1.5]).unwrap(), vec![1.0]);
        // At the kink x = 1 the two hinges at level 1 each contribute half.
        assert_eq!(m.gradient(&[1.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let m = three_level_model();
        assert!(matches!(
            m.evaluate(&[0.0, 1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(m.gradient(&[]).is_err());
        assert!(m.activations_at(&[1, 1]).is_err());
    }
}
