//! Robust-route asymmetric TSP with a position-based integer encoding.
//!
//! City 0 is the fixed start. Variable `x_p` (1-based value) picks which of the
//! still-unvisited cities, in index order, comes next; the last city is forced.
//! An `n`-city tour therefore needs `n - 2` variables with `x_p` in
//! `[1, n - 1 - p]` for zero-based position `p`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, RngCore};

use super::Problem;
use crate::bounds::Bounds;
use crate::error::{Error, Result};

/// Cost charged for an edge marked forbidden instead of its (infinite) weight.
pub const FORBIDDEN_PENALTY: f64 = 1e6;

/// Entries at or above this value are treated as infinite by default.
pub const DEFAULT_INFINITY_THRESHOLD: f64 = 9e6;

pub const DEFAULT_REPLICATIONS: usize = 100;

pub const DEFAULT_NOISE_HIGH: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    weights: Vec<f64>,
    forbidden: Vec<bool>,
}

impl DistanceMatrix {
    /// Row-major `n x n` weights with an explicit forbidden mask.
    pub fn with_forbidden(n: usize, weights: Vec<f64>, forbidden: Vec<bool>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        for len in [weights.len(), forbidden.len()] {
            if len != n * n {
                return Err(Error::DimensionMismatch {
                    expected: n * n,
                    actual: len,
                });
            }
        }
        if weights.iter().any(|w| w.is_nan()) {
            return Err(Error::NonFinite("distance matrix"));
        }
        Ok(Self {
            n,
            weights,
            forbidden,
        })
    }

    /// Marks every entry `>= threshold` as forbidden.
    pub fn with_threshold(n: usize, weights: Vec<f64>, threshold: f64) -> Result<Self> {
        let forbidden = weights.iter().map(|&w| w >= threshold).collect();
        Self::with_forbidden(n, weights, forbidden)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, from: usize, to: usize) -> f64 {
        self.weights[from * self.n + to]
    }

    pub fn is_forbidden(&self, from: usize, to: usize) -> bool {
        self.forbidden[from * self.n + to]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight used in tour lengths: the entry, or the fixed penalty when the
    /// edge is forbidden.
    pub fn edge_cost(&self, from: usize, to: usize) -> f64 {
        if self.is_forbidden(from, to) {
            FORBIDDEN_PENALTY
        } else {
            self.weight(from, to)
        }
    }

    /// Noise is only added to finite, nonzero edges.
    fn is_noisy(&self, from: usize, to: usize) -> bool {
        !self.is_forbidden(from, to) && self.weight(from, to) != 0.0
    }

    /// Length of the closed tour visiting `tour` in order and returning to
    /// its first city.
    pub fn tour_length(&self, tour: &[usize]) -> f64 {
        closed_edges(tour).map(|(a, b)| self.edge_cost(a, b)).sum()
    }
}

fn closed_edges(tour: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    let n = tour.len();
    (0..n).map(move |i| (tour[i], tour[(i + 1) % n]))
}

/// The 4-city symmetric example instance (distances 10, 15, 20, 35, 25, 30);
/// the diagonal is forbidden.
pub fn four_city_matrix() -> DistanceMatrix {
    #[rustfmt::skip]
    let weights = alloc::vec![
        0.0, 10.0, 15.0, 20.0,
        10.0, 0.0, 35.0, 25.0,
        15.0, 35.0, 0.0, 30.0,
        20.0, 25.0, 30.0, 0.0,
    ];
    let forbidden = (0..16).map(|k| k % 5 == 0).collect();
    DistanceMatrix::with_forbidden(4, weights, forbidden).expect("static matrix")
}

/// Box of the route encoding for `n` cities: `l = 1`, `u_p = n - 1 - p`.
pub fn route_bounds(n: usize) -> Result<Bounds> {
    if n < 3 {
        return Err(Error::InvalidConfig(alloc::format!(
            "route encoding needs at least 3 cities, got {n}"
        )));
    }
    let d = n - 2;
    let upper = (0..d).map(|p| (n - 1 - p) as i64).collect();
    Bounds::new(alloc::vec![1; d], upper)
}

/// Decodes the selection indices into a tour (zero-based cities, starting at
/// city 0, return edge implicit).
pub fn decode_route(x: &[i64], n: usize) -> Result<Vec<usize>> {
    if n < 3 || x.len() != n - 2 {
        return Err(Error::DimensionMismatch {
            expected: n.saturating_sub(2),
            actual: x.len(),
        });
    }
    let mut remaining: Vec<usize> = (1..n).collect();
    let mut tour = Vec::with_capacity(n);
    tour.push(0);
    for (position, &pick) in x.iter().enumerate() {
        let max = remaining.len() as i64;
        if pick < 1 || pick > max {
            return Err(Error::RouteIndex {
                position,
                value: pick,
                max,
            });
        }
        tour.push(remaining.remove((pick - 1) as usize));
    }
    tour.extend(remaining);
    Ok(tour)
}

/// Worst tour length over `replications` noisy replays of the decoded route.
/// Each replay adds a fresh `Uniform[0, noise_high)` draw to every finite,
/// nonzero edge on the tour.
pub fn noisy_tsp_objective(
    matrix: &DistanceMatrix,
    x: &[i64],
    noise: &mut dyn RngCore,
    replications: usize,
    noise_high: f64,
) -> Result<f64> {
    let tour = decode_route(x, matrix.n())?;
    let base = matrix.tour_length(&tour);
    if noise_high == 0.0 || replications == 0 {
        return Ok(base);
    }
    let noisy_edges = closed_edges(&tour)
        .filter(|&(a, b)| matrix.is_noisy(a, b))
        .count();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..replications {
        let perturbation: f64 = (0..noisy_edges)
            .map(|_| noise.gen::<f64>() * noise_high)
            .sum();
        worst = worst.max(base + perturbation);
    }
    Ok(worst)
}

#[derive(Debug, Clone)]
pub struct TspProblem {
    id: String,
    matrix: DistanceMatrix,
    bounds: Bounds,
    replications: usize,
    noise_high: f64,
}

impl TspProblem {
    pub fn new(
        id: impl Into<String>,
        matrix: DistanceMatrix,
        replications: usize,
        noise_high: f64,
    ) -> Result<Self> {
        if !(noise_high >= 0.0) || !noise_high.is_finite() {
            return Err(Error::InvalidConfig(alloc::format!(
                "noise upper bound must be finite and non-negative, got {noise_high}"
            )));
        }
        let bounds = route_bounds(matrix.n())?;
        Ok(Self {
            id: id.into(),
            matrix,
            bounds,
            replications,
            noise_high,
        })
    }

    pub fn matrix(&self) -> &DistanceMatrix {
        &self.matrix
    }

    pub fn replications(&self) -> usize {
        self.replications
    }

    pub fn noise_high(&self) -> f64 {
        self.noise_high
    }

    /// Number of distinct tours, `(n - 1)!`.
    pub fn lattice_size(&self) -> f64 {
        self.bounds.lattice_size()
    }
}

impl Problem for TspProblem {
    fn id(&self) -> &str {
        &self.id
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &[i64], noise: &mut dyn RngCore) -> Result<f64> {
        noisy_tsp_objective(&self.matrix, x, noise, self.replications, self.noise_high)
    }
}

/// The 17-city robust-route benchmark: 15 variables, 100 replays, unit noise.
pub fn make_br17_problem(matrix: DistanceMatrix) -> Result<TspProblem> {
    if matrix.n() != 17 {
        return Err(Error::DimensionMismatch {
            expected: 17,
            actual: matrix.n(),
        });
    }
    TspProblem::new(
        "br17".to_string(),
        matrix,
        DEFAULT_REPLICATIONS,
        DEFAULT_NOISE_HIGH,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream, Stream};
    use alloc::vec;

    fn one_based(tour: &[usize]) -> Vec<usize> {
        tour.iter().map(|c| c + 1).collect()
    }

    #[test]
    fn decode_four_city_examples() {
        assert_eq!(
            one_based(&decode_route(&[1, 2], 4).unwrap()),
            vec![1, 2, 4, 3]
        );
        assert_eq!(
            one_based(&decode_route(&[2, 2], 4).unwrap()),
            vec![1, 3, 4, 2]
        );
        assert_eq!(
            one_based(&decode_route(&[1, 1], 4).unwrap()),
            vec![1, 2, 3, 4]
        );
        let m = four_city_matrix();
        assert_eq!(m.tour_length(&decode_route(&[1, 1], 4).unwrap()), 95.0);
    }

    #[test]
    fn decode_rejects_out_of_range() {
        assert_eq!(
            decode_route(&[1, 3], 4),
            Err(Error::RouteIndex {
                position: 1,
                value: 3,
                max: 2
            })
        );
        assert!(decode_route(&[0, 1], 4).is_err());
        assert!(decode_route(&[1], 4).is_err());
    }

    #[test]
    fn noiseless_four_city_lengths() {
        let m = four_city_matrix();
        let mut rng = substream(0, Stream::Noise);
        let len =
            |x: &[i64], rng: &mut dyn RngCore| noisy_tsp_objective(&m, x, rng, 100, 0.0).unwrap();
        assert_eq!(len(&[1, 2], &mut rng), 80.0);
        assert_eq!(len(&[2, 2], &mut rng), 80.0);
        assert_eq!(len(&[2, 1], &mut rng), 95.0);
    }

    #[test]
    fn noisy_value_is_bracketed() {
        let m = four_city_matrix();
        let mut rng = substream(3, Stream::Noise);
        for _ in 0..50 {
            let v = noisy_tsp_objective(&m, &[3, 1], &mut rng, 100, 1.0).unwrap();
            assert!((95.0..=99.0).contains(&v), "{v}");
        }
    }

    #[test]
    fn forbidden_edges_cost_the_penalty() {
        let m = DistanceMatrix::with_threshold(
            3,
            vec![0.0, 1.0, 1e7, 2.0, 0.0, 3.0, 4.0, 5.0, 0.0],
            9e6,
        )
        .unwrap();
        assert!(m.is_forbidden(0, 2));
        // 0 -> 2 -> 1 -> 0
        assert_eq!(m.tour_length(&[0, 2, 1]), FORBIDDEN_PENALTY + 5.0 + 2.0);
    }

    #[test]
    fn route_bounds_shape() {
        let b = route_bounds(17).unwrap();
        assert_eq!(b.dim(), 15);
        assert_eq!(b.upper(), &(2..=16).rev().collect::<Vec<i64>>()[..]);
        assert!(route_bounds(2).is_err());
    }

    #[test]
    fn br17_requires_seventeen_cities() {
        assert!(make_br17_problem(four_city_matrix()).is_err());
    }
}
