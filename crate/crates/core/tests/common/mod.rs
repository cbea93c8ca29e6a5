#![allow(dead_code)]

use idone_core::{Bounds, ModelVariant, RlsState, SurrogateModel};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Random box with `dim` coordinates, each lower bound in `-3..=3` and width
/// in `1..=max_width`.
pub fn random_bounds<R: Rng>(rng: &mut R, dim: usize, max_width: i64) -> Bounds {
    let lower: Vec<i64> = (0..dim).map(|_| rng.gen_range(-3..=3)).collect();
    let upper = lower
        .iter()
        .map(|&l| l + rng.gen_range(1..=max_width))
        .collect();
    Bounds::new(lower, upper).unwrap()
}

pub fn random_lattice_point<R: Rng>(rng: &mut R, bounds: &Bounds) -> Vec<i64> {
    bounds
        .lower()
        .iter()
        .zip(bounds.upper())
        .map(|(&l, &u)| rng.gen_range(l..=u))
        .collect()
}

pub fn random_real_point<R: Rng>(rng: &mut R, bounds: &Bounds) -> Vec<f64> {
    bounds
        .lower()
        .iter()
        .zip(bounds.upper())
        .map(|(&l, &u)| rng.gen_range(l as f64..=u as f64))
        .collect()
}

pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Model with standard normal weights, then one RLS update on a random
/// lattice point so the landscape is generic.
pub fn random_fitted_model<R: Rng>(
    rng: &mut R,
    variant: ModelVariant,
    bounds: Bounds,
) -> SurrogateModel {
    let mut model = SurrogateModel::new(variant, bounds);
    let c0: Vec<f64> = (0..model.len()).map(|_| standard_normal(rng)).collect();
    let mut rls = RlsState::new(c0, 0.001).unwrap();
    let x = random_lattice_point(rng, model.bounds());
    let a = model.activations_at(&x).unwrap();
    rls.update(&a, 10.0 * standard_normal(rng)).unwrap();
    model.set_weights(rls.weights()).unwrap();
    model
}

/// Every lattice point of a small box, in lexicographic order.
pub fn lattice(bounds: &Bounds) -> Vec<Vec<i64>> {
    let mut out = vec![bounds.lower().to_vec()];
    for i in 0..bounds.dim() {
        let mut next = Vec::new();
        for p in &out {
            for v in bounds.lower()[i]..=bounds.upper()[i] {
                let mut q = p.clone();
                q[i] = v;
                next.push(q);
            }
        }
        out = next;
    }
    out
}

pub fn as_real(x: &[i64]) -> Vec<f64> {
    x.iter().map(|&v| v as f64).collect()
}
