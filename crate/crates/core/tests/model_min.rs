mod common;

use common::*;
use idone_core::problems::{decode_route, four_city_matrix, route_bounds};
use idone_core::surrogate::default_weights;
use idone_core::{
    minimize_model, round_feasible, Bounds, MinimizeOptions, ModelVariant, RlsState,
    SurrogateModel, Termination,
};
use rand::Rng;

const VARIANTS: [ModelVariant; 2] = [ModelVariant::Basic, ModelVariant::Advanced];

#[test]
fn rounding_keeps_model_value_at_converged_points() {
    let mut r = rng(30);
    let opts = MinimizeOptions::default();
    let mut converged = 0;
    for case in 0..100 {
        let d = r.gen_range(1..=5);
        let bounds = random_bounds(&mut r, d, 4);
        let model = random_fitted_model(&mut r, VARIANTS[case % 2], bounds);
        let start = random_real_point(&mut r, model.bounds());
        let res = minimize_model(&model, &start, &opts).unwrap();
        assert!(model.bounds().contains(&res.x_star));
        assert_eq!(res.converged, res.termination == Termination::Stationary);
        if res.converged {
            converged += 1;
            let g_round = model.evaluate(&as_real(&res.x_star)).unwrap();
            assert_eq!(g_round, res.g_rounded);
            assert!(
                g_round <= res.g_relaxed + 1e-6,
                "case {case}: g(round) {g_round} > g(x) {} at {:?}",
                res.g_relaxed,
                res.x_relaxed
            );
        }
    }
    assert!(converged >= 90, "only {converged} of 100 converged");
}

#[test]
fn descent_from_start() {
    let mut r = rng(31);
    for case in 0..300 {
        let d = r.gen_range(1..=8);
        let bounds = random_bounds(&mut r, d, 5);
        let model = random_fitted_model(&mut r, VARIANTS[case % 2], bounds);
        let start = if case % 3 == 0 {
            as_real(&random_lattice_point(&mut r, model.bounds()))
        } else {
            random_real_point(&mut r, model.bounds())
        };
        let g_start = model.evaluate(&start).unwrap();
        let res = minimize_model(&model, &start, &MinimizeOptions::default()).unwrap();
        assert!(
            res.g_relaxed <= g_start + 1e-9,
            "{} > {g_start}",
            res.g_relaxed
        );
        assert!(model.bounds().contains_real(&res.x_relaxed));
        assert!(res.iterations <= 20 * d);
    }
}

#[test]
fn never_below_lattice_minimum() {
    let mut r = rng(32);
    let mut gaps = Vec::new();
    let mut cases = 0;
    while cases < 50 {
        let d = r.gen_range(1..=5);
        let bounds = random_bounds(&mut r, d, 4);
        if bounds.lattice_size() > 4096.0 {
            continue;
        }
        let model = random_fitted_model(&mut r, ModelVariant::Advanced, bounds);
        let global = lattice(model.bounds())
            .iter()
            .map(|x| model.evaluate(&as_real(x)).unwrap())
            .fold(f64::INFINITY, f64::min);
        let start = random_real_point(&mut r, model.bounds());
        let res = minimize_model(&model, &start, &MinimizeOptions::default()).unwrap();
        assert!(res.g_rounded >= global - 1e-9);
        gaps.push(res.g_rounded - global);
        cases += 1;
    }
    let hits = gaps.iter().filter(|g| **g <= 1e-9).count();
    println!(
        "global lattice minimum found in {hits}/50, max gap {:.3}",
        gaps.iter().cloned().fold(0.0, f64::max)
    );
}

#[test]
fn convex_models_reach_lattice_minimum() {
    // With non-negative hinge weights the model is convex, so a stationary
    // point is global and, by the rounding property, lies on the lattice.
    let mut r = rng(33);
    for case in 0..50 {
        let d = r.gen_range(1..=4);
        let bounds = random_bounds(&mut r, d, 4);
        let mut model = SurrogateModel::new(VARIANTS[case % 2], bounds);
        let mut c: Vec<f64> = (0..model.len()).map(|_| r.gen_range(0.0..2.0)).collect();
        c[0] = 0.0;
        model.set_weights(&c).unwrap();
        let global = lattice(model.bounds())
            .iter()
            .map(|x| model.evaluate(&as_real(x)).unwrap())
            .fold(f64::INFINITY, f64::min);
        let start = random_real_point(&mut r, model.bounds());
        let res = minimize_model(&model, &start, &MinimizeOptions::default()).unwrap();
        assert!(res.converged);
        assert!(
            (res.g_rounded - global).abs() <= 1e-9,
            "case {case}: {} vs {global}",
            res.g_rounded
        );
    }
}

#[test]
fn deterministic() {
    let mut r = rng(34);
    for case in 0..20 {
        let bounds = random_bounds(&mut r, 5, 4);
        let model = random_fitted_model(&mut r, VARIANTS[case % 2], bounds);
        let start = random_real_point(&mut r, model.bounds());
        let a = minimize_model(&model, &start, &MinimizeOptions::default()).unwrap();
        let b = minimize_model(&model.clone(), &start, &MinimizeOptions::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.g_relaxed.to_bits(), b.g_relaxed.to_bits());
    }
}

#[test]
fn four_city_fit_then_minimize() {
    let matrix = four_city_matrix();
    let bounds = route_bounds(4).unwrap();
    let mut model = SurrogateModel::new(ModelVariant::Advanced, bounds.clone());
    let mut rls = RlsState::new(default_weights(model.len()), 0.001).unwrap();
    for x in lattice(&bounds) {
        let y = matrix.tour_length(&decode_route(&x, 4).unwrap());
        rls.update(&model.activations_at(&x).unwrap(), y).unwrap();
    }
    model.set_weights(rls.weights()).unwrap();
    let res = minimize_model(&model, &[2.0, 1.0], &MinimizeOptions::default()).unwrap();
    assert!(
        res.x_star == [1, 2] || res.x_star == [2, 2],
        "x* = {:?}",
        res.x_star
    );
    assert!((res.g_rounded - 80.0).abs() < 0.5, "g = {}", res.g_rounded);
}

#[test]
fn round_feasible_examples() {
    let b = Bounds::new(vec![0, 0], vec![5, 3]).unwrap();
    assert_eq!(round_feasible(&[1.4, 2.5], &b), vec![1, 3]);
    assert_eq!(round_feasible(&[-0.2, 3.7], &b), vec![0, 3]);
    assert_eq!(round_feasible(&[4.0, 1.0], &b), vec![4, 1]);
}
