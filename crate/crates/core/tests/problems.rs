mod common;

use common::*;
use idone_core::problems::{
    convex_binary_objective, decode_route, four_city_matrix, generate_convex_binary,
    noisy_tsp_objective, route_bounds, ConvexBinaryProblem, DistanceMatrix, QuadraticInstance,
    TspProblem,
};
use idone_core::Problem;
use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, RngCore, SeedableRng};

fn is_permutation(tour: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    tour.len() == n
        && tour
            .iter()
            .all(|&c| c < n && !std::mem::replace(&mut seen[c], true))
}

/// Path sum written independently of the library: pick the `x_p`-th unvisited
/// city (1-based, ascending order) at each step.
fn oracle_length(weights: &[f64], n: usize, x: &[i64]) -> f64 {
    let mut visited = vec![false; n];
    visited[0] = true;
    let mut current = 0;
    let mut total = 0.0;
    for &pick in x {
        let next = (1..n)
            .filter(|&c| !visited[c])
            .nth(pick as usize - 1)
            .unwrap();
        visited[next] = true;
        total += weights[current * n + next];
        current = next;
    }
    let last = (1..n).find(|&c| !visited[c]).unwrap();
    total += weights[current * n + last];
    total + weights[last * n]
}

#[test]
fn four_city_tour_lengths() {
    let matrix = four_city_matrix();
    let bounds = route_bounds(4).unwrap();
    assert_eq!(bounds.lower(), &[1, 1]);
    assert_eq!(bounds.upper(), &[3, 2]);
    let mut lengths: Vec<(Vec<i64>, f64)> = lattice(&bounds)
        .into_iter()
        .map(|x| {
            let tour = decode_route(&x, 4).unwrap();
            assert!(is_permutation(&tour, 4));
            let len = matrix.tour_length(&tour);
            (x, len)
        })
        .collect();
    lengths.sort_by(|a, b| a.1.total_cmp(&b.1));
    let values: Vec<f64> = lengths.iter().map(|p| p.1).collect();
    assert_eq!(values, vec![80.0, 80.0, 95.0, 95.0, 95.0, 95.0]);
    let best: Vec<&[i64]> = lengths[..2].iter().map(|p| p.0.as_slice()).collect();
    assert!(best.contains(&&[1, 2][..]) && best.contains(&&[2, 2][..]));
}

#[test]
fn decode_is_always_a_tour() {
    let mut r = rng(40);
    let bounds = route_bounds(17).unwrap();
    assert_eq!(bounds.dim(), 15);
    for _ in 0..10_000 {
        let x = random_lattice_point(&mut r, &bounds);
        let tour = decode_route(&x, 17).unwrap();
        assert_eq!(tour[0], 0);
        assert!(is_permutation(&tour, 17));
    }
    assert!(decode_route(&[0, 1], 4).is_err());
    assert!(decode_route(&[1, 3], 4).is_err());
    assert!(decode_route(&[1], 4).is_err());
}

#[test]
fn noiseless_objective_matches_oracle() {
    let mut r = rng(41);
    let n = 12;
    let weights: Vec<f64> = (0..n * n)
        .map(|k| {
            if k % (n + 1) == 0 {
                0.0
            } else {
                f64::from(r.gen_range(1..100))
            }
        })
        .collect();
    let matrix = DistanceMatrix::with_threshold(n, weights.clone(), 9e6).unwrap();
    let bounds = route_bounds(n).unwrap();
    let mut noise = StdRng::seed_from_u64(0);
    for _ in 0..1000 {
        let x = random_lattice_point(&mut r, &bounds);
        let a = noisy_tsp_objective(&matrix, &x, &mut noise, 100, 0.0).unwrap();
        let b = noisy_tsp_objective(&matrix, &x, &mut noise, 100, 0.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, oracle_length(&weights, n, &x));
    }
}

#[test]
fn forbidden_edges_are_penalized() {
    let mut weights = vec![1.0; 16];
    weights[1] = 1e7; // 0 -> 1
    let matrix = DistanceMatrix::with_threshold(4, weights, 9e6).unwrap();
    assert!(matrix.is_forbidden(0, 1));
    // x = (1, 1) decodes to 0 -> 1 -> 2 -> 3.
    assert_eq!(
        matrix.tour_length(&decode_route(&[1, 1], 4).unwrap()),
        1e6 + 3.0
    );
}

#[test]
fn worst_case_grows_with_replications() {
    let matrix = four_city_matrix();
    let mut r = rng(42);
    let bounds = route_bounds(4).unwrap();
    for seed in 0..200u64 {
        let x = random_lattice_point(&mut r, &bounds);
        let one =
            noisy_tsp_objective(&matrix, &x, &mut StdRng::seed_from_u64(seed), 1, 1.0).unwrap();
        let many =
            noisy_tsp_objective(&matrix, &x, &mut StdRng::seed_from_u64(seed), 100, 1.0).unwrap();
        let base = matrix.tour_length(&decode_route(&x, 4).unwrap());
        assert!(many >= one && one >= base && many < base + 4.0);
    }
}

#[test]
fn tsp_problem_counts_one_call() {
    struct Counting<'a>(&'a mut dyn RngCore, usize);
    impl RngCore for Counting<'_> {
        fn next_u32(&mut self) -> u32 {
            self.1 += 1;
            self.0.next_u32()
        }
        fn next_u64(&mut self) -> u64 {
            self.1 += 1;
            self.0.next_u64()
        }
        fn fill_bytes(&mut self, dest: &mut [u8]) {
            self.0.fill_bytes(dest)
        }
        fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
            self.0.try_fill_bytes(dest)
        }
    }
    let problem = TspProblem::new("tsp4", four_city_matrix(), 100, 1.0).unwrap();
    let mut inner = StdRng::seed_from_u64(1);
    let mut counting = Counting(&mut inner, 0);
    let y = problem.evaluate(&[1, 2], &mut counting).unwrap();
    // 4 noisy edges, 100 replays.
    assert_eq!(counting.1, 400);
    assert!((80.0..84.0).contains(&y));
}

#[test]
fn quadratic_minimum_is_unique() {
    let mut r = rng(43);
    for d in 1..=12 {
        let instance = generate_convex_binary(d, &mut r).unwrap();
        let bounds = idone_core::Bounds::uniform(d, 0, 1).unwrap();
        let mut zero = 0;
        for x in lattice(&bounds) {
            let v = instance.value(&x);
            if x == instance.optimum() {
                assert_eq!(v, 0.0);
                zero += 1;
            } else {
                assert!(v > 0.0, "d={d} x={x:?} v={v}");
            }
        }
        assert_eq!(zero, 1);
    }
}

#[test]
fn generated_matrices_are_positive_definite() {
    let mut r = rng(44);
    for k in 0..100 {
        let d = 5 + (k * 145) / 99;
        let instance = generate_convex_binary(d, &mut r).unwrap();
        let a = DMatrix::from_row_slice(d, d, instance.matrix());
        assert_eq!(a, a.transpose());
        let min_eig = a.symmetric_eigenvalues().min();
        assert!(min_eig > 0.0, "d={d}: min eigenvalue {min_eig}");
    }
}

#[test]
fn binary_objective_examples() {
    let instance = QuadraticInstance::new(vec![1.0, 0.0, 0.0, 1.0], vec![1, 0]).unwrap();
    assert_eq!(convex_binary_objective(&instance, &[0, 1], None), 2.0);
    assert_eq!(convex_binary_objective(&instance, &[1, 0], None), 0.0);
    let mut noise = StdRng::seed_from_u64(5);
    for _ in 0..100 {
        let y = convex_binary_objective(&instance, &[1, 0], Some(&mut noise));
        assert!((0.0..1.0).contains(&y));
    }
    let problem = ConvexBinaryProblem::new("bin", instance, true);
    assert_eq!(problem.bounds().upper(), &[1, 1]);

    assert!(QuadraticInstance::new(vec![1.0, 2.0, 2.0, 1.0], vec![0, 1]).is_err());
    assert!(QuadraticInstance::new(vec![1.0, 0.5, 0.0, 1.0], vec![0, 1]).is_err());
    assert!(QuadraticInstance::new(vec![1.0; 4], vec![0, 2]).is_err());
}
