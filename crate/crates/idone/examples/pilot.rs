//! Pilot data behind the acceptance thresholds. Writes a plain-text report to
//! stdout; the checked-in copy lives in `data/pilot.txt`.
//!
//!     cargo run --release -p idone --example pilot > crates/idone/data/pilot.txt

use std::path::Path;

use idone::tsplib::read_tsplib;
use idone_core::problems::{decode_route, four_city_matrix, route_bounds, TspProblem};
use idone_core::rng::{substream, Stream};
use idone_core::solver::initial_point;
use idone_core::{run_idone, ModelVariant, NullClock, Problem, SolverConfig};

fn main() {
    let matrix = four_city_matrix();
    let bounds = route_bounds(4).unwrap();
    println!("# 4-city route, exhaustive");
    for x0 in bounds.lower()[0]..=bounds.upper()[0] {
        for x1 in bounds.lower()[1]..=bounds.upper()[1] {
            let tour = decode_route(&[x0, x1], 4).unwrap();
            println!(
                "x = ({x0}, {x1})  tour {tour:?}  length {}",
                matrix.tour_length(&tour)
            );
        }
    }

    println!();
    println!("# 4-city route, IDONE-advanced, 20 seeds: runs reaching 80 by budget");
    let problem = TspProblem::new("tsp4", matrix, 1, 0.0).unwrap();
    for budget in [5, 10, 20, 50] {
        let mut hits = 0;
        let mut first_hit = Vec::new();
        for seed in 0..20 {
            let config = SolverConfig::new(ModelVariant::Advanced, budget, seed);
            let trace = run_idone(&problem, &config, &NullClock).unwrap();
            if let Some(r) = trace.records.iter().find(|r| r.y == 80.0) {
                hits += 1;
                first_hit.push(r.iter);
            }
        }
        first_hit.sort_unstable();
        println!("budget {budget:>3}: {hits}/20  first hit iterations {first_hit:?}");
    }

    println!();
    println!("# BR17, 10000 uniform random routes");
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/br17.atsp");
    let m = read_tsplib(&path).unwrap().matrix;
    let n = m.n();
    let bounds = route_bounds(n).unwrap();
    let mut forbidden_routes = 0;
    let mut zero_edges = 0usize;
    let mut lengths = Vec::new();
    for seed in 0..10_000u64 {
        let x = initial_point(&bounds, seed);
        let tour = decode_route(&x, n).unwrap();
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (tour[i], tour[(i + 1) % n])).collect();
        if edges.iter().any(|&(a, b)| m.is_forbidden(a, b)) {
            forbidden_routes += 1;
        }
        zero_edges += edges
            .iter()
            .filter(|&&(a, b)| m.weight(a, b) == 0.0)
            .count();
        lengths.push(m.tour_length(&tour));
    }
    lengths.sort_by(f64::total_cmp);
    println!("routes using a forbidden edge: {forbidden_routes}");
    println!(
        "mean zero-weight edges per route: {:.3}",
        zero_edges as f64 / 10_000.0
    );
    println!(
        "noiseless length min {} median {} max {}",
        lengths[0],
        lengths[lengths.len() / 2],
        lengths[lengths.len() - 1]
    );
    let off_diagonal: Vec<f64> = (0..n * n)
        .filter(|k| k / n != k % n)
        .map(|k| m.weight(k / n, k % n))
        .collect();
    let nonzero: Vec<f64> = off_diagonal.iter().copied().filter(|&w| w != 0.0).collect();
    println!(
        "off-diagonal entries: {} zero, mean of the rest {:.4}",
        off_diagonal.len() - nonzero.len(),
        nonzero.iter().sum::<f64>() / nonzero.len() as f64
    );

    println!();
    println!("# BR17 noisy objective at one route, 100 replays vs noiseless");
    let problem = TspProblem::new("br17", m, 100, 1.0).unwrap();
    let x = initial_point(problem.bounds(), 0);
    let mut noise = substream(0, Stream::Noise);
    let base = problem.matrix().tour_length(&decode_route(&x, n).unwrap());
    let ys: Vec<f64> = (0..5)
        .map(|_| problem.evaluate(&x, &mut noise).unwrap())
        .collect();
    println!("noiseless {base}  worst-case draws {ys:?}");
}
