use std::fs;
use std::path::{Path, PathBuf};

use idone::instance::{read_instance, write_instance};
use idone::trace::{parse_trace_file_name, read_trace, trace_file_name, write_trace};
use idone::tsplib::read_tsplib;
use idone_core::problems::ConvexBinaryProblem;
use idone_core::problems::{generate_convex_binary, route_bounds};
use idone_core::rng::{substream, Stream};
use idone_core::{run_idone, run_random_search, ModelVariant, NullClock, SolverConfig};
use sha2::{Digest, Sha256};

const BR17_SHA256: &str = "cb32c66d454b56446a70dd9875172f678d019e44ff876468a29e47e0ddbab024";

fn br17_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/br17.atsp")
}

#[test]
fn br17_file_is_unchanged() {
    let bytes = fs::read(br17_path()).unwrap();
    assert_eq!(hex::encode(Sha256::digest(&bytes)), BR17_SHA256);
}

/// Shortest closed tour by dynamic programming over subsets.
fn held_karp(n: usize, w: impl Fn(usize, usize) -> f64) -> f64 {
    let full = 1usize << (n - 1);
    let mut cost = vec![f64::INFINITY; full * (n - 1)];
    for j in 0..n - 1 {
        cost[(1 << j) * (n - 1) + j] = w(0, j + 1);
    }
    for set in 1..full {
        for last in 0..n - 1 {
            let here = cost[set * (n - 1) + last];
            if set & (1 << last) == 0 || !here.is_finite() {
                continue;
            }
            for next in 0..n - 1 {
                if set & (1 << next) != 0 {
                    continue;
                }
                let to = set | (1 << next);
                let c = here + w(last + 1, next + 1);
                if c < cost[to * (n - 1) + next] {
                    cost[to * (n - 1) + next] = c;
                }
            }
        }
    }
    (0..n - 1)
        .map(|j| cost[(full - 1) * (n - 1) + j] + w(j + 1, 0))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn br17_parses_with_known_optimum() {
    let inst = read_tsplib(&br17_path()).unwrap();
    assert_eq!(inst.name, "br17");
    let m = inst.matrix;
    assert_eq!(m.n(), 17);
    assert_eq!(route_bounds(17).unwrap().dim(), 15);
    assert_eq!(m.weight(0, 1), 3.0);
    assert_eq!(m.weight(3, 2), 74.0);
    assert_eq!(m.weight(16, 15), 8.0);
    assert_eq!(m.weight(5, 5), 9999.0);
    assert!((0..17).all(|i| (0..17).all(|j| !m.is_forbidden(i, j))));
    assert_eq!(held_karp(17, |a, b| m.edge_cost(a, b)), 39.0);
}

#[test]
fn trace_file_names() {
    assert_eq!(
        trace_file_name("br17", "idone-advanced", 4),
        "br17_idone-advanced_4.csv"
    );
    assert_eq!(
        parse_trace_file_name("binary-d100_rs_12.csv"),
        Some(("binary-d100".into(), "rs".into(), 12))
    );
    assert_eq!(
        parse_trace_file_name("my_problem_sa_0.csv"),
        Some(("my_problem".into(), "sa".into(), 0))
    );
    assert_eq!(parse_trace_file_name("summary.csv"), None);
    assert_eq!(parse_trace_file_name("a_b_x.csv"), None);
}

#[test]
fn traces_round_trip() {
    let instance = generate_convex_binary(7, &mut substream(3, Stream::Instance)).unwrap();
    let problem = ConvexBinaryProblem::new("bin", instance, true);
    for trace in [
        run_idone(
            &problem,
            &SolverConfig::new(ModelVariant::Advanced, 40, 3),
            &NullClock,
        )
        .unwrap(),
        run_random_search(&problem, 40, 3, &NullClock).unwrap(),
    ] {
        let mut buf = Vec::new();
        write_trace(&trace, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("iter,y,best_y,surrogate_min,time_ms,x0,x1,x2,x3,x4,x5,x6\n"));
        let back = read_trace(&buf[..], &trace.solver, &trace.problem, trace.seed).unwrap();
        assert_eq!(back, trace);
    }
}

fn trace_text(ys: &[f64], best: &[f64]) -> String {
    let mut s = String::from("iter,y,best_y,surrogate_min,time_ms,x0\n");
    for (k, (y, b)) in ys.iter().zip(best).enumerate() {
        s.push_str(&format!("{},{y},{b},,0,1\n", k + 1));
    }
    s
}

#[test]
fn trace_integrity() {
    let ok = trace_text(&[5.0, 4.0, 6.0, 3.0], &[5.0, 4.0, 4.0, 3.0]);
    let t = read_trace(ok.as_bytes(), "rs", "p", 0).unwrap();
    assert_eq!(t.best().unwrap().1, 3.0);

    let rising = trace_text(&[5.0, 4.0, 6.0], &[5.0, 4.0, 6.0]);
    let err = read_trace(rising.as_bytes(), "rs", "p", 0).unwrap_err();
    assert!(err.contains("increased"), "{err}");

    let wrong = trace_text(&[5.0, 4.0], &[5.0, 5.0]);
    assert!(read_trace(wrong.as_bytes(), "rs", "p", 0).is_err());

    let gap = "iter,y,best_y,surrogate_min,time_ms,x0\n1,1,1,,0,0\n3,1,1,,0,0\n";
    assert!(read_trace(gap.as_bytes(), "rs", "p", 0).is_err());
    let header = "iter,y,best,surrogate_min,time_ms\n1,1,1,,0\n";
    assert!(read_trace(header.as_bytes(), "rs", "p", 0).is_err());
    let empty = "iter,y,best_y,surrogate_min,time_ms,x0\n";
    assert!(read_trace(empty.as_bytes(), "rs", "p", 0).is_err());
    let text = "iter,y,best_y,surrogate_min,time_ms,x0\n1,abc,1,,0,0\n";
    assert!(read_trace(text.as_bytes(), "rs", "p", 0).is_err());
}

#[test]
fn instances_round_trip() {
    let instance = generate_convex_binary(9, &mut substream(11, Stream::Instance)).unwrap();
    let mut buf = Vec::new();
    write_instance(&instance, 11, &mut buf).unwrap();
    let (back, seed) = read_instance(&buf[..]).unwrap();
    assert_eq!(seed, 11);
    assert_eq!(back, instance);

    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("d,9\nseed,11\nx_opt,"));
    let broken = text.replacen("a,", "a,-5,", 1);
    assert!(read_instance(broken.as_bytes()).is_err());
    let asymmetric = "d,2\nseed,0\nx_opt,0,1\na,1,0.5\na,0.4,1\n";
    assert!(read_instance(asymmetric.as_bytes()).is_err());
}
