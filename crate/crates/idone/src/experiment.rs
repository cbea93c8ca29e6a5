//! Seeded replications of several solvers on one problem, run in parallel,
//! with per-run traces and aggregate tables written to an output directory.
//!
//! ```text
//! out/
//!   traces/{problem}_{solver}_{seed}.csv
//!   instances/{problem}_{seed}.csv        (convex-binary only)
//!   summary.csv                           (checkpoints 1, 2, 5, 10, ... and the budget)
//!   convergence.csv                       (every iteration)
//! ```

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use idone_core::problems::{
    four_city_matrix, generate_convex_binary, ConvexBinaryProblem, TspProblem,
};
use idone_core::rng::{substream, Stream};
use idone_core::{
    run_idone, run_random_search, run_simulated_annealing, Clock, MinimizeOptions, ModelVariant,
    NullClock, Problem, RunTrace, SaConfig, SolverConfig, SolverKind,
};
use rayon::prelude::*;

use crate::clock::WallClock;
use crate::error::{HarnessError, IoContext, Result};
use crate::instance::save_instance;
use crate::spec::{ExperimentSpec, ProblemKind};
use crate::trace::{load_trace, save_trace};
use crate::tsplib::read_tsplib;

/// One problem per replication; solvers within a replication share it.
#[derive(Debug, Clone)]
pub enum ProblemInstance {
    Binary(Arc<ConvexBinaryProblem>),
    Route(Arc<TspProblem>),
}

impl ProblemInstance {
    pub fn as_problem(&self) -> &(dyn Problem + Send + Sync) {
        match self {
            ProblemInstance::Binary(p) => p.as_ref(),
            ProblemInstance::Route(p) => p.as_ref(),
        }
    }
}

/// Identifier used in file names; never contains `_`.
pub fn problem_id(spec: &ExperimentSpec) -> Result<String> {
    Ok(match spec.problem {
        ProblemKind::ConvexBinary => format!("binary-d{}", spec.d.unwrap_or(0)),
        ProblemKind::Tsp4 => "tsp4".into(),
        ProblemKind::Tsp => {
            let path = spec
                .instance
                .as_ref()
                .ok_or_else(|| HarnessError::Spec("tsp needs `instance`".into()))?;
            read_tsplib(path)?.name.replace(['_', ' ', '/'], "-")
        }
    })
}

/// Builds the problem of every replication, in seed order.
pub fn build_problems(spec: &ExperimentSpec) -> Result<Vec<(u64, ProblemInstance)>> {
    let id = problem_id(spec)?;
    match spec.problem {
        ProblemKind::ConvexBinary => {
            let d = spec.d.unwrap_or(0);
            spec.seeds()
                .map(|seed| {
                    let instance =
                        generate_convex_binary(d, &mut substream(seed, Stream::Instance))?;
                    let problem = ConvexBinaryProblem::new(id.clone(), instance, spec.noise);
                    Ok((seed, ProblemInstance::Binary(Arc::new(problem))))
                })
                .collect()
        }
        ProblemKind::Tsp | ProblemKind::Tsp4 => {
            let matrix = match spec.problem {
                ProblemKind::Tsp4 => four_city_matrix(),
                _ => read_tsplib(spec.instance.as_deref().expect("validated"))?.matrix,
            };
            let problem = Arc::new(TspProblem::new(
                id,
                matrix,
                spec.route_replications(),
                spec.route_noise_high(),
            )?);
            Ok(spec
                .seeds()
                .map(|s| (s, ProblemInstance::Route(problem.clone())))
                .collect())
        }
    }
}

/// Runs one solver on one problem with the settings of `spec`.
pub fn run_solver(
    spec: &ExperimentSpec,
    kind: SolverKind,
    problem: &dyn Problem,
    seed: u64,
    clock: &dyn Clock,
) -> idone_core::Result<RunTrace> {
    let idone = |variant| {
        let mut config = SolverConfig::new(variant, spec.budget, seed);
        config.lambda = spec.lambda;
        config.p_explore = spec.p_explore;
        config.minimize = MinimizeOptions {
            max_iters: spec.max_model_iters,
            ..MinimizeOptions::default()
        };
        run_idone(problem, &config, clock)
    };
    match kind {
        SolverKind::IdoneBasic => idone(ModelVariant::Basic),
        SolverKind::IdoneAdvanced => idone(ModelVariant::Advanced),
        SolverKind::RandomSearch => run_random_search(problem, spec.budget, seed, clock),
        SolverKind::SimulatedAnnealing => {
            let (t0, tf) = spec.sa_schedule();
            run_simulated_annealing(problem, &SaConfig::new(t0, tf, spec.budget, seed), clock)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub problem: String,
    pub solver: String,
    pub checkpoint: usize,
    pub n_runs: usize,
    pub best_min: f64,
    pub best_median: f64,
    pub best_mean: f64,
    pub best_max: f64,
    pub time_total_s_median: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub solver: String,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub summary: Vec<SummaryRow>,
    pub convergence: Vec<SummaryRow>,
    pub failures: Vec<RunFailure>,
    pub traces: Vec<RunTrace>,
}

#[derive(Debug, Clone)]
pub struct SummaryReport {
    pub summary: Vec<SummaryRow>,
    pub convergence: Vec<SummaryRow>,
    /// Trace files that were skipped, with the reason.
    pub skipped: Vec<(PathBuf, String)>,
}

/// `1, 2, 5, 10, 20, 50, ...` up to `budget`, always ending at `budget`.
pub fn checkpoint_grid(budget: usize) -> Vec<usize> {
    let mut grid = Vec::new();
    let mut scale = 1;
    'outer: loop {
        for m in [1, 2, 5] {
            let c = m * scale;
            if c >= budget {
                break 'outer;
            }
            grid.push(c);
        }
        scale *= 10;
    }
    grid.push(budget);
    grid
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn solver_rank(id: &str) -> usize {
    SolverKind::ALL
        .iter()
        .position(|k| k.id() == id)
        .unwrap_or(SolverKind::ALL.len())
}

/// Statistics at each checkpoint, grouped by `(problem, solver)`. Groups are
/// ordered by problem then by solver, runs within a group by seed, so the
/// result depends only on the set of traces. Runs shorter than the longest
/// run in their group are incomplete and left out; they are returned
/// separately.
pub fn summary_table<'a>(
    traces: impl IntoIterator<Item = &'a RunTrace>,
    every_iteration: bool,
) -> (Vec<SummaryRow>, Vec<&'a RunTrace>) {
    let mut traces: Vec<&RunTrace> = traces.into_iter().filter(|t| !t.is_empty()).collect();
    traces.sort_by(|a, b| {
        (&a.problem, solver_rank(&a.solver), &a.solver, a.seed).cmp(&(
            &b.problem,
            solver_rank(&b.solver),
            &b.solver,
            b.seed,
        ))
    });
    let mut rows = Vec::new();
    let mut incomplete = Vec::new();
    for group in traces.chunk_by(|a, b| a.problem == b.problem && a.solver == b.solver) {
        let budget = group.iter().map(|t| t.len()).max().unwrap_or(0);
        let (complete, short): (Vec<&RunTrace>, Vec<&RunTrace>) =
            group.iter().partition(|t| t.len() == budget);
        incomplete.extend(short);
        let grid: Vec<usize> = if every_iteration {
            (1..=budget).collect()
        } else {
            checkpoint_grid(budget)
        };
        for &c in &grid {
            let mut best: Vec<f64> = complete.iter().map(|t| t.records[c - 1].best_y).collect();
            let mean = best.iter().sum::<f64>() / best.len() as f64;
            best.sort_by(f64::total_cmp);
            let mut times: Vec<f64> = complete
                .iter()
                .map(|t| t.records[..c].iter().map(|r| r.time_ms).sum::<f64>() / 1e3)
                .collect();
            times.sort_by(f64::total_cmp);
            rows.push(SummaryRow {
                problem: group[0].problem.clone(),
                solver: group[0].solver.clone(),
                checkpoint: c,
                n_runs: best.len(),
                best_min: best[0],
                best_median: median(&best),
                best_mean: mean,
                best_max: best[best.len() - 1],
                time_total_s_median: median(&times),
            });
        }
    }
    (rows, incomplete)
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "problem",
        "solver",
        "checkpoint",
        "n_runs",
        "best_min",
        "best_median",
        "best_mean",
        "best_max",
        "time_total_s_median",
    ])?;
    for r in rows {
        w.write_record([
            r.problem.clone(),
            r.solver.clone(),
            r.checkpoint.to_string(),
            r.n_runs.to_string(),
            r.best_min.to_string(),
            r.best_median.to_string(),
            r.best_mean.to_string(),
            r.best_max.to_string(),
            r.time_total_s_median.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn save_summary(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let file = File::create(path).at(path)?;
    write_summary(rows, BufWriter::new(file)).at(path)
}

pub fn traces_dir(out: &Path) -> PathBuf {
    out.join("traces")
}

/// Runs every `(replication, solver)` pair on `workers` threads (all cores if
/// `None`) and writes the output tree under `out`. A failing run is reported
/// in the result and does not stop the others.
pub fn run_experiment(
    spec: &ExperimentSpec,
    out: &Path,
    workers: Option<usize>,
) -> Result<ExperimentReport> {
    spec.validate()?;
    let kinds = spec.solver_kinds()?;
    let problems = build_problems(spec)?;

    let trace_dir = traces_dir(out);
    fs::create_dir_all(&trace_dir).at(&trace_dir)?;
    if spec.problem == ProblemKind::ConvexBinary {
        let dir = out.join("instances");
        fs::create_dir_all(&dir).at(&dir)?;
        for (seed, problem) in &problems {
            if let ProblemInstance::Binary(p) = problem {
                let path = dir.join(format!("{}_{seed}.csv", p.id()));
                save_instance(p.instance(), *seed, &path)?;
            }
        }
    }

    let jobs: Vec<(u64, &ProblemInstance, SolverKind)> = problems
        .iter()
        .flat_map(|(seed, p)| kinds.iter().map(move |&k| (*seed, p, k)))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| HarnessError::Spec(format!("cannot start {workers:?} workers: {e}")))?;

    let outcomes: Vec<std::result::Result<RunTrace, RunFailure>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(seed, problem, kind)| {
                let fail = |message: String| RunFailure {
                    solver: kind.id().to_string(),
                    seed,
                    message,
                };
                let trace = if spec.timing {
                    run_solver(spec, kind, problem.as_problem(), seed, &WallClock::new())
                } else {
                    run_solver(spec, kind, problem.as_problem(), seed, &NullClock)
                }
                .map_err(|e| fail(e.to_string()))?;
                save_trace(&trace, &trace_dir).map_err(|e| fail(e.to_string()))?;
                Ok(trace)
            })
            .collect()
    });

    let mut traces = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(t) => traces.push(t),
            Err(f) => failures.push(f),
        }
    }
    let (summary, _) = summary_table(&traces, false);
    let (convergence, _) = summary_table(&traces, true);
    save_summary(&summary, &out.join("summary.csv"))?;
    save_summary(&convergence, &out.join("convergence.csv"))?;
    Ok(ExperimentReport {
        summary,
        convergence,
        failures,
        traces,
    })
}

/// Recomputes the tables from the trace files under `dir` (or `dir/traces`
/// if that exists). Files that fail to parse or fail the integrity check are
/// skipped and listed.
pub fn summarize(dir: &Path) -> Result<SummaryReport> {
    let nested = traces_dir(dir);
    let dir = if nested.is_dir() {
        nested
    } else {
        dir.to_path_buf()
    };
    let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
        .at(&dir)?
        .map(|e| e.map(|e| e.path()).at(&dir))
        .collect::<Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e == "csv"));
    paths.sort();

    let mut traces = Vec::new();
    let mut skipped = Vec::new();
    for path in paths {
        match load_trace(&path) {
            Ok(t) => traces.push((path, t)),
            Err(e) => skipped.push((path, e.to_string())),
        }
    }
    let (summary, incomplete) = summary_table(traces.iter().map(|(_, t)| t), false);
    for t in incomplete {
        let path = traces
            .iter()
            .find(|(_, u)| std::ptr::eq(t, u))
            .map(|(p, _)| p.clone());
        skipped.push((
            path.unwrap_or_default(),
            format!("incomplete run: {} evaluations", t.len()),
        ));
    }
    let (convergence, _) = summary_table(traces.iter().map(|(_, t)| t), true);
    Ok(SummaryReport {
        summary,
        convergence,
        skipped,
    })
}

pub fn save_summary_report(report: &SummaryReport, dir: &Path) -> Result<()> {
    save_summary(&report.summary, &dir.join("summary.csv"))?;
    save_summary(&report.convergence, &dir.join("convergence.csv"))
}
