use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use idone::dump::{
    fit_model, grid, max_residual, measure_lattice, write_basis, write_grid, write_lattice,
};
use idone::experiment::{build_problems, save_summary_report};
use idone::instance::load_instance;
use idone::spec::{ExperimentSpec, ProblemKind};
use idone::tsplib::read_tsplib;
use idone::{run_experiment, summarize};
use idone_core::{ModelVariant, SolverKind};

#[derive(Parser)]
#[command(
    name = "idone",
    version,
    about = "Surrogate-based integer optimization experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment spec and write traces and summaries.
    Run {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override `base_seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Override `budget`.
        #[arg(long)]
        budget: Option<usize>,
        /// Worker threads; all cores by default.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Recompute summary tables from a directory of traces.
    Summarize {
        /// Experiment output directory or a directory of trace files.
        dir: PathBuf,
        /// Where to write summary.csv and convergence.csv; defaults to `dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit both model variants on every lattice point of a two-variable
    /// problem and write grid, lattice and basis dumps.
    DumpModel {
        /// Spec naming the problem; the 4-city route if absent.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List problem kinds and solver ids.
    ListProblems,
    /// Check a TSPLIB file or a quadratic instance CSV.
    ValidateInstance { path: PathBuf },
}

fn load_spec(
    path: &Path,
    seed: Option<u64>,
    budget: Option<usize>,
) -> anyhow::Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::load(path)?;
    if let Some(s) = seed {
        spec.base_seed = s;
    }
    if let Some(b) = budget {
        spec.budget = b;
    }
    spec.validate()?;
    Ok(spec)
}

fn run(
    spec: &Path,
    out: &Path,
    seed: Option<u64>,
    budget: Option<usize>,
    workers: Option<usize>,
) -> anyhow::Result<bool> {
    let spec = load_spec(spec, seed, budget)?;
    if workers == Some(0) {
        bail!("--workers must be at least 1");
    }
    let report = run_experiment(&spec, out, workers)?;
    for f in &report.failures {
        eprintln!("run {} seed {} failed: {}", f.solver, f.seed, f.message);
    }
    for row in report
        .summary
        .iter()
        .filter(|r| r.checkpoint == spec.budget)
    {
        println!(
            "{} {:>15} n={} median {} mean {} min {} max {}",
            row.problem,
            row.solver,
            row.n_runs,
            row.best_median,
            row.best_mean,
            row.best_min,
            row.best_max
        );
    }
    println!("wrote {} traces to {}", report.traces.len(), out.display());
    Ok(report.failures.is_empty())
}

fn summarize_cmd(dir: &Path, out: Option<&Path>) -> anyhow::Result<bool> {
    let report = summarize(dir)?;
    for (path, reason) in &report.skipped {
        eprintln!("skipped {}: {reason}", path.display());
    }
    let out = out.unwrap_or(dir);
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    save_summary_report(&report, out)?;
    println!(
        "{} summary rows written to {}",
        report.summary.len(),
        out.display()
    );
    Ok(report.skipped.is_empty())
}

fn dump_model(spec: Option<&Path>, out: &Path, step: f64, seed: Option<u64>) -> anyhow::Result<()> {
    let spec = match spec {
        Some(path) => load_spec(path, seed, None)?,
        None => ExperimentSpec::from_toml("problem = \"tsp4\"\nbudget = 1\n", Path::new("."))?,
    };
    let seed = seed.unwrap_or(spec.base_seed);
    let (_, instance) = build_problems(&spec)?
        .into_iter()
        .next()
        .context("no replications")?;
    let problem = instance.as_problem();
    if problem.dim() != 2 {
        bail!(
            "dump-model needs a two-variable problem, {} has {}",
            problem.id(),
            problem.dim()
        );
    }
    let measurements = measure_lattice(problem, seed)?;
    let basic = fit_model(problem, ModelVariant::Basic, spec.lambda, &measurements)?;
    let advanced = fit_model(problem, ModelVariant::Advanced, spec.lambda, &measurements)?;

    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let create = |name: &str| -> anyhow::Result<BufWriter<File>> {
        let path = out.join(name);
        Ok(BufWriter::new(
            File::create(&path).with_context(|| format!("creating {}", path.display()))?,
        ))
    };
    write_grid(&grid(&basic, &advanced, step)?, create("grid.csv")?)?;
    write_lattice(&measurements, &basic, &advanced, create("lattice.csv")?)
        .map_err(|e| anyhow::anyhow!(e))?;
    write_basis(&basic, create("basis_basic.csv")?)?;
    write_basis(&advanced, create("basis_advanced.csv")?)?;
    println!(
        "{}: {} lattice points, max residual basic {} advanced {}",
        problem.id(),
        measurements.len(),
        max_residual(&basic, &measurements),
        max_residual(&advanced, &measurements)
    );
    Ok(())
}

fn validate_instance(path: &Path) -> anyhow::Result<()> {
    let is_csv = path.extension().is_some_and(|e| e == "csv");
    if is_csv {
        let (inst, seed) = load_instance(path)?;
        println!(
            "quadratic instance: d = {}, seed = {seed}, matrix symmetric positive definite",
            inst.dim()
        );
    } else {
        let inst = read_tsplib(path)?;
        let m = &inst.matrix;
        let n = m.n();
        let forbidden = (0..n * n).filter(|k| m.is_forbidden(k / n, k % n)).count();
        let off_diagonal = (0..n * n)
            .filter(|k| k / n != k % n && m.is_forbidden(k / n, k % n))
            .count();
        println!(
            "{}: {n} cities, {forbidden} forbidden entries ({off_diagonal} off the diagonal), {} variables",
            inst.name,
            n - 2
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            spec,
            out,
            seed,
            budget,
            workers,
        } => run(&spec, &out, seed, budget, workers),
        Command::Summarize { dir, out } => summarize_cmd(&dir, out.as_deref()),
        Command::DumpModel {
            spec,
            out,
            step,
            seed,
        } => dump_model(spec.as_deref(), &out, step, seed).map(|_| true),
        Command::ListProblems => {
            for kind in ProblemKind::ALL {
                println!("{:<14} {}", kind.id(), kind.description());
            }
            let solvers: Vec<&str> = SolverKind::ALL.iter().map(|k| k.id()).collect();
            println!("solvers: {}", solvers.join(", "));
            Ok(true)
        }
        Command::ValidateInstance { path } => validate_instance(&path).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
