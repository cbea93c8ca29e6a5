//! Per-run trace files: `iter,y,best_y,surrogate_min,time_ms,x0,...,x{d-1}`,
//! one row per evaluation, named `{problem}_{solver}_{seed}.csv`.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use idone_core::solver::IterationRecord;
use idone_core::RunTrace;

use crate::error::{HarnessError, IoContext, Result};

pub fn trace_file_name(problem: &str, solver: &str, seed: u64) -> String {
    format!("{problem}_{solver}_{seed}.csv")
}

/// Splits a trace file name back into `(problem, solver, seed)`. Solver ids
/// contain no underscore, so everything before the last two fields is the
/// problem.
pub fn parse_trace_file_name(name: &str) -> Option<(String, String, u64)> {
    let stem = name.strip_suffix(".csv")?;
    let (rest, seed) = stem.rsplit_once('_')?;
    let (problem, solver) = rest.rsplit_once('_')?;
    if problem.is_empty() || solver.is_empty() {
        return None;
    }
    Some((problem.to_string(), solver.to_string(), seed.parse().ok()?))
}

pub fn write_trace<W: Write>(trace: &RunTrace, out: W) -> csv::Result<()> {
    let dim = trace.records.first().map_or(0, |r| r.x.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = ["iter", "y", "best_y", "surrogate_min", "time_ms"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((0..dim).map(|i| format!("x{i}")));
    w.write_record(&header)?;
    let mut row = Vec::with_capacity(header.len());
    for rec in &trace.records {
        row.clear();
        row.push(rec.iter.to_string());
        row.push(rec.y.to_string());
        row.push(rec.best_y.to_string());
        row.push(rec.surrogate_min.map(|v| v.to_string()).unwrap_or_default());
        row.push(rec.time_ms.to_string());
        row.extend(rec.x.iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_trace(trace: &RunTrace, dir: &Path) -> Result<PathBuf> {
    let path = dir.join(trace_file_name(&trace.problem, &trace.solver, trace.seed));
    let file = File::create(&path).at(&path)?;
    write_trace(trace, BufWriter::new(file)).at(&path)?;
    Ok(path)
}

/// Reads a trace back and checks its integrity: consecutive `iter` from 1,
/// `best_y` equal to the running minimum of `y` (so never increasing), and a
/// constant number of coordinates. `best_x` is reconstructed from the rows.
pub fn read_trace<R: Read>(
    input: R,
    solver: &str,
    problem: &str,
    seed: u64,
) -> Result<RunTrace, String> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(|e| e.to_string())?.clone();
    let fixed = ["iter", "y", "best_y", "surrogate_min", "time_ms"];
    if header.len() < fixed.len() || header.iter().zip(fixed).any(|(a, b)| a != b) {
        return Err(format!(
            "unexpected header {:?}",
            header.iter().collect::<Vec<_>>()
        ));
    }
    let dim = header.len() - fixed.len();
    for (i, name) in header.iter().skip(fixed.len()).enumerate() {
        if name != format!("x{i}") {
            return Err(format!("unexpected column {name:?}"));
        }
    }

    let mut trace = RunTrace::new(solver, problem, seed);
    let mut best: Option<(Vec<i64>, f64)> = None;
    for (k, row) in r.records().enumerate() {
        let row = row.map_err(|e| e.to_string())?;
        let line = k + 2;
        let num = |idx: usize| -> Result<f64, String> {
            row[idx].parse::<f64>().map_err(|_| {
                format!(
                    "line {line}: bad number {:?} in column {}",
                    &row[idx], &header[idx]
                )
            })
        };
        let iter: usize = row[0]
            .parse()
            .map_err(|_| format!("line {line}: bad iteration {:?}", &row[0]))?;
        if iter != k + 1 {
            return Err(format!("line {line}: iteration {iter}, expected {}", k + 1));
        }
        let y = num(1)?;
        let best_y = num(2)?;
        let surrogate_min = if row[3].is_empty() {
            None
        } else {
            Some(num(3)?)
        };
        let time_ms = num(4)?;
        let x = (0..dim)
            .map(|i| {
                row[fixed.len() + i]
                    .parse::<i64>()
                    .map_err(|_| format!("line {line}: bad coordinate {:?}", &row[fixed.len() + i]))
            })
            .collect::<Result<Vec<_>, _>>()?;

        let (best_x, expected) = match &best {
            Some((bx, by)) if *by <= y => (bx.clone(), *by),
            _ => (x.clone(), y),
        };
        if best_y != expected {
            let previous = best.as_ref().map(|b| b.1);
            if previous.is_some_and(|p| best_y > p) {
                return Err(format!(
                    "line {line}: best_y increased from {} to {best_y}",
                    previous.unwrap()
                ));
            }
            return Err(format!(
                "line {line}: best_y {best_y} is not the running minimum {expected}"
            ));
        }
        best = Some((best_x.clone(), best_y));
        trace.records.push(IterationRecord {
            iter,
            x,
            y,
            best_y,
            best_x,
            surrogate_min,
            time_ms,
        });
    }
    if trace.records.is_empty() {
        return Err("trace has no rows".into());
    }
    Ok(trace)
}

pub fn load_trace(path: &Path) -> Result<RunTrace> {
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or_default();
    let (problem, solver, seed) =
        parse_trace_file_name(name).ok_or_else(|| HarnessError::Trace {
            path: path.to_path_buf(),
            message: "file name is not {problem}_{solver}_{seed}.csv".into(),
        })?;
    let file = File::open(path).at(path)?;
    read_trace(file, &solver, &problem, seed).map_err(|message| HarnessError::Trace {
        path: path.to_path_buf(),
        message,
    })
}
