//! Reproducibility file for generated quadratic instances.
//!
//! ```text
//! d,3
//! seed,7
//! x_opt,0,1,1
//! a,1.2,0.3,0.1
//! a,0.3,1.5,0.2
//! a,0.1,0.2,1.1
//! ```

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use idone_core::problems::QuadraticInstance;

use crate::error::{HarnessError, IoContext, Result};

pub fn write_instance<W: Write>(
    instance: &QuadraticInstance,
    seed: u64,
    out: W,
) -> csv::Result<()> {
    let d = instance.dim();
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    w.write_record(["d".to_string(), d.to_string()])?;
    w.write_record(["seed".to_string(), seed.to_string()])?;
    let mut row = vec!["x_opt".to_string()];
    row.extend(instance.optimum().iter().map(|v| v.to_string()));
    w.write_record(&row)?;
    for i in 0..d {
        row.clear();
        row.push("a".into());
        row.extend(
            instance.matrix()[i * d..(i + 1) * d]
                .iter()
                .map(|v| v.to_string()),
        );
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_instance(instance: &QuadraticInstance, seed: u64, path: &Path) -> Result<()> {
    let file = File::create(path).at(path)?;
    write_instance(instance, seed, BufWriter::new(file)).at(path)
}

/// Parses and re-validates (symmetry, positive definiteness, binary optimum).
pub fn read_instance<R: Read>(input: R) -> Result<(QuadraticInstance, u64), String> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let rows = r
        .records()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let field = |k: usize, tag: &str| -> Result<&csv::StringRecord, String> {
        match rows.get(k) {
            Some(row) if row.get(0) == Some(tag) => Ok(row),
            _ => Err(format!("row {} should start with {tag:?}", k + 1)),
        }
    };
    let scalar = |row: &csv::StringRecord| -> Result<u64, String> {
        row.get(1)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| format!("bad value in {:?} row", &row[0]))
    };
    let d = scalar(field(0, "d")?)? as usize;
    let seed = scalar(field(1, "seed")?)?;
    let x_row = field(2, "x_opt")?;
    if x_row.len() != d + 1 {
        return Err(format!(
            "x_opt has {} entries, expected {d}",
            x_row.len() - 1
        ));
    }
    let x_opt = x_row
        .iter()
        .skip(1)
        .map(|v| {
            v.parse::<i64>()
                .map_err(|_| format!("bad x_opt entry {v:?}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if rows.len() != d + 3 {
        return Err(format!(
            "expected {d} matrix rows, found {}",
            rows.len().saturating_sub(3)
        ));
    }
    let mut a = Vec::with_capacity(d * d);
    for i in 0..d {
        let row = field(3 + i, "a")?;
        if row.len() != d + 1 {
            return Err(format!(
                "matrix row {} has {} entries, expected {d}",
                i + 1,
                row.len() - 1
            ));
        }
        for v in row.iter().skip(1) {
            a.push(
                v.parse::<f64>()
                    .map_err(|_| format!("bad matrix entry {v:?}"))?,
            );
        }
    }
    let instance = QuadraticInstance::new(a, x_opt).map_err(|e| e.to_string())?;
    Ok((instance, seed))
}

pub fn load_instance(path: &Path) -> Result<(QuadraticInstance, u64)> {
    let file = File::open(path).at(path)?;
    read_instance(file).map_err(|message| HarnessError::Instance {
        path: path.to_path_buf(),
        message,
    })
}
