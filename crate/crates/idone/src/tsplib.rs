//! Explicit full-matrix instances in the TSPLIB text format.
//!
//! Only the keywords needed for such instances are understood: `NAME`, `TYPE`,
//! `COMMENT`, `DIMENSION`, `EDGE_WEIGHT_TYPE`, `EDGE_WEIGHT_FORMAT`,
//! `EDGE_WEIGHT_SECTION` and `EOF`.

use std::fs;
use std::path::Path;

use idone_core::problems::tsp::DEFAULT_INFINITY_THRESHOLD;
use idone_core::problems::DistanceMatrix;

use crate::error::{HarnessError, IoContext, Result};

#[derive(Debug, Clone)]
pub struct TsplibInstance {
    pub name: String,
    pub comment: Option<String>,
    pub matrix: DistanceMatrix,
}

pub fn read_tsplib(path: &Path) -> Result<TsplibInstance> {
    let text = fs::read_to_string(path).at(path)?;
    parse_tsplib_atsp(
        &text,
        &path.display().to_string(),
        DEFAULT_INFINITY_THRESHOLD,
    )
}

/// Parses `text`; entries `>= infinity` are marked forbidden. `origin` only
/// labels error messages.
pub fn parse_tsplib_atsp(text: &str, origin: &str, infinity: f64) -> Result<TsplibInstance> {
    let fail = |line: usize, message: String| HarnessError::Tsplib {
        path: origin.to_string(),
        line,
        message,
    };

    let mut name = None;
    let mut comment = None;
    let mut dimension: Option<usize> = None;
    let mut weights: Option<Vec<f64>> = None;
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));

    while let Some((no, line)) = lines.next() {
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        if line.starts_with("EDGE_WEIGHT_SECTION") {
            let n =
                dimension.ok_or_else(|| fail(no, "EDGE_WEIGHT_SECTION before DIMENSION".into()))?;
            let mut values = Vec::with_capacity(n * n);
            let mut last = no;
            while values.len() < n * n {
                let Some((no, line)) = lines.next() else {
                    return Err(fail(
                        last,
                        format!("expected {} weights, found {}", n * n, values.len()),
                    ));
                };
                last = no;
                if line == "EOF" {
                    return Err(fail(
                        no,
                        format!("expected {} weights, found {}", n * n, values.len()),
                    ));
                }
                for token in line.split_whitespace() {
                    let v: i64 = token
                        .parse()
                        .map_err(|_| fail(no, format!("weight {token:?} is not an integer")))?;
                    values.push(v as f64);
                }
            }
            if values.len() != n * n {
                return Err(fail(
                    last,
                    format!("expected {} weights, found {}", n * n, values.len()),
                ));
            }
            weights = Some(values);
            continue;
        }

        let (key, value) = line
            .split_once(':')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| fail(no, format!("expected `KEY: value`, got {line:?}")))?;
        match key {
            "NAME" => name = Some(value.to_string()),
            "COMMENT" => comment = Some(value.to_string()),
            "TYPE" => {
                if value != "ATSP" && value != "TSP" {
                    return Err(fail(no, format!("unsupported TYPE {value}")));
                }
            }
            "DIMENSION" => {
                let n: usize = value
                    .parse()
                    .map_err(|_| fail(no, format!("bad DIMENSION {value:?}")))?;
                if n < 3 {
                    return Err(fail(no, format!("DIMENSION must be at least 3, got {n}")));
                }
                dimension = Some(n);
            }
            "EDGE_WEIGHT_TYPE" => {
                if value != "EXPLICIT" {
                    return Err(fail(no, format!("unsupported EDGE_WEIGHT_TYPE {value}")));
                }
            }
            "EDGE_WEIGHT_FORMAT" => {
                if value != "FULL_MATRIX" {
                    return Err(fail(no, format!("unsupported EDGE_WEIGHT_FORMAT {value}")));
                }
            }
            other => return Err(fail(no, format!("unknown keyword {other}"))),
        }
    }

    let n = dimension.ok_or_else(|| fail(0, "missing DIMENSION".into()))?;
    let weights = weights.ok_or_else(|| fail(0, "missing EDGE_WEIGHT_SECTION".into()))?;
    let matrix = DistanceMatrix::with_threshold(n, weights, infinity)?;
    Ok(TsplibInstance {
        name: name.unwrap_or_else(|| "unnamed".into()),
        comment,
        matrix,
    })
}
