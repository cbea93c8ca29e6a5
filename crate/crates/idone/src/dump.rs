//! Surrogate snapshots for two-variable problems: the model is fitted on every
//! lattice point and then sampled on a regular grid.

use std::io::Write;

use idone_core::rng::{substream, Stream};
use idone_core::surrogate::default_weights;
use idone_core::{ModelVariant, Problem, RlsState, SurrogateModel};

use crate::error::{HarnessError, Result};

/// Lattice points of the problem's box in row-major order (last coordinate
/// fastest) with one measurement each.
pub fn measure_lattice(problem: &dyn Problem, seed: u64) -> Result<Vec<(Vec<i64>, f64)>> {
    let bounds = problem.bounds();
    if bounds.lattice_size() > 1e6 {
        return Err(HarnessError::Spec(format!(
            "lattice of {} points is too large to enumerate",
            bounds.lattice_size()
        )));
    }
    let mut points = vec![Vec::new()];
    for (&l, &u) in bounds.lower().iter().zip(bounds.upper()) {
        points = points
            .into_iter()
            .flat_map(|p| {
                (l..=u).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    let mut noise = substream(seed, Stream::Noise);
    points
        .into_iter()
        .map(|x| {
            let y = problem.evaluate(&x, &mut noise)?;
            Ok((x, y))
        })
        .collect()
}

/// One RLS pass over `measurements` from the default weights.
pub fn fit_model(
    problem: &dyn Problem,
    variant: ModelVariant,
    lambda: f64,
    measurements: &[(Vec<i64>, f64)],
) -> Result<SurrogateModel> {
    let mut model = SurrogateModel::new(variant, problem.bounds().clone());
    let mut rls = RlsState::new(default_weights(model.len()), lambda)?;
    for (x, y) in measurements {
        rls.update(&model.activations_at(x)?, *y)?;
    }
    model.set_weights(rls.weights())?;
    Ok(model)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub x0: f64,
    pub x1: f64,
    pub basic: f64,
    pub advanced: f64,
}

/// Samples both models on `[l0, u0] x [l1, u1]` with spacing `step`.
pub fn grid(basic: &SurrogateModel, advanced: &SurrogateModel, step: f64) -> Result<Vec<GridRow>> {
    let bounds = basic.bounds();
    if bounds.dim() != 2 || advanced.bounds() != bounds {
        return Err(HarnessError::Spec(format!(
            "grid dumps need two variables, got {}",
            bounds.dim()
        )));
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(HarnessError::Spec(format!(
            "grid step must be positive, got {step}"
        )));
    }
    let axis = |i: usize| -> Vec<f64> {
        let (l, u) = (bounds.lower()[i] as f64, bounds.upper()[i] as f64);
        let n = ((u - l) / step + 1e-9).floor() as usize;
        (0..=n).map(|k| l + k as f64 * step).collect()
    };
    let (xs, ys) = (axis(0), axis(1));
    let mut rows = Vec::with_capacity(xs.len() * ys.len());
    for &x0 in &xs {
        for &x1 in &ys {
            let p = [x0, x1];
            rows.push(GridRow {
                x0,
                x1,
                basic: basic.evaluate(&p)?,
                advanced: advanced.evaluate(&p)?,
            });
        }
    }
    Ok(rows)
}

pub fn write_grid<W: Write>(rows: &[GridRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x0", "x1", "basic", "advanced"])?;
    for r in rows {
        w.write_record([r.x0, r.x1, r.basic, r.advanced].map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Measured value and both model values at each lattice point.
pub fn write_lattice<W: Write>(
    measurements: &[(Vec<i64>, f64)],
    basic: &SurrogateModel,
    advanced: &SurrogateModel,
    out: W,
) -> Result<(), Box<dyn std::error::Error + Send + Sync>> {
    let dim = basic.dim();
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
    header.extend(["y", "basic", "advanced"].map(String::from));
    w.write_record(&header)?;
    for (x, y) in measurements {
        let xr: Vec<f64> = x.iter().map(|&v| v as f64).collect();
        let mut row: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        row.push(y.to_string());
        row.push(basic.evaluate(&xr)?.to_string());
        row.push(advanced.evaluate(&xr)?.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// One line per basis function: `k,i1,s1,i2,s2,b,c_k`. Missing direction
/// entries are left empty.
pub fn write_basis<W: Write>(model: &SurrogateModel, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "i1", "s1", "i2", "s2", "b", "c_k"])?;
    let pair = |p: Option<(usize, i8)>| match p {
        Some((i, s)) => (i.to_string(), s.to_string()),
        None => (String::new(), String::new()),
    };
    for (k, (f, c)) in model.basis().iter().zip(model.weights()).enumerate() {
        let (i1, s1) = pair(f.first);
        let (i2, s2) = pair(f.second);
        w.write_record([
            k.to_string(),
            i1,
            s1,
            i2,
            s2,
            f.offset.to_string(),
            c.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Largest `|g(x) - y|` over the measurements.
pub fn max_residual(model: &SurrogateModel, measurements: &[(Vec<i64>, f64)]) -> f64 {
    measurements
        .iter()
        .map(|(x, y)| {
            let xr: Vec<f64> = x.iter().map(|&v| v as f64).collect();
            (model.evaluate(&xr).unwrap_or(f64::INFINITY) - y).abs()
        })
        .fold(0.0, f64::max)
}
