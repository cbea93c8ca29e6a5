//! Integer minimizer of the surrogate inside the box.
//!
//! The integer constraint is relaxed, the model is descended with a projected
//! BFGS method, and the relaxed point is rounded to the lattice. Because the zero-sets of all basis
//! functions pass through integer points only, rounding a local minimum does
//! not change the model value.

use alloc::vec;
use alloc::vec::Vec;

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::surrogate::SurrogateModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOptions {
    /// Iteration cap; `None` means `20 * d`.
    pub max_iters: Option<usize>,
    /// Stationarity threshold on the projected gradient norm.
    pub grad_tol: f64,
    /// A basis function with `|z_k| <= kink_tol` counts as sitting on its kink.
    pub kink_tol: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_iters: None,
            grad_tol: 1e-8,
            kink_tol: 1e-9,
        }
    }
}

impl MinimizeOptions {
    pub fn iteration_cap(&self, dim: usize) -> usize {
        self.max_iters.unwrap_or(20 * dim)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// The projected gradient vanished and no coordinate run leads downhill.
    Stationary,
    MaxIterations,
    /// The line search predicted a decrease that did not materialize in
    /// floating point.
    NumericalStall,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeResult {
    /// Rounded and clamped minimizer.
    pub x_star: Vec<i64>,
    pub x_relaxed: Vec<f64>,
    pub g_relaxed: f64,
    pub g_rounded: f64,
    pub iterations: usize,
    /// True only for [`Termination::Stationary`].
    pub converged: bool,
    pub termination: Termination,
}

/// Rounds half away from zero, then clamps into the box.
pub fn round_feasible(x: &[f64], bounds: &Bounds) -> Vec<i64> {
    x.iter()
        .zip(bounds.lower().iter().zip(bounds.upper()))
        .map(|(&v, (&l, &u))| (libm::round(v) as i64).clamp(l, u))
        .collect()
}

/// Dense inverse-Hessian approximation.
struct InverseHessian {
    h: Vec<f64>,
    n: usize,
    identity: bool,
    scratch: Vec<f64>,
}

impl InverseHessian {
    fn new(n: usize) -> Self {
        let mut h = Self {
            h: vec![0.0; n * n],
            n,
            identity: true,
            scratch: vec![0.0; n],
        };
        h.reset();
        h
    }

    fn reset(&mut self) {
        self.h.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.n {
            self.h[i * self.n + i] = 1.0;
        }
        self.identity = true;
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        if self.identity {
            out.copy_from_slice(v);
            return;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(&self.h[i * self.n..(i + 1) * self.n], v);
        }
    }

    /// BFGS update `H <- (I - r s y^T) H (I - r y s^T) + r s s^T`. Skipped
    /// when the curvature `s . y` is not positive, which on a piecewise-linear
    /// model happens whenever both ends lie on the same linear piece.
    fn update(&mut self, s: &[f64], y: &[f64]) {
        let sy = dot(s, y);
        if !(sy > 1e-12 * norm(s) * norm(y)) {
            return;
        }
        let n = self.n;
        let rho = 1.0 / sy;
        let mut hy = core::mem::take(&mut self.scratch);
        self.apply(y, &mut hy);
        let yhy = dot(y, &hy);
        let coef = (1.0 + rho * yhy) * rho;
        for i in 0..n {
            for j in 0..n {
                self.h[i * n + j] += coef * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
            }
        }
        self.scratch = hy;
        self.identity = false;
    }
}

/// `c * max(0, z + t a)` has right-derivative `c * one_sided(z, a)` at `t = 0`;
/// `z` within `eps` of zero is treated as exactly on the kink.
#[inline]
fn one_sided(z: f64, a: f64, eps: f64) -> f64 {
    if z > eps {
        a
    } else if z < -eps {
        0.0
    } else {
        a.max(0.0)
    }
}

/// Scratch state for one minimization: kink values at the current point and
/// the breakpoint list of the line search.
struct Workspace<'a> {
    model: &'a SurrogateModel,
    lower: &'a [i64],
    upper: &'a [i64],
    eps: f64,
    z: Vec<f64>,
    breaks: Vec<(f64, f64)>,
}

impl<'a> Workspace<'a> {
    fn new(model: &'a SurrogateModel, eps: f64) -> Self {
        Self {
            model,
            lower: model.bounds().lower(),
            upper: model.bounds().upper(),
            eps,
            z: vec![0.0; model.len()],
            breaks: Vec::new(),
        }
    }

    fn refresh(&mut self, x: &[f64]) {
        for (z, f) in self.z.iter_mut().zip(self.model.basis()) {
            *z = f.z(x);
        }
    }

    fn at_lower(&self, x: &[f64], i: usize) -> bool {
        x[i] <= self.lower[i] as f64 + self.eps
    }

    fn at_upper(&self, x: &[f64], i: usize) -> bool {
        x[i] >= self.upper[i] as f64 - self.eps
    }

    /// Drops components of `d` that would leave the box through an active bound.
    fn clip_to_box(&self, x: &[f64], d: &mut [f64]) {
        for i in 0..d.len() {
            if (d[i] < 0.0 && self.at_lower(x, i)) || (d[i] > 0.0 && self.at_upper(x, i)) {
                d[i] = 0.0;
            }
        }
    }

    /// Projects `v` onto the face of the kink arrangement containing `x`:
    /// coordinates joined by an active diagonal kink move together, a group
    /// holding an active axis kink stays put, and groups pressing against a
    /// bound are frozen.
    fn project_onto_face(&self, x: &[f64], v: &mut [f64]) {
        let n = v.len();
        let mut pinned = vec![false; n];
        let mut joined = vec![false; n];
        for (f, &z) in self.model.basis().iter().zip(&self.z) {
            if z.abs() > self.eps {
                continue;
            }
            match (f.first, f.second) {
                (Some((i, _)), None) => pinned[i] = true,
                (Some((i, _)), Some(_)) => joined[i] = true,
                _ => {}
            }
        }
        let mut start = 0;
        while start < n {
            let mut end = start;
            while end + 1 < n && joined[end + 1] {
                end += 1;
            }
            let block = start..=end;
            let mean = v[block.clone()].iter().sum::<f64>() / (end - start + 1) as f64;
            let frozen = block.clone().any(|i| {
                pinned[i]
                    || (mean < 0.0 && self.at_lower(x, i))
                    || (mean > 0.0 && self.at_upper(x, i))
            });
            let value = if frozen { 0.0 } else { mean };
            v[block].iter_mut().for_each(|e| *e = value);
            start = end + 1;
        }
    }

    /// Best direction of the form `+-(e_i + ... + e_k)` leaving the current
    /// face, by exact one-sided slope per unit length. Returns it only if it
    /// descends faster than `tol`.
    fn release_direction(&self, x: &[f64], tol: f64) -> Option<Vec<f64>> {
        let n = x.len();
        let eps = self.eps;
        // Index 0 is the `+` direction, 1 the `-` direction.
        let mut axis = [vec![0.0; n], vec![0.0; n]];
        // Diagonal at j with j inside the run and j-1 outside (run starts at j).
        let mut enter = [vec![0.0; n], vec![0.0; n]];
        // Diagonal at j with j-1 inside the run and j outside (run ends at j-1).
        let mut leave = [vec![0.0; n], vec![0.0; n]];
        for ((f, &c), &z) in self
            .model
            .basis()
            .iter()
            .zip(self.model.weights())
            .zip(&self.z)
        {
            if c == 0.0 {
                continue;
            }
            match (f.first, f.second) {
                (Some((i, s)), None) => {
                    let s = f64::from(s);
                    axis[0][i] += c * one_sided(z, s, eps);
                    axis[1][i] += c * one_sided(z, -s, eps);
                }
                (Some((i, s)), Some(_)) => {
                    let s = f64::from(s);
                    enter[0][i] += c * one_sided(z, s, eps);
                    enter[1][i] += c * one_sided(z, -s, eps);
                    leave[0][i] += c * one_sided(z, -s, eps);
                    leave[1][i] += c * one_sided(z, s, eps);
                }
                _ => {}
            }
        }
        let feasible = |k: usize, i: usize| {
            if k == 0 {
                !self.at_upper(x, i)
            } else {
                !self.at_lower(x, i)
            }
        };

        let mut best: Option<(f64, usize, usize, usize)> = None;
        for k in 0..2 {
            for first in 0..n {
                if !feasible(k, first) {
                    continue;
                }
                let mut slope = enter[k][first];
                for last in first..n {
                    if !feasible(k, last) {
                        break;
                    }
                    slope += axis[k][last];
                    let exit = if last + 1 < n {
                        leave[k][last + 1]
                    } else {
                        0.0
                    };
                    let rate = (slope + exit) / libm::sqrt((last - first + 1) as f64);
                    if best.map_or(true, |(b, ..)| rate < b) {
                        best = Some((rate, k, first, last));
                    }
                }
            }
        }
        let (rate, k, first, last) = best?;
        if rate >= -tol {
            return None;
        }
        let sign = if k == 0 { 1.0 } else { -1.0 };
        let mut d = vec![0.0; n];
        d[first..=last].iter_mut().for_each(|e| *e = sign);
        Some(d)
    }

    /// Exact minimization of the model along `x + t d`, `0 < t <= t_max`,
    /// where `t_max` is where the ray leaves the box. The model is piecewise
    /// linear in `t`; the slope only increases at hinges with positive weight
    /// and the search stops at the first breakpoint where it turns
    /// non-negative. `None` if `d` is not a descent direction.
    fn line_search(&mut self, x: &[f64], d: &[f64], tol: f64) -> Option<f64> {
        let mut t_max = f64::INFINITY;
        for i in 0..x.len() {
            if d[i] > 0.0 {
                t_max = t_max.min((self.upper[i] as f64 - x[i]) / d[i]);
            } else if d[i] < 0.0 {
                t_max = t_max.min((self.lower[i] as f64 - x[i]) / d[i]);
            }
        }
        if !(t_max > 0.0) || !t_max.is_finite() {
            return None;
        }

        self.breaks.clear();
        let mut slope = 0.0;
        for ((f, &c), &z) in self
            .model
            .basis()
            .iter()
            .zip(self.model.weights())
            .zip(&self.z)
        {
            let a = f.rate(d);
            if a == 0.0 || c == 0.0 {
                continue;
            }
            slope += c * one_sided(z, a, self.eps);
            if (z > self.eps && a < 0.0) || (z < -self.eps && a > 0.0) {
                let t = -z / a;
                if t < t_max {
                    self.breaks.push((t, c * a.abs()));
                }
            }
        }
        if !(slope < -tol * norm(d)) {
            return None;
        }
        self.breaks.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        for &(t, jump) in &self.breaks {
            slope += jump;
            if slope >= 0.0 {
                return Some(t);
            }
        }
        Some(t_max)
    }

    /// Clamps into the box and snaps coordinates within `eps` of a bound onto it.
    fn snap_to_box(&self, x: &mut [f64]) {
        for i in 0..x.len() {
            let (l, u) = (self.lower[i] as f64, self.upper[i] as f64);
            x[i] = x[i].clamp(l, u);
            if x[i] - l <= self.eps {
                x[i] = l;
            } else if u - x[i] <= self.eps {
                x[i] = u;
            }
        }
    }
}

/// Descends the relaxed model from `start` and rounds the result.
///
/// Each iteration picks a direction and minimizes exactly along it:
///
/// 1. the quasi-Newton direction `-H grad`, clipped at active bounds;
/// 2. if that is not downhill, steepest descent, first in the box and then
///    projected onto the current kink face (active kinks are treated like
///    active bounds);
/// 3. if the face is stationary, the steepest signed run of coordinates that
///    leaves it.
///
/// When none of these descends the point is reported as stationary.
pub fn minimize_model(
    model: &SurrogateModel,
    start: &[f64],
    opts: &MinimizeOptions,
) -> Result<MinimizeResult> {
    let bounds = model.bounds();
    let n = bounds.dim();
    if start.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: start.len(),
        });
    }
    if let Some(index) = start
        .iter()
        .zip(bounds.lower().iter().zip(bounds.upper()))
        .position(|(&v, (&l, &u))| !(l as f64 <= v && v <= u as f64))
    {
        return Err(Error::OutOfBounds { index });
    }
    if model.weights().iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("model weights"));
    }

    let mut ws = Workspace::new(model, opts.kink_tol);
    let mut x = start.to_vec();
    let mut fx = model.evaluate_unchecked(&x);
    if !fx.is_finite() {
        return Err(Error::NonFinite("model value"));
    }
    let mut grad = vec![0.0; n];
    model.gradient_into(&x, &mut grad);

    let mut hess = InverseHessian::new(n);
    let mut dir = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial_grad = vec![0.0; n];
    let mut step = vec![0.0; n];
    let mut grad_change = vec![0.0; n];

    let cap = opts.iteration_cap(n);
    let tol = opts.grad_tol;
    let mut iterations = 0;
    let mut termination = Termination::MaxIterations;

    while iterations < cap {
        ws.refresh(&x);

        let mut chosen = None;
        hess.apply(&grad, &mut dir);
        dir.iter_mut().for_each(|d| *d = -*d);
        ws.clip_to_box(&x, &mut dir);
        chosen = chosen.or_else(|| ws.line_search(&x, &dir, tol));

        if chosen.is_none() && !hess.identity {
            hess.reset();
            dir.iter_mut().zip(&grad).for_each(|(d, g)| *d = -g);
            ws.clip_to_box(&x, &mut dir);
            chosen = ws.line_search(&x, &dir, tol);
        }
        if chosen.is_none() {
            dir.iter_mut().zip(&grad).for_each(|(d, g)| *d = -g);
            ws.project_onto_face(&x, &mut dir);
            if norm(&dir) >= tol {
                chosen = ws.line_search(&x, &dir, tol);
            }
        }
        if chosen.is_none() {
            if let Some(run) = ws.release_direction(&x, tol) {
                dir = run;
                chosen = ws.line_search(&x, &dir, tol);
            }
        }
        let Some(t) = chosen else {
            termination = Termination::Stationary;
            break;
        };

        for i in 0..n {
            trial[i] = x[i] + t * dir[i];
        }
        ws.snap_to_box(&mut trial);
        let f_trial = model.evaluate_unchecked(&trial);
        if !(f_trial <= fx + 1e-12 * (1.0 + fx.abs())) {
            termination = Termination::NumericalStall;
            break;
        }

        model.gradient_into(&trial, &mut trial_grad);
        for i in 0..n {
            step[i] = trial[i] - x[i];
            grad_change[i] = trial_grad[i] - grad[i];
        }
        hess.update(&step, &grad_change);

        core::mem::swap(&mut x, &mut trial);
        core::mem::swap(&mut grad, &mut trial_grad);
        fx = f_trial;
        iterations += 1;
    }

    let x_star = round_feasible(&x, bounds);
    let rounded: Vec<f64> = x_star.iter().map(|&v| v as f64).collect();
    let g_rounded = model.evaluate_unchecked(&rounded);
    Ok(MinimizeResult {
        x_star,
        x_relaxed: x,
        g_relaxed: fx,
        g_rounded,
        iterations,
        converged: termination == Termination::Stationary,
        termination,
    })
}
