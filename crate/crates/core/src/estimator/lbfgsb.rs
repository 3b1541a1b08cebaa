//! Projected limited-memory BFGS for box-constrained minimization.
//!
//! Gradient-projection variant: coordinates pinned at a bound with the
//! gradient pushing outward form the active set; the two-loop recursion
//! runs on the free subspace and a backtracking Armijo line search
//! evaluates the objective at points projected back into the box.
//! Convergence is declared when the infinity norm of the projected
//! gradient drops below the tolerance. Deterministic: no randomness,
//! no dependence on thread scheduling.

use std::collections::VecDeque;

use crate::error::{Error, Result};

const ARMIJO_C1: f64 = 1e-4;
const CURVATURE_FLOOR: f64 = 1e-12;
const MAX_BACKTRACKS: u32 = 60;

#[derive(Debug, Clone)]
pub struct MinimizeOptions {
    pub max_iterations: usize,
    /// Tolerance on the infinity norm of the projected gradient.
    pub gradient_tolerance: f64,
    /// Number of (s, y) correction pairs retained.
    pub memory: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            max_iterations: 500,
            gradient_tolerance: 1e-8,
            memory: 8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinimizeOutcome<const N: usize> {
    pub x: [f64; N],
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub projected_gradient_norm: f64,
}

fn clamp<const N: usize>(x: &mut [f64; N], bounds: &[(f64, f64); N]) {
    for (xi, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *xi = xi.clamp(lo, hi);
    }
}

/// Zero the gradient components that point out of the box at an active bound.
fn project_gradient<const N: usize>(
    x: &[f64; N],
    g: &[f64; N],
    bounds: &[(f64, f64); N],
) -> [f64; N] {
    let mut pg = *g;
    for i in 0..N {
        let (lo, hi) = bounds[i];
        if (x[i] <= lo && g[i] > 0.0) || (x[i] >= hi && g[i] < 0.0) {
            pg[i] = 0.0;
        }
    }
    pg
}

fn inf_norm<const N: usize>(v: &[f64; N]) -> f64 {
    v.iter().fold(0.0, |m, &x| m.max(x.abs()))
}

fn dot<const N: usize>(a: &[f64; N], b: &[f64; N]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Two-loop recursion restricted to the free subspace: active coordinates
/// enter as zeros and leave as zeros, so the search direction never pushes
/// against an active bound.
fn lbfgs_direction<const N: usize>(
    pg: &[f64; N],
    history: &VecDeque<([f64; N], [f64; N], f64)>,
) -> [f64; N] {
    let mut q = *pg;
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let alpha = rho * dot(s, &q);
        for i in 0..N {
            q[i] -= alpha * y[i];
        }
        alphas.push(alpha);
    }
    // Initial Hessian scaling from the most recent pair.
    if let Some((s, y, _)) = history.back() {
        let yy = dot(y, y);
        if yy > 0.0 {
            let gamma = dot(s, y) / yy;
            for qi in q.iter_mut() {
                *qi *= gamma;
            }
        }
    }
    for ((s, y, rho), alpha) in history.iter().zip(alphas.into_iter().rev()) {
        let beta = rho * dot(y, &q);
        for i in 0..N {
            q[i] += (alpha - beta) * s[i];
        }
    }
    for qi in q.iter_mut() {
        *qi = -*qi;
    }
    q
}

/// Minimize `value_and_grad` over the box `bounds` starting from `x0`.
///
/// `value` must agree with the value component of `value_and_grad`; it is
/// used for the cheaper line-search probes. Errors with iterate context if
/// either callback produces a non-finite result.
pub fn minimize<const N: usize>(
    mut value: impl FnMut(&[f64; N]) -> f64,
    mut value_and_grad: impl FnMut(&[f64; N]) -> (f64, [f64; N]),
    x0: [f64; N],
    bounds: &[(f64, f64); N],
    options: &MinimizeOptions,
) -> Result<MinimizeOutcome<N>> {
    for (i, &(lo, hi)) in bounds.iter().enumerate() {
        if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
            return Err(Error::Parameter(format!(
                "bound {i} is empty: [{lo}, {hi}]"
            )));
        }
    }

    let nonfinite = |what: &'static str, iteration: usize, x: &[f64; N]| {
        let mut point = [f64::NAN; 3];
        for (p, &xi) in point.iter_mut().zip(x.iter()) {
            *p = xi;
        }
        Error::NonFinite {
            what,
            iteration,
            point,
        }
    };

    let mut x = x0;
    clamp(&mut x, bounds);
    let (mut fx, mut g) = value_and_grad(&x);
    if !fx.is_finite() {
        return Err(nonfinite("objective", 0, &x));
    }
    if g.iter().any(|gi| !gi.is_finite()) {
        return Err(nonfinite("gradient", 0, &x));
    }

    let mut history: VecDeque<([f64; N], [f64; N], f64)> = VecDeque::new();
    let mut pg = project_gradient(&x, &g, bounds);
    let mut pg_norm = inf_norm(&pg);

    for iteration in 0..options.max_iterations {
        if pg_norm <= options.gradient_tolerance {
            return Ok(MinimizeOutcome {
                x,
                value: fx,
                iterations: iteration,
                converged: true,
                projected_gradient_norm: pg_norm,
            });
        }

        let mut direction = lbfgs_direction(&pg, &history);
        // Keep the active set fixed along the step.
        for i in 0..N {
            if pg[i] == 0.0 && g[i] != 0.0 {
                direction[i] = 0.0;
            }
        }
        // Fall back to steepest descent if the quasi-Newton direction fails
        // the descent test (stale curvature pairs after an active-set change).
        if dot(&direction, &g) >= 0.0 {
            for i in 0..N {
                direction[i] = -pg[i];
            }
        }

        // Backtracking Armijo search on the projected path.
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let mut trial = x;
            for i in 0..N {
                trial[i] += step * direction[i];
            }
            clamp(&mut trial, bounds);
            let displacement: [f64; N] = std::array::from_fn(|i| trial[i] - x[i]);
            if inf_norm(&displacement) == 0.0 {
                break;
            }
            let f_trial = value(&trial);
            if !f_trial.is_finite() {
                return Err(nonfinite("objective", iteration, &trial));
            }
            if f_trial <= fx + ARMIJO_C1 * dot(&g, &displacement) {
                accepted = Some((trial, f_trial, displacement));
                break;
            }
            step *= 0.5;
        }

        let Some((x_next, f_next, s)) = accepted else {
            // No representable decrease remains; report the point reached.
            return Ok(MinimizeOutcome {
                x,
                value: fx,
                iterations: iteration,
                converged: pg_norm <= options.gradient_tolerance,
                projected_gradient_norm: pg_norm,
            });
        };

        let (f_check, g_next) = value_and_grad(&x_next);
        if !f_check.is_finite() {
            return Err(nonfinite("objective", iteration, &x_next));
        }
        if g_next.iter().any(|gi| !gi.is_finite()) {
            return Err(nonfinite("gradient", iteration, &x_next));
        }

        let y: [f64; N] = std::array::from_fn(|i| g_next[i] - g[i]);
        let sy = dot(&s, &y);
        if sy > CURVATURE_FLOOR * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if history.len() == options.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }

        x = x_next;
        fx = f_next;
        g = g_next;
        pg = project_gradient(&x, &g, bounds);
        pg_norm = inf_norm(&pg);
    }

    Ok(MinimizeOutcome {
        x,
        value: fx,
        iterations: options.max_iterations,
        converged: pg_norm <= options.gradient_tolerance,
        projected_gradient_norm: pg_norm,
    })
}
